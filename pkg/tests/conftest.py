import pytest

from cap.surface import parse_term, parse_type


@pytest.fixture
def ty():
    return parse_type


@pytest.fixture
def tm():
    return parse_term


F_NAT = "rec a. Vl@Nat + a@a + Cons + Node + Nil"
LIST_A = "rec a. Nil + Cons@A@a"
TREE_A = "rec a. Nil + Node@A@a@a"
