from hypothesis import given, settings, strategies as st

from cap.generators import GenConfig, gen_type
from cap.mu_types import (
    BULLET,
    SYM_APP,
    SYM_ARROW,
    AppT,
    Atom,
    Node,
    Rec,
    Union,
    _admitted_symbols,
    admitted_symbols,
    canonical,
    cut_tree,
    head_unfold,
    truncate,
    union_components,
    union_of,
)
from cap.relations import is_equivalent
from cap.surface import parse_type

from conftest import F_NAT


def test_head_unfold_one_step():
    t = parse_type("rec a. Vl@a")
    assert head_unfold(t) == AppT(parse_type("Vl"), t)
    assert head_unfold(parse_type("Nil")) == parse_type("Nil")
    t2 = parse_type("rec a. Cons@a + Nil")
    unfolded = head_unfold(t2)
    assert unfolded == Union(AppT(parse_type("Cons"), t2), parse_type("Nil"))


def test_union_components_examples():
    assert union_components(parse_type("True + False")) == [parse_type("True"), parse_type("False")]
    arrow = parse_type("Nat -> Nat")
    assert union_components(arrow) == [arrow]
    fa = parse_type("rec a. Vl@Nat + a@a + Nil")
    comps = union_components(fa)
    assert comps == [parse_type("Vl@Nat"), AppT(fa, fa), parse_type("Nil")]
    # duplicates are kept
    assert len(union_components(parse_type("A + A"))) == 2


def test_canonical_alpha_equivalence():
    a = parse_type("rec a. Cons@a")
    b = parse_type("rec b. Cons@b")
    assert a != b
    assert canonical(a) == canonical(b)


def test_admitted_symbols_examples():
    assert admitted_symbols(parse_type("Vl@A"), (1,)) == {"Vl"}
    fa = parse_type(F_NAT)
    assert admitted_symbols(fa, ()) == {SYM_APP, "Cons", "Node", "Nil"}
    assert "Vl" not in admitted_symbols(fa, ())
    e = parse_type("Cons + Node + Nil")
    assert admitted_symbols(e, ()) == {"Cons", "Node", "Nil"}
    assert SYM_APP not in admitted_symbols(e, ())
    # exhausted positions contribute nothing
    assert admitted_symbols(parse_type("Nil"), (1, 2)) == frozenset()
    assert admitted_symbols(parse_type("A -> B"), ()) == {SYM_ARROW}


def test_admitted_symbols_invariant_under_unfold():
    fa = parse_type(F_NAT)
    for pos in [(), (1,), (2,), (1, 2)]:
        assert admitted_symbols(fa, pos) == admitted_symbols(head_unfold(fa), pos)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=50_000))
def test_admitted_symbols_guard_never_fires(seed):
    t = gen_type(GenConfig(seed=seed))
    for pos in [(), (1,), (2,), (1, 1), (2, 1)]:
        _, guard_hits = _admitted_symbols(t, pos)
        assert guard_hits == 0


def test_truncate_examples():
    assert truncate(parse_type(F_NAT), 0) == BULLET
    assert truncate(parse_type("Nat -> Nat"), 1) == Node(SYM_ARROW, BULLET, BULLET)
    stream = parse_type("rec a. Cons@a")
    assert truncate(stream, 2) == Node(SYM_APP, Atom("Cons"), Node(SYM_APP, BULLET, BULLET))


def test_truncate_union_does_not_consume_depth():
    t = parse_type("True + False")
    assert truncate(t, 1) == Node("+", Atom("True"), Atom("False"))


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=50_000), st.integers(min_value=0, max_value=5))
def test_truncate_prefix_property(seed, k):
    t = gen_type(GenConfig(seed=seed))
    assert cut_tree(truncate(t, k + 1), k) == truncate(t, k)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=50_000))
def test_union_components_reassemble_equivalently(seed):
    t = gen_type(GenConfig(seed=seed))
    assert is_equivalent(union_of(union_components(t)), t)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=50_000))
def test_components_have_structural_heads(seed):
    t = gen_type(GenConfig(seed=seed))
    for comp in union_components(t):
        assert not isinstance(comp, (Union, Rec))


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=50_000))
def test_admitted_symbols_nonempty_at_typed_pattern_positions(seed):
    import random

    from cap.conformance import pattern_of_type
    from cap.syntax import positions
    from cap.typecheck import type_pattern

    rng = random.Random(seed)
    ty = gen_type(GenConfig(seed=seed, max_type_nodes=8))
    pattern, bindings = pattern_of_type(rng, ty, [0])
    pattern_ty = type_pattern(dict(bindings), pattern)
    for pos in positions(pattern):
        assert admitted_symbols(pattern_ty, pos)


def test_pretty_of_tree_debug_forms():
    assert repr(truncate(parse_type("Nat -> Nat"), 1)) == f"({BULLET!r} -> {BULLET!r})"
