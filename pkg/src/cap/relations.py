"""Subtyping and equivalence of recursive union types, plus a truncation oracle.

Both relations are decided by memoized coinductive descent: a pair under
scrutiny is assumed to hold while its premises are checked, so cycles through
recursive types succeed (the greatest-fixpoint reading). The reachable set of
canonical component pairs is finite, which bounds every descent path.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mu_types import (
    SYM_ARROW,
    SYM_UNION,
    AppT,
    Arrow,
    Atom,
    Bullet,
    DataVar,
    FiniteTree,
    MuType,
    Node,
    TypeConst,
    TypeVar,
    canonical,
    tree_components,
    truncate,
    union_components,
)

MODE_SUB = "sub"
MODE_EQ = "eq"


class _Engine:
    """One relation query; owns its assumption set."""

    def __init__(self, mode: str):
        if mode not in (MODE_SUB, MODE_EQ):
            raise ValueError(f"bad mode {mode!r}")
        self.mode = mode
        self.assumed: set[tuple[MuType, MuType]] = set()

    def rel(self, a: MuType, b: MuType) -> bool:
        lefts = union_components(a)
        rights = union_components(b)
        if len(lefts) == 1 and len(rights) == 1:
            return self.component(lefts[0], rights[0])
        forward = all(any(self.component(l, r) for r in rights) for l in lefts)
        if self.mode == MODE_SUB or not forward:
            return forward
        return all(any(self.component(l, r) for l in lefts) for r in rights)

    def component(self, a: MuType, b: MuType) -> bool:
        key = (canonical(a), canonical(b))
        if key[0] == key[1]:
            return True
        if key in self.assumed:
            return True
        self.assumed.add(key)
        try:
            return self._structural(a, b)
        finally:
            self.assumed.discard(key)

    def _structural(self, a: MuType, b: MuType) -> bool:
        match a, b:
            case (TypeConst(x), TypeConst(y)):
                return x == y
            case (DataVar(x), DataVar(y)) | (TypeVar(x), TypeVar(y)):
                # Free variables are rigid: related only to themselves.
                return x == y
            case (AppT(l1, r1), AppT(l2, r2)):
                return self.rel(l1, l2) and self.rel(r1, r2)
            case (Arrow(d1, c1), Arrow(d2, c2)):
                if self.mode == MODE_SUB:
                    return self.rel(d2, d1) and self.rel(c1, c2)
                return self.rel(d1, d2) and self.rel(c1, c2)
        return False


def is_subtype(a: MuType, b: MuType) -> bool:
    return _Engine(MODE_SUB).rel(a, b)

def is_equivalent(a: MuType, b: MuType) -> bool:
    return _Engine(MODE_EQ).rel(a, b)


def finite_tree_rel(t1: FiniteTree, t2: FiniteTree, mode: str) -> bool:
    """Structural subtyping/equivalence of depth-bounded trees.

    The independent route for checking the coinductive engines: plain
    recursion on finite structures, memoized on shared subtrees only for
    speed.
    """
    if mode not in (MODE_SUB, MODE_EQ):
        raise ValueError(f"bad mode {mode!r}")
    memo: dict[tuple[int, int], bool] = {}
    comps: dict[int, list[FiniteTree]] = {}

    def components(t: FiniteTree) -> list[FiniteTree]:
        got = comps.get(id(t))
        if got is None:
            got = comps[id(t)] = tree_components(t)
        return got

    def rel(x: FiniteTree, y: FiniteTree) -> bool:
        key = (id(x), id(y))
        got = memo.get(key)
        if got is None:
            got = memo[key] = compute(x, y)
        return got

    def compute(x: FiniteTree, y: FiniteTree) -> bool:
        xs = components(x)
        ys = components(y)
        if len(xs) == 1 and len(ys) == 1:
            return structural(xs[0], ys[0])
        forward = all(any(rel(xi, yj) for yj in ys) for xi in xs)
        if mode == MODE_SUB or not forward:
            return forward
        return all(any(rel(xi, yj) for xi in xs) for yj in ys)

    def structural(x: FiniteTree, y: FiniteTree) -> bool:
        match x, y:
            case (Bullet(), Bullet()):
                return True
            case (Atom(n1), Atom(n2)):
                return n1 == n2
            case (Node(l1, a1, b1), Node(l2, a2, b2)) if l1 == l2 and l1 != SYM_UNION:
                if l1 == SYM_ARROW and mode == MODE_SUB:
                    return rel(a2, a1) and rel(b1, b2)
                return rel(a1, a2) and rel(b1, b2)
        return False

    return rel(t1, t2)


@dataclass
class OracleReport:
    """Engine verdict vs truncation verdicts for one pair of types."""

    mode: str
    engine: bool
    per_depth: list[bool]
    agree: bool
    refuting_depth: int | None = None
    inconclusive: bool = False
    searched_to: int = 0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "engine": self.engine,
            "per_depth": self.per_depth,
            "agree": self.agree,
            "refuting_depth": self.refuting_depth,
            "inconclusive": self.inconclusive,
            "searched_to": self.searched_to,
        }


def oracle_compare(a: MuType, b: MuType, kmax: int, mode: str, deep_limit: int | None = None) -> OracleReport:
    """Cross-check the engine against truncation verdicts for depths 0..kmax.

    A positive engine verdict must be matched by every truncation depth. A
    negative one must be witnessed by some refuting depth; the search extends
    to `deep_limit` (default twice kmax) before the pair is flagged
    inconclusive-but-consistent.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    engine = is_subtype(a, b) if mode == MODE_SUB else is_equivalent(a, b)
    per_depth = [finite_tree_rel(truncate(a, k), truncate(b, k), mode) for k in range(kmax + 1)]
    if engine:
        return OracleReport(mode, True, per_depth, agree=all(per_depth), searched_to=kmax)
    refuting = next((k for k, ok in enumerate(per_depth) if not ok), None)
    searched = kmax
    if refuting is None:
        limit = deep_limit if deep_limit is not None else 2 * kmax
        for k in range(kmax + 1, limit + 1):
            searched = k
            if not finite_tree_rel(truncate(a, k), truncate(b, k), mode):
                refuting = k
                break
    return OracleReport(
        mode,
        False,
        per_depth,
        agree=True,
        refuting_depth=refuting,
        inconclusive=refuting is None,
        searched_to=searched,
    )
