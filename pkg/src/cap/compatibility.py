"""Pattern subsumption, mismatching positions, and the branch compatibility check.

A later branch is only reachable for arguments the earlier ones reject, so a
pair of annotated patterns either has to be provably disjoint (some common
position where the two types admit no shared head symbol) or the later type
must be a subtype of the earlier one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mu_types import MuType, admitted_symbols
from .relations import is_subtype
from .syntax import (
    Matchable,
    Pattern,
    PatternCompound,
    PatternConst,
    Position,
    positions,
    subterm_at,
)


@dataclass(frozen=True)
class PatternJudgement:
    """An annotated, typed pattern as it occurs in an abstraction branch."""

    bindings: tuple[tuple[str, MuType], ...]
    pattern: Pattern
    type: MuType


def subsumes(p: Pattern, q: Pattern) -> bool:
    """Whether some substitution of matchables turns p into q."""
    match p, q:
        case (Matchable(), _):
            return True
        case (PatternConst(a), PatternConst(b)):
            return a == b
        case (PatternCompound(p1, p2), PatternCompound(q1, q2)):
            return subsumes(p1, q1) and subsumes(p2, q2)
    return False


def maximal_positions(pos_set: frozenset[Position]) -> frozenset[Position]:
    """Positions in the set with no proper extension in the set."""
    return frozenset(
        p
        for p in pos_set
        if not any(q != p and q[: len(p)] == p for q in pos_set)
    )


def mismatch_positions(p: Pattern, q: Pattern) -> frozenset[Position]:
    """Maximal common positions where subsumption of q by p breaks down."""
    common = positions(p) & positions(q)
    return frozenset(
        pos
        for pos in maximal_positions(common)
        if not subsumes(subterm_at(p, pos), subterm_at(q, pos))
    )


@dataclass(frozen=True)
class PairVerdict:
    """Outcome of checking one ordered pair of branches.

    `reason` is one of:
      - "subsumed":   p subsumes q, so the subtype obligation applies;
      - "overlap":    some mismatching position shares an admitted symbol,
                      so the subtype obligation applies;
      - "disjoint":   a mismatching position admits no common symbol.
    """

    compatible: bool
    reason: str
    mismatches: frozenset[Position]
    obligation: tuple[MuType, MuType] | None = None  # (later, earlier) subtype goal
    witness: Position | None = None  # disjointness witness
    shared_symbols: dict[Position, frozenset[str]] | None = None

    @property
    def requires_subtype(self) -> bool:
        return self.reason in ("subsumed", "overlap")


def compatible_pair(first: PatternJudgement, second: PatternJudgement, explain: bool = False) -> PairVerdict:
    """Check one ordered branch pair.

    With `explain`, the shared-symbol sets of every mismatching position are
    collected even after a disjointness witness settles the verdict.
    """
    p, a = first.pattern, first.type
    q, b = second.pattern, second.type
    if subsumes(p, q):
        holds = is_subtype(b, a)
        return PairVerdict(holds, "subsumed", frozenset(), obligation=(b, a))
    mismatches = mismatch_positions(p, q)
    witness: Position | None = None
    shared: dict[Position, frozenset[str]] = {}
    for pos in sorted(mismatches):
        common = admitted_symbols(a, pos) & admitted_symbols(b, pos)
        if explain:
            shared[pos] = common
        if not common:
            witness = pos
            if not explain:
                break
    if witness is not None:
        return PairVerdict(
            True,
            "disjoint",
            mismatches,
            witness=witness,
            shared_symbols=shared if explain else None,
        )
    holds = is_subtype(b, a)
    return PairVerdict(
        holds,
        "overlap",
        mismatches,
        obligation=(b, a),
        shared_symbols=shared if explain else None,
    )


@dataclass
class IncompatiblePair(Exception):
    first_index: int
    second_index: int
    verdict: PairVerdict

    def __str__(self) -> str:
        from .surface import pretty

        i, j = self.first_index + 1, self.second_index + 1
        later, earlier = self.verdict.obligation or (None, None)
        obligation = (
            f"'{pretty(later)}' must be a subtype of '{pretty(earlier)}'"
            if later is not None
            else "a subtype obligation fails"
        )
        if self.verdict.reason == "subsumed":
            return (
                f"branch {i} subsumes branch {j}, so {obligation}; it does not hold"
            )
        positions = sorted(self.verdict.mismatches)
        return (
            f"branches {i} and {j} may overlap (shared head symbols at positions {positions}), "
            f"so {obligation}; it does not hold"
        )


def check_branch_compatibility(judgements: list[PatternJudgement], explain: bool = False) -> None:
    """Require every ordered pair of branch judgements to be compatible."""
    for i in range(len(judgements)):
        for j in range(i + 1, len(judgements)):
            verdict = compatible_pair(judgements[i], judgements[j], explain=explain)
            if not verdict.compatible:
                raise IncompatiblePair(i, j, verdict)
