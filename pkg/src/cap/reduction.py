"""Pattern matching, the beta rule, and a fuel-bounded call-by-value evaluator."""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    Abs,
    App,
    Branch,
    Const,
    Matchable,
    Pattern,
    PatternCompound,
    PatternConst,
    Substitution,
    Term,
    apply_substitution,
    is_matchable_form,
    is_value,
)


class MatchOutcome:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Success(MatchOutcome):
    substitution: tuple[tuple[str, Term], ...]

    def as_dict(self) -> Substitution:
        return dict(self.substitution)


@dataclass(frozen=True, slots=True)
class Fail(MatchOutcome):
    pass


@dataclass(frozen=True, slots=True)
class Wait(MatchOutcome):
    pass


FAIL = Fail()
WAIT = Wait()


class NonLinearPatternError(Exception):
    """Overlapping domains when combining successes; unreachable on linear patterns."""


def combine(first: MatchOutcome, second: MatchOutcome) -> MatchOutcome:
    """Disjoint union of outcomes; failure wins over an undetermined side."""
    if isinstance(first, Fail) or isinstance(second, Fail):
        return FAIL
    if isinstance(first, Success) and isinstance(second, Success):
        left = first.as_dict()
        right = second.as_dict()
        overlap = set(left) & set(right)
        if overlap:
            raise NonLinearPatternError(f"matchables bound twice: {sorted(overlap)}")
        return Success(tuple(left.items()) + tuple(right.items()))
    return WAIT


def match_pattern(p: Pattern, u: Term) -> MatchOutcome:
    """Match a term against a pattern.

    Clauses, first applicable wins: a matchable binds anything; equal
    constants succeed; a compound decomposes a compound in matchable form;
    any other term in matchable form fails; everything else is undetermined.
    """
    match p:
        case Matchable(name):
            return Success(((name, u),))
        case PatternConst(c) if isinstance(u, Const) and u.name == c:
            return Success(())
        case PatternCompound(pl, pr) if isinstance(u, App) and is_matchable_form(u):
            return combine(match_pattern(pl, u.fun), match_pattern(pr, u.arg))
    if is_matchable_form(u):
        return FAIL
    return WAIT


@dataclass
class StuckMatch(Exception):
    """Beta attempt that cannot fire: every branch failed, or one is undetermined."""

    abstraction: Abs
    argument: Term
    kind: str  # "all-fail" | "undecided"

    def __str__(self) -> str:
        return f"stuck match ({self.kind})"


def select_branch(branches: tuple[Branch, ...], u: Term) -> tuple[int, Substitution]:
    """First branch whose pattern matches, provided all earlier ones fail."""
    for index, branch in enumerate(branches):
        outcome = match_pattern(branch.pattern, u)
        if isinstance(outcome, Success):
            return index, outcome.as_dict()
        if isinstance(outcome, Wait):
            raise StuckMatch(Abs(branches), u, "undecided")
    raise StuckMatch(Abs(branches), u, "all-fail")


@dataclass
class StepInfo:
    branch_index: int
    n_branches: int
    argument: Term


def small_step(t: Term) -> tuple[Term, StepInfo | None] | None:
    """One weak call-by-value step; None when the term is a value.

    Function position first, then the argument, then beta. Raises StuckMatch
    when a beta attempt is decided against every branch or undecidable.
    """
    if is_value(t):
        return None
    assert isinstance(t, App)
    if not is_value(t.fun):
        stepped = small_step(t.fun)
        assert stepped is not None
        return App(stepped[0], t.arg), stepped[1]
    if not is_value(t.arg):
        stepped = small_step(t.arg)
        assert stepped is not None
        return App(t.fun, stepped[0]), stepped[1]
    # Both sides are values and the whole is not: the head must be an abstraction.
    assert isinstance(t.fun, Abs)
    index, sub = select_branch(t.fun.branches, t.arg)
    reduct = apply_substitution(sub, t.fun.branches[index].body)
    return reduct, StepInfo(index, len(t.fun.branches), t.arg)


@dataclass
class EvalResult:
    status: str  # "normal" | "stuck" | "out-of-fuel"
    term: Term
    steps: int
    stuck: StuckMatch | None = None
    trace: list[tuple[int, StepInfo]] = field(default_factory=list)


DEFAULT_FUEL = 100_000


def evaluate(t: Term, fuel: int = DEFAULT_FUEL, trace: bool = False) -> EvalResult:
    """Iterate small steps up to `fuel` times."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    events: list[tuple[int, StepInfo]] = []
    current = t
    for step in range(fuel):
        try:
            stepped = small_step(current)
        except StuckMatch as stuck:
            return EvalResult("stuck", current, step, stuck=stuck, trace=events)
        if stepped is None:
            return EvalResult("normal", current, step, trace=events)
        current, info = stepped
        if trace and info is not None:
            events.append((step + 1, info))
    return EvalResult("out-of-fuel", current, fuel, trace=events)
