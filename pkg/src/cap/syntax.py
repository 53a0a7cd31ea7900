"""Terms and patterns: abstract syntax, positions, free names, substitution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union as TyUnion

from .mu_types import MuType


class Pattern:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Matchable(Pattern):
    """Pattern variable, bound by the enclosing branch."""

    name: str

    def __repr__(self) -> str:
        return f"^{self.name}"


@dataclass(frozen=True, slots=True)
class PatternConst(Pattern):
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class PatternCompound(Pattern):
    left: Pattern
    right: Pattern

    def __repr__(self) -> str:
        return f"({self.left!r} {self.right!r})"


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App(Term):
    fun: Term
    arg: Term

    def __repr__(self) -> str:
        return f"({self.fun!r} {self.arg!r})"


@dataclass(frozen=True, slots=True)
class Branch:
    """One alternative of an abstraction: pattern, matchable annotations, body."""

    pattern: Pattern
    bindings: tuple[tuple[str, MuType], ...]
    body: Term

    def binding_map(self) -> dict[str, MuType]:
        return dict(self.bindings)


@dataclass(frozen=True, slots=True)
class Abs(Term):
    branches: tuple[Branch, ...]

    def __post_init__(self) -> None:
        if not self.branches:
            raise ValueError("abstraction needs at least one branch")

    def __repr__(self) -> str:
        return "(" + " | ".join(repr(b.pattern) + " => " + repr(b.body) for b in self.branches) + ")"


Position = tuple[int, ...]

Substitution = dict[str, Term]


class InvalidPositionError(Exception):
    pass


def free_matchables(p: Pattern) -> frozenset[str]:
    match p:
        case Matchable(name):
            return frozenset((name,))
        case PatternConst():
            return frozenset()
        case PatternCompound(l, r):
            return free_matchables(l) | free_matchables(r)
    raise TypeError(f"not a pattern: {p!r}")


def is_linear(p: Pattern) -> bool:
    """No matchable name occurs twice."""

    def count(p: Pattern, seen: set[str]) -> bool:
        match p:
            case Matchable(name):
                if name in seen:
                    return False
                seen.add(name)
                return True
            case PatternConst():
                return True
            case PatternCompound(l, r):
                return count(l, seen) and count(r, seen)
        raise TypeError(f"not a pattern: {p!r}")

    return count(p, set())


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(name):
            return frozenset((name,))
        case Const():
            return frozenset()
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Abs(branches):
            out: frozenset[str] = frozenset()
            for b in branches:
                out |= free_vars(b.body) - free_matchables(b.pattern)
            return out
    raise TypeError(f"not a term: {t!r}")


def free_names(x: TyUnion[Term, Pattern]) -> frozenset[str]:
    """Free variables of a term, or free matchables of a pattern."""
    if isinstance(x, Pattern):
        return free_matchables(x)
    return free_vars(x)


def positions(x: TyUnion[Term, Pattern]) -> frozenset[Position]:
    """Positions descend only through applications and pattern compounds."""
    out: set[Position] = set()

    def go(x, at: Position) -> None:
        out.add(at)
        match x:
            case App(f, a):
                go(f, at + (1,))
                go(a, at + (2,))
            case PatternCompound(l, r):
                go(l, at + (1,))
                go(r, at + (2,))

    go(x, ())
    return frozenset(out)


def subterm_at(x: TyUnion[Term, Pattern], pos: Position) -> TyUnion[Term, Pattern]:
    for step in pos:
        if step not in (1, 2):
            raise InvalidPositionError(f"bad step {step} in {pos}")
        match x:
            case App(f, a) | PatternCompound(f, a):
                x = f if step == 1 else a
            case _:
                raise InvalidPositionError(f"no subterm at {pos}")
    return x


def _fresh_name(base: str, avoid: set[str]) -> str:
    if base not in avoid:
        return base
    n = 1
    while f"{base}_{n}" in avoid:
        n += 1
    return f"{base}_{n}"


def rename_matchable(p: Pattern, old: str, new: str) -> Pattern:
    match p:
        case Matchable(name):
            return Matchable(new) if name == old else p
        case PatternConst():
            return p
        case PatternCompound(l, r):
            return PatternCompound(rename_matchable(l, old, new), rename_matchable(r, old, new))
    raise TypeError(f"not a pattern: {p!r}")


def apply_substitution(sub: Substitution, t: Term) -> Term:
    """Simultaneous capture-avoiding replacement of free variables."""
    if not sub:
        return t
    match t:
        case Var(name):
            return sub.get(name, t)
        case Const():
            return t
        case App(f, a):
            return App(apply_substitution(sub, f), apply_substitution(sub, a))
        case Abs(branches):
            return Abs(tuple(_subst_branch(sub, b) for b in branches))
    raise TypeError(f"not a term: {t!r}")


def _subst_branch(sub: Substitution, b: Branch) -> Branch:
    binders = free_matchables(b.pattern)
    live = {x: u for x, u in sub.items() if x not in binders and x in free_vars(b.body)}
    if not live:
        return b
    range_vars: set[str] = set()
    for u in live.values():
        range_vars |= free_vars(u)
    captured = sorted(binders & range_vars)
    pattern, bindings, body = b.pattern, b.bindings, b.body
    if captured:
        avoid = set(range_vars) | set(free_vars(body)) | set(binders) | set(live)
        for old in captured:
            new = _fresh_name(old, avoid)
            avoid.add(new)
            pattern = rename_matchable(pattern, old, new)
            bindings = tuple((new if n == old else n, ty) for n, ty in bindings)
            body = apply_substitution({old: Var(new)}, body)
    return Branch(pattern, bindings, apply_substitution(live, body))


# --- Classification ---------------------------------------------------------


class Classification(NamedTuple):
    value: bool
    matchable_form: bool


def is_data_structure(t: Term) -> bool:
    """A constant applied to zero or more arbitrary arguments."""
    while isinstance(t, App):
        t = t.fun
    return isinstance(t, Const)


def is_value(t: Term) -> bool:
    """Variable or constant applied to values, or an abstraction."""
    match t:
        case Var() | Const() | Abs():
            return True
        case App(f, a):
            return not isinstance(f, Abs) and is_value(f) and is_value(a)
    raise TypeError(f"not a term: {t!r}")


def is_matchable_form(t: Term) -> bool:
    return isinstance(t, Abs) or is_data_structure(t)


def classify(t: Term) -> Classification:
    return Classification(value=is_value(t), matchable_form=is_matchable_form(t))


def term_size(t: Term) -> int:
    match t:
        case Var() | Const():
            return 1
        case App(f, a):
            return 1 + term_size(f) + term_size(a)
        case Abs(branches):
            return 1 + sum(_pattern_size(b.pattern) + term_size(b.body) for b in branches)
    raise TypeError(f"not a term: {t!r}")


def _pattern_size(p: Pattern) -> int:
    match p:
        case Matchable() | PatternConst():
            return 1
        case PatternCompound(l, r):
            return 1 + _pattern_size(l) + _pattern_size(r)
    raise TypeError(f"not a pattern: {p!r}")
