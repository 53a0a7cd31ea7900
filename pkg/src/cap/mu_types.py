"""Recursive union types: representation, unfolding, decomposition, truncation."""

from __future__ import annotations

from dataclasses import dataclass

# Sorts for recursion binders.
SORT_DATA = "data"
SORT_TYPE = "type"

# Constructor symbols as they appear in admitted-symbol sets and tree labels.
SYM_APP = "@"
SYM_ARROW = "->"
SYM_UNION = "+"

# Reserved atom marking truncation frontiers; never a legal user type constant.
BULLET_NAME = "•"


class MuType:
    """Base class for type expressions."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class TypeConst(MuType):
    """Atomic type constant, shared namespace with term constants."""

    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class DataVar(MuType):
    """Datatype-sorted recursion variable."""

    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class TypeVar(MuType):
    """Type-sorted recursion variable, or a free rigid variable."""

    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class AppT(MuType):
    """Type application D @ A; the left side must be datatype-sorted."""

    left: MuType
    right: MuType

    def __repr__(self) -> str:
        return f"({self.left!r}@{self.right!r})"


@dataclass(frozen=True, slots=True)
class Arrow(MuType):
    """Function type A -> B."""

    dom: MuType
    cod: MuType

    def __repr__(self) -> str:
        return f"({self.dom!r}->{self.cod!r})"


@dataclass(frozen=True, slots=True)
class Union(MuType):
    """Binary union A + B."""

    left: MuType
    right: MuType

    def __repr__(self) -> str:
        return f"({self.left!r}+{self.right!r})"


@dataclass(frozen=True, slots=True)
class Rec(MuType):
    """Recursive type binding `var` (with the given sort) in `body`."""

    var: str
    sort: str
    body: MuType

    def __repr__(self) -> str:
        return f"(rec {self.var}. {self.body!r})"


def union_of(components: list[MuType]) -> MuType:
    """Left-associated union of a nonempty component list."""
    if not components:
        raise ValueError("empty union")
    out = components[0]
    for c in components[1:]:
        out = Union(out, c)
    return out


def free_type_vars(t: MuType) -> frozenset[str]:
    match t:
        case TypeConst():
            return frozenset()
        case DataVar(name) | TypeVar(name):
            return frozenset((name,))
        case AppT(l, r) | Arrow(l, r) | Union(l, r):
            return free_type_vars(l) | free_type_vars(r)
        case Rec(var, _, body):
            return free_type_vars(body) - {var}
    raise TypeError(f"not a type: {t!r}")


def _fresh_name(base: str, avoid: frozenset[str]) -> str:
    if base not in avoid:
        return base
    n = 1
    while f"{base}_{n}" in avoid:
        n += 1
    return f"{base}_{n}"


def subst_type(t: MuType, name: str, replacement: MuType) -> MuType:
    """Capture-avoiding substitution of a recursion variable by a type."""
    match t:
        case TypeConst():
            return t
        case DataVar(n) | TypeVar(n):
            return replacement if n == name else t
        case AppT(l, r):
            return AppT(subst_type(l, name, replacement), subst_type(r, name, replacement))
        case Arrow(l, r):
            return Arrow(subst_type(l, name, replacement), subst_type(r, name, replacement))
        case Union(l, r):
            return Union(subst_type(l, name, replacement), subst_type(r, name, replacement))
        case Rec(var, sort, body):
            if var == name:
                return t
            if var in free_type_vars(replacement) and name in free_type_vars(body):
                fresh = _fresh_name(var, free_type_vars(replacement) | free_type_vars(body) | {name})
                fresh_var = DataVar(fresh) if sort == SORT_DATA else TypeVar(fresh)
                body = subst_type(body, var, fresh_var)
                var = fresh
            return Rec(var, sort, subst_type(body, name, replacement))
    raise TypeError(f"not a type: {t!r}")


def unfold_once(t: Rec) -> MuType:
    return subst_type(t.body, t.var, t)


def head_unfold(t: MuType, limit: int = 10_000) -> MuType:
    """Unfold recursion binders at the head until a structural constructor shows."""
    steps = 0
    while isinstance(t, Rec):
        t = unfold_once(t)
        steps += 1
        if steps > limit:
            raise RuntimeError("non-contractive type: head unfolding does not terminate")
    return t


def union_components(t: MuType) -> list[MuType]:
    """Split a type into its maximal union components, in order, duplicates kept.

    Every component has a non-union, non-recursive head.
    """
    t = head_unfold(t)
    if isinstance(t, Union):
        return union_components(t.left) + union_components(t.right)
    return [t]


def canonical(t: MuType) -> MuType:
    """Alpha-normal form: recursion binders renamed by binding depth.

    Structural equality of canonical forms coincides with alpha-equivalence,
    which makes them usable as memo keys.
    """

    def go(t: MuType, depth: int, env: dict[str, str]) -> MuType:
        match t:
            case TypeConst():
                return t
            case DataVar(n):
                return DataVar(env.get(n, n))
            case TypeVar(n):
                return TypeVar(env.get(n, n))
            case AppT(l, r):
                return AppT(go(l, depth, env), go(r, depth, env))
            case Arrow(l, r):
                return Arrow(go(l, depth, env), go(r, depth, env))
            case Union(l, r):
                return Union(go(l, depth, env), go(r, depth, env))
            case Rec(var, sort, body):
                new = f"#{depth}"
                return Rec(new, sort, go(body, depth + 1, {**env, var: new}))
        raise TypeError(f"not a type: {t!r}")

    return go(t, 0, {})


def is_datatype(t: MuType) -> bool:
    """Datatype sort test for validated types."""
    match t:
        case TypeConst() | DataVar() | AppT():
            return True
        case TypeVar() | Arrow():
            return False
        case Union(l, r):
            return is_datatype(l) and is_datatype(r)
        case Rec(_, sort, _):
            return sort == SORT_DATA
    raise TypeError(f"not a type: {t!r}")


def is_contractive(t: MuType) -> bool:
    """Every bound recursion variable occurs only under @ or -> within its binder."""

    def go(t: MuType, unguarded: frozenset[str]) -> bool:
        match t:
            case TypeConst():
                return True
            case DataVar(n) | TypeVar(n):
                return n not in unguarded
            case AppT(l, r) | Arrow(l, r):
                return go(l, frozenset()) and go(r, frozenset())
            case Union(l, r):
                return go(l, unguarded) and go(r, unguarded)
            case Rec(var, _, body):
                return go(body, unguarded | {var})
        raise TypeError(f"not a type: {t!r}")

    return go(t, frozenset())


def admitted_symbols(t: MuType, pos: tuple[int, ...]) -> frozenset[str]:
    """Head symbols the type exhibits at a pattern position.

    Unions contribute both sides, recursive types are unfolded, and a branch
    that bottoms out in an atom before the position is consumed contributes
    nothing.
    """
    symbols, _ = _admitted_symbols(t, pos)
    return symbols


def _admitted_symbols(t: MuType, pos: tuple[int, ...]) -> tuple[frozenset[str], int]:
    # The active-path set guards the unfolding loop; on contractive types it
    # never fires (the returned counter lets tests assert exactly that).
    guard_hits = 0
    active: set[tuple[MuType, tuple[int, ...]]] = set()

    def go(t: MuType, pos: tuple[int, ...]) -> frozenset[str]:
        nonlocal guard_hits
        match t:
            case TypeConst(name) | DataVar(name) | TypeVar(name):
                return frozenset((name,)) if pos == () else frozenset()
            case AppT(l, r):
                if pos == ():
                    return frozenset((SYM_APP,))
                return go((l, r)[pos[0] - 1], pos[1:])
            case Arrow(l, r):
                if pos == ():
                    return frozenset((SYM_ARROW,))
                return go((l, r)[pos[0] - 1], pos[1:])
            case Union(l, r):
                return go(l, pos) | go(r, pos)
            case Rec():
                key = (canonical(t), pos)
                if key in active:
                    guard_hits += 1
                    return frozenset()
                active.add(key)
                try:
                    return go(unfold_once(t), pos)
                finally:
                    active.discard(key)
        raise TypeError(f"not a type: {t!r}")

    result = go(t, pos)
    return result, guard_hits


# --- Finite trees -----------------------------------------------------------


class FiniteTree:
    """Base class for depth-bounded tree views of types."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(FiniteTree):
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Bullet(FiniteTree):
    def __repr__(self) -> str:
        return BULLET_NAME


@dataclass(frozen=True, slots=True)
class Node(FiniteTree):
    label: str  # SYM_APP, SYM_ARROW or SYM_UNION
    left: FiniteTree
    right: FiniteTree

    def __repr__(self) -> str:
        return f"({self.left!r} {self.label} {self.right!r})"


BULLET = Bullet()


def truncate(t: MuType, depth: int) -> FiniteTree:
    """Cut the infinite-tree reading of a type at constructor depth `depth`.

    Unions do not consume depth. Identical (subtype, depth) pairs share the
    resulting subtree, so the returned structure is a DAG.
    """
    memo: dict[tuple[MuType, int], FiniteTree] = {}

    def go(t: MuType, k: int) -> FiniteTree:
        if k == 0:
            return BULLET
        key = (canonical(t), k)
        cached = memo.get(key)
        if cached is not None:
            return cached
        match t:
            case TypeConst(name) | DataVar(name) | TypeVar(name):
                out: FiniteTree = Atom(name)
            case AppT(l, r):
                out = Node(SYM_APP, go(l, k - 1), go(r, k - 1))
            case Arrow(l, r):
                out = Node(SYM_ARROW, go(l, k - 1), go(r, k - 1))
            case Union(l, r):
                out = Node(SYM_UNION, go(l, k), go(r, k))
            case Rec():
                out = go(unfold_once(t), k)
            case _:
                raise TypeError(f"not a type: {t!r}")
        memo[key] = out
        return out

    return go(t, depth)


def tree_components(t: FiniteTree) -> list[FiniteTree]:
    """Maximal union components of a finite tree, in order."""
    if isinstance(t, Node) and t.label == SYM_UNION:
        return tree_components(t.left) + tree_components(t.right)
    return [t]


def cut_tree(t: FiniteTree, depth: int) -> FiniteTree:
    """Truncate an already-finite tree at the given constructor depth."""
    if depth == 0:
        return BULLET
    match t:
        case Atom() | Bullet():
            return t
        case Node(label, l, r) if label == SYM_UNION:
            return Node(SYM_UNION, cut_tree(l, depth), cut_tree(r, depth))
        case Node(label, l, r):
            return Node(label, cut_tree(l, depth - 1), cut_tree(r, depth - 1))
    raise TypeError(f"not a finite tree: {t!r}")
