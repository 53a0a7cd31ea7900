"""Pattern typing and bidirectional-style term type synthesis with subsumption."""

from __future__ import annotations

from .compatibility import IncompatiblePair, PatternJudgement, check_branch_compatibility
from .diagnostics import CapError
from .mu_types import (
    AppT,
    Arrow,
    MuType,
    TypeConst,
    is_datatype,
    union_components,
    union_of,
)
from .relations import is_equivalent, is_subtype
from .surface import pretty, validate_type
from .syntax import (
    Abs,
    App,
    Const,
    Matchable,
    Pattern,
    PatternCompound,
    PatternConst,
    Term,
    Var,
    free_matchables,
    is_linear,
)

TypeEnv = dict[str, MuType]


def type_pattern(bindings: TypeEnv, p: Pattern) -> MuType:
    """Syntax-directed pattern typing. The pattern must be linear."""
    match p:
        case Matchable(name):
            ty = bindings.get(name)
            if ty is None:
                raise CapError("type", f"matchable '{name}' has no type annotation")
            return ty
        case PatternConst(name):
            return TypeConst(name)
        case PatternCompound(left, right):
            fun_ty = type_pattern(bindings, left)
            if not is_datatype(fun_ty):
                raise CapError(
                    "sort",
                    f"pattern '{left!r}' heads a compound but its type is not a datatype",
                    actual=pretty(fun_ty),
                )
            return AppT(fun_ty, type_pattern(bindings, right))
    raise TypeError(f"not a pattern: {p!r}")


def infer_type(env: TypeEnv, t: Term, explain: bool = False) -> MuType:
    """Synthesize a minimal-intent type; subsumption is applied only at
    application arguments and explicit checking boundaries."""
    match t:
        case Var(name):
            ty = env.get(name)
            if ty is None:
                raise CapError("type", f"unbound variable '{name}'")
            return ty
        case Const(name):
            return TypeConst(name)
        case App(fun, arg):
            return _infer_app(env, fun, arg, explain)
        case Abs(branches):
            return _infer_abs(env, branches, explain)
    raise TypeError(f"not a term: {t!r}")


def _infer_app(env: TypeEnv, fun: Term, arg: Term, explain: bool = False) -> MuType:
    fun_ty = infer_type(env, fun, explain)
    if is_datatype(fun_ty):
        return AppT(fun_ty, infer_type(env, arg, explain))
    components = union_components(fun_ty)
    if len(components) == 1 and isinstance(components[0], Arrow):
        arrow = components[0]
        arg_ty = infer_type(env, arg, explain)
        # Fast path: the argument fits a single domain component. The grouping
        # of domain unions is free, so fitting the whole domain also counts.
        for dom_part in union_components(arrow.dom):
            if is_subtype(arg_ty, dom_part):
                return arrow.cod
        if is_subtype(arg_ty, arrow.dom):
            return arrow.cod
        raise CapError(
            "type",
            "argument type fits no part of the function domain",
            expected=pretty(arrow.dom),
            actual=pretty(arg_ty),
        )
    raise CapError(
        "type",
        "function position is neither a datatype nor a single arrow",
        actual=pretty(fun_ty),
    )


def _infer_abs(env: TypeEnv, branches, explain: bool = False) -> MuType:
    judgements: list[PatternJudgement] = []
    body_types: list[MuType] = []
    for i, branch in enumerate(branches):
        if not is_linear(branch.pattern):
            raise CapError("type", f"branch {i + 1}: pattern is not linear")
        bindings = {name: validate_type(ty) for name, ty in branch.binding_map().items()}
        declared = set(bindings)
        used = set(free_matchables(branch.pattern))
        if declared != used:
            missing = sorted(used - declared)
            extra = sorted(declared - used)
            detail = []
            if missing:
                detail.append(f"missing {missing}")
            if extra:
                detail.append(f"unused {extra}")
            raise CapError(
                "type",
                f"branch {i + 1}: annotations must cover exactly the pattern matchables ({', '.join(detail)})",
            )
        pattern_ty = type_pattern(bindings, branch.pattern)
        judgements.append(PatternJudgement(tuple(bindings.items()), branch.pattern, pattern_ty))
        body_types.append(infer_type({**env, **bindings}, branch.body, explain))
    try:
        check_branch_compatibility(judgements, explain=explain)
    except IncompatiblePair as bad:
        message = str(bad)
        if explain and bad.verdict.shared_symbols is not None:
            shared = "; ".join(
                f"at {list(pos)}: {sorted(symbols)}" for pos, symbols in sorted(bad.verdict.shared_symbols.items())
            )
            message += f" [shared head symbols {shared}]"
        raise CapError("compatibility", message) from bad
    domain = union_of([j.type for j in judgements])
    if all(is_equivalent(body_types[0], ty) for ty in body_types[1:]):
        codomain = body_types[0]
    else:
        codomain = union_of(body_types)
    return Arrow(domain, codomain)


def check_type(env: TypeEnv, t: Term, expected: MuType, explain: bool = False) -> None:
    actual = infer_type(env, t, explain)
    if not is_subtype(actual, expected):
        raise CapError(
            "type",
            "term does not have the expected type",
            expected=pretty(expected),
            actual=pretty(actual),
        )
