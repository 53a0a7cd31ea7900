"""Declaration-by-declaration processing of parsed programs."""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import CapError, Diagnostic
from .mu_types import MuType
from .reduction import DEFAULT_FUEL, EvalResult, evaluate
from .surface import Assume, Check, Def, Eval, Program, pretty, validate_type
from .syntax import Term, apply_substitution, free_vars
from .typecheck import TypeEnv, check_type, infer_type


@dataclass
class DeclResult:
    label: str
    ok: bool
    diagnostic: Diagnostic | None = None
    inferred: MuType | None = None
    evaluated: EvalResult | None = None

    def summary(self) -> str:
        if not self.ok:
            assert self.diagnostic is not None
            return self.diagnostic.render()
        if self.evaluated is not None:
            return f"{self.label}: {pretty(self.evaluated.term)}  [{self.evaluated.steps} steps]"
        if self.inferred is not None:
            return f"{self.label}: {pretty(self.inferred)}"
        return f"{self.label}: ok"


@dataclass
class SessionState:
    """Typing environment plus unfolded definition bodies, grown declaration
    by declaration; reused directly by the interactive loop."""

    env: TypeEnv = field(default_factory=dict)
    definitions: dict[str, Term] = field(default_factory=dict)

    def resolve(self, term: Term) -> Term:
        live = {name: body for name, body in self.definitions.items() if name in free_vars(term)}
        return apply_substitution(live, term) if live else term


def process_decl(
    state: SessionState, decl, fuel: int = DEFAULT_FUEL, trace: bool = False, explain: bool = False
) -> DeclResult:
    label = decl.label()
    try:
        match decl:
            case Assume(name=name, type=raw):
                ty = validate_type(raw)
                state.env[name] = ty
                return DeclResult(label, True, inferred=ty)
            case Def(name=name, term=term):
                resolved = state.resolve(term)
                ty = infer_type(state.env, resolved, explain)
                state.env[name] = ty
                state.definitions[name] = resolved
                return DeclResult(label, True, inferred=ty)
            case Check(term=term, type=raw):
                ty = validate_type(raw)
                check_type(state.env, state.resolve(term), ty, explain)
                return DeclResult(label, True, inferred=ty)
            case Eval(term=term):
                resolved = state.resolve(term)
                ty = infer_type(state.env, resolved, explain)
                result = evaluate(resolved, fuel=fuel, trace=trace)
                if result.status != "normal":
                    detail = str(result.stuck) if result.stuck else "step budget exhausted"
                    diag = Diagnostic(
                        code="runtime",
                        message=f"evaluation did not reach a value: {detail}",
                        span=decl.span,
                        decl=label,
                        actual=pretty(result.term),
                    )
                    return DeclResult(label, False, diagnostic=diag, inferred=ty, evaluated=result)
                return DeclResult(label, True, inferred=ty, evaluated=result)
    except CapError as err:
        return DeclResult(label, False, diagnostic=err.to_diagnostic(span=decl.span, decl=label))
    raise TypeError(f"not a declaration: {decl!r}")


def check_program(
    program: Program, fuel: int = DEFAULT_FUEL, trace: bool = False, explain: bool = False
) -> list[DeclResult]:
    """Process declarations in order, collecting one result per declaration.

    A failing declaration is reported and skipped; processing continues so
    every declaration gets a verdict.
    """
    state = SessionState()
    return [process_decl(state, decl, fuel=fuel, trace=trace, explain=explain) for decl in program.decls]
