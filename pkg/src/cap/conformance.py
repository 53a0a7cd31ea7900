"""Property runners: subject reduction, progress, match success, confluence,
and the engine-vs-truncation differential suite."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .diagnostics import CapError
from .generators import GenConfig, gen_type, gen_typed_term, mutate_type
from .mu_types import AppT, MuType, TypeConst
from .reduction import StuckMatch, Success, evaluate, match_pattern, select_branch, small_step
from .relations import MODE_EQ, MODE_SUB, is_subtype, oracle_compare
from .surface import pretty
from .syntax import (
    Abs,
    App,
    Matchable,
    Pattern,
    PatternCompound,
    PatternConst,
    Term,
    apply_substitution,
    is_value,
)
from .typecheck import check_type, infer_type


@dataclass
class Counterexample:
    suite: str
    seed: int
    term: str
    type: str | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "term": self.term, "type": self.type, "detail": self.detail}


@dataclass
class SuiteReport:
    name: str
    cases: int
    failures: list[Counterexample] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "cases": self.cases,
            "failures": [f.to_dict() for f in self.failures],
            "ok": self.ok,
            **self.extra,
        }


# -- single-term checks ------------------------------------------------------------


def check_subject_reduction(term: Term, ty: MuType, fuel: int = 1000) -> str | None:
    """Re-check the type after every reduction step; None means no violation."""
    current = term
    for step in range(fuel):
        stepped = small_step(current)
        if stepped is None:
            return None
        current = stepped[0]
        try:
            check_type({}, current, ty)
        except CapError as err:
            return f"step {step + 1}: reduct {pretty(current)} lost type {pretty(ty)}: {err.message}"
    return None


def check_progress(term: Term, fuel: int = 1000) -> str | None:
    """A closed well-typed non-value must always step; None means no violation."""
    current = term
    for _ in range(fuel):
        if is_value(current):
            return None
        try:
            stepped = small_step(current)
        except StuckMatch as stuck:
            return f"stuck non-value {pretty(current)}: {stuck}"
        if stepped is None:
            return None
        current = stepped[0]
    return None


# -- pattern generation for the match suite -----------------------------------------


def pattern_of_type(rng: random.Random, ty: MuType, counter: list[int]) -> tuple[Pattern, tuple[tuple[str, MuType], ...]]:
    """A pattern whose type under its annotations is exactly `ty`."""

    def fresh() -> str:
        counter[0] += 1
        return f"m{counter[0]}"

    match ty:
        case TypeConst(name) if rng.random() < 0.6:
            return PatternConst(name), ()
        case AppT(left, right) if rng.random() < 0.7:
            lp, lb = pattern_of_type(rng, left, counter)
            rp, rb = pattern_of_type(rng, right, counter)
            return PatternCompound(lp, rp), lb + rb
    name = fresh()
    return Matchable(name), ((name, ty),)


# -- randomized-order reduction ------------------------------------------------------


def weak_moves(t: Term) -> list[Term]:
    """Every term reachable in one weak call-by-value step, any redex position.

    Beta fires only on value arguments, as in the deterministic strategy, so
    all interleavings join on the same normal form; only the visiting order
    varies.
    """
    moves: list[Term] = []

    def go(t: Term, rebuild) -> None:
        if not isinstance(t, App):
            return
        if is_value(t.fun) and is_value(t.arg) and isinstance(t.fun, Abs):
            try:
                index, sub = select_branch(t.fun.branches, t.arg)
                moves.append(rebuild(apply_substitution(sub, t.fun.branches[index].body)))
            except StuckMatch:
                pass
        fun, arg = t.fun, t.arg
        go(fun, lambda s, _arg=arg, _rb=rebuild: _rb(App(s, _arg)))
        go(arg, lambda s, _fun=fun, _rb=rebuild: _rb(App(_fun, s)))

    go(t, lambda s: s)
    return moves


def random_order_normalize(rng: random.Random, term: Term, fuel: int) -> tuple[str, Term]:
    current = term
    for _ in range(fuel):
        moves = weak_moves(current)
        if not moves:
            status = "normal" if is_value(current) else "stuck"
            return status, current
        current = rng.choice(moves)
    return "out-of-fuel", current


# -- suites --------------------------------------------------------------------------


def _term_corpus(cfg: GenConfig, cases: int) -> list[tuple[int, Term, MuType]]:
    corpus = []
    for i in range(cases):
        seed = cfg.seed + i
        term, ty = gen_typed_term(cfg.with_seed(seed))
        corpus.append((seed, term, ty))
    return corpus


def subject_reduction_suite(cfg: GenConfig, cases: int, fuel: int = 1000) -> SuiteReport:
    report = SuiteReport("subject-reduction", cases)
    for seed, term, ty in _term_corpus(cfg, cases):
        detail = check_subject_reduction(term, ty, fuel)
        if detail is not None:
            report.failures.append(Counterexample("subject-reduction", seed, pretty(term), pretty(ty), detail))
    return report


def progress_suite(cfg: GenConfig, cases: int, fuel: int = 1000) -> SuiteReport:
    report = SuiteReport("progress", cases)
    for seed, term, ty in _term_corpus(cfg, cases):
        detail = check_progress(term, fuel)
        if detail is not None:
            report.failures.append(Counterexample("progress", seed, pretty(term), pretty(ty), detail))
    return report


def successful_match_suite(cfg: GenConfig, cases: int, fuel: int = 1000) -> SuiteReport:
    """Closed well-typed values must match any pattern of their own type."""
    report = SuiteReport("successful-match", cases)
    checked = 0
    for seed, term, _ in _term_corpus(cfg, cases):
        result = evaluate(term, fuel=fuel)
        if result.status != "normal":
            continue
        value = result.term
        try:
            value_ty = infer_type({}, value)
        except CapError as err:
            report.failures.append(
                Counterexample("successful-match", seed, pretty(value), None, f"value lost typability: {err.message}")
            )
            continue
        rng = random.Random(seed)
        pattern, _bindings = pattern_of_type(rng, value_ty, [0])
        outcome = match_pattern(pattern, value)
        checked += 1
        if not isinstance(outcome, Success):
            report.failures.append(
                Counterexample(
                    "successful-match",
                    seed,
                    pretty(value),
                    pretty(value_ty),
                    f"pattern {pretty(pattern)} produced {type(outcome).__name__}",
                )
            )
    report.extra["values_checked"] = checked
    return report


def confluence_suite(cfg: GenConfig, cases: int, fuel: int = 2000) -> SuiteReport:
    """Randomized redex order must agree with the deterministic strategy."""
    report = SuiteReport("confluence", cases)
    compared = 0
    small = GenConfig(
        seed=cfg.seed,
        max_type_nodes=cfg.max_type_nodes,
        max_term_nodes=min(cfg.max_term_nodes, 12),
        max_union_width=cfg.max_union_width,
        rec_probability=cfg.rec_probability,
    )
    for seed, term, ty in _term_corpus(small, cases):
        cbv = evaluate(term, fuel=fuel)
        status, random_nf = random_order_normalize(random.Random(seed * 7 + 1), term, fuel)
        if cbv.status != "normal" or status == "out-of-fuel":
            continue
        compared += 1
        if status == "stuck":
            report.failures.append(
                Counterexample("confluence", seed, pretty(term), pretty(ty), f"random order got stuck at {pretty(random_nf)}")
            )
        elif random_nf != cbv.term:
            report.failures.append(
                Counterexample(
                    "confluence",
                    seed,
                    pretty(term),
                    pretty(ty),
                    f"normal forms differ: cbv {pretty(cbv.term)} vs random {pretty(random_nf)}",
                )
            )
    report.extra["compared"] = compared
    return report


@dataclass
class DifferentialReport:
    pairs: int
    kmax: int
    disagreements: list[Counterexample] = field(default_factory=list)
    inconclusive: list[Counterexample] = field(default_factory=list)
    engine_false: int = 0
    refuted_within_2k: int = 0
    reverified: int = 0
    antisymmetry_gaps: int = 0  # both-way subtyping without equivalence; observational only

    @property
    def ok(self) -> bool:
        limit = max(1, self.pairs) * 0.01
        return not self.disagreements and len(self.inconclusive) < limit

    def to_dict(self) -> dict:
        return {
            "name": "differential",
            "pairs": self.pairs,
            "kmax": self.kmax,
            "disagreements": [c.to_dict() for c in self.disagreements],
            "inconclusive": [c.to_dict() for c in self.inconclusive],
            "engine_false": self.engine_false,
            "refuted_within_2k": self.refuted_within_2k,
            "reverified": self.reverified,
            "antisymmetry_gaps": self.antisymmetry_gaps,
            "ok": self.ok,
        }


def run_differential(cfg: GenConfig, pairs: int, kmax: int) -> DifferentialReport:
    """Generate type pairs and compare engine verdicts against truncations."""
    report = DifferentialReport(pairs, kmax)
    rng = random.Random(cfg.seed ^ 0xD1FF)
    for i in range(pairs):
        first = gen_type(cfg.with_seed(cfg.seed + 2 * i))
        if rng.random() < 0.7:
            second = mutate_type(rng, first)
        else:
            second = gen_type(cfg.with_seed(cfg.seed + 2 * i + 1))
        sub_both = []
        for mode in (MODE_SUB, MODE_EQ):
            result = oracle_compare(first, second, kmax, mode)
            pair_text = f"{pretty(first)}  vs  {pretty(second)}"
            if not result.agree:
                report.disagreements.append(
                    Counterexample("differential", cfg.seed + 2 * i, pair_text, None, f"{mode}: {result.to_dict()}")
                )
            if not result.engine:
                report.engine_false += 1
                if result.refuting_depth is not None:
                    report.refuted_within_2k += 1
                else:
                    deeper = oracle_compare(first, second, kmax, mode, deep_limit=4 * kmax)
                    report.reverified += 1
                    if deeper.refuting_depth is None:
                        report.inconclusive.append(
                            Counterexample("differential", cfg.seed + 2 * i, pair_text, None, f"{mode}: no refutation to {4 * kmax}")
                        )
            if mode == MODE_SUB:
                sub_both = [result.engine, is_subtype(second, first)]
            else:
                if all(sub_both) and not result.engine:
                    report.antisymmetry_gaps += 1
    return report


@dataclass
class ConformanceSummary:
    seed: int
    reports: list[SuiteReport]
    differential: DifferentialReport

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports) and self.differential.ok

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "suites": [r.to_dict() for r in self.reports] + [self.differential.to_dict()],
            "ok": self.ok,
        }

    def failures(self) -> list[Counterexample]:
        out = [f for r in self.reports for f in r.failures]
        out += self.differential.disagreements + self.differential.inconclusive
        return out


FAILURE_DUMP = "cap_conform_failures.json"


def run_conformance(
    cfg: GenConfig,
    cases: int = 500,
    kmax: int = 8,
    pairs: int = 1000,
    fuel: int = 1000,
    dump_failures: bool = True,
) -> ConformanceSummary:
    """Run every suite; persist counterexamples so failures can be replayed."""
    reports = [
        subject_reduction_suite(cfg, cases, fuel),
        progress_suite(cfg, cases, fuel),
        successful_match_suite(cfg, cases, fuel),
        confluence_suite(cfg, min(cases, 200), fuel),
    ]
    differential = run_differential(cfg, pairs, kmax)
    summary = ConformanceSummary(cfg.seed, reports, differential)
    if dump_failures and not summary.ok:
        Path(FAILURE_DUMP).write_text(
            json.dumps([f.to_dict() for f in summary.failures()], indent=2) + "\n", encoding="utf-8"
        )
    return summary
