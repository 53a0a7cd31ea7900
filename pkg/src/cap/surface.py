"""Concrete syntax: lexer, parser, pretty-printer and the .cap program format.

Grammar sketch (see README for the full version):

    program  := { decl }
    decl     := "assume" lowerIdent ":" type ";" | "def" lowerIdent "=" term ";"
              | "check" term ":" type ";"       | "eval" term ";"
    term     := branches | app
    branches := branch { "|" branch }
    branch   := "[" [ binding {"," binding} ] "]" pattern "=>" term
    type     := untype [ "->" type ]            -- arrow is right-associative
    untype   := apptype { "+" apptype }
    apptype  := tatom { "@" tatom }

Type application binds tighter than union, union tighter than arrow.
Upper-case identifiers are constants, lower-case ones are variables,
matchables or recursion binders. Comments run from "--" to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagnostics import CapError, Diagnostic, Span
from .mu_types import (
    BULLET_NAME,
    SORT_DATA,
    SORT_TYPE,
    AppT,
    Arrow,
    DataVar,
    MuType,
    Rec,
    TypeConst,
    TypeVar,
    Union,
)
from .syntax import (
    Abs,
    App,
    Branch,
    Const,
    Matchable,
    Pattern,
    PatternCompound,
    PatternConst,
    Term,
    Var,
    is_linear,
)

KEYWORDS = ("assume", "def", "check", "eval", "rec")

_PUNCT = ("->", "=>", "--", "(", ")", "[", "]", ",", ";", ":", "=", "|", "+", "@", ".")


@dataclass(frozen=True)
class Token:
    kind: str  # "lower", "upper", "punct", "keyword", "eof"
    text: str
    line: int
    col: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.col)


class ParseFailure(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span

    def to_diagnostic(self, decl: str | None = None) -> Diagnostic:
        return Diagnostic(code="parse", message=self.message, span=self.span, decl=decl)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i) or text.startswith("=>", i):
            tokens.append(Token("punct", text[i : i + 2], line, col))
            i += 2
            col += 2
            continue
        if ch in "()[],;:=|+@.":
            tokens.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isalpha():
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            width = i - start
            if word in KEYWORDS:
                tokens.append(Token("keyword", word, line, col))
            elif word[0].isupper():
                tokens.append(Token("upper", word, line, col))
            else:
                tokens.append(Token("lower", word, line, col))
            col += width
            continue
        raise ParseFailure(f"unexpected character {ch!r}", Span(line, col))
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str) -> ParseFailure:
        return ParseFailure(message, self.peek().span)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise self.fail(f"expected {want!r}, found {tok.text!r}" if tok.text else f"expected {want!r}, found end of input")
        return self.next()

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def eat_punct(self, text: str) -> bool:
        if self.at_punct(text):
            self.next()
            return True
        return False

    # -- types ---------------------------------------------------------------

    def parse_type(self) -> MuType:
        left = self.parse_union_type()
        if self.eat_punct("->"):
            return Arrow(left, self.parse_type())
        return left

    def parse_union_type(self) -> MuType:
        out = self.parse_app_type()
        while self.eat_punct("+"):
            out = Union(out, self.parse_app_type())
        return out

    def parse_app_type(self) -> MuType:
        out = self.parse_type_atom()
        while self.eat_punct("@"):
            out = AppT(out, self.parse_type_atom())
        return out

    def parse_type_atom(self) -> MuType:
        tok = self.peek()
        if tok.kind == "upper":
            self.next()
            return TypeConst(tok.text)
        if tok.kind == "lower":
            self.next()
            # Sort resolution happens in validate_type.
            return TypeVar(tok.text)
        if tok.kind == "keyword" and tok.text == "rec":
            self.next()
            var = self.expect("lower")
            self.expect("punct", ".")
            return Rec(var.text, SORT_TYPE, self.parse_type())
        if self.eat_punct("("):
            inner = self.parse_type()
            self.expect("punct", ")")
            return inner
        raise self.fail(f"expected a type, found {tok.text!r}")

    # -- terms and patterns ----------------------------------------------------

    def parse_term(self) -> Term:
        if self.at_punct("["):
            return self.parse_branches()
        return self.parse_app_term()

    def parse_app_term(self) -> Term:
        out = self.parse_term_atom()
        while self.peek().kind in ("lower", "upper") or self.at_punct("("):
            out = App(out, self.parse_term_atom())
        return out

    def parse_term_atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "lower":
            self.next()
            return Var(tok.text)
        if tok.kind == "upper":
            self.next()
            return Const(tok.text)
        if self.eat_punct("("):
            inner = self.parse_term()
            self.expect("punct", ")")
            return inner
        raise self.fail(f"expected a term, found {tok.text!r}")

    def parse_branches(self) -> Abs:
        branches = [self.parse_branch()]
        while self.eat_punct("|"):
            branches.append(self.parse_branch())
        return Abs(tuple(branches))

    def parse_branch(self) -> Branch:
        opening = self.expect("punct", "[")
        bindings: list[tuple[str, MuType]] = []
        if not self.at_punct("]"):
            bindings.append(self.parse_binding())
            while self.eat_punct(","):
                bindings.append(self.parse_binding())
        self.expect("punct", "]")
        pattern = self.parse_pattern()
        if not is_linear(pattern):
            raise ParseFailure("pattern binds a matchable twice", opening.span)
        self.expect("punct", "=>")
        body = self.parse_term()
        return Branch(pattern, tuple(bindings), body)

    def parse_binding(self) -> tuple[str, MuType]:
        name = self.expect("lower")
        self.expect("punct", ":")
        return name.text, self.parse_type()

    def parse_pattern(self) -> Pattern:
        out = self.parse_pattern_atom()
        while self.peek().kind in ("lower", "upper") or self.at_punct("("):
            out = PatternCompound(out, self.parse_pattern_atom())
        return out

    def parse_pattern_atom(self) -> Pattern:
        tok = self.peek()
        if tok.kind == "lower":
            self.next()
            return Matchable(tok.text)
        if tok.kind == "upper":
            self.next()
            return PatternConst(tok.text)
        if self.eat_punct("("):
            inner = self.parse_pattern()
            self.expect("punct", ")")
            return inner
        raise self.fail(f"expected a pattern, found {tok.text!r}")

    # -- programs --------------------------------------------------------------

    def parse_program(self) -> "Program":
        decls: list[Decl] = []
        while self.peek().kind != "eof":
            decls.append(self.parse_decl())
        return Program(tuple(decls))

    def parse_decl(self) -> "Decl":
        tok = self.peek()
        if tok.kind != "keyword" or tok.text == "rec":
            raise self.fail("expected a declaration (assume, def, check or eval)")
        self.next()
        span = tok.span
        if tok.text == "assume":
            name = self.expect("lower")
            self.expect("punct", ":")
            ty = self.parse_type()
            self.expect("punct", ";")
            return Assume(name.text, ty, span)
        if tok.text == "def":
            name = self.expect("lower")
            self.expect("punct", "=")
            term = self.parse_term()
            self.expect("punct", ";")
            return Def(name.text, term, span)
        if tok.text == "check":
            term = self.parse_term()
            self.expect("punct", ":")
            ty = self.parse_type()
            self.expect("punct", ";")
            return Check(term, ty, span)
        term = self.parse_term()
        self.expect("punct", ";")
        return Eval(term, span)


@dataclass(frozen=True)
class Assume:
    name: str
    type: MuType
    span: Span

    def label(self) -> str:
        return f"assume {self.name}"


@dataclass(frozen=True)
class Def:
    name: str
    term: Term
    span: Span

    def label(self) -> str:
        return f"def {self.name}"


@dataclass(frozen=True)
class Check:
    term: Term
    type: MuType
    span: Span

    def label(self) -> str:
        return "check"


@dataclass(frozen=True)
class Eval:
    term: Term
    span: Span

    def label(self) -> str:
        return "eval"


Decl = Assume | Def | Check | Eval


@dataclass(frozen=True)
class Program:
    decls: tuple[Decl, ...]


def _parse_all(text: str, production: str):
    parser = _Parser(tokenize(text))
    match production:
        case "term":
            out = parser.parse_term()
        case "type":
            out = parser.parse_type()
        case "pattern":
            out = parser.parse_pattern()
        case "program":
            out = parser.parse_program()
        case _:
            raise ValueError(production)
    if parser.peek().kind != "eof":
        raise parser.fail(f"trailing input starting at {parser.peek().text!r}")
    return out


def parse_program(text: str) -> Program:
    return _parse_all(text, "program")


def parse_term(text: str) -> Term:
    return _parse_all(text, "term")


def parse_raw_type(text: str) -> MuType:
    """Parse without sort resolution; most callers want parse_type."""
    return _parse_all(text, "type")


def parse_type(text: str) -> MuType:
    return validate_type(parse_raw_type(text))


# -- validation ---------------------------------------------------------------


def validate_type(raw: MuType) -> MuType:
    """Resolve recursion-binder sorts and enforce the well-formedness rules.

    Binder sorts are inferred: a binder is datatype-sorted when its body
    checks as a datatype under that assumption, type-sorted otherwise. The
    left argument of @ must be a datatype, and every binder must occur only
    under a type constructor. Free lower-case names become rigid type
    variables.
    """
    rebuilt, _ = _resolve_sorts(raw, {})
    _check_contractive(rebuilt, frozenset())
    return rebuilt


def _resolve_sorts(t: MuType, env: dict[str, str]) -> tuple[MuType, str]:
    match t:
        case TypeConst(name):
            if name == BULLET_NAME:
                raise CapError("sort", "the truncation marker is reserved and cannot appear in types")
            return t, SORT_DATA
        case DataVar(name) | TypeVar(name):
            sort = env.get(name)
            if sort is None:
                return TypeVar(name), SORT_TYPE
            return (DataVar(name) if sort == SORT_DATA else TypeVar(name)), sort
        case AppT(left, right):
            new_left, left_sort = _resolve_sorts(left, env)
            if left_sort != SORT_DATA:
                raise CapError("sort", "left argument of @ must be a datatype", actual=pretty(left))
            new_right, _ = _resolve_sorts(right, env)
            return AppT(new_left, new_right), SORT_DATA
        case Arrow(dom, cod):
            new_dom, _ = _resolve_sorts(dom, env)
            new_cod, _ = _resolve_sorts(cod, env)
            return Arrow(new_dom, new_cod), SORT_TYPE
        case Union(left, right):
            new_left, sort_left = _resolve_sorts(left, env)
            new_right, sort_right = _resolve_sorts(right, env)
            sort = SORT_DATA if sort_left == sort_right == SORT_DATA else SORT_TYPE
            return Union(new_left, new_right), sort
        case Rec(var, _, body):
            try:
                new_body, body_sort = _resolve_sorts(body, {**env, var: SORT_DATA})
                if body_sort == SORT_DATA:
                    return Rec(var, SORT_DATA, new_body), SORT_DATA
            except CapError:
                pass
            new_body, _ = _resolve_sorts(body, {**env, var: SORT_TYPE})
            return Rec(var, SORT_TYPE, new_body), SORT_TYPE
    raise TypeError(f"not a type: {t!r}")


def validate_term(t: Term) -> Term:
    """Validate every branch annotation of a term, rebuilding it.

    Parsing leaves annotation types raw (binder sorts unresolved); this is
    the normalization that makes parsed terms structurally comparable with
    programmatically built ones.
    """
    match t:
        case Var() | Const():
            return t
        case App(fun, arg):
            return App(validate_term(fun), validate_term(arg))
        case Abs(branches):
            rebuilt = tuple(
                Branch(
                    b.pattern,
                    tuple((name, validate_type(ty)) for name, ty in b.bindings),
                    validate_term(b.body),
                )
                for b in branches
            )
            return Abs(rebuilt)
    raise TypeError(f"not a term: {t!r}")


def _check_contractive(t: MuType, unguarded: frozenset[str]) -> None:
    match t:
        case TypeConst():
            return
        case DataVar(name) | TypeVar(name):
            if name in unguarded:
                raise CapError(
                    "contractiveness",
                    f"recursion variable '{name}' must occur under @ or ->",
                )
        case AppT(l, r) | Arrow(l, r):
            _check_contractive(l, frozenset())
            _check_contractive(r, frozenset())
        case Union(l, r):
            _check_contractive(l, unguarded)
            _check_contractive(r, unguarded)
        case Rec(var, _, body):
            _check_contractive(body, unguarded | {var})


# -- pretty printing ------------------------------------------------------------

# Precedence levels: arrow 0, union 1, application 2, atom 3.


def pretty_type(t: MuType, level: int = 0) -> str:
    match t:
        case TypeConst(name) | DataVar(name) | TypeVar(name):
            return name
        case Rec(var, _, body):
            text = f"rec {var}. {pretty_type(body, 0)}"
            return f"({text})" if level > 0 else text
        case Arrow(dom, cod):
            text = f"{pretty_type(dom, 1)} -> {pretty_type(cod, 0)}"
            return f"({text})" if level > 0 else text
        case Union(left, right):
            text = f"{pretty_type(left, 1)} + {pretty_type(right, 2)}"
            return f"({text})" if level > 1 else text
        case AppT(left, right):
            text = f"{pretty_type(left, 2)}@{pretty_type(right, 3)}"
            return f"({text})" if level > 2 else text
    raise TypeError(f"not a type: {t!r}")


def pretty_pattern(p: Pattern, atom: bool = False) -> str:
    match p:
        case Matchable(name):
            return name
        case PatternConst(name):
            return name
        case PatternCompound(left, right):
            text = f"{pretty_pattern(left)} {pretty_pattern(right, atom=True)}"
            return f"({text})" if atom else text
    raise TypeError(f"not a pattern: {p!r}")


def pretty_term(t: Term, atom: bool = False) -> str:
    match t:
        case Var(name) | Const(name):
            return name
        case App(fun, arg):
            text = f"{pretty_term(fun, atom=isinstance(fun, Abs))} {pretty_term(arg, atom=True)}"
            return f"({text})" if atom else text
        case Abs(branches):
            parts = []
            for b in branches:
                bindings = ", ".join(f"{n}:{pretty_type(ty)}" for n, ty in b.bindings)
                # parenthesize abstraction bodies, else a following "|" would
                # attach to the innermost branch list when re-parsed
                body = pretty_term(b.body, atom=isinstance(b.body, Abs))
                parts.append(f"[{bindings}] {pretty_pattern(b.pattern)} => {body}")
            text = " | ".join(parts)
            return f"({text})" if atom else text
    raise TypeError(f"not a term: {t!r}")


def pretty(x) -> str:
    """Render a term, pattern or type back to concrete syntax."""
    if isinstance(x, MuType):
        return pretty_type(x)
    if isinstance(x, Pattern):
        return pretty_pattern(x)
    if isinstance(x, Term):
        return pretty_term(x)
    raise TypeError(f"cannot pretty-print {x!r}")
