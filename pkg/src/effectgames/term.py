"""Finite terms over an effect signature, with fold, bind and handlers.

A term is a tree: variables at the leaves, operation nodes with one child
per outcome label of the operation's arity. `fold` is the structural
evaluator every interpretation goes through; `bind` is substitution at the
leaves; a `Handler` packages the clauses of a fold that targets another
term language (or any other carrier).

Terms are immutable values; all functions here are pure. Recursion depth
follows the term depth, so terms deeper than the interpreter's recursion
limit need `sys.setrecursionlimit` raised (the supported ceiling is 10**4).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .signature import EffectSignature, UnknownOperation


class ArityMismatch(ValueError):
    def __init__(self, op: str, expected: int, got: int):
        super().__init__(f"operation {op!r} expects {expected} children, got {got}")
        self.op = op
        self.expected = expected
        self.got = got


class MissingClause(ValueError):
    def __init__(self, op: str):
        super().__init__(f"no clause for operation {op!r}")
        self.op = op


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    value: Any


@dataclass(frozen=True)
class Op:
    name: str
    children: tuple


@dataclass(frozen=True)
class Bot:
    """The undefined leaf: a term position about which nothing is known.

    Total terms never contain it; the partial-term module builds on it.
    """


BOT = Bot()

Term = Var | Op
PartialTerm = Var | Op | Bot


def eta(x) -> Var:
    """Embed a variable as a term (unit of the term monad)."""
    return Var(x)


def con(sig: EffectSignature, name: str, children) -> Op:
    """Apply an operation to one child term per outcome label.

    The checked constructor: raises UnknownOperation / ArityMismatch, so
    terms built through it are well-sorted by construction.
    """
    desc = sig.arity(name)
    kids = tuple(children)
    if len(kids) != len(desc):
        raise ArityMismatch(name, len(desc), len(kids))
    return Op(name, kids)


def term_algebra(sig: EffectSignature) -> dict[str, Callable]:
    """The term constructors themselves, packaged as fold clauses."""
    return {m: (lambda vals, m=m: Op(m, tuple(vals))) for m in sig.operations}


def fold(t, alpha: Mapping[str, Callable], rho: Callable):
    """Evaluate a term: clauses `alpha` for operations, `rho` for variables.

    fold(Var x)        = rho(x)
    fold(Op m (t_n))   = alpha[m]((fold(t_n))_n)

    This is the unique structure-respecting map out of the term algebra;
    each clause receives the already-folded children as a tuple.
    """
    match t:
        case Var(x):
            return rho(x)
        case Op(name, children):
            try:
                clause = alpha[name]
            except KeyError:
                raise MissingClause(name) from None
            return clause(tuple(fold(c, alpha, rho) for c in children))
        case Bot():
            raise ValueError("fold requires a total term (no undefined leaves)")
        case _:
            raise TypeError(f"not a term: {t!r}")


def bind(t, k: Callable):
    """Substitute k(x) for every variable leaf x (Kleisli extension)."""
    match t:
        case Var(x):
            return k(x)
        case Op(name, children):
            return Op(name, tuple(bind(c, k) for c in children))
        case _:
            raise TypeError(f"not a total term: {t!r}")


@dataclass(frozen=True)
class Handler:
    """Clauses reinterpreting a computation's effects and its result.

    `op_clauses[m]` receives the already-handled continuations, one per
    outcome of m, and may use any of them zero or more times. `ret_clause`
    runs when the computation concludes with a variable.
    """

    op_clauses: Mapping[str, Callable]
    ret_clause: Callable


def handle(t, h: Handler):
    """Run a handler over a term: fold with its clauses.

    Raises MissingClause if the term uses an operation the handler does
    not cover.
    """
    return fold(t, h.op_clauses, h.ret_clause)


def identity_handler(sig: EffectSignature) -> Handler:
    """Handler that re-emits every operation and returns variables unchanged."""
    return Handler(term_algebra(sig), eta)


def depth(t) -> int:
    """Leaf (variable or undefined) -> 0; operation node -> 1 + max child depth."""
    match t:
        case Var(_) | Bot():
            return 0
        case Op(_, children):
            return 1 + max((depth(c) for c in children), default=0)
        case _:
            raise TypeError(f"not a term: {t!r}")


# --- text format ----------------------------------------------------------
#
# Parenthesized prefix notation: `(readbit (print[Hi] (stop)) ...)`,
# variables as `$name`, and (for partial terms only) `_` for the undefined
# leaf. Canonical output round-trips through the parser bit-exactly.


def _tokenize(text: str) -> list[str]:
    tokens = []
    atom = []
    for ch in text:
        if ch in "()" or ch.isspace():
            if atom:
                tokens.append("".join(atom))
                atom = []
            if ch in "()":
                tokens.append(ch)
        else:
            atom.append(ch)
    if atom:
        tokens.append("".join(atom))
    return tokens


def _parse_node(tokens: list[str], pos: int, sig: EffectSignature, allow_bottom: bool):
    if pos >= len(tokens):
        raise ParseError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        if pos + 1 >= len(tokens) or tokens[pos + 1] in "()":
            raise ParseError("expected operation name after '('")
        name = tokens[pos + 1]
        if name not in sig:
            raise UnknownOperation(name)
        pos += 2
        children = []
        while pos < len(tokens) and tokens[pos] != ")":
            child, pos = _parse_node(tokens, pos, sig, allow_bottom)
            children.append(child)
        if pos >= len(tokens):
            raise ParseError(f"missing ')' for operation {name!r}")
        return con(sig, name, children), pos + 1
    if tok == ")":
        raise ParseError("unexpected ')'")
    if tok == "_":
        if not allow_bottom:
            raise ParseError("'_' is only valid in partial terms")
        return BOT, pos + 1
    if tok.startswith("$"):
        if len(tok) == 1:
            raise ParseError("empty variable name")
        return Var(tok[1:]), pos + 1
    raise ParseError(f"unexpected token {tok!r} (variables are written $name)")


def _parse(sig: EffectSignature, text: str, allow_bottom: bool):
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input")
    node, pos = _parse_node(tokens, 0, sig, allow_bottom)
    if pos != len(tokens):
        raise ParseError(f"trailing input after term: {tokens[pos]!r}")
    return node


def parse_term(sig: EffectSignature, text: str) -> Term:
    """Parse a total term (no `_` leaves) and validate it against sig."""
    return _parse(sig, text, allow_bottom=False)


def format_term(t) -> str:
    """Canonical single-line rendering; parse_term inverts it bit-exactly."""
    match t:
        case Var(x):
            return f"${x}"
        case Bot():
            return "_"
        case Op(name, children):
            inner = "".join(" " + format_term(c) for c in children)
            return f"({name}{inner})"
        case _:
            raise TypeError(f"not a term: {t!r}")


def format_tree(sig: EffectSignature, t, prefix: str = "", label: str | None = None) -> str:
    """Deterministic ASCII tree, children tagged with their outcome labels."""
    head = f"{label}: " if label is not None else ""
    match t:
        case Var(x):
            return f"{head}${x}"
        case Bot():
            return f"{head}_"
        case Op(name, children):
            lines = [f"{head}{name}"]
            labels = sig.arity(name).labels
            for i, (outcome, child) in enumerate(zip(labels, children)):
                last = i == len(children) - 1
                branch, cont = ("`- ", "   ") if last else ("|- ", "|  ")
                sub = format_tree(sig, child, prefix + cont, outcome)
                first, *rest = sub.split("\n")
                lines.append(prefix + branch + first)
                lines.extend(rest)
            return "\n".join(lines)
        case _:
            raise TypeError(f"not a term: {t!r}")
