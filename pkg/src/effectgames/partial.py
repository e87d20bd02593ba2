"""Partial terms: terms whose leaves may be the undefined marker.

The order is definedness: the undefined leaf is below everything, distinct
variables are incomparable, and operation nodes compare pointwise under the
same head symbol. Compatible terms (those sharing an upper bound) can be
merged with `join`; `truncate` produces the canonical ascending chain of
depth-bounded approximations whose join is the original term.

Every finitely generated down-closed directed set of this order is
principal (a finite directed set has a maximum via joins), so a single
partial term stands in for it; unbounded behaviors are represented as
truncation chains, not as completed infinite objects.
"""

from __future__ import annotations

from .signature import EffectSignature
from .term import BOT, Bot, Op, PartialTerm, Var, _parse, con, format_term

__all__ = [
    "BOT",
    "Bot",
    "Incompatible",
    "PartialTerm",
    "compatible",
    "check_partial_term",
    "format_partial_term",
    "join",
    "leq",
    "parse_partial_term",
    "truncate",
]


class Incompatible(ValueError):
    """Raised by join; `path` is the child-index path to the first conflict."""

    def __init__(self, path: tuple[int, ...]):
        where = "/".join(str(p) for p in path) if path else "root"
        super().__init__(f"terms conflict at {where}")
        self.path = path


def leq(s, t) -> bool:
    """Definedness order, by the three inductive rules:

    _ <= t        x <= x        m(s_n) <= m(t_n) when s_n <= t_n for all n
    """
    match (s, t):
        case (Bot(), _):
            return True
        case (Var(x), Var(y)):
            return x == y
        case (Op(m, ss), Op(n, ts)) if m == n:
            return all(leq(a, b) for a, b in zip(ss, ts))
        case _:
            return False


def compatible(s, t) -> bool:
    """True iff s and t have a common upper bound (their defined parts agree)."""
    match (s, t):
        case (Bot(), _) | (_, Bot()):
            return True
        case (Var(x), Var(y)):
            return x == y
        case (Op(m, ss), Op(n, ts)) if m == n:
            return all(compatible(a, b) for a, b in zip(ss, ts))
        case _:
            return False


def join(s, t):
    """Least upper bound of two compatible partial terms.

    Pointwise merge preferring the defined side; raises Incompatible with
    the child-index path of the first conflicting position (depth-first).
    """
    return _join(s, t, ())


def _join(s, t, path):
    match (s, t):
        case (Bot(), _):
            return t
        case (_, Bot()):
            return s
        case (Var(x), Var(y)) if x == y:
            return s
        case (Op(m, ss), Op(n, ts)) if m == n:
            return Op(m, tuple(_join(a, b, path + (i,)) for i, (a, b) in enumerate(zip(ss, ts))))
        case _:
            raise Incompatible(path)


def truncate(t, k: int):
    """Replace every subterm at depth k by the undefined leaf.

    truncate(t, 0) is the undefined leaf; the results for k = 0, 1, ...
    form an ascending chain below t that reaches t once k exceeds depth(t).
    """
    if k <= 0:
        return BOT
    match t:
        case Var(_) | Bot():
            return t
        case Op(name, children):
            return Op(name, tuple(truncate(c, k - 1) for c in children))
        case _:
            raise TypeError(f"not a term: {t!r}")


def check_partial_term(sig: EffectSignature, t) -> None:
    """Validate well-sortedness; raises the construction-time errors."""
    match t:
        case Var(_) | Bot():
            return
        case Op(name, children):
            con(sig, name, children)
            for c in children:
                check_partial_term(sig, c)
        case _:
            raise TypeError(f"not a term: {t!r}")


def parse_partial_term(sig: EffectSignature, text: str):
    """Parse the term format extended with `_` for the undefined leaf."""
    return _parse(sig, text, allow_bottom=True)


def format_partial_term(t) -> str:
    return format_term(t)
