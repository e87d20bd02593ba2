"""Game-reading of an effect signature: coplays and costrategies.

A coplay is a finite interaction transcript in which the system moves
first: it either returns a value, announces an operation and stops there,
or announces an operation, receives an outcome from the environment, and
continues. A costrategy is a prefix-closed set of coplays that is pairwise
coherent, i.e. never prescribes two different system moves in the same
situation; the empty set is the divergent strategy and set inclusion is
the information order.

The bridge to terms: `strat_con`/`strat_eta` build strategies the way term
constructors build terms, `strat_d` decomposes a strategy one step, and
`embed_term`/`extract_partial` are mutually inverse between partial terms
and finite costrategies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Iterator

from .signature import EffectSignature
from .term import BOT, ArityMismatch, Bot, Op, Var


class IncoherentPair(ValueError):
    def __init__(self, s: "Coplay", t: "Coplay"):
        super().__init__(f"incoherent coplays: {format_coplay(s)!r} vs {format_coplay(t)!r}")
        self.pair = (s, t)


@dataclass(frozen=True)
class Ret:
    """Terminal system move: return the value."""

    value: Any


@dataclass(frozen=True)
class Stub:
    """The system announces an operation; nothing after it is known yet."""

    op: str


@dataclass(frozen=True)
class Move:
    """Operation announced, outcome answered, interaction continues."""

    op: str
    outcome: str
    rest: "Coplay"


Coplay = Ret | Stub | Move


def check_coplay(sig: EffectSignature, s: Coplay) -> None:
    """Validate op names and outcomes against the signature."""
    while isinstance(s, Move):
        desc = sig.arity(s.op)
        if s.outcome not in desc:
            raise ValueError(f"{s.outcome!r} is not an outcome of {s.op!r}")
        s = s.rest
    if isinstance(s, Stub):
        sig.arity(s.op)


def prefix(s: Coplay, t: Coplay) -> bool:
    """Prefix order on coplays, by the four inductive rules:

    x <= x      m <= m      m <= m n t      s <= t  =>  m n s <= m n t
    """
    match (s, t):
        case (Ret(x), Ret(y)):
            return x == y
        case (Stub(m), Stub(n)) | (Stub(m), Move(n, _, _)):
            return m == n
        case (Move(m, a, s1), Move(n, b, t1)):
            return m == n and a == b and prefix(s1, t1)
        case _:
            return False


def coherent(s: Coplay, t: Coplay) -> bool:
    """Symmetric coherence relation enforcing deterministic system behavior.

    Two coplays cohere when they agree on the system's choices and differ,
    if at all, only after the environment picked different outcomes:

    x ~ x    m ~ m    m ~ m n s (either side)    m n1 s1 ~ m n2 s2 when n1 = n2 => s1 ~ s2
    """
    match (s, t):
        case (Ret(x), Ret(y)):
            return x == y
        case (Stub(m), Stub(n)) | (Stub(m), Move(n, _, _)) | (Move(m, _, _), Stub(n)):
            return m == n
        case (Move(m, a, s1), Move(n, b, t1)):
            return m == n and (a != b or coherent(s1, t1))
        case _:
            return False


def proper_prefixes(s: Coplay) -> Iterator[Coplay]:
    """All coplays strictly below s in the prefix order."""
    if isinstance(s, Move):
        yield Stub(s.op)
        for p in proper_prefixes(s.rest):
            yield Move(s.op, s.outcome, p)


def coplay_key(s: Coplay):
    """Sort key: returns, then stubs, then moves; lexicographic within."""
    match s:
        case Ret(x):
            return (0, str(x))
        case Stub(m):
            return (1, m)
        case Move(m, n, rest):
            return (2, m, n, coplay_key(rest))


@dataclass(frozen=True)
class Costrategy:
    """Prefix-closed, pairwise-coherent set of coplays, ordered by inclusion.

    Instances are produced by `make_costrategy` (which closes and checks)
    or by the generator operations below, whose outputs satisfy the
    invariants whenever their inputs do. The empty strategy is the least
    element.
    """

    plays: frozenset

    def __contains__(self, s: Coplay) -> bool:
        return s in self.plays

    def __iter__(self) -> Iterator[Coplay]:
        return iter(sorted(self.plays, key=coplay_key))

    def __len__(self) -> int:
        return len(self.plays)

    def __le__(self, other: "Costrategy") -> bool:
        return self.plays <= other.plays

    def __lt__(self, other: "Costrategy") -> bool:
        return self.plays < other.plays


BOTTOM_STRATEGY = Costrategy(frozenset())


def make_costrategy(plays: Iterable[Coplay], sig: EffectSignature | None = None) -> Costrategy:
    """Down-close the given coplays and check pairwise coherence.

    Raises IncoherentPair naming a violating pair; with a signature also
    validates well-sortedness of every play.
    """
    closed = set()
    stack = list(plays)
    while stack:
        s = stack.pop()
        if s in closed:
            continue
        if sig is not None:
            check_coplay(sig, s)
        closed.add(s)
        stack.extend(proper_prefixes(s))
    ordered = sorted(closed, key=coplay_key)
    for i, s in enumerate(ordered):
        for t in ordered[i + 1 :]:
            if not coherent(s, t):
                raise IncoherentPair(s, t)
    return Costrategy(frozenset(closed))


def strat_eta(x) -> Costrategy:
    """Strategy of a computation that immediately returns x."""
    return Costrategy(frozenset({Ret(x)}))


def strat_con(sig: EffectSignature, op: str, children: Iterable[Costrategy]) -> Costrategy:
    """Strategy-level operation application:

    {op} + {op n s | n-th child strategy contains s}

    The bare announcement is always present, so the result is non-bottom
    even when every continuation is the bottom strategy.
    """
    desc = sig.arity(op)
    kids = tuple(children)
    if len(kids) != len(desc):
        raise ArityMismatch(op, len(desc), len(kids))
    plays = {Stub(op)}
    for label, child in zip(desc.labels, kids):
        plays.update(Move(op, label, s) for s in child.plays)
    return Costrategy(frozenset(plays))


@dataclass(frozen=True)
class OpCase:
    op: str
    children: tuple


@dataclass(frozen=True)
class RetCase:
    value: Any


@dataclass(frozen=True)
class BotCase:
    pass


def strat_d(sig: EffectSignature, sigma: Costrategy):
    """One-step decomposition of a costrategy.

    OpCase(m, per-outcome children) if the strategy announces m, RetCase(x)
    if it returns x, BotCase if it is the bottom strategy. Coherence makes
    the cases mutually exclusive; this inverts strat_con / strat_eta.
    """
    for head in sigma.plays:
        if isinstance(head, Ret):
            return RetCase(head.value)
        op = head.op
        children = []
        for label in sig.arity(op).labels:
            sub = frozenset(
                p.rest for p in sigma.plays if isinstance(p, Move) and p.op == op and p.outcome == label
            )
            children.append(Costrategy(sub))
        return OpCase(op, tuple(children))
    return BotCase()


def embed_term(sig: EffectSignature, t) -> Costrategy:
    """Interpret a partial term as a costrategy.

    Variables become immediate returns, operation nodes apply strat_con,
    and the undefined leaf becomes the bottom strategy. Injective on terms
    and an order-embedding: leq(s, t) iff embed(s) is a subset of embed(t).
    """
    match t:
        case Bot():
            return BOTTOM_STRATEGY
        case Var(x):
            return strat_eta(x)
        case Op(name, children):
            return strat_con(sig, name, [embed_term(sig, c) for c in children])
        case _:
            raise TypeError(f"not a term: {t!r}")


def extract_partial(sig: EffectSignature, sigma: Costrategy):
    """Least partial term whose embedding contains the given costrategy.

    Inverse of embed_term on all finite costrategies: decompose with
    strat_d, mapping the bottom case to the undefined leaf.
    """
    match strat_d(sig, sigma):
        case BotCase():
            return BOT
        case RetCase(x):
            return Var(x)
        case OpCase(op, children):
            return Op(op, tuple(extract_partial(sig, c) for c in children))


def strat_union(sigmas: Iterable[Costrategy]) -> Costrategy:
    """Set union of costrategies; their least upper bound when it exists.

    The members must be pairwise compatible (the finite stand-in for a
    directed family); IncoherentPair is raised otherwise.
    """
    plays: set = set()
    for sigma in sigmas:
        plays.update(sigma.plays)
    ordered = sorted(plays, key=coplay_key)
    for i, s in enumerate(ordered):
        for t in ordered[i + 1 :]:
            if not coherent(s, t):
                raise IncoherentPair(s, t)
    return Costrategy(frozenset(plays))


def maximal_plays(sigma: Costrategy) -> tuple:
    """The plays not strictly below another member; printing aid only."""
    out = []
    for s in sigma:
        if not any(s is not t and prefix(s, t) for t in sigma.plays):
            out.append(s)
    return tuple(out)


def format_coplay(s: Coplay) -> str:
    """Space-separated move tokens; returns as `ret x`, stubs end at the op."""
    parts = []
    while isinstance(s, Move):
        parts.extend((s.op, s.outcome))
        s = s.rest
    if isinstance(s, Ret):
        parts.extend(("ret", str(s.value)))
    else:
        parts.append(s.op)
    return " ".join(parts)


def dump_costrategy(sigma: Costrategy) -> str:
    """One coplay per line in canonical order; bit-exact across runs."""
    return "\n".join(format_coplay(s) for s in sigma) + ("\n" if len(sigma) else "")


def parse_coplay(sig: EffectSignature, line: str) -> Coplay:
    """Inverse of format_coplay. `ret` is reserved and cannot name an op."""
    tokens = line.split()
    if not tokens:
        raise ValueError("empty coplay line")

    def go(pos: int) -> Coplay:
        tok = tokens[pos]
        if tok == "ret":
            if pos + 2 != len(tokens):
                raise ValueError(f"malformed return in {line!r}")
            return Ret(tokens[pos + 1])
        desc = sig.arity(tok)
        if pos + 1 == len(tokens):
            return Stub(tok)
        outcome = tokens[pos + 1]
        if outcome not in desc:
            raise ValueError(f"{outcome!r} is not an outcome of {tok!r} in {line!r}")
        return Move(tok, outcome, go(pos + 2))

    return go(0)


def parse_costrategy(sig: EffectSignature, text: str) -> Costrategy:
    """Parse a dump back into a costrategy (closing and checking it)."""
    plays = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        plays.append(parse_coplay(sig, line))
    return make_costrategy(plays, sig)
