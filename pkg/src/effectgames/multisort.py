"""Multi-sorted effect signatures and their bipartite game-graph reading.

Sorts are the states in which the system chooses an operation; arities are
the states in which the environment chooses an argument position. Each
operation maps its sort to an arity, each position maps its arity back to
a sort, so interactions are walks on a bipartite directed multigraph.
Typed terms and typed coplays are the sorted versions of the single-sorted
notions; `single_sorted_embed` exhibits an ordinary signature as the
one-sort case, where the typed and untyped worlds coincide up to
annotation.

Variable alphabets are declared per sort, since typed returns must know at
which sorts results may appear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator

from .signature import EffectSignature, UnknownOperation
from .strategy import Coplay, Move, Ret, Stub


class UnknownSort(ValueError):
    def __init__(self, sort):
        super().__init__(f"unknown sort: {sort!r}")
        self.sort = sort


class UnknownArity(ValueError):
    def __init__(self, arity):
        super().__init__(f"unknown arity: {arity!r}")
        self.arity = arity


@dataclass(frozen=True)
class MultiSortedSignature:
    """Sorts, arities, per-sort operations and per-arity positions.

    `ops[sort]` maps each operation symbol at that sort to the arity it
    leads to; `positions[arity]` maps each argument-position name to the
    sort it resumes at; `variables[sort]` is the typed return alphabet.
    Stored as nested tuples so equality is structural and order-sensitive.
    """

    sorts: tuple[str, ...]
    arities: tuple[str, ...]
    ops: tuple[tuple[str, tuple[tuple[str, str], ...]], ...]
    positions: tuple[tuple[str, tuple[tuple[str, str], ...]], ...]
    variables: tuple[tuple[str, tuple[str, ...]], ...]
    _ops: dict = field(init=False, repr=False, compare=False, hash=False)
    _positions: dict = field(init=False, repr=False, compare=False, hash=False)
    _variables: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_ops", {q: dict(ms) for q, ms in self.ops})
        object.__setattr__(self, "_positions", {r: dict(ns) for r, ns in self.positions})
        object.__setattr__(self, "_variables", {q: vs for q, vs in self.variables})

    def ops_of(self, sort: str) -> dict[str, str]:
        if sort not in self._ops:
            raise UnknownSort(sort)
        return self._ops[sort]

    def positions_of(self, arity: str) -> dict[str, str]:
        if arity not in self._positions:
            raise UnknownArity(arity)
        return self._positions[arity]

    def variables_of(self, sort: str) -> tuple[str, ...]:
        if sort not in self._ops:
            raise UnknownSort(sort)
        return self._variables.get(sort, ())

    def op_arity(self, sort: str, op: str) -> str:
        table = self.ops_of(sort)
        if op not in table:
            raise UnknownOperation(f"{sort}.{op}")
        return table[op]


def make_multisorted_signature(
    sorts: Iterable[str],
    arities: Iterable[str],
    ops: Iterable[tuple[str, str, str]],
    positions: Iterable[tuple[str, str, str]],
    variables: Iterable[tuple[str, str]] = (),
) -> MultiSortedSignature:
    """Build a signature from flat declaration lists.

    ops entries are (sort, symbol, arity); positions entries are
    (arity, position, sort); variables entries are (sort, name).
    """
    sort_tuple = tuple(sorts)
    arity_tuple = tuple(arities)
    sort_set = set(sort_tuple)
    arity_set = set(arity_tuple)
    if len(sort_set) != len(sort_tuple):
        raise ValueError("duplicate sort")
    if len(arity_set) != len(arity_tuple):
        raise ValueError("duplicate arity")

    op_map: dict[str, list[tuple[str, str]]] = {q: [] for q in sort_tuple}
    for q, m, r in ops:
        if q not in sort_set:
            raise UnknownSort(q)
        if r not in arity_set:
            raise UnknownArity(r)
        if any(m == seen for seen, _ in op_map[q]):
            raise ValueError(f"operation {m!r} declared twice at sort {q!r}")
        op_map[q].append((m, r))

    pos_map: dict[str, list[tuple[str, str]]] = {r: [] for r in arity_tuple}
    for r, n, q in positions:
        if r not in arity_set:
            raise UnknownArity(r)
        if q not in sort_set:
            raise UnknownSort(q)
        if any(n == seen for seen, _ in pos_map[r]):
            raise ValueError(f"position {n!r} declared twice at arity {r!r}")
        pos_map[r].append((n, q))

    var_map: dict[str, list[str]] = {q: [] for q in sort_tuple}
    for q, x in variables:
        if q not in sort_set:
            raise UnknownSort(q)
        if x in var_map[q]:
            raise ValueError(f"variable {x!r} declared twice at sort {q!r}")
        var_map[q].append(x)

    return MultiSortedSignature(
        sort_tuple,
        arity_tuple,
        tuple((q, tuple(op_map[q])) for q in sort_tuple),
        tuple((r, tuple(pos_map[r])) for r in arity_tuple),
        tuple((q, tuple(var_map[q])) for q in sort_tuple),
    )


MAIN_SORT = "main"


def single_sorted_embed(sig: EffectSignature, variables: Iterable[str] = ()) -> MultiSortedSignature:
    """Read an ordinary signature as a one-sort multi-sorted signature.

    One arity per operation (named after it); argument positions are the
    operation's outcome labels, all resuming at the unique sort. The
    optional variable alphabet is declared at that sort.
    """
    return make_multisorted_signature(
        sorts=[MAIN_SORT],
        arities=list(sig.operations),
        ops=[(MAIN_SORT, m, m) for m in sig.operations],
        positions=[(m, label, MAIN_SORT) for m in sig.operations for label in sig.arity(m).labels],
        variables=[(MAIN_SORT, x) for x in variables],
    )


# --- typed terms -----------------------------------------------------------


@dataclass(frozen=True)
class TypedVar:
    sort: str
    value: Any


@dataclass(frozen=True)
class TypedOp:
    sort: str
    op: str
    children: tuple


TypedTerm = TypedVar | TypedOp


def typed_var(msig: MultiSortedSignature, sort: str, value) -> TypedVar:
    if sort not in msig.sorts:
        raise UnknownSort(sort)
    return TypedVar(sort, value)


def typed_op(msig: MultiSortedSignature, sort: str, op: str, children: Iterable[TypedTerm]) -> TypedOp:
    """Checked constructor: children in declared position order, each at the
    sort its position resumes at."""
    arity = msig.op_arity(sort, op)
    expected = list(msig.positions_of(arity).values())
    kids = tuple(children)
    if len(kids) != len(expected):
        raise ValueError(f"{sort}.{op} expects {len(expected)} children, got {len(kids)}")
    for child, want in zip(kids, expected):
        if child.sort != want:
            raise ValueError(f"child of {sort}.{op} has sort {child.sort!r}, expected {want!r}")
    return TypedOp(sort, op, kids)


def typed_fold(msig: MultiSortedSignature, t: TypedTerm, alpha: Callable, rho: Callable):
    """Mutually recursive evaluation respecting sorts.

    alpha(sort, op, folded_children) interprets operation nodes;
    rho(sort, x) assigns typed variables.
    """
    match t:
        case TypedVar(sort, x):
            return rho(sort, x)
        case TypedOp(sort, op, children):
            vals = tuple(typed_fold(msig, c, alpha, rho) for c in children)
            return alpha(sort, op, vals)
        case _:
            raise TypeError(f"not a typed term: {t!r}")


def annotate_term(msig: MultiSortedSignature, sort: str, t) -> TypedTerm:
    """Lift an untyped term into sort annotations (total terms only)."""
    from .term import Op, Var  # local import to keep module deps one-way

    match t:
        case Var(x):
            return typed_var(msig, sort, x)
        case Op(name, children):
            arity = msig.op_arity(sort, name)
            child_sorts = list(msig.positions_of(arity).values())
            return typed_op(
                msig, sort, name, [annotate_term(msig, q, c) for q, c in zip(child_sorts, children)]
            )
        case _:
            raise TypeError(f"not a total term: {t!r}")


# --- typed coplays ---------------------------------------------------------


@dataclass(frozen=True)
class TypedRet:
    sort: str
    value: Any


@dataclass(frozen=True)
class TypedStub:
    sort: str
    op: str


@dataclass(frozen=True)
class TypedMove:
    sort: str
    op: str
    position: str
    rest: "TypedCoplay"


TypedCoplay = TypedRet | TypedStub | TypedMove


def check_typed_coplay(msig: MultiSortedSignature, s: TypedCoplay) -> None:
    """Validate sort-correct transitions along the play."""
    while isinstance(s, TypedMove):
        arity = msig.op_arity(s.sort, s.op)
        table = msig.positions_of(arity)
        if s.position not in table:
            raise ValueError(f"{s.position!r} is not a position of arity {arity!r}")
        if s.rest.sort != table[s.position]:
            raise ValueError(
                f"continuation sort {s.rest.sort!r} does not match position {s.position!r}"
            )
        s = s.rest
    if isinstance(s, TypedStub):
        msig.op_arity(s.sort, s.op)
    else:
        if s.value not in msig.variables_of(s.sort):
            raise ValueError(f"{s.value!r} is not a declared variable of sort {s.sort!r}")


def strip_play(s: TypedCoplay) -> Coplay:
    """Forget the sort annotations (positions become outcome labels)."""
    match s:
        case TypedRet(_, x):
            return Ret(x)
        case TypedStub(_, m):
            return Stub(m)
        case TypedMove(_, m, n, rest):
            return Move(m, n, strip_play(rest))


def play_length(s: TypedCoplay) -> int:
    """Number of system moves in the play."""
    length = 1
    while isinstance(s, TypedMove):
        length += 1
        s = s.rest
    return length


def typed_play_key(s: TypedCoplay):
    match s:
        case TypedRet(sort, x):
            return (0, sort, str(x))
        case TypedStub(sort, m):
            return (1, sort, m)
        case TypedMove(sort, m, n, rest):
            return (2, sort, m, n, typed_play_key(rest))


def typed_prefixes(s: TypedCoplay) -> Iterator[TypedCoplay]:
    """All plays strictly below s in the (sorted) prefix order."""
    if isinstance(s, TypedMove):
        yield TypedStub(s.sort, s.op)
        for p in typed_prefixes(s.rest):
            yield TypedMove(s.sort, s.op, s.position, p)


def typed_prefix(s: TypedCoplay, t: TypedCoplay) -> bool:
    match (s, t):
        case (TypedRet(q1, x), TypedRet(q2, y)):
            return q1 == q2 and x == y
        case (TypedStub(q1, m), TypedStub(q2, n)) | (TypedStub(q1, m), TypedMove(q2, n, _, _)):
            return q1 == q2 and m == n
        case (TypedMove(q1, m, a, s1), TypedMove(q2, n, b, t1)):
            return q1 == q2 and m == n and a == b and typed_prefix(s1, t1)
        case _:
            return False


def typed_coherent(s: TypedCoplay, t: TypedCoplay) -> bool:
    """Sort-annotated version of the single-sorted coherence relation."""
    match (s, t):
        case (TypedRet(q1, x), TypedRet(q2, y)):
            return q1 == q2 and x == y
        case (
            (TypedStub(q1, m), TypedStub(q2, n))
            | (TypedStub(q1, m), TypedMove(q2, n, _, _))
            | (TypedMove(q1, m, _, _), TypedStub(q2, n))
        ):
            return q1 == q2 and m == n
        case (TypedMove(q1, m, a, s1), TypedMove(q2, n, b, t1)):
            return q1 == q2 and m == n and (a != b or typed_coherent(s1, t1))
        case _:
            return False


@dataclass(frozen=True)
class TypedCostrategy:
    """Down-closed, pairwise-coherent set of typed coplays at one sort."""

    sort: str
    plays: frozenset

    def __len__(self) -> int:
        return len(self.plays)

    def __iter__(self):
        return iter(sorted(self.plays, key=typed_play_key))


def make_typed_costrategy(
    msig: MultiSortedSignature, sort: str, plays: Iterable[TypedCoplay]
) -> TypedCostrategy:
    if sort not in msig.sorts:
        raise UnknownSort(sort)
    closed: set = set()
    stack = list(plays)
    while stack:
        s = stack.pop()
        if s in closed:
            continue
        if s.sort != sort:
            raise ValueError(f"play at sort {s.sort!r} in a strategy at sort {sort!r}")
        check_typed_coplay(msig, s)
        closed.add(s)
        stack.extend(typed_prefixes(s))
    ordered = sorted(closed, key=typed_play_key)
    for i, s in enumerate(ordered):
        for t in ordered[i + 1 :]:
            if not typed_coherent(s, t):
                raise ValueError(
                    f"incoherent typed coplays: {typed_play_key(s)} vs {typed_play_key(t)}"
                )
    return TypedCostrategy(sort, frozenset(closed))


def enumerate_plays(msig: MultiSortedSignature, initial_sort: str, k: int) -> list[TypedCoplay]:
    """All sort-correct plays of at most k system moves from the given sort,
    canonically ordered and duplicate-free."""
    if initial_sort not in msig.sorts:
        raise UnknownSort(initial_sort)

    def go(sort: str, budget: int) -> list[TypedCoplay]:
        if budget < 1:
            return []
        plays: list[TypedCoplay] = [TypedRet(sort, x) for x in msig.variables_of(sort)]
        for m, arity in msig.ops_of(sort).items():
            plays.append(TypedStub(sort, m))
            for n, next_sort in msig.positions_of(arity).items():
                plays.extend(TypedMove(sort, m, n, rest) for rest in go(next_sort, budget - 1))
        return plays

    return sorted(set(go(initial_sort, k)), key=typed_play_key)


# --- game graph ------------------------------------------------------------


@dataclass(frozen=True)
class GameGraph:
    """Bipartite directed multigraph: system vertices are sorts, environment
    vertices are arities; edges are operations and argument positions."""

    proponent_vertices: tuple[str, ...]
    opponent_vertices: tuple[str, ...]
    op_edges: tuple[tuple[str, str, str], ...]
    pos_edges: tuple[tuple[str, str, str], ...]


def game_graph(msig: MultiSortedSignature) -> GameGraph:
    return GameGraph(
        proponent_vertices=msig.sorts,
        opponent_vertices=msig.arities,
        op_edges=tuple((q, m, r) for q, ms in msig.ops for m, r in ms),
        pos_edges=tuple((r, n, q) for r, ns in msig.positions for n, q in ns),
    )


# --- text format ----------------------------------------------------------
#
#   sort A            arity R           op A.m -> R
#   pos R.n -> B      var A x


def parse_multisorted_signature(text: str) -> MultiSortedSignature:
    sorts: list[str] = []
    arities: list[str] = []
    ops: list[tuple[str, str, str]] = []
    positions: list[tuple[str, str, str]] = []
    variables: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "sort" and len(parts) == 2:
                sorts.append(parts[1])
            elif kind == "arity" and len(parts) == 2:
                arities.append(parts[1])
            elif kind == "op" and len(parts) == 4 and parts[2] == "->":
                owner, _, symbol = parts[1].partition(".")
                if not symbol:
                    raise ValueError
                ops.append((owner, symbol, parts[3]))
            elif kind == "pos" and len(parts) == 4 and parts[2] == "->":
                owner, _, name = parts[1].partition(".")
                if not name:
                    raise ValueError
                positions.append((owner, name, parts[3]))
            elif kind == "var" and len(parts) == 3:
                variables.append((parts[1], parts[2]))
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"line {lineno}: malformed declaration {raw!r}") from None
    return make_multisorted_signature(sorts, arities, ops, positions, variables)


def format_multisorted_signature(msig: MultiSortedSignature) -> str:
    lines = [f"sort {q}" for q in msig.sorts]
    lines += [f"arity {r}" for r in msig.arities]
    lines += [f"op {q}.{m} -> {r}" for q, ms in msig.ops for m, r in ms]
    lines += [f"pos {r}.{n} -> {q}" for r, ns in msig.positions for n, q in ns]
    lines += [f"var {q} {x}" for q, vs in msig.variables for x in vs]
    return "\n".join(lines) + "\n"
