"""Finite state machines emitting effects, unfolded into partial terms.

Each state either emits an operation (with a successor state per outcome),
returns a value, or silently diverges. `unfold` runs the transition
function to a depth bound, writing the undefined leaf where the bound (or
divergence) cuts the behavior off; growing the bound yields an ascending
chain of partial terms. Divergence is a third transition case, not an
operation of the signature, so no silent-step quotienting is ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .signature import EffectSignature
from .strategy import Costrategy, embed_term
from .term import BOT, ArityMismatch, Op, Var


class UnknownState(ValueError):
    def __init__(self, state):
        super().__init__(f"unknown state: {state!r}")
        self.state = state


@dataclass(frozen=True)
class Emit:
    """Trigger an operation; one successor state per outcome label."""

    op: str
    next: tuple


@dataclass(frozen=True)
class Return:
    value: Any


@dataclass(frozen=True)
class Diverge:
    pass


@dataclass(frozen=True)
class StateMachine:
    sig: EffectSignature
    states: tuple
    delta: Mapping
    start: Any

    def __hash__(self):  # delta is a plain dict
        return hash((self.sig, self.states, self.start))


def make_machine(sig: EffectSignature, delta: Mapping, start, states=None) -> StateMachine:
    """Validate and freeze a machine: delta total, transitions well-sorted.

    States default to delta's keys (in declaration order).
    """
    state_tuple = tuple(states) if states is not None else tuple(delta.keys())
    state_set = set(state_tuple)
    if start not in state_set:
        raise UnknownState(start)
    for q in state_tuple:
        if q not in delta:
            raise UnknownState(q)
        match delta[q]:
            case Emit(op, successors):
                desc = sig.arity(op)
                if len(successors) != len(desc):
                    raise ArityMismatch(op, len(desc), len(successors))
                for q2 in successors:
                    if q2 not in state_set:
                        raise UnknownState(q2)
            case Return(_) | Diverge():
                pass
            case other:
                raise TypeError(f"not a transition: {other!r}")
    for q in delta:
        if q not in state_set:
            raise UnknownState(q)
    return StateMachine(sig, state_tuple, dict(delta), start)


def unfold(machine: StateMachine, k: int):
    """Depth-k approximation of the machine's behavior from its start state.

    Depth 0 is the undefined leaf; returns resolve to variables, divergence
    to the undefined leaf, emissions to operation nodes over the unfoldings
    of their successors at depth k - 1.
    """
    return _unfold_state(machine, machine.start, k)


def _unfold_state(machine: StateMachine, q, k: int):
    if k <= 0:
        return BOT
    match machine.delta[q]:
        case Return(x):
            return Var(x)
        case Diverge():
            return BOT
        case Emit(op, successors):
            return Op(op, tuple(_unfold_state(machine, q2, k - 1) for q2 in successors))


def unfold_strategy(machine: StateMachine, k: int) -> Costrategy:
    """Costrategy of the depth-k unfolding; grows with k under inclusion."""
    return embed_term(machine.sig, unfold(machine, k))


def bisimilar_to_depth(m1: StateMachine, m2: StateMachine, k: int) -> bool:
    """True iff the two machines unfold to the same depth-k partial term."""
    if m1.sig != m2.sig:
        raise ValueError("machines are over different signatures")
    return unfold(m1, k) == unfold(m2, k)


# --- text format ----------------------------------------------------------
#
#   start: q0
#   q0 -> emit readbit q1 q2
#   q1 -> ret x
#   q2 -> diverge


def parse_machine(sig: EffectSignature, text: str) -> StateMachine:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append((lineno, line))
    if not lines:
        raise ValueError("empty machine file")
    header_no, header = lines[0]
    if not header.startswith("start:"):
        raise ValueError(f"line {header_no}: expected `start: STATE`")
    start = header[len("start:") :].strip()
    if not start:
        raise ValueError(f"line {header_no}: missing start state")
    delta = {}
    for lineno, line in lines[1:]:
        if "->" not in line:
            raise ValueError(f"line {lineno}: expected `STATE -> transition`")
        state, _, rhs = line.partition("->")
        state = state.strip()
        parts = rhs.split()
        if not state or not parts:
            raise ValueError(f"line {lineno}: malformed transition {line!r}")
        kind = parts[0]
        if kind == "emit":
            if len(parts) < 2:
                raise ValueError(f"line {lineno}: emit needs an operation")
            delta[state] = Emit(parts[1], tuple(parts[2:]))
        elif kind == "ret":
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: ret needs exactly one value")
            delta[state] = Return(parts[1])
        elif kind == "diverge":
            if len(parts) != 1:
                raise ValueError(f"line {lineno}: diverge takes no arguments")
            delta[state] = Diverge()
        else:
            raise ValueError(f"line {lineno}: unknown transition kind {kind!r}")
    return make_machine(sig, delta, start)


def format_machine(machine: StateMachine) -> str:
    lines = [f"start: {machine.start}"]
    for q in machine.states:
        match machine.delta[q]:
            case Emit(op, successors):
                tail = "".join(" " + str(s) for s in successors)
                lines.append(f"{q} -> emit {op}{tail}")
            case Return(x):
                lines.append(f"{q} -> ret {x}")
            case Diverge():
                lines.append(f"{q} -> diverge")
    return "\n".join(lines) + "\n"
