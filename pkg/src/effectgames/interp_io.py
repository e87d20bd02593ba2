"""Concrete target monad for the greeting example: bit-indexed IO behaviors.

A behavior maps each input bit to the characters printed plus either a
result value or the no-result marker. The module packages the standard
interpretation of `readbit` / `print[s]` / `stop` into this monad as a
handler, so greeting-style terms can be evaluated to behaviors with a
single fold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .signature import EffectSignature, make_signature
from .term import BOT, Bot, Handler, con, eta

BITS = ("tt", "ff")


@dataclass(frozen=True)
class IOBehavior:
    """Per input bit: (characters printed, result value or the bottom marker)."""

    tt: tuple[str, Any]
    ff: tuple[str, Any]

    def __call__(self, bit: str) -> tuple[str, Any]:
        if bit == "tt":
            return self.tt
        if bit == "ff":
            return self.ff
        raise ValueError(f"not a bit: {bit!r}")


def io_unit(x) -> IOBehavior:
    """Pure computation: no output, result x on both bits."""
    return IOBehavior(("", x), ("", x))


def io_map(f: Callable, beh: IOBehavior) -> IOBehavior:
    """Apply f to defined results, leaving output and bottoms untouched."""

    def at(pair):
        out, res = pair
        return (out, res if isinstance(res, Bot) else f(res))

    return IOBehavior(at(beh.tt), at(beh.ff))


def io_mult(outer: IOBehavior) -> IOBehavior:
    """Flatten a behavior whose results are behaviors.

    The same bit drives both layers: run the outer behavior on b, then (if
    it produced an inner behavior) run that on b too, concatenating the
    outputs. A bottom outer result stays bottom, keeping the outer output.
    """

    def at(bit: str) -> tuple[str, Any]:
        out, res = outer(bit)
        if isinstance(res, Bot):
            return (out, BOT)
        inner_out, inner_res = res(bit)
        return (out + inner_out, inner_res)

    return IOBehavior(at("tt"), at("ff"))


def io_bind(beh: IOBehavior, k: Callable) -> IOBehavior:
    """Kleisli extension: io_mult after mapping k over the results."""
    return io_mult(io_map(k, beh))


PRINT_PREFIX = "print["


def print_op(s: str) -> str:
    """Name of the materialized print operation for parameter s."""
    return f"{PRINT_PREFIX}{s}]"


def _print_parameter(op: str) -> str | None:
    if op.startswith(PRINT_PREFIX) and op.endswith("]"):
        return op[len(PRINT_PREFIX) : -1]
    return None


def io_algebra(sig: EffectSignature | None = None) -> Handler:
    """Handler interpreting readbit / print[s] / stop into IO behaviors.

    readbit answers each bit with itself (continuation for outcome b runs
    on input b), print[s] prepends s to its continuation's output, stop
    ends with no output and no result. Operations of other shapes get no
    clause, so handling a term that uses them raises MissingClause.
    """
    if sig is None:
        sig = greeting_signature()

    def readbit_clause(vals):
        k_tt, k_ff = vals
        return IOBehavior(k_tt.tt, k_ff.ff)

    def print_clause(s):
        def clause(vals):
            (k,) = vals
            return IOBehavior((s + k.tt[0], k.tt[1]), (s + k.ff[0], k.ff[1]))

        return clause

    def stop_clause(vals):
        return IOBehavior(("", BOT), ("", BOT))

    clauses = {}
    for op in sig.operations:
        param = _print_parameter(op)
        if op == "readbit" and len(sig.arity(op)) == 2:
            clauses[op] = readbit_clause
        elif param is not None and len(sig.arity(op)) == 1:
            clauses[op] = print_clause(param)
        elif op == "stop" and len(sig.arity(op)) == 0:
            clauses[op] = stop_clause
    return Handler(clauses, io_unit)


def greeting_signature() -> EffectSignature:
    """readbit : tt ff, print[Hi] : *, print[Hello] : *, stop :"""
    return make_signature(
        [
            ("readbit", ["tt", "ff"]),
            (print_op("Hi"), ["*"]),
            (print_op("Hello"), ["*"]),
            ("stop", []),
        ]
    )


def greeting_term():
    """readbit(print[Hi](stop), print[Hello](stop)) over the greeting signature."""
    sig = greeting_signature()
    stop = con(sig, "stop", [])
    return con(
        sig,
        "readbit",
        [con(sig, print_op("Hi"), [stop]), con(sig, print_op("Hello"), [stop])],
    )


def format_behavior(beh: IOBehavior) -> str:
    """Two lines, one per bit: `tt: "out" result`."""
    lines = []
    for bit in BITS:
        out, res = beh(bit)
        shown = "⊥" if isinstance(res, Bot) else str(res)
        lines.append(f'{bit}: "{out}" {shown}')
    return "\n".join(lines)
