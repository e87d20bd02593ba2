"""Effect signatures: named operations with finite, enumerated outcome sets.

A signature is the shared vocabulary of every other module: term nodes,
machine transitions and strategy moves are all validated against one.
Outcome sets are kept as ordered label lists because everything downstream
(coherence checking, exhaustive enumeration, brute-force oracles) needs to
enumerate them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


class DuplicateOperation(ValueError):
    def __init__(self, name: str):
        super().__init__(f"operation declared twice: {name!r}")
        self.name = name


class DuplicateOutcome(ValueError):
    def __init__(self, op: str, label: str):
        super().__init__(f"outcome {label!r} declared twice for operation {op!r}")
        self.op = op
        self.label = label


class UnknownOperation(ValueError):
    def __init__(self, op: str):
        super().__init__(f"unknown operation: {op!r}")
        self.op = op


@dataclass(frozen=True)
class ArityDescriptor:
    """Ordered, pairwise-distinct outcome labels of one operation.

    The empty tuple is a nullary operation (no way for the environment to
    answer, so a term node built from it is a leaf).
    """

    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class EffectSignature:
    """Ordered map from operation name to its arity descriptor.

    Equality is structural and order-sensitive: same names, same arities,
    same declaration order. Parameterized operation families are expected
    to be materialized one name per parameter value (e.g. "print[Hi]").
    """

    decls: tuple[tuple[str, ArityDescriptor], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", dict(self.decls))

    @property
    def operations(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.decls)

    def __contains__(self, op: object) -> bool:
        return op in self._index

    def __len__(self) -> int:
        return len(self.decls)

    def arity(self, op: str) -> ArityDescriptor:
        try:
            return self._index[op]
        except KeyError:
            raise UnknownOperation(op) from None


def make_signature(decls: Iterable[tuple[str, Iterable[str]]]) -> EffectSignature:
    """Build a signature from (name, outcome-labels) pairs, preserving order.

    Raises DuplicateOperation / DuplicateOutcome on repeated names or labels.
    """
    seen: set[str] = set()
    out = []
    for name, labels in decls:
        if name in seen:
            raise DuplicateOperation(name)
        seen.add(name)
        label_tuple = tuple(labels)
        label_seen: set[str] = set()
        for label in label_tuple:
            if label in label_seen:
                raise DuplicateOutcome(name, label)
            label_seen.add(label)
        out.append((name, ArityDescriptor(label_tuple)))
    return EffectSignature(tuple(out))


def arity(sig: EffectSignature, op: str) -> ArityDescriptor:
    """Arity descriptor of a declared operation; UnknownOperation otherwise."""
    return sig.arity(op)


def parse_signature(text: str) -> EffectSignature:
    """Parse the signature text format: one `name : label1 label2 ...` per line.

    `name :` alone declares a nullary operation. Blank lines and lines
    starting with `#` are ignored. Names may not contain `:` or whitespace.
    """
    decls = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise ValueError(f"line {lineno}: expected `name : labels`, got {raw!r}")
        name, _, rest = line.partition(":")
        name = name.strip()
        if not name or any(c.isspace() for c in name):
            raise ValueError(f"line {lineno}: bad operation name in {raw!r}")
        decls.append((name, rest.split()))
    return make_signature(decls)


def format_signature(sig: EffectSignature) -> str:
    """Inverse of parse_signature, one declaration per line."""
    lines = []
    for name, desc in sig.decls:
        suffix = (" " + " ".join(desc.labels)) if desc.labels else ""
        lines.append(f"{name} :{suffix}")
    return "\n".join(lines) + "\n"
