"""Level labels: finite sets of scale indices.

A label names a level of standardness.  The numeral ``n`` abbreviates the
label ``{0, ..., n-1}``, so ``numeral(0)`` is the empty label of the
standard level.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import NotSubset, ParseError, SizeMismatch

DEFAULT_SCALES = 8


@dataclass(frozen=True, order=False)
class Label:
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(self.indices)
        if any(not isinstance(i, int) or isinstance(i, bool) or i < 0 for i in idx):
            raise ValueError(f"label indices must be naturals: {idx!r}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError(f"label indices must be strictly increasing: {idx!r}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, items: Iterable[int]) -> "Label":
        return cls(tuple(sorted(set(items))))

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i) -> bool:
        return i in self.indices

    def __and__(self, other: "Label") -> "Label":
        return Label.of(set(self.indices) & set(other.indices))

    def __or__(self, other: "Label") -> "Label":
        return Label.of(set(self.indices) | set(other.indices))

    def issubset(self, other: "Label") -> bool:
        return set(self.indices) <= set(other.indices)

    @property
    def min(self) -> int:
        if not self.indices:
            raise ValueError("empty label has no minimum")
        return self.indices[0]

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"

    def __repr__(self) -> str:
        return f"Label({self})"


LabelLike = Union[Label, int, Iterable[int], str]


def numeral(n: int) -> Label:
    """The label ``{0, ..., n-1}``."""
    if n < 0:
        raise ValueError("numeral must be a natural number")
    return Label(tuple(range(n)))


_LABEL_RE = re.compile(r"\s*(?:\{\s*((?:\d+\s*(?:,\s*\d+\s*)*)?)\}|(\d+))\s*$")


def parse_label(text: str) -> Label:
    """Parse ``{0,2,5}``, ``{}`` or a numeral such as ``3``."""
    m = _LABEL_RE.match(text)
    if not m:
        raise ParseError(f"bad label {text!r}", 0)
    if m.group(2) is not None:
        return numeral(int(m.group(2)))
    body = m.group(1)
    items = [int(t) for t in body.split(",")] if body and body.strip() else []
    if len(set(items)) != len(items):
        raise ParseError(f"repeated index in label {text!r}", 0)
    return Label.of(items)


def as_label(value: LabelLike) -> Label:
    if isinstance(value, Label):
        return value
    if isinstance(value, str):
        return parse_label(value)
    if isinstance(value, int):
        return numeral(value)
    return Label.of(value)


def oplus(r: int, a: LabelLike) -> Label:
    """Translate every index of ``a`` by ``r``."""
    a = as_label(a)
    return Label(tuple(r + s for s in a))


def boxplus(r: int, a: LabelLike) -> Label:
    """``{0..r-1}`` together with ``oplus(r, a)``; on numerals, ``r + n``."""
    a = as_label(a)
    return Label(tuple(range(r)) + tuple(r + s for s in a))


def label_less(a: LabelLike, b: LabelLike) -> bool:
    a, b = as_label(a), as_label(b)
    return all(s < t for s in a for t in b)


def order_iso(a: LabelLike, b: LabelLike) -> dict[int, int]:
    """The unique order-preserving bijection from ``a`` onto ``b``."""
    a, b = as_label(a), as_label(b)
    if len(a) != len(b):
        raise SizeMismatch(f"|{a}| = {len(a)} but |{b}| = {len(b)}")
    return dict(zip(a.indices, b.indices))


def restrict_image(a: LabelLike, a2: LabelLike, b: LabelLike) -> Label:
    """Image of ``b`` (a subset of ``a``) under ``order_iso(a, a2)``."""
    a, a2, b = as_label(a), as_label(a2), as_label(b)
    iso = order_iso(a, a2)
    if not b.issubset(a):
        raise NotSubset(f"{b} is not a subset of {a}")
    return Label.of(iso[s] for s in b)
