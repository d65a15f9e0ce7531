"""Integer partitions, Frobenius coordinates and Young-diagram data.

Partitions are plain tuples of positive integers in weakly decreasing order;
the empty tuple is the unique partition of 0.
"""
from __future__ import annotations

import json
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Iterator, NamedTuple, Sequence

Partition = tuple[int, ...]


class FrobeniusCoords(NamedTuple):
    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.alpha)


class Cell(NamedTuple):
    row: int
    col: int

    @property
    def content(self) -> int:
        return self.col - self.row


def partition(parts: Sequence[int]) -> Partition:
    """Validate ``parts`` and return it as a canonical partition tuple."""
    lam = tuple(int(p) for p in parts)
    for i, p in enumerate(lam):
        if p < 1:
            raise ValueError(f"partition {list(parts)} has a non-positive part")
        if i and p > lam[i - 1]:
            raise ValueError(f"partition {list(parts)} is not weakly decreasing")
    return lam


def weight(lam: Partition) -> int:
    return sum(lam)


def multiplicities(lam: Partition) -> dict[int, int]:
    return dict(Counter(lam))


def conjugate(lam: Partition) -> Partition:
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p > j) for j in range(lam[0]))


def to_frobenius(lam: Partition) -> FrobeniusCoords:
    conj = conjugate(lam)
    k = sum(1 for i, p in enumerate(lam) if p > i)
    alpha = tuple(lam[i] - i - 1 for i in range(k))
    beta = tuple(conj[i] - i - 1 for i in range(k))
    return FrobeniusCoords(alpha, beta)


def _strictly_decreasing(seq: Sequence[int]) -> bool:
    return all(a > b for a, b in zip(seq, seq[1:]))


def from_frobenius(fc: FrobeniusCoords | tuple[Sequence[int], Sequence[int]]) -> Partition:
    alpha, beta = (tuple(int(x) for x in s) for s in fc)
    if len(alpha) != len(beta):
        raise ValueError(f"Frobenius arms {alpha} and legs {beta} differ in length")
    if not (_strictly_decreasing(alpha) and _strictly_decreasing(beta)):
        raise ValueError(f"Frobenius coordinates ({alpha}|{beta}) must be strictly decreasing")
    if any(x < 0 for x in alpha + beta):
        raise ValueError(f"Frobenius coordinates ({alpha}|{beta}) must be non-negative")
    k = len(alpha)
    rows = [alpha[i] + i + 1 for i in range(k)]
    # rows below the Durfee square: row r has #{i : beta_i + i >= r} boxes
    depth = beta[0] + 1 if k else 0
    for r in range(k, depth):
        rows.append(sum(1 for i in range(k) if beta[i] + i >= r))
    return tuple(rows)


def cells(lam: Partition) -> Iterator[Cell]:
    """Boxes of the Young diagram, 1-based, row by row."""
    for i, p in enumerate(lam, start=1):
        for j in range(1, p + 1):
            yield Cell(i, j)


def content_multiset(lam: Partition) -> Counter:
    return Counter(c.content for c in cells(lam))


def hook_lengths(lam: Partition) -> list[int]:
    conj = conjugate(lam)
    return [lam[i - 1] - j + conj[j - 1] - i + 1 for i, j in cells(lam)]


def dim_ratio(lam: Partition) -> Fraction:
    """The ratio prod_{i<j}(l_i - l_j - i + j) / prod_i (l_i - i + L)!.

    With L the number of parts this equals dim(lam) / |lam|!.
    """
    L = len(lam)
    num = prod(lam[i] - lam[j] + j - i for i in range(L) for j in range(i + 1, L))
    den = prod(factorial(lam[i] - i - 1 + L) for i in range(L))
    return Fraction(num, den)


@lru_cache(maxsize=None)
def dim_sym(lam: Partition) -> int:
    """Number of standard Young tableaux of shape ``lam`` (hook-length formula)."""
    return factorial(weight(lam)) // prod(hook_lengths(lam))


def _partitions_bounded(d: int, largest: int) -> Iterator[Partition]:
    if d == 0:
        yield ()
        return
    for first in range(min(d, largest), 0, -1):
        for rest in _partitions_bounded(d - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _partitions_cached(d: int) -> tuple[Partition, ...]:
    return tuple(_partitions_bounded(d, d))


def partitions_of(d: int) -> list[Partition]:
    """All partitions of ``d`` in reverse-lexicographic order."""
    if d < 0:
        raise ValueError("weight must be non-negative")
    return list(_partitions_cached(d))


def partitions_up_to(D: int) -> list[Partition]:
    return [lam for d in range(D + 1) for lam in _partitions_cached(d)]


def to_json(lam: Partition) -> str:
    return json.dumps(list(lam))


def from_json(text: str) -> Partition:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("a partition is encoded as a JSON array of integers")
    return partition(data)


def frobenius_to_json(fc: FrobeniusCoords) -> str:
    return json.dumps({"alpha": list(fc.alpha), "beta": list(fc.beta)})


def frobenius_from_json(text: str) -> FrobeniusCoords:
    data = json.loads(text)
    fc = FrobeniusCoords(tuple(data["alpha"]), tuple(data["beta"]))
    from_frobenius(fc)  # validates
    return fc
