"""Hurwitz numbers: character formula and permutation-counting oracles.

For a base surface of Euler characteristic e = 2 - 2g and ramification
profiles Delta^1..Delta^m of common weight d,

    H = sum_{lam |- d} (dim lam / d!)^e  phi_lam(Delta^1) ... phi_lam(Delta^m).

The oracle counts tuples (a_1, b_1, ..., a_g, b_g, g_1, ..., g_m) in S_d^(2g+m)
with g_j of cycle type Delta^j and prod [a_i, b_i] * prod g_j = 1, divided by d!.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from .characters import fast_table
from .partitions import Partition, dim_sym, partition, partitions_of, weight

Perm = tuple[int, ...]


@dataclass(frozen=True)
class HurwitzInstance:
    euler: int
    profiles: tuple[Partition, ...]

    def __post_init__(self):
        profiles = tuple(partition(p) for p in self.profiles)
        object.__setattr__(self, "profiles", profiles)
        if self.euler > 2 or self.euler % 2:
            raise ValueError(f"Euler characteristic must be even and <= 2, got {self.euler}")
        if not profiles:
            raise ValueError("at least one ramification profile is required")
        weights = {weight(p) for p in profiles}
        if len(weights) != 1:
            raise ValueError(f"profiles have mixed weights {sorted(weights)}")
        if 0 in weights:
            raise ValueError("profiles must have positive weight")

    @property
    def degree(self) -> int:
        return weight(self.profiles[0])

    @property
    def genus(self) -> int:
        return (2 - self.euler) // 2


def hurwitz_frobenius(inst: HurwitzInstance) -> Fraction:
    d = inst.degree
    table = fast_table(d)
    total = Fraction(0)
    for lam in partitions_of(d):
        term = Fraction(dim_sym(lam), factorial(d)) ** inst.euler
        for delta in inst.profiles:
            term *= table.table[lam, delta]
            if not term:
                break
        total += term
    return total


# --- permutation machinery -------------------------------------------------

def cycle_type(p: Perm) -> Partition:
    seen = [False] * len(p)
    lengths = []
    for s in range(len(p)):
        if seen[s]:
            continue
        n = 0
        x = s
        while not seen[x]:
            seen[x] = True
            x = p[x]
            n += 1
        lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


class _Group:
    """S_d with an explicit multiplication table; (p*q)(x) = p(q(x))."""

    def __init__(self, d: int):
        self.d = d
        self.elements: list[Perm] = list(itertools.permutations(range(d)))
        self.index = {p: i for i, p in enumerate(self.elements)}
        self.identity = self.index[tuple(range(d))]
        self.inverse = [self.index[tuple(sorted(range(d), key=p.__getitem__))] for p in self.elements]
        self.mul = [[self.index[tuple(p[x] for x in q)] for q in self.elements] for p in self.elements]
        self.classes: dict[Partition, list[int]] = {}
        for i, p in enumerate(self.elements):
            self.classes.setdefault(cycle_type(p), []).append(i)


@lru_cache(maxsize=None)
def _group(d: int) -> _Group:
    return _Group(d)


@lru_cache(maxsize=None)
def _commutator_counts(d: int) -> tuple[int, ...]:
    G = _group(d)
    counts = [0] * len(G.elements)
    mul, inv = G.mul, G.inverse
    for a in range(len(G.elements)):
        ai = inv[a]
        for b in range(len(G.elements)):
            counts[mul[mul[a][b]][mul[ai][inv[b]]]] += 1
    return tuple(counts)


def _convolve_class(G: _Group, f: list[int], cls: list[int]) -> list[int]:
    out = [0] * len(f)
    mul = G.mul
    for x, fx in enumerate(f):
        if fx:
            row = mul[x]
            for g in cls:
                out[row[g]] += fx
    return out


def count_factorizations(inst: HurwitzInstance) -> int:
    """#{(a_i, b_i, g_j)} with prod [a_i,b_i] * prod g_j = identity."""
    d = inst.degree
    G = _group(d)
    f = [0] * len(G.elements)
    f[G.identity] = 1
    if inst.genus:
        comm = list(_commutator_counts(d))
        for _ in range(inst.genus):
            nxt = [0] * len(f)
            for x, fx in enumerate(f):
                if fx:
                    row = G.mul[x]
                    for y, cy in enumerate(comm):
                        if cy:
                            nxt[row[y]] += fx * cy
            f = nxt
    for delta in inst.profiles:
        f = _convolve_class(G, f, G.classes[delta])
    return f[G.identity]


def hurwitz_bruteforce(inst: HurwitzInstance, max_degree: int = 6, max_genus: int = 1) -> Fraction:
    if inst.degree > max_degree or inst.genus > max_genus:
        raise ValueError(f"instance too large for enumeration: d={inst.degree}, g={inst.genus}")
    return Fraction(count_factorizations(inst), factorial(inst.degree))


def hurwitz_raw_scan(inst: HurwitzInstance) -> Fraction:
    """Plain scan over every tuple; only practical for d <= 4 and few profiles."""
    d = inst.degree
    if d > 4:
        raise ValueError("raw scan is limited to d <= 4")
    G = _group(d)
    pools = [range(len(G.elements))] * (2 * inst.genus) + [G.classes[delta] for delta in inst.profiles]
    mul, inv = G.mul, G.inverse
    count = 0
    for tup in itertools.product(*pools):
        acc = G.identity
        for i in range(inst.genus):
            a, b = tup[2 * i], tup[2 * i + 1]
            acc = mul[acc][mul[mul[a][b]][mul[inv[a]][inv[b]]]]
        for g in tup[2 * inst.genus:]:
            acc = mul[acc][g]
        count += acc == G.identity
    return Fraction(count, factorial(d))


def hurwitz(euler: int, profiles: Sequence[Sequence[int]]) -> Fraction:
    return hurwitz_frobenius(HurwitzInstance(euler, tuple(map(tuple, profiles))))
