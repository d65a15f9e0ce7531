"""Normalized symmetric-group characters.

The normalized character phi_lam(mu) is defined through the power-sum
expansion of the Schur function,

    s_lam = (dim lam / d!) * sum_mu phi_lam(mu) p_mu,

so that phi_lam(mu) = |class of mu| * chi_lam(mu) / dim lam.  The primary
route extracts it from :func:`taulab.symfunc.schur_in_powersums`; a
Murnaghan-Nakayama implementation is kept as an independent fast path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Sequence

from .partitions import Partition, dim_sym, multiplicities, partition, partitions_of, weight
from .symfunc import schur_in_powersums


def zeta(delta: Sequence[int]) -> int:
    """prod_i m_i! * i^m_i, the order of the centralizer of a permutation of
    cycle type ``delta``; also the automorphism count of a polygon collection."""
    delta = partition(delta)
    return prod(factorial(m) * i ** m for i, m in multiplicities(delta).items())


aut = zeta


def phi(lam: Sequence[int], mu: Sequence[int]) -> Fraction:
    lam, mu = partition(lam), partition(mu)
    d = weight(lam)
    if weight(mu) != d:
        raise ValueError(f"phi needs equal weights, got |{lam}|={d} and |{mu}|={weight(mu)}")
    coeff = schur_in_powersums(lam).coefficient(mu)
    return coeff * Fraction(factorial(d), dim_sym(lam))


def _beta_set(lam: Partition, length: int) -> list[int]:
    lam = lam + (0,) * (length - len(lam))
    return [lam[i] + length - 1 - i for i in range(length)]


@lru_cache(maxsize=None)
def mn_character(lam: Partition, mu: Partition) -> int:
    """Ordinary irreducible character chi_lam(mu) by rim-hook removal on beta-sets."""
    if not mu:
        return 1 if not lam else 0
    k, rest = mu[0], mu[1:]
    L = len(lam)
    beta = _beta_set(lam, L)
    members = set(beta)
    total = 0
    for b in beta:
        if b - k < 0 or (b - k) in members:
            continue
        # sign = (-1)^(number of beads strictly between b-k and b)
        sign = (-1) ** sum(1 for c in beta if b - k < c < b)
        new_beta = sorted((members - {b}) | {b - k}, reverse=True)
        new_lam = tuple(x for x in (new_beta[i] - (L - 1 - i) for i in range(L)) if x > 0)
        total += sign * mn_character(new_lam, rest)
    return total


def phi_mn(lam: Sequence[int], mu: Sequence[int]) -> Fraction:
    lam, mu = partition(lam), partition(mu)
    d = weight(lam)
    if weight(mu) != d:
        raise ValueError("phi needs equal weights")
    return Fraction(factorial(d) * mn_character(lam, mu), dim_sym(lam) * zeta(mu))


@dataclass(frozen=True)
class NormalizedCharacterTable:
    d: int
    table: dict[tuple[Partition, Partition], Fraction] = field(repr=False)

    @property
    def partitions(self) -> list[Partition]:
        return partitions_of(self.d)

    def __getitem__(self, key: tuple[Sequence[int], Sequence[int]]) -> Fraction:
        lam, mu = key
        return self.table[partition(lam), partition(mu)]

    def orth1_holds(self) -> bool:
        d, parts = self.d, self.partitions
        w = {lam: Fraction(dim_sym(lam), factorial(d)) ** 2 for lam in parts}
        for delta in parts:
            z = zeta(delta)
            for mu in parts:
                s = z * sum(w[lam] * self.table[lam, mu] * self.table[lam, delta] for lam in parts)
                if s != (1 if mu == delta else 0):
                    return False
        return True

    def orth2_holds(self) -> bool:
        d, parts = self.d, self.partitions
        for lam in parts:
            w = Fraction(dim_sym(lam), factorial(d)) ** 2
            for mu in parts:
                s = w * sum(zeta(delta) * self.table[lam, delta] * self.table[mu, delta] for delta in parts)
                if s != (1 if lam == mu else 0):
                    return False
        return True

    def to_tsv(self) -> str:
        parts = self.partitions
        fmt = lambda p: "(" + ",".join(map(str, p)) + ")"
        lines = ["lambda\\mu\t" + "\t".join(fmt(mu) for mu in parts)]
        for lam in parts:
            row = [fmt(lam)]
            for mu in parts:
                v = self.table[lam, mu]
                row.append(str(v))
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def character_table(d: int, method: str = "extract") -> NormalizedCharacterTable:
    if d < 1:
        raise ValueError("character tables start at weight 1")
    f = {"extract": phi, "mn": phi_mn}[method]
    parts = partitions_of(d)
    return NormalizedCharacterTable(d, {(lam, mu): f(lam, mu) for lam in parts for mu in parts})


def fast_table(d: int) -> NormalizedCharacterTable:
    return character_table(d, "mn" if d > 8 else "extract")

