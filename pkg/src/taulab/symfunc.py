"""Schur functions as exact polynomials in the power sums p_1, p_2, ...

A :class:`PowerSumPolynomial` maps power-sum monomials ``p_mu`` (keyed by the
partition ``mu``) to :class:`~fractions.Fraction` coefficients and carries an
explicit truncation degree ``D``; products drop every monomial of weight > D.
"""
from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from numbers import Number
from typing import Iterable, Mapping, Sequence

import numpy as np

from .partitions import Partition, conjugate, content_multiset, dim_sym, partition, weight


def _merge(mu: Partition, nu: Partition) -> Partition:
    return tuple(sorted(mu + nu, reverse=True))


class PowerSumPolynomial:
    __slots__ = ("terms", "degree")

    def __init__(self, terms: Mapping[Partition, Fraction] | None = None, degree: int = 0):
        if degree < 0:
            raise ValueError("truncation degree must be non-negative")
        self.degree = degree
        self.terms: dict[Partition, Fraction] = {}
        for mu, c in (terms or {}).items():
            mu = partition(mu)
            if weight(mu) > degree:
                raise ValueError(f"monomial p_{mu} exceeds truncation degree {degree}")
            c = Fraction(c)
            if c:
                self.terms[mu] = c

    @classmethod
    def one(cls, degree: int) -> "PowerSumPolynomial":
        return cls({(): Fraction(1)}, degree)

    @classmethod
    def p(cls, k: int, degree: int) -> "PowerSumPolynomial":
        return cls({(k,): Fraction(1)}, degree)

    def __repr__(self) -> str:
        return f"PowerSumPolynomial({self.pretty()}, D={self.degree})"

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for mu, c in sorted(self.terms.items(), key=lambda t: (weight(t[0]), t[0]), reverse=True):
            mono = "*".join(f"p{k}^{m}" if m > 1 else f"p{k}"
                            for k, m in sorted(_mult(mu).items(), reverse=True)) or "1"
            out.append(f"{c}*{mono}")
        return " + ".join(out)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PowerSumPolynomial):
            return self.terms == other.terms
        if isinstance(other, Number):
            return self.terms == ({(): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other) -> "PowerSumPolynomial":
        if isinstance(other, PowerSumPolynomial):
            return other
        return PowerSumPolynomial({(): Fraction(other)} if other else {}, self.degree)

    def __add__(self, other) -> "PowerSumPolynomial":
        other = self._coerce(other)
        D = max(self.degree, other.degree)
        terms = dict(self.terms)
        for mu, c in other.terms.items():
            terms[mu] = terms.get(mu, 0) + c
        return PowerSumPolynomial(terms, D)

    __radd__ = __add__

    def __neg__(self) -> "PowerSumPolynomial":
        return PowerSumPolynomial({mu: -c for mu, c in self.terms.items()}, self.degree)

    def __sub__(self, other) -> "PowerSumPolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PowerSumPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "PowerSumPolynomial":
        if not isinstance(other, PowerSumPolynomial):
            c = Fraction(other)
            return PowerSumPolynomial({mu: c * v for mu, v in self.terms.items()}, self.degree)
        D = min(self.degree, other.degree)
        terms: dict[Partition, Fraction] = {}
        for mu, a in self.terms.items():
            wm = weight(mu)
            for nu, b in other.terms.items():
                if wm + weight(nu) > D:
                    continue
                key = _merge(mu, nu)
                terms[key] = terms.get(key, 0) + a * b
        return PowerSumPolynomial(terms, D)

    __rmul__ = __mul__

    def truncate(self, degree: int) -> "PowerSumPolynomial":
        return PowerSumPolynomial({mu: c for mu, c in self.terms.items() if weight(mu) <= degree}, degree)

    def with_degree(self, degree: int) -> "PowerSumPolynomial":
        return self.truncate(degree) if degree < self.degree else PowerSumPolynomial(self.terms, degree)

    def coefficient(self, mu: Sequence[int]) -> Fraction:
        return self.terms.get(partition(mu), Fraction(0))

    def weights(self) -> set[int]:
        return {weight(mu) for mu in self.terms}

    def omega(self) -> "PowerSumPolynomial":
        """Apply p_k -> (-1)^(k-1) p_k, which sends s_lam to s_lam'."""
        return PowerSumPolynomial(
            {mu: c * (-1) ** (weight(mu) - len(mu)) for mu, c in self.terms.items()}, self.degree)

    def __call__(self, values):
        return self.evaluate(values)

    def evaluate(self, values):
        """Substitute p_k = values[k-1]; exact when the values are rationals."""
        if isinstance(values, PowerSumValues):
            values = values.values
        if len(values) < self.degree:
            raise ValueError(f"need {self.degree} power-sum values, got {len(values)}")
        total = 0
        for mu, c in self.terms.items():
            total += c * prod((values[k - 1] for k in mu), start=1)
        return total

    def to_json(self) -> str:
        rows = [{"mu": list(mu), "coeff": f"{c.numerator}/{c.denominator}"}
                for mu, c in sorted(self.terms.items(), key=lambda t: (weight(t[0]), t[0]), reverse=True)]
        return json.dumps(rows)

    @classmethod
    def from_json(cls, text: str, degree: int | None = None) -> "PowerSumPolynomial":
        rows = json.loads(text)
        terms = {partition(r["mu"]): Fraction(r["coeff"]) for r in rows}
        if degree is None:
            degree = max((weight(mu) for mu in terms), default=0)
        return cls(terms, degree)


def _mult(mu: Partition) -> dict[int, int]:
    out: dict[int, int] = {}
    for k in mu:
        out[k] = out.get(k, 0) + 1
    return out


class PowerSumValues:
    """A numeric point (p_1, ..., p_D)."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable):
        self.values = tuple(values)

    @property
    def degree(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    def __neg__(self) -> "PowerSumValues":
        return PowerSumValues(-v for v in self.values)

    def __eq__(self, other) -> bool:
        if isinstance(other, PowerSumValues):
            return self.values == other.values
        return tuple(other) == self.values

    def __repr__(self) -> str:
        return f"PowerSumValues({list(self.values)!r})"

    def omega(self) -> "PowerSumValues":
        return PowerSumValues((-1) ** k * v for k, v in enumerate(self.values))


@lru_cache(maxsize=None)
def _h_poly(k: int) -> PowerSumPolynomial:
    # k h_k = sum_{r=1}^k p_r h_{k-r}: the x-derivative of exp(sum p_r x^r / r)
    if k == 0:
        return PowerSumPolynomial.one(0)
    acc = PowerSumPolynomial({}, k)
    for r in range(1, k + 1):
        acc = acc + PowerSumPolynomial.p(r, k) * _h_poly(k - r).with_degree(k)
    return acc * Fraction(1, k)


def complete_homogeneous(k: int, D: int) -> PowerSumPolynomial:
    """The one-row Schur polynomial s_(k), the x^k coefficient of exp(sum p_r x^r / r)."""
    if k < 0:
        return PowerSumPolynomial({}, D)
    if k > D:
        raise ValueError(f"s_({k}) needs truncation degree >= {k}, got {D}")
    return _h_poly(k).with_degree(D)


def _det(matrix: list[list[PowerSumPolynomial]], D: int) -> PowerSumPolynomial:
    """Laplace expansion along rows with minors memoised by remaining columns."""
    n = len(matrix)
    memo: dict[tuple[int, ...], PowerSumPolynomial] = {}

    def minor(row: int, cols: tuple[int, ...]) -> PowerSumPolynomial:
        if row == n:
            return PowerSumPolynomial.one(D)
        if cols in memo:
            return memo[cols]
        acc = PowerSumPolynomial({}, D)
        for pos, j in enumerate(cols):
            entry = matrix[row][j]
            if not entry.terms:
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            if not sub.terms:
                continue
            term = entry * sub
            acc = acc - term if pos % 2 else acc + term
        memo[cols] = acc
        return acc

    return minor(0, tuple(range(n)))


@lru_cache(maxsize=None)
def schur_jacobi_trudi(lam: Partition) -> PowerSumPolynomial:
    """det[s_(lam_i - i + j)] computed literally, truncation degree |lam|."""
    d = weight(lam)
    L = len(lam)
    mat = [[complete_homogeneous(lam[i] - i + j, d) if lam[i] - i + j <= d else PowerSumPolynomial({}, d)
            for j in range(L)] for i in range(L)]
    return _det(mat, d)


@lru_cache(maxsize=None)
def _schur(lam: Partition) -> PowerSumPolynomial:
    conj = conjugate(lam)
    if len(conj) < len(lam):
        # smaller determinant for the conjugate shape, then omega
        return schur_jacobi_trudi(conj).omega()
    return schur_jacobi_trudi(lam)


def schur_in_powersums(lam: Sequence[int], D: int | None = None) -> PowerSumPolynomial:
    lam = partition(lam)
    d = weight(lam)
    if D is None:
        D = d
    if d > D:
        raise ValueError(f"|lambda| = {d} exceeds truncation degree {D}")
    return _schur(lam).with_degree(D)


def eval_schur(lam: Sequence[int], values):
    lam = partition(lam)
    if isinstance(values, PowerSumValues):
        values = values.values
    if weight(lam) > len(values):
        raise ValueError(f"s_{lam} needs {weight(lam)} power sums, got {len(values)}")
    return _schur(lam).evaluate(values)


def _is_square(X) -> bool:
    return getattr(X, "ndim", None) == 2 and X.shape[0] == X.shape[1]


def powersums_of_matrix(X, D: int) -> PowerSumValues:
    """p_k = tr(X^k), k = 1..D.  Exact for object arrays of Fractions."""
    X = np.asarray(X)
    if not _is_square(X):
        raise ValueError(f"power sums need a square matrix, got shape {X.shape}")
    out = []
    P = X
    for k in range(1, D + 1):
        if k > 1:
            P = P @ X
        out.append(_trace(P))
    return PowerSumValues(out)


def _trace(M):
    t = M.trace()
    return t.item() if isinstance(t, np.generic) else t


def p_mu_of_matrix(mu: Sequence[int], X):
    mu = partition(mu)
    if not mu:
        return 1
    vals = powersums_of_matrix(X, mu[0])
    return prod((vals[k - 1] for k in mu), start=1)


def specialize_const(a, D: int) -> PowerSumValues:
    return PowerSumValues([a] * D)


def specialize_infty(D: int) -> PowerSumValues:
    if D < 1:
        raise ValueError("D must be at least 1")
    return PowerSumValues([1] + [0] * (D - 1))


def content_product_eval(lam: Sequence[int], a):
    """(dim lam / |lam|!) * prod over cells of (a + content)."""
    lam = partition(lam)
    out = Fraction(dim_sym(lam), factorial(weight(lam)))
    for c, m in content_multiset(lam).items():
        out *= (a + c) ** m
    return out
