"""Truncated tau-function series.

Conventions for the two-alphabet Cauchy-Littlewood series
---------------------------------------------------------
The Schur side used throughout is

    1 + sum_{(a|b)} s_(a|b)(p) s_(b|a)(pt) = sum_lam s_lam(p) s_lam'(pt).

Read with the exponent exp(-sum_m p_m pt_m / m) this is off by (-1)^|lam|
already at weight one.  Three conventions are available:

``"alternating"`` (default)
    exp(sum_m (-1)^(m+1) p_m pt_m / m) = sum_lam s_lam(p) s_lam'(pt).
``"signed"``
    exp(-sum_m p_m pt_m / m) = sum_lam (-1)^|lam| s_lam(p) s_lam'(pt).
``"printed"``
    exp(-sum_m p_m pt_m / m) against the unsigned Schur side; this one fails.

The same twist decides how the second set of times couples to a matrix:
under ``"alternating"`` the times pt_k = (-1)^(k+1) tr(W^k) turn
s_(b|a)(pt) into s_(a|b)(W).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import prod
from typing import Literal, Mapping, Sequence

import numpy as np

from .ginibre import (EnsembleSpec, TraceObservable, WickEvaluator, McEstimate, mc_expect,
                      schur_constant, schur_observable, vertex_word)
from .partitions import (Partition, cells, from_frobenius, partition, partitions_up_to, to_frobenius,
                         weight)
from .ribbon import RibbonGraph, SourceAssignment, face_monodromy
from .symfunc import (PowerSumValues, eval_schur, powersums_of_matrix, schur_in_powersums,
                      specialize_const, specialize_infty)

Convention = Literal["alternating", "signed", "printed"]
CONVENTIONS = ("alternating", "signed", "printed")


# --- two-alphabet series -----------------------------------------------------------

class BiSeries:
    """Polynomial in two power-sum alphabets: {(mu, nu): coefficient}."""

    def __init__(self, terms: Mapping[tuple[Partition, Partition], Fraction] | None = None, degree: int = 0):
        self.degree = degree
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    def __eq__(self, other) -> bool:
        return isinstance(other, BiSeries) and self.terms == other.terms

    def __add__(self, other: "BiSeries") -> "BiSeries":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return BiSeries(out, max(self.degree, other.degree))

    def __mul__(self, other) -> "BiSeries":
        if not isinstance(other, BiSeries):
            return BiSeries({k: v * other for k, v in self.terms.items()}, self.degree)
        D = min(self.degree, other.degree)
        out: dict = {}
        for (m1, n1), a in self.terms.items():
            for (m2, n2), b in other.terms.items():
                mu = tuple(sorted(m1 + m2, reverse=True))
                nu = tuple(sorted(n1 + n2, reverse=True))
                if weight(mu) > D or weight(nu) > D:
                    continue
                out[mu, nu] = out.get((mu, nu), 0) + a * b
        return BiSeries(out, D)

    def coefficient(self, mu: Sequence[int], nu: Sequence[int]) -> Fraction:
        return self.terms.get((partition(mu), partition(nu)), Fraction(0))

    def weight_slice(self, d: int) -> "BiSeries":
        return BiSeries({k: v for k, v in self.terms.items() if weight(k[0]) == d}, self.degree)

    def evaluate(self, p, pt):
        return sum((c * prod((p[k - 1] for k in mu), start=1) * prod((pt[k - 1] for k in nu), start=1)
                    for (mu, nu), c in self.terms.items()), 0)


def _exponent_sign(m: int, convention: Convention) -> int:
    if convention == "alternating":
        return (-1) ** (m + 1)
    return -1


def cauchy_littlewood_lhs(D: int, convention: Convention = "alternating") -> BiSeries:
    """exp(sum_m sign_m p_m pt_m / m) truncated at weight D in each alphabet."""
    X = BiSeries({((m,), (m,)): Fraction(_exponent_sign(m, convention), m) for m in range(1, D + 1)}, D)
    total = BiSeries({((), ()): 1}, D)
    power = BiSeries({((), ()): 1}, D)
    for k in range(1, D + 1):
        power = power * X * Fraction(1, k)
        total = total + power
    return total


def cauchy_littlewood_rhs(D: int, convention: Convention = "alternating") -> BiSeries:
    """1 + sum over Frobenius pairs of s_(a|b)(p) s_(b|a)(pt), weight <= D."""
    total = BiSeries({((), ()): 1}, D)
    for lam in partitions_up_to(D):
        if not lam:
            continue
        alpha, beta = to_frobenius(lam)
        left = schur_in_powersums(from_frobenius((alpha, beta)))
        right = schur_in_powersums(from_frobenius((beta, alpha)))
        sign = (-1) ** weight(lam) if convention == "signed" else 1
        total = total + BiSeries({(mu, nu): sign * a * b for mu, a in left.terms.items()
                                  for nu, b in right.terms.items()}, D)
    return total


@dataclass(frozen=True)
class CauchyLittlewood:
    lhs: BiSeries
    rhs: BiSeries
    convention: str

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def mismatches(self) -> dict:
        keys = set(self.lhs.terms) | set(self.rhs.terms)
        return {k: (self.lhs.terms.get(k, 0), self.rhs.terms.get(k, 0)) for k in sorted(keys)
                if self.lhs.terms.get(k, 0) != self.rhs.terms.get(k, 0)}


def cauchy_littlewood(D: int, convention: Convention = "alternating") -> CauchyLittlewood:
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; choose from {CONVENTIONS}")
    if D > 8:
        raise ValueError("Cauchy-Littlewood expansion is limited to D <= 8")
    return CauchyLittlewood(cauchy_littlewood_lhs(D, convention), cauchy_littlewood_rhs(D, convention), convention)


def twist_times(values: Sequence, convention: Convention = "alternating") -> PowerSumValues:
    """Second-alphabet times attached to a matrix's power sums tr(W^k)."""
    if convention == "alternating":
        return PowerSumValues((-1) ** k * v for k, v in enumerate(values))
    if convention == "signed":
        return PowerSumValues(-v for v in values)
    return PowerSumValues(values)


# --- round dance -------------------------------------------------------------------

@lru_cache(maxsize=None)
def _strict_sequences(kappa: int, max_sum: int) -> tuple[tuple[int, ...], ...]:
    """Strictly decreasing non-negative sequences of length kappa with sum <= max_sum."""
    out = []

    def rec(prefix: tuple[int, ...], remaining: int, bound: int):
        if len(prefix) == kappa:
            out.append(prefix)
            return
        slots = kappa - len(prefix) - 1
        # the tail after this entry needs at least 0+1+...+(slots-1)
        for x in range(min(bound, remaining), slots - 1, -1):
            if x + slots * (slots - 1) // 2 <= remaining:
                rec(prefix + (x,), remaining - x, x - 1)

    rec((), max_sum, max_sum)
    return tuple(out)


def _frob_weight(alpha: tuple[int, ...], beta: tuple[int, ...]) -> int:
    return sum(alpha) + sum(beta) + len(alpha)


def round_dance_terms(components: int, D: int, kappa_max: int | None = None):
    """Yield (alphas, betas): every chain with all 2*components partitions
    (a^i|b^i) and (b^i|a^{i+1}) of weight <= D, indices cyclic."""
    if components < 1:
        raise ValueError("need at least one component")
    kmax = kappa_max if kappa_max is not None else D
    kappa = 1
    while kappa <= kmax and kappa * kappa <= D:
        seqs = _strict_sequences(kappa, D - kappa)
        budget = D - kappa

        def extend(alphas, betas):
            i = len(betas)
            if i == components:
                if sum(betas[-1]) + sum(alphas[0]) <= budget:
                    yield tuple(alphas), tuple(betas)
                return
            if len(alphas) == len(betas):
                for a in seqs:
                    if sum(betas[-1]) + sum(a) <= budget:
                        yield from extend(alphas + [a], betas)
            else:
                for b in seqs:
                    if sum(alphas[-1]) + sum(b) <= budget:
                        yield from extend(alphas, betas + [b])

        for a1 in seqs:
            for b1 in seqs:
                if sum(a1) + sum(b1) <= budget:
                    yield from extend([a1], [b1])
        kappa += 1


@dataclass
class TauSeriesSpec:
    components: int
    depth: int
    times: list[PowerSumValues]
    dual_times: list[PowerSumValues]
    kappa_max: int | None = None

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if len(self.times) != self.components or len(self.dual_times) != self.components:
            raise ValueError("need one time vector of each kind per component")
        self.times = [v if isinstance(v, PowerSumValues) else PowerSumValues(v) for v in self.times]
        self.dual_times = [v if isinstance(v, PowerSumValues) else PowerSumValues(v) for v in self.dual_times]
        for v in self.times + self.dual_times:
            if len(v) < self.depth:
                raise ValueError(f"time vectors need length >= depth {self.depth}")


def round_dance(spec: TauSeriesSpec):
    """1 + sum over cyclic chains of prod_i s_(a^i|b^i)(p^i) s_(b^i|a^{i+1})(pt^i)."""
    total = 1
    Nc = spec.components
    cache: dict = {}

    def s(alpha, beta, vals_idx, which):
        key = (alpha, beta, vals_idx, which)
        if key not in cache:
            vals = (spec.times if which == 0 else spec.dual_times)[vals_idx]
            cache[key] = eval_schur(from_frobenius((alpha, beta)), vals)
        return cache[key]

    for alphas, betas in round_dance_terms(Nc, spec.depth, spec.kappa_max):
        term = 1
        for i in range(Nc):
            term *= s(alphas[i], betas[i], i, 0)
            if not term:
                break
            term *= s(betas[i], alphas[(i + 1) % Nc], i, 1)
            if not term:
                break
        total += term
    return total


# --- hypergeometric series ------------------------------------------------------

@dataclass(frozen=True)
class ContentFactorList:
    """Linear factors prod_c (a_c + j - i) * prod_b (N_b + j - i) over the cells."""
    a_terms: tuple = ()
    levels: tuple[int, ...] = ()

    def weight_of(self, lam: Partition):
        out = 1
        for cell in cells(lam):
            c = cell.content
            for a in self.a_terms:
                out *= a + c
            for Nb in self.levels:
                out *= Nb + c
        return out


def hyp_tau(p1, p2, factors: ContentFactorList, n: int, D: int, N: int = 1):
    """sum_{|lam| <= D} N^(-n|lam|) s_lam(p1) s_lam(p2) * content factors."""
    total = 0
    for lam in partitions_up_to(D):
        w = factors.weight_of(lam)
        if not w:
            continue
        d = weight(lam)
        if d:
            w = Fraction(1, N) ** (n * d) * w * eval_schur(lam, p1) * eval_schur(lam, p2)
        total += w
    return total


# --- expectation of the round dance over a ribbon graph --------------------------

@dataclass(frozen=True)
class GeneratingResult:
    schur_sum: object
    wick: object | None = None
    mc: McEstimate | None = None
    flags: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        if self.wick is not None and self.wick != self.schur_sum:
            return False
        if self.mc is not None and not self.mc.agrees(self.schur_sum):
            return False
        return True


def generating_schur_sum(g: RibbonGraph, src: SourceAssignment, p_list: Sequence, D: int):
    """sum_{|lam| <= D} c_lam prod_a s_lam(p^a) prod_b s_lam(W*_b(I))."""
    if len(p_list) != g.v:
        raise ValueError(f"need one time vector per vertex ({g.v}), got {len(p_list)}")
    faces = [powersums_of_matrix(face_monodromy(g, src, b).matrix, D) for b in range(g.f)]
    total = 0
    for lam in partitions_up_to(D):
        if not lam:
            total += 1
            continue
        term = schur_constant(lam, g.n, src.N)
        for p in p_list:
            term *= eval_schur(lam, p)
            if not term:
                break
        else:
            for pw in faces:
                term *= eval_schur(lam, pw)
        total += term
    return total


def round_dance_observable(g: RibbonGraph, src: SourceAssignment, p_list: Sequence, D: int,
                           convention: Convention = "alternating") -> TraceObservable:
    """The round dance with pt^a = twisted power sums of W_a(Z), as a trace observable."""
    if convention not in ("alternating", "printed"):
        raise ValueError("matrix-valued times are defined for the alternating or printed convention")
    consts = src.named()
    words = [vertex_word(g, a) for a in range(g.v)]
    alt = convention == "alternating"
    obs = TraceObservable.constant(1)
    schur_obs: dict = {}
    for alphas, betas in round_dance_terms(g.v, D):
        coeff = 1
        for i in range(g.v):
            coeff *= eval_schur(from_frobenius((alphas[i], betas[i])), p_list[i])
            if not coeff:
                break
        if not coeff:
            continue
        term = TraceObservable.constant(coeff)
        for i in range(g.v):
            mu = from_frobenius((betas[i], alphas[(i + 1) % g.v]))
            key = (mu, i)
            if key not in schur_obs:
                schur_obs[key] = schur_observable(mu, words[i], consts, alternate=alt)
            term = term * schur_obs[key]
        obs = obs + term
    return obs


def generating_expectation(g: RibbonGraph, src: SourceAssignment, p_list: Sequence, D: int,
                           spec: EnsembleSpec | None = None, way2: str = "wick",
                           samples: int = 10000, seed: int | None = None,
                           convention: Convention = "alternating") -> GeneratingResult:
    """Average of the round dance with pt^a tied to W_a(Z), computed as the
    Schur sum and, independently, by Wick contraction or Monte Carlo."""
    spec = spec or EnsembleSpec(g.n, src.N)
    p_list = [v if isinstance(v, PowerSumValues) else PowerSumValues(v) for v in p_list]
    flags: tuple[str, ...] = ()
    if D > spec.N:
        flags = (f"depth {D} exceeds matrix size N={spec.N}",)
    schur_sum = generating_schur_sum(g, src, p_list, D)
    wick = mc = None
    if way2 in ("wick", "both", "mc"):
        obs = round_dance_observable(g, src, p_list, D, convention)
        if way2 in ("wick", "both"):
            wick = WickEvaluator(spec.N, obs.consts)(obs)
        if way2 in ("mc", "both"):
            if seed is None:
                raise ValueError("Monte Carlo needs an explicit seed")
            mc = mc_expect(obs, spec, samples, seed)
    elif way2 not in ("none", None):
        raise ValueError(f"unknown second route {way2!r}")
    return GeneratingResult(schur_sum, wick, mc, flags)


# --- specializations ---------------------------------------------------------------

@dataclass(frozen=True)
class Reduction:
    case: int
    factors: ContentFactorList
    free: tuple[tuple[str, int], ...]
    vertex_slots: tuple = field(repr=False, default=())
    face_slots: tuple = field(repr=False, default=())

    def free_times(self, g: RibbonGraph, src: SourceAssignment, p_list: Sequence, D: int
                   ) -> tuple[PowerSumValues, PowerSumValues]:
        """Time vectors for the two free slots; absent slots become p_infinity."""
        out = []
        for kind, idx in self.free:
            if kind == "vertex":
                v = p_list[idx]
                out.append(v if isinstance(v, PowerSumValues) else PowerSumValues(v))
            else:
                out.append(powersums_of_matrix(face_monodromy(g, src, idx).matrix, D))
        while len(out) < 2:
            out.append(specialize_infty(D))
        return out[0], out[1]

    def vertex_times(self, p_free: Mapping[int, Sequence], D: int) -> list[PowerSumValues]:
        """Full per-vertex time list: free slots from ``p_free``, the rest specialized."""
        out = []
        for a, slot in enumerate(self.vertex_slots):
            if slot == "free":
                out.append(PowerSumValues(p_free[a]))
            elif slot == "infty":
                out.append(specialize_infty(D))
            else:
                out.append(specialize_const(slot[1], D))
        return out


def _parse_vertex_slot(slot):
    if slot in ("free", "infty"):
        return slot
    if isinstance(slot, (tuple, list)) and len(slot) == 2 and slot[0] == "const":
        return ("const", slot[1])
    if isinstance(slot, (int, Fraction, float, complex)):
        return ("const", slot)
    raise ValueError(f"vertex slot must be 'free', 'infty' or ('const', a), got {slot!r}")


def spectrum_level(M: np.ndarray) -> int | None:
    """N_b if M has spectrum (1^N_b, 0^(N-N_b)), else None.

    Power sums tr(M^k), k = 1..N, fix the eigenvalue multiset, so the test is
    exact for rational matrices."""
    N = M.shape[0]
    pw = powersums_of_matrix(M, N)
    first = pw[0]
    if isinstance(first, complex):
        if abs(first.imag) > 1e-9:
            return None
        first = first.real
    level = round(first) if not isinstance(first, Fraction) else first
    if level != first and not (isinstance(first, float) and abs(level - first) < 1e-9):
        return None
    level = int(level)
    if not 0 <= level <= N:
        return None
    for v in pw:
        if isinstance(v, (Fraction, int)):
            if v != level:
                return None
        elif abs(complex(v) - level) > 1e-9:
            return None
    return level


def specialization_reducer(g: RibbonGraph, src: SourceAssignment, vertex_slots: Sequence,
                           face_slots: Sequence) -> Reduction:
    """Collapse a sphere graph with specialized slots to a hypergeometric series.

    ``vertex_slots[a]`` is "free", "infty" or ("const", a_c); ``face_slots[b]`` is
    "free" or "spectrum" (the level N_b is read from W*_b(I) and verified)."""
    if g.euler() != 2:
        raise ValueError(f"the base surface must be a sphere; Euler characteristic is {g.euler()}")
    if len(vertex_slots) != g.v or len(face_slots) != g.f:
        raise ValueError(f"need {g.v} vertex slots and {g.f} face slots")
    vslots = tuple(_parse_vertex_slot(s) for s in vertex_slots)
    a_terms = []
    free: list[tuple[str, int]] = []
    for a, slot in enumerate(vslots):
        if slot == "free":
            free.append(("vertex", a))
        elif slot != "infty":
            a_terms.append(slot[1])
    levels = []
    fslots = []
    for b, slot in enumerate(face_slots):
        if slot == "free":
            free.append(("face", b))
            fslots.append("free")
            continue
        kind = slot[0] if isinstance(slot, (tuple, list)) else slot
        if kind != "spectrum":
            raise ValueError(f"face slot must be 'free' or 'spectrum', got {slot!r}")
        level = spectrum_level(face_monodromy(g, src, b).matrix)
        if level is None:
            raise ValueError(f"face {b} monodromy does not have a 0/1 spectrum")
        if isinstance(slot, (tuple, list)) and len(slot) > 1 and int(slot[1]) != level:
            raise ValueError(f"face {b} has level {level}, not the requested {slot[1]}")
        levels.append(level)
        fslots.append(("spectrum", level))
    if len(free) > 2:
        raise ValueError(f"at most two free slots are allowed, got {len(free)}")
    n_face_free = sum(1 for k, _ in free if k == "face")
    case = {0: 1, 1: 2, 2: 3}[n_face_free]
    return Reduction(case, ContentFactorList(tuple(a_terms), tuple(levels)), tuple(free), vslots, tuple(fslots))
