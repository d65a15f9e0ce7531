"""Complex Ginibre multi-matrix ensemble: sampling, exact Wick calculus and
the Schur-function integrals over ribbon graphs.

Entries of the n independent N x N matrices Z_1..Z_n satisfy

    <Z_ij conj(Z_kl)> = delta_ik delta_jl / N,    <Z_ij Z_kl> = 0.

Observables are linear combinations of products of traces of words.  A word
is a tuple of tokens: a positive int ``i`` stands for Z_i, a negative int
``-i`` for Z_i^dagger, and a string names a constant matrix.
"""
from __future__ import annotations

import cmath
import itertools
import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod, sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np

from .characters import fast_table, zeta
from .hurwitz import hurwitz_frobenius, HurwitzInstance
from .partitions import Partition, dim_sym, partition, partitions_of, weight
from .ribbon import RibbonGraph, SourceAssignment, face_monodromy, vertex_monodromy
from .symfunc import eval_schur, powersums_of_matrix, p_mu_of_matrix, schur_in_powersums

log = logging.getLogger(__name__)

Token = int | str
Word = tuple[Token, ...]
Monomial = tuple[Word, ...]

DEFAULT_MAX_PAIRINGS = 40320


@dataclass(frozen=True)
class EnsembleSpec:
    n: int
    N: int

    def __post_init__(self):
        if self.n < 1 or self.N < 1:
            raise ValueError(f"need n >= 1 and N >= 1, got n={self.n}, N={self.N}")

    @property
    def variance(self) -> Fraction:
        return Fraction(1, self.N)


# --- observables --------------------------------------------------------------

def _tok_key(t: Token):
    return (0, t) if isinstance(t, int) else (1, t)


def canonical_word(word: Sequence[Token]) -> Word:
    word = tuple(word)
    if not word:
        return word
    rots = [word[i:] + word[:i] for i in range(len(word))]
    return min(rots, key=lambda w: [_tok_key(t) for t in w])


def canonical_monomial(words: Iterable[Sequence[Token]]) -> Monomial:
    return tuple(sorted((canonical_word(w) for w in words), key=lambda w: [_tok_key(t) for t in w]))


class TraceObservable:
    """sum_k coeff_k * prod_w tr(word_w), with named constant matrices."""

    def __init__(self, terms: Mapping[Monomial, object] | None = None,
                 consts: Mapping[str, np.ndarray] | None = None):
        self.consts = dict(consts or {})
        self.terms: dict[Monomial, object] = {}
        for mono, c in (terms or {}).items():
            mono = canonical_monomial(mono)
            self.terms[mono] = self.terms.get(mono, 0) + c
        self.terms = {m: c for m, c in self.terms.items() if c != 0}

    @classmethod
    def constant(cls, c=1) -> "TraceObservable":
        return cls({(): c})

    @classmethod
    def trace(cls, word: Sequence[Token], consts: Mapping[str, np.ndarray] | None = None) -> "TraceObservable":
        if not word:
            raise ValueError("empty trace word; use a constant instead")
        return cls({(tuple(word),): 1}, consts)

    def _merge_consts(self, other: "TraceObservable") -> dict[str, np.ndarray]:
        out = dict(self.consts)
        for k, M in other.consts.items():
            if k in out and out[k] is not M and not np.array_equal(out[k], M):
                raise ValueError(f"constant {k!r} is bound to two different matrices")
            out[k] = M
        return out

    def __add__(self, other) -> "TraceObservable":
        if not isinstance(other, TraceObservable):
            other = TraceObservable.constant(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return TraceObservable(terms, self._merge_consts(other))

    __radd__ = __add__

    def __mul__(self, other) -> "TraceObservable":
        if not isinstance(other, TraceObservable):
            return TraceObservable({m: c * other for m, c in self.terms.items()}, self.consts)
        terms: dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = canonical_monomial(m1 + m2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return TraceObservable(terms, self._merge_consts(other))

    __rmul__ = __mul__

    def __neg__(self) -> "TraceObservable":
        return self * -1

    def __sub__(self, other) -> "TraceObservable":
        return self + (-other if isinstance(other, TraceObservable) else -other)

    def __repr__(self) -> str:
        return f"TraceObservable({len(self.terms)} terms)"

    def matrices_used(self) -> set[int]:
        return {abs(t) for m in self.terms for w in m for t in w if isinstance(t, int)}

    def evaluate(self, Zs: np.ndarray) -> np.ndarray:
        """Value on a batch of samples ``Zs`` with shape (S, n, N, N)."""
        S = Zs.shape[0]
        cache: dict[Word, np.ndarray] = {}
        consts = {k: np.asarray(M, dtype=complex) for k, M in self.consts.items()}

        def tr(word: Word) -> np.ndarray:
            if word not in cache:
                acc = None
                for t in word:
                    if isinstance(t, int):
                        Z = Zs[:, abs(t) - 1]
                        M = Z if t > 0 else np.conj(np.swapaxes(Z, -1, -2))
                    else:
                        M = consts[t]
                    acc = M if acc is None else acc @ M
                cache[word] = np.trace(acc, axis1=-2, axis2=-1) * np.ones(S)
            return cache[word]

        total = np.zeros(S, dtype=complex)
        for mono, c in self.terms.items():
            val = np.full(S, complex(c))
            for w in mono:
                val = val * tr(w)
            total += val
        return total


def power_sum_observable(mu: Sequence[int], word: Sequence[Token],
                         consts: Mapping[str, np.ndarray] | None = None) -> TraceObservable:
    """p_mu(W) = prod_j tr(W^mu_j) for the matrix word W."""
    mu = partition(mu)
    word = tuple(word)
    return TraceObservable({tuple(word * k for k in mu): 1}, consts)


def schur_observable(lam: Sequence[int], word: Sequence[Token],
                     consts: Mapping[str, np.ndarray] | None = None,
                     alternate: bool = False) -> TraceObservable:
    """s_lam evaluated at p_k = tr(W^k); with ``alternate`` at p_k = (-1)^(k+1) tr(W^k)."""
    lam = partition(lam)
    word = tuple(word)
    poly = schur_in_powersums(lam)
    terms = {}
    for mu, c in poly.terms.items():
        if alternate:
            c = c * (-1) ** (weight(mu) - len(mu))
        terms[tuple(word * k for k in mu)] = c
    return TraceObservable(terms, consts)


def entry_observable(Z: int, a: int, b: int, N: int) -> TraceObservable:
    """(Z_i)_{ab}, or (Z_i^dagger)_{ab} for negative ``Z``, as tr(E_ba Z)."""
    E = np.full((N, N), Fraction(0), dtype=object)
    E[b, a] = Fraction(1)
    name = f"E{b}{a}"
    return TraceObservable.trace((name, Z), {name: E})


# --- exact Wick calculus ----------------------------------------------------------

def is_balanced(mono: Monomial) -> bool:
    count: dict[int, int] = {}
    for w in mono:
        for t in w:
            if isinstance(t, int):
                count[t] = count.get(t, 0) + 1
    return all(count.get(-t, 0) == c for t, c in count.items())


class WickEvaluator:
    """Exact Gaussian expectations with memoised monomials.

    Each pairing of Z_i factors with Z_i^dagger factors contributes
    N^(free loops - pairs) times the product of traces of the constant-matrix
    cycles it leaves behind.
    """

    def __init__(self, N: int, consts: Mapping[str, np.ndarray] | None = None,
                 max_pairings: int = DEFAULT_MAX_PAIRINGS):
        self.N = N
        self.consts = dict(consts or {})
        self.max_pairings = max_pairings
        self._memo: dict[Monomial, object] = {}
        self._trace_memo: dict[tuple[str, ...], object] = {}

    def __call__(self, obs: TraceObservable):
        for k, M in obs.consts.items():
            if k not in self.consts:
                self.consts[k] = M
            elif self.consts[k] is not M and not np.array_equal(self.consts[k], M):
                raise ValueError(f"constant {k!r} differs from the evaluator's binding")
        total = 0
        for mono, c in obs.terms.items():
            val = self.monomial(mono)
            if val:
                total += c * val
        return total

    def _const_trace(self, names: tuple[str, ...]):
        k = min(range(len(names)), key=lambda i: names[i:] + names[:i])
        key = names[k:] + names[:k]
        if key not in self._trace_memo:
            acc = self.consts[key[0]]
            for nm in key[1:]:
                acc = acc @ self.consts[nm]
            t = acc.trace()
            self._trace_memo[key] = t.item() if isinstance(t, np.generic) else t
        return self._trace_memo[key]

    def monomial(self, mono: Monomial):
        mono = canonical_monomial(mono)
        if mono in self._memo:
            return self._memo[mono]
        val = self._evaluate(mono)
        self._memo[mono] = val
        return val

    def _evaluate(self, mono: Monomial):
        if not is_balanced(mono):
            log.debug("unbalanced monomial %s: expectation is 0", mono)
            return Fraction(0)
        tokens: list[Token] = []
        nxt: list[int] = []
        for w in mono:
            base = len(tokens)
            tokens.extend(w)
            nxt.extend(base + (i + 1) % len(w) for i in range(len(w)))
        plus: dict[int, list[int]] = {}
        minus: dict[int, list[int]] = {}
        for p, t in enumerate(tokens):
            if isinstance(t, int):
                (plus if t > 0 else minus).setdefault(abs(t), []).append(p)
        labels = sorted(plus)
        n_pairings = prod(factorial(len(plus[i])) for i in labels)
        if n_pairings > self.max_pairings:
            raise ValueError(f"query too large: {n_pairings} Wick pairings exceed cap {self.max_pairings}")
        const_pos = [p for p, t in enumerate(tokens) if isinstance(t, str)]
        z_pos = [p for p, t in enumerate(tokens) if isinstance(t, int)]
        n_pairs = len(z_pos) // 2
        N = Fraction(self.N)

        total = Fraction(0)
        for choice in itertools.product(*(itertools.permutations(minus[i]) for i in labels)):
            partner = [-1] * len(tokens)
            for i, perm in zip(labels, choice):
                for p, q in zip(plus[i], perm):
                    partner[p] = q
                    partner[q] = p
            # follow index chains: column of p -> row of next(p); a Z factor
            # forwards to the column of its partner
            link = {}
            visited = [False] * len(tokens)
            for p in const_pos:
                x = nxt[p]
                while partner[x] >= 0:
                    visited[x] = True
                    x = nxt[partner[x]]
                link[p] = x
            loops = 0
            for p in z_pos:
                if visited[p]:
                    continue
                loops += 1
                x = p
                while not visited[x]:
                    visited[x] = True
                    x = nxt[partner[x]]
            value = N ** (loops - n_pairs)
            seen: set[int] = set()
            for p in const_pos:
                if p in seen:
                    continue
                names = []
                x = p
                while x not in seen:
                    seen.add(x)
                    names.append(tokens[x])
                    x = link[x]
                value = value * self._const_trace(tuple(names))
                if not value:
                    break
            total += value
        return total


def wick_exact(query: TraceObservable, spec: EnsembleSpec | int,
               max_pairings: int = DEFAULT_MAX_PAIRINGS):
    N = spec.N if isinstance(spec, EnsembleSpec) else int(spec)
    return WickEvaluator(N, query.consts, max_pairings)(query)


# --- sampling and Monte Carlo ----------------------------------------------------

def _draw(rng: np.random.Generator, size: tuple[int, ...], N: int) -> np.ndarray:
    scale = 1.0 / sqrt(2.0 * N)
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) * scale


def sample_batch(spec: EnsembleSpec, size: int, seed) -> np.ndarray:
    """Array of shape (size, n, N, N); one independent stream per matrix."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = ss.spawn(spec.n)
    out = np.empty((size, spec.n, spec.N, spec.N), dtype=complex)
    for i, child in enumerate(streams):
        out[:, i] = _draw(np.random.default_rng(child), (size, spec.N, spec.N), spec.N)
    return out


def sample(spec: EnsembleSpec, seed) -> list[np.ndarray]:
    return list(sample_batch(spec, 1, seed)[0])


@dataclass(frozen=True)
class McEstimate:
    mean: complex
    stderr: float
    samples: int

    def agrees(self, exact, k: float = 5.0) -> bool:
        return abs(self.mean - complex(exact)) <= k * self.stderr


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TAULAB_THREADS", os.cpu_count() or 1)))
    except ValueError:
        return 1


def _summarize(values: np.ndarray) -> tuple[complex, float, int]:
    return complex(values.sum()), float(np.sum(np.abs(values) ** 2)), values.size


def _combine(parts: list[tuple[complex, float, int]]) -> McEstimate:
    s1 = sum((p[0] for p in parts), 0j)
    s2 = sum(p[1] for p in parts)
    n = sum(p[2] for p in parts)
    mean = s1 / n
    var = max(s2 - n * abs(mean) ** 2, 0.0) / (n - 1)
    return McEstimate(mean, sqrt(var / n), n)


def mc_expect(observable: TraceObservable, spec: EnsembleSpec, samples: int, seed: int,
              batch_size: int = 1000, threads: int | None = None) -> McEstimate:
    """Sample mean and standard error; batches are seeded from ``seed`` and
    reduced in batch order, so the result does not depend on ``threads``."""
    if samples < 100:
        raise ValueError("Monte Carlo needs at least 100 samples")
    used = observable.matrices_used()
    if used and max(used) > spec.n:
        raise ValueError(f"observable uses Z_{max(used)} but the ensemble has n={spec.n}")
    sizes = [batch_size] * (samples // batch_size)
    if samples % batch_size:
        sizes.append(samples % batch_size)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(b: int):
        return _summarize(observable.evaluate(sample_batch(spec, sizes[b], seeds[b])))

    workers = min(threads or _threads(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(b) for b in range(len(sizes))]
    return _combine(parts)


@dataclass(frozen=True)
class CovarianceReport:
    mean: complex
    mean_stderr: float
    abs2: float
    abs2_stderr: float
    holo: complex
    holo_stderr: float
    samples: int


def entry_moments(spec: EnsembleSpec, samples: int, seed: int,
                  a: int = 0, b: int = 0, c: int = 1, d: int = 1, matrix: int = 1) -> CovarianceReport:
    """Empirical <Z_ab>, <|Z_ab|^2> and <Z_ab Z_cd> for one matrix of the ensemble."""
    Zs = sample_batch(spec, samples, seed)[:, matrix - 1]
    x = Zs[:, a, b]
    y = Zs[:, c, d]
    stats = []
    for v in (x, np.abs(x) ** 2, x * y):
        stats.append((v.mean(), float(np.sqrt(np.mean(np.abs(v - v.mean()) ** 2) / (samples - 1)))))
    return CovarianceReport(complex(stats[0][0]), stats[0][1], float(stats[1][0].real), stats[1][1],
                            complex(stats[2][0]), stats[2][1], samples)


# --- Schur integrals over ribbon graphs ------------------------------------------

def vertex_word(g: RibbonGraph, a: int) -> Word:
    return tuple(t for h in g.vertices[a] for t in (h, f"C{h}"))


def face_word(g: RibbonGraph, b: int) -> Word:
    return tuple(t for h in g.faces()[b] for t in (h, f"C{h}"))


def schur_constant(lam: Partition, n: int, N: int) -> Fraction:
    """(dim lam / |lam|!)^(-n) * N^(-n |lam|)."""
    d = weight(lam)
    return Fraction(factorial(d), dim_sym(lam)) ** n * Fraction(1, N) ** (n * d)


def values_equal(x, y, rel: float = 1e-10) -> bool:
    if isinstance(x, (Fraction, int)) and isinstance(y, (Fraction, int)):
        return x == y
    return cmath.isclose(complex(x), complex(y), rel_tol=rel, abs_tol=rel)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: object
    rhs: object
    flags: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return values_equal(self.lhs, self.rhs) and all(values_equal(self.lhs, v) for v in self.extra.values())


def _check_stability(d: int, N: int, what: str) -> tuple[str, ...]:
    if d > N:
        msg = f"{what}: weight {d} exceeds matrix size N={N}"
        warnings.warn(msg, stacklevel=3)
        return (msg,)
    return ()


def _spec_for(g: RibbonGraph, src: SourceAssignment, spec: EnsembleSpec | None) -> EnsembleSpec:
    spec = spec or EnsembleSpec(g.n, src.N)
    if spec.N != src.N:
        raise ValueError(f"ensemble size N={spec.N} differs from source size {src.N}")
    if spec.n != g.n:
        raise ValueError(f"ensemble has n={spec.n} matrices but the graph has {g.n} edges")
    src.check_graph(g)
    return spec


def _schur_product_integral(words: list[Word], lambdas: Sequence[Partition],
                            consts, evaluator: WickEvaluator):
    obs = TraceObservable.constant(1)
    for lam, w in zip(lambdas, words):
        obs = obs * schur_observable(lam, w, consts)
    return evaluator(obs)


def schur_integral_vertex(g: RibbonGraph, src: SourceAssignment, lambdas: Sequence[Sequence[int]],
                          spec: EnsembleSpec | None = None,
                          evaluator: WickEvaluator | None = None) -> IdentityCheck:
    """<prod_a s_{lam^a}(W_a(Z))> against c * delta * prod_b s_lam(W*_b(I))."""
    spec = _spec_for(g, src, spec)
    lambdas = [partition(l) for l in lambdas]
    if len(lambdas) != g.v:
        raise ValueError(f"need one partition per vertex ({g.v}), got {len(lambdas)}")
    flags = _check_stability(max(map(weight, lambdas)), spec.N, "vertex Schur integral")
    consts = src.named()
    evaluator = evaluator or WickEvaluator(spec.N, consts)
    lhs = _schur_product_integral([vertex_word(g, a) for a in range(g.v)], lambdas, consts, evaluator)
    rhs = _rhs_product(lambdas, [face_monodromy(g, src, b).matrix for b in range(g.f)], g.n, spec.N)
    return IdentityCheck(lhs, rhs, flags)


def schur_integral_face(g: RibbonGraph, src: SourceAssignment, lambdas: Sequence[Sequence[int]],
                        spec: EnsembleSpec | None = None,
                        evaluator: WickEvaluator | None = None) -> IdentityCheck:
    """<prod_b s_{lam^b}(W*_b(Z))> against c * delta * prod_a s_lam(W_a(I))."""
    spec = _spec_for(g, src, spec)
    lambdas = [partition(l) for l in lambdas]
    if len(lambdas) != g.f:
        raise ValueError(f"need one partition per face ({g.f}), got {len(lambdas)}")
    flags = _check_stability(max(map(weight, lambdas)), spec.N, "face Schur integral")
    consts = src.named()
    evaluator = evaluator or WickEvaluator(spec.N, consts)
    lhs = _schur_product_integral([face_word(g, b) for b in range(g.f)], lambdas, consts, evaluator)
    rhs = _rhs_product(lambdas, [vertex_monodromy(g, src, a).matrix for a in range(g.v)], g.n, spec.N)
    return IdentityCheck(lhs, rhs, flags)


def _rhs_product(lambdas: list[Partition], mats: list[np.ndarray], n: int, N: int):
    if any(l != lambdas[0] for l in lambdas):
        return Fraction(0)
    lam = lambdas[0]
    out = schur_constant(lam, n, N)
    d = weight(lam)
    for M in mats:
        out *= eval_schur(lam, powersums_of_matrix(M, d)) if d else 1
    return out


def polygon_gluing_identity(g: RibbonGraph, src: SourceAssignment, mus: Sequence[Sequence[int]], d: int,
                            spec: EnsembleSpec | None = None,
                            evaluator: WickEvaluator | None = None) -> IdentityCheck:
    """<prod_b p_{mu^b}(W*_b(Z)) / zeta(mu^b)> against
    N^(-n d) sum_nu H(mu, nu) prod_a p_{nu^a}(W_a(I)).

    ``extra['characters']`` holds the right side rebuilt from the face Schur
    integral through the character expansion of p_mu.
    """
    spec = _spec_for(g, src, spec)
    mus = [partition(m) for m in mus]
    if len(mus) != g.f:
        raise ValueError(f"need one profile per face ({g.f}), got {len(mus)}")
    if any(weight(m) != d for m in mus):
        raise ValueError(f"all face profiles must have weight {d}")
    if d < 1:
        raise ValueError("polygon gluing needs d >= 1")
    flags = _check_stability(d, spec.N, "polygon gluing")
    N, n = spec.N, g.n
    consts = src.named()
    evaluator = evaluator or WickEvaluator(N, consts)

    obs = TraceObservable.constant(1)
    for b, mu in enumerate(mus):
        obs = obs * (power_sum_observable(mu, face_word(g, b), consts) * Fraction(1, zeta(mu)))
    lhs = evaluator(obs)

    W = [vertex_monodromy(g, src, a).matrix for a in range(g.v)]
    parts = partitions_of(d)
    pnu = [{nu: p_mu_of_matrix(nu, M) for nu in parts} for M in W]
    e = g.euler()
    rhs = 0
    for nus in itertools.product(parts, repeat=g.v):
        weight_prod = prod((pnu[a][nu] for a, nu in enumerate(nus)), start=Fraction(1))
        if not weight_prod:
            continue
        rhs += hurwitz_frobenius(HurwitzInstance(e, tuple(mus) + nus)) * weight_prod
    rhs *= Fraction(1, N) ** (n * d)

    table = fast_table(d)
    via_chars = 0
    for lam in parts:
        w = Fraction(dim_sym(lam), factorial(d))
        coeff = prod((w * table.table[lam, mu] for mu in mus), start=Fraction(1))
        if not coeff:
            continue
        via_chars += coeff * _rhs_product([lam] * g.v, W, n, N)
    return IdentityCheck(lhs, rhs, flags, {"characters": via_chars})
