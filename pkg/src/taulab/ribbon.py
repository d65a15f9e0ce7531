"""Ribbon graphs (maps) on signed half-edges.

A graph with ``n`` edges has half-edges +-1..+-n.  Vertices are the cycles of
a permutation ``alpha`` (clockwise half-edge order), edges are the orbits of
the involution ``sigma(h) = -h``, and faces are the cycles of
``phi = sigma . alpha``.  The corner following half-edge ``h`` clockwise carries
the source matrix C_h; a face visits corners h, phi(h), phi^2(h), ...
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

Cycle = tuple[int, ...]


def _canonical_cycle(cyc: Sequence[int]) -> Cycle:
    k = min(range(len(cyc)), key=lambda i: (abs(cyc[i]), cyc[i] < 0))
    return tuple(cyc[k:]) + tuple(cyc[:k])


def cycles_of(perm: Mapping[int, int]) -> list[Cycle]:
    seen: set[int] = set()
    out = []
    for start in sorted(perm, key=lambda h: (abs(h), h < 0)):
        if start in seen:
            continue
        cyc = []
        h = start
        while h not in seen:
            seen.add(h)
            cyc.append(h)
            h = perm[h]
        out.append(tuple(cyc))
    return out


def perm_from_cycles(cycles: Iterable[Sequence[int]]) -> dict[int, int]:
    perm: dict[int, int] = {}
    for cyc in cycles:
        for i, h in enumerate(cyc):
            perm[h] = cyc[(i + 1) % len(cyc)]
    return perm


def compose(p: Mapping[int, int], q: Mapping[int, int]) -> dict[int, int]:
    """(p . q)(h) = p(q(h))."""
    return {h: p[q[h]] for h in q}


@dataclass(frozen=True)
class RibbonGraph:
    n: int
    vertices: tuple[Cycle, ...]
    alpha: dict[int, int] = field(init=False, repr=False, compare=False)
    sigma: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vertices = tuple(tuple(int(h) for h in v) for v in self.vertices)
        object.__setattr__(self, "vertices", vertices)
        labels = [h for v in vertices for h in v]
        expected = {h for i in range(1, self.n + 1) for h in (i, -i)}
        if any(len(v) == 0 for v in vertices):
            raise ValueError("empty vertex cycle")
        bad = [h for h in labels if h not in expected]
        if bad:
            raise ValueError(f"half-edge labels {bad} outside +-1..+-{self.n}")
        if len(labels) != len(set(labels)):
            raise ValueError("a half-edge label is repeated")
        if set(labels) != expected:
            raise ValueError(f"half-edges {sorted(expected - set(labels))} are not attached to any vertex")
        object.__setattr__(self, "alpha", perm_from_cycles(vertices))
        object.__setattr__(self, "sigma", {h: -h for h in expected})

    @classmethod
    def from_alpha(cls, n: int, alpha: Mapping[int, int]) -> "RibbonGraph":
        return cls(n, tuple(cycles_of(alpha)))

    @property
    def phi(self) -> dict[int, int]:
        return compose(self.sigma, self.alpha)

    @property
    def half_edges(self) -> list[int]:
        return sorted(self.alpha, key=lambda h: (abs(h), h < 0))

    def faces(self) -> list[Cycle]:
        return cycles_of(self.phi)

    @property
    def v(self) -> int:
        return len(self.vertices)

    @property
    def f(self) -> int:
        return len(self.faces())

    def euler(self) -> int:
        return self.f - self.n + self.v

    def genus(self) -> int:
        return (2 - self.euler()) // 2

    def dual(self) -> "RibbonGraph":
        return RibbonGraph(self.n, tuple(self.faces()))

    def is_connected(self) -> bool:
        if not self.alpha:
            return True
        start = next(iter(self.alpha))
        seen = {start}
        stack = [start]
        while stack:
            h = stack.pop()
            for k in (self.alpha[h], -h):
                if k not in seen:
                    seen.add(k)
                    stack.append(k)
        return len(seen) == len(self.alpha)

    def cyclically_equivalent(self, other: "RibbonGraph") -> bool:
        return self.n == other.n and sorted(map(_canonical_cycle, self.vertices)) == \
            sorted(map(_canonical_cycle, other.vertices))

    def vertex_of(self, h: int) -> int:
        for a, cyc in enumerate(self.vertices):
            if h in cyc:
                return a
        raise KeyError(h)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "vertices": [list(v) for v in self.vertices]})

    @classmethod
    def from_json(cls, text: str) -> "RibbonGraph":
        data = json.loads(text)
        try:
            return cls(int(data["n"]), tuple(tuple(v) for v in data["vertices"]))
        except KeyError as exc:
            raise ValueError(f"graph JSON is missing key {exc}") from None


def all_graphs(n: int, connected: bool = True) -> list[RibbonGraph]:
    """Every vertex permutation on +-1..+-n (labelled; no isomorphism reduction)."""
    labels = [h for i in range(1, n + 1) for h in (i, -i)]
    out = []
    for images in itertools.permutations(labels):
        g = RibbonGraph.from_alpha(n, dict(zip(labels, images)))
        if not connected or g.is_connected():
            out.append(g)
    return out


def random_graph(n: int, rng: random.Random, connected: bool = True) -> RibbonGraph:
    labels = [h for i in range(1, n + 1) for h in (i, -i)]
    while True:
        images = labels[:]
        rng.shuffle(images)
        g = RibbonGraph.from_alpha(n, dict(zip(labels, images)))
        if not connected or g.is_connected():
            return g


# --- sources and monodromies ------------------------------------------------

def _as_matrix(M) -> np.ndarray:
    A = np.asarray(M)
    if A.dtype != object and not np.iscomplexobj(A) and np.issubdtype(A.dtype, np.integer):
        A = np.vectorize(Fraction, otypes=[object])(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"source matrices must be square, got shape {A.shape}")
    return A


def identity_matrix(N: int) -> np.ndarray:
    I = np.full((N, N), Fraction(0), dtype=object)
    for i in range(N):
        I[i, i] = Fraction(1)
    return I


def diagonal_matrix(entries: Sequence) -> np.ndarray:
    N = len(entries)
    M = np.full((N, N), Fraction(0), dtype=object)
    for i, x in enumerate(entries):
        M[i, i] = Fraction(x) if not isinstance(x, complex) else x
    return M


@dataclass
class SourceAssignment:
    N: int
    C: dict[int, np.ndarray]

    def __post_init__(self):
        self.C = {int(h): _as_matrix(M) for h, M in self.C.items()}
        for h, M in self.C.items():
            if M.shape != (self.N, self.N):
                raise ValueError(f"source C_{h} has shape {M.shape}, expected {(self.N, self.N)}")

    def __getitem__(self, h: int) -> np.ndarray:
        try:
            return self.C[h]
        except KeyError:
            raise KeyError(f"no source matrix for half-edge {h}") from None

    def check_graph(self, g: RibbonGraph) -> None:
        missing = [h for h in g.half_edges if h not in self.C]
        if missing:
            raise ValueError(f"missing source matrices for half-edges {missing}")

    @classmethod
    def identity(cls, g: RibbonGraph, N: int) -> "SourceAssignment":
        return cls(N, {h: identity_matrix(N) for h in g.half_edges})

    @classmethod
    def random_diagonal(cls, g: RibbonGraph, N: int, rng: random.Random,
                        values: Sequence = (-2, -1, Fraction(1, 2), 1, 2, 3)) -> "SourceAssignment":
        return cls(N, {h: diagonal_matrix([Fraction(rng.choice(values)) for _ in range(N)])
                       for h in g.half_edges})

    def keys(self) -> dict[int, str]:
        return {h: f"C{h}" for h in self.C}

    def named(self) -> dict[str, np.ndarray]:
        return {f"C{h}": M for h, M in self.C.items()}

    def to_json(self) -> str:
        def enc(x):
            if isinstance(x, Fraction):
                return [str(x), "0"]
            z = complex(x)
            return [z.real, z.imag]
        return json.dumps({"N": self.N, "C": {str(h): [[enc(x) for x in row] for row in M]
                                              for h, M in sorted(self.C.items())}})

    @classmethod
    def from_json(cls, text: str) -> "SourceAssignment":
        data = json.loads(text)
        N = int(data["N"])
        C = {}
        for key, rows in data["C"].items():
            try:
                h = int(key.replace("−", "-"))
            except ValueError:
                raise ValueError(f"source key {key!r} is not a half-edge label") from None
            C[h] = np.array([[_parse_entry(x, f"C[{key}][{i}][{j}]") for j, x in enumerate(row)]
                             for i, row in enumerate(rows)], dtype=object)
        return cls(N, C)


def _parse_entry(x, where: str):
    if isinstance(x, list):
        if len(x) != 2:
            raise ValueError(f"{where}: complex entries are [re, im]")
        re, im = (_parse_real(v, where) for v in x)
    else:
        re, im = _parse_real(x, where), Fraction(0)
    if im == 0:
        return re
    return complex(float(re), float(im))


def _parse_real(v, where: str):
    if isinstance(v, bool):
        raise ValueError(f"{where}: boolean is not a number")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            raise ValueError(f"{where}: cannot parse {v!r}") from None
    if isinstance(v, float):
        return Fraction(repr(v))
    raise ValueError(f"{where}: unsupported entry {v!r}")


@dataclass(frozen=True)
class Monodromy:
    word: tuple[int, ...]
    matrix: np.ndarray = field(compare=False, repr=False)

    def trace_powers(self, kmax: int) -> list:
        from .symfunc import powersums_of_matrix
        return list(powersums_of_matrix(self.matrix, kmax))

    def cyclically_equal(self, other: "Monodromy") -> bool:
        a, b = self.word, other.word
        if len(a) != len(b):
            return False
        return any(a[i:] + a[:i] == b for i in range(len(a))) or (not a and not b)


def _product(factors: list[np.ndarray], N: int) -> np.ndarray:
    out = None
    for M in factors:
        out = M if out is None else out @ M
    return identity_matrix(N) if out is None else out


def _dressed(word: Sequence[int], src: SourceAssignment, Z: Sequence[np.ndarray] | None) -> np.ndarray:
    factors = []
    for h in word:
        if Z is not None:
            Zh = Z[abs(h) - 1]
            factors.append(Zh if h > 0 else Zh.conj().T)
        factors.append(src[h])
    return _product(factors, src.N)


def vertex_monodromy(g: RibbonGraph, src: SourceAssignment, a: int,
                     Z: Sequence[np.ndarray] | None = None) -> Monodromy:
    """W_a = prod over the clockwise cycle at vertex ``a`` of (Z_h C_h), or C_h alone
    when ``Z`` is omitted; Z_{-i} is the conjugate transpose of Z_i."""
    if not 0 <= a < g.v:
        raise IndexError(f"vertex {a} out of range (graph has {g.v})")
    word = g.vertices[a]
    return Monodromy(word, _dressed(word, src, Z))


def face_monodromy(g: RibbonGraph, src: SourceAssignment, b: int,
                   Z: Sequence[np.ndarray] | None = None) -> Monodromy:
    faces = g.faces()
    if not 0 <= b < len(faces):
        raise IndexError(f"face {b} out of range (graph has {len(faces)})")
    word = faces[b]
    return Monodromy(word, _dressed(word, src, Z))
