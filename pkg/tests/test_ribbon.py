import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from taulab.ribbon import (
    RibbonGraph, SourceAssignment, all_graphs, compose, cycles_of, diagonal_matrix,
    face_monodromy, identity_matrix, random_graph, vertex_monodromy,
)

TWO_LEAVES = RibbonGraph(1, ((1,), (-1,)))
LOOP = RibbonGraph(1, ((1, -1),))
TORUS = RibbonGraph(2, ((1, 2, -1, -2),))


def spectrum(M, kmax):
    out, P = [], np.eye(M.shape[0], dtype=complex)
    for _ in range(kmax):
        P = P @ M
        out.append(np.trace(P))
    return np.array(out)


def spectra_match(a, b, rel=1e-10):
    key = lambda s: tuple(np.round(s, 6).view(float))
    a, b = sorted(a, key=key), sorted(b, key=key)
    return all(np.allclose(x, y, rtol=rel, atol=rel * max(1.0, np.abs(y).max())) for x, y in zip(a, b))


def random_numeric_sources(g, N, rng):
    return SourceAssignment(N, {h: rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
                                for h in g.half_edges})


class TestFaces:
    def test_two_leaves(self):
        assert TWO_LEAVES.faces() == [(1, -1)]
        assert TWO_LEAVES.euler() == 2

    def test_loop(self):
        assert sorted(LOOP.faces()) == [(-1,), (1,)]
        assert LOOP.euler() == 2

    def test_torus(self):
        assert TORUS.v == 1 and TORUS.f == 1
        assert TORUS.euler() == 0 and TORUS.genus() == 1

    def test_euler_counts_face_cycles(self):
        for g in all_graphs(3, connected=False):
            assert g.euler() == len(cycles_of(g.phi)) - g.n + g.v


class TestValidation:
    @pytest.mark.parametrize("n,vertices", [(1, ((1, 2), (-1,))), (1, ((1, 1), (-1,))),
                                            (1, ((1,),)), (1, ((1,), (-1,), ())), (1, ((0, 1, -1),))])
    def test_rejects(self, n, vertices):
        with pytest.raises(ValueError):
            RibbonGraph(n, vertices)

    def test_json_roundtrip(self):
        assert RibbonGraph.from_json(TORUS.to_json()) == TORUS
        with pytest.raises(ValueError):
            RibbonGraph.from_json('{"vertices": [[1], [-1]]}')

    def test_connectivity(self):
        assert not RibbonGraph(2, ((1, -1), (2, -2))).is_connected()
        assert len(all_graphs(1)) == 2


class TestDuality:
    def test_sphere_pair(self):
        assert TWO_LEAVES.dual().cyclically_equivalent(LOOP)
        assert LOOP.dual().cyclically_equivalent(TWO_LEAVES)

    def test_torus_dual(self):
        assert TORUS.dual().v == TORUS.f == 1

    @settings(max_examples=20, deadline=None)
    @given(st.integers(1, 5), st.randoms(use_true_random=False))
    def test_random_graphs(self, n, rnd):
        g = random_graph(n, rnd)
        assert compose(g.sigma, g.alpha) == g.phi
        assert compose(g.sigma, g.phi) == g.alpha
        dual = g.dual()
        assert dual.euler() == g.euler()
        assert dual.v == g.f and dual.f == g.v
        assert dual.dual().cyclically_equivalent(g)

    def test_each_pair_once(self):
        for g in all_graphs(3):
            for cycles in (g.vertices, g.faces()):
                counts = Counter(h for c in cycles for h in c)
                assert set(counts.values()) == {1} and len(counts) == 2 * g.n


class TestMonodromy:
    def test_undressed(self):
        src = SourceAssignment.identity(TWO_LEAVES, 3)
        assert (vertex_monodromy(TWO_LEAVES, src, 0).matrix == identity_matrix(3)).all()
        A = np.array([[1, 2], [3, 4]], dtype=object)
        B = np.array([[0, 1], [1, 0]], dtype=object)
        src = SourceAssignment(2, {1: A, -1: B})
        W = vertex_monodromy(LOOP, src, 0)
        assert W.word == (1, -1) and (W.matrix == A @ B).all()

    def test_dressed(self):
        rng = np.random.default_rng(0)
        A, B, Z = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(3))
        src = SourceAssignment(3, {1: A, -1: B})
        W = vertex_monodromy(LOOP, src, 0, [Z])
        assert np.allclose(W.matrix, Z @ A @ Z.conj().T @ B)

    def test_face_reads_corners(self):
        A = diagonal_matrix([2, 3])
        B = diagonal_matrix([5, 7])
        src = SourceAssignment(2, {1: A, -1: B})
        Wf = face_monodromy(TWO_LEAVES, src, 0)
        assert (Wf.matrix == A @ B).all()
        assert (face_monodromy(TWO_LEAVES, SourceAssignment.identity(TWO_LEAVES, 2), 0).matrix
                == identity_matrix(2)).all()

    def test_cyclic_equality(self):
        src = SourceAssignment.identity(TORUS, 2)
        W = vertex_monodromy(TORUS, src, 0)
        rotated = type(W)((2, -1, -2, 1), W.matrix)
        assert W.cyclically_equal(rotated)
        assert not W.cyclically_equal(type(W)((1, -1, 2, -2), W.matrix))

    def test_rotation_keeps_trace_spectrum(self):
        rng = np.random.default_rng(5)
        g = TORUS
        src = random_numeric_sources(g, 3, rng)
        Z = [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(g.n)]
        M = vertex_monodromy(g, src, 0, Z).matrix
        rotated = RibbonGraph(2, ((2, -1, -2, 1),))
        M2 = vertex_monodromy(rotated, src, 0, Z).matrix
        assert not np.allclose(M, M2)
        assert np.allclose(spectrum(M, 4), spectrum(M2, 4), rtol=1e-10)

    def test_duality_on_random_graphs(self):
        pyrng = random.Random(11)
        rng = np.random.default_rng(11)
        for _ in range(20):
            g = random_graph(pyrng.randint(1, 5), pyrng)
            N = 3
            src = random_numeric_sources(g, N, rng)
            Z = [(rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / 2 for _ in range(g.n)]
            dual = g.dual()
            faces = [spectrum(face_monodromy(g, src, b, Z).matrix, N) for b in range(g.f)]
            verts = [spectrum(vertex_monodromy(dual, src, a, Z).matrix, N) for a in range(dual.v)]
            assert spectra_match(faces, verts)
            faces_dual = [spectrum(face_monodromy(dual, src, b, Z).matrix, N) for b in range(dual.f)]
            verts_g = [spectrum(vertex_monodromy(g, src, a, Z).matrix, N) for a in range(g.v)]
            assert spectra_match(faces_dual, verts_g)

    def test_index_errors(self):
        src = SourceAssignment.identity(TORUS, 2)
        with pytest.raises(IndexError):
            vertex_monodromy(TORUS, src, 1)
        with pytest.raises(IndexError):
            face_monodromy(TORUS, src, 3)


class TestSources:
    def test_json_roundtrip(self):
        g = TWO_LEAVES
        src = SourceAssignment(2, {1: diagonal_matrix([Fraction(1, 2), 3]),
                                   -1: np.array([[1 + 2j, 0], [0, 1]], dtype=object)})
        back = SourceAssignment.from_json(src.to_json())
        assert back[1][0, 0] == Fraction(1, 2) and isinstance(back[1][0, 0], Fraction)
        assert back[-1][0, 0] == 1 + 2j
        back.check_graph(g)

    def test_decimal_entries_are_exact(self):
        src = SourceAssignment.from_json('{"N": 1, "C": {"1": [[0.25]], "-1": [["1/3"]]}}')
        assert src[1][0, 0] == Fraction(1, 4) and src[-1][0, 0] == Fraction(1, 3)

    def test_missing_and_shape(self):
        with pytest.raises(ValueError):
            SourceAssignment(2, {1: identity_matrix(3)})
        with pytest.raises(ValueError):
            SourceAssignment(1, {1: identity_matrix(1)}).check_graph(TWO_LEAVES)
        with pytest.raises(ValueError):
            SourceAssignment.from_json('{"N": 1, "C": {"x": [[1]]}}')
