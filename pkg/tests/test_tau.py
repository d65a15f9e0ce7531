import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from taulab import tau
from taulab.partitions import cells, conjugate, partitions_up_to, to_frobenius, from_frobenius, weight
from taulab.ribbon import RibbonGraph, SourceAssignment, all_graphs, diagonal_matrix
from taulab.symfunc import PowerSumValues, eval_schur, specialize_infty

F = Fraction
TWO_LEAVES = RibbonGraph(1, ((1,), (-1,)))
TORUS = RibbonGraph(2, ((1, 2, -1, -2),))


def rand_times(rng, D):
    return PowerSumValues([F(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(D)])


class TestCauchyLittlewood:
    def test_weight_zero(self):
        for conv in tau.CONVENTIONS:
            res = tau.cauchy_littlewood(3, conv)
            assert res.lhs.coefficient((), ()) == 1 == res.rhs.coefficient((), ())

    def test_printed_sign_disagrees_at_first_order(self):
        res = tau.cauchy_littlewood(2, "printed")
        assert res.lhs.coefficient((1,), (1,)) == -1
        assert res.rhs.coefficient((1,), (1,)) == 1
        assert not res.holds and ((1,), (1,)) in res.mismatches()

    @pytest.mark.parametrize("D", range(0, 6))
    @pytest.mark.parametrize("conv", ["alternating", "signed"])
    def test_identity(self, D, conv):
        assert tau.cauchy_littlewood(D, conv).holds

    def test_schur_side_is_conjugate_pairing(self):
        rhs = tau.cauchy_littlewood_rhs(4)
        rng = random.Random(0)
        p, pt = rand_times(rng, 4), rand_times(rng, 4)
        direct = sum(eval_schur(lam, p) * eval_schur(conjugate(lam), pt) for lam in partitions_up_to(4))
        assert rhs.evaluate(p, pt) == direct

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.fractions(-3, 3, max_denominator=5), min_size=8, max_size=8))
    @pytest.mark.parametrize("conv", ["alternating", "signed"])
    def test_evaluated_sides_agree(self, conv, xs):
        p, pt = PowerSumValues(xs[:4]), PowerSumValues(xs[4:])
        assert tau.cauchy_littlewood_lhs(4, conv).evaluate(p, pt) == tau.cauchy_littlewood_rhs(4, conv).evaluate(p, pt)

    def test_depth_limit(self):
        with pytest.raises(ValueError):
            tau.cauchy_littlewood(9)

    def test_truncation_monotone(self):
        for conv in ("alternating", "signed"):
            for D in range(1, 5):
                lo, hi = tau.cauchy_littlewood_lhs(D, conv), tau.cauchy_littlewood_lhs(D + 1, conv)
                for key, c in lo.terms.items():
                    assert hi.terms[key] == c
                extra = {k for k in hi.terms if k not in lo.terms}
                assert all(weight(mu) == D + 1 or weight(nu) == D + 1 for mu, nu in extra)


def round_dance_two_oracle(p, pt, D):
    """Two-component series by pairing explicit partitions of equal Frobenius rank."""
    total = F(1)
    parts = partitions_up_to(D)[1:]
    for A in parts:
        a1, b1 = to_frobenius(A)
        for B in parts:
            a2, b2 = to_frobenius(B)
            if len(a2) != len(a1):
                continue
            C, E = from_frobenius((b1, a2)), from_frobenius((b2, a1))
            if weight(C) > D or weight(E) > D:
                continue
            total += (eval_schur(A, p[0]) * eval_schur(C, pt[0])
                      * eval_schur(B, p[1]) * eval_schur(E, pt[1]))
    return total


class TestRoundDance:
    def test_one_component_is_cauchy_littlewood(self):
        rng = random.Random(4)
        rhs = tau.cauchy_littlewood_rhs(4)
        for _ in range(5):
            p, pt = rand_times(rng, 4), rand_times(rng, 4)
            assert tau.round_dance(tau.TauSeriesSpec(1, 4, [p], [pt])) == rhs.evaluate(p, pt)

    def test_zero_dual_times(self):
        rng = random.Random(1)
        spec = tau.TauSeriesSpec(3, 4, [rand_times(rng, 4) for _ in range(3)], [[0] * 4] * 3)
        assert tau.round_dance(spec) == 1

    @pytest.mark.parametrize("seed", range(3))
    def test_two_components(self, seed):
        rng = random.Random(seed)
        p = [rand_times(rng, 3) for _ in range(2)]
        pt = [rand_times(rng, 3) for _ in range(2)]
        assert tau.round_dance(tau.TauSeriesSpec(2, 3, p, pt)) == round_dance_two_oracle(p, pt, 3)

    def test_two_components_deeper(self):
        rng = random.Random(9)
        p = [rand_times(rng, 5) for _ in range(2)]
        pt = [rand_times(rng, 5) for _ in range(2)]
        assert tau.round_dance(tau.TauSeriesSpec(2, 5, p, pt)) == round_dance_two_oracle(p, pt, 5)

    def test_rank_bound(self):
        rng = random.Random(2)
        p, pt = [rand_times(rng, 4)], [rand_times(rng, 4)]
        full = tau.round_dance(tau.TauSeriesSpec(1, 4, p, pt))
        assert tau.round_dance(tau.TauSeriesSpec(1, 4, p, pt, kappa_max=5)) == full
        rank_one = tau.round_dance(tau.TauSeriesSpec(1, 4, p, pt, kappa_max=1))
        hooks = 1 + sum(eval_schur(l, p[0]) * eval_schur(conjugate(l), pt[0])
                        for l in partitions_up_to(4)[1:] if to_frobenius(l).rank == 1)
        assert rank_one == hooks

    def test_chains_respect_weight(self):
        for alphas, betas in tau.round_dance_terms(3, 4):
            for i in range(3):
                assert weight(from_frobenius((alphas[i], betas[i]))) <= 4
                assert weight(from_frobenius((betas[i], alphas[(i + 1) % 3]))) <= 4

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            tau.TauSeriesSpec(2, 3, [[1, 1, 1]], [[1, 1, 1]])
        with pytest.raises(ValueError):
            tau.TauSeriesSpec(1, 3, [[1, 1]], [[1, 1, 1]])


class TestHypergeometric:
    def test_plain(self):
        inf = specialize_infty(2)
        assert tau.hyp_tau(inf, inf, tau.ContentFactorList(), 0, 2) == F(5, 2)

    def test_zero_factor(self):
        rng = random.Random(3)
        p1, p2 = rand_times(rng, 4), rand_times(rng, 4)
        assert tau.hyp_tau(p1, p2, tau.ContentFactorList((0,)), 1, 4, 3) == 1

    @pytest.mark.parametrize("a", [-2, -1, 0, 1, 2])
    def test_content_vanishing_termwise(self, a):
        factors = tau.ContentFactorList((a,), (3,))
        for lam in partitions_up_to(6):
            contents = {c.content for c in cells(lam)}
            killed = (-a in contents) or (-3 in contents)
            assert (factors.weight_of(lam) == 0) == killed

    def test_truncation_monotone(self):
        rng = random.Random(6)
        p1, p2 = rand_times(rng, 5), rand_times(rng, 5)
        factors = tau.ContentFactorList((F(3, 2),), (2,))
        for D in range(4):
            step = tau.hyp_tau(p1, p2, factors, 1, D + 1, 2) - tau.hyp_tau(p1, p2, factors, 1, D, 2)
            top = sum(F(1, 2) ** (D + 1) * factors.weight_of(l) * eval_schur(l, p1) * eval_schur(l, p2)
                      for l in partitions_up_to(D + 1) if weight(l) == D + 1)
            assert step == top

    def test_levels_match_projector_spectrum(self):
        # a level N_b is the same as feeding the power sums of a rank-N_b projector
        rng = random.Random(5)
        p1 = rand_times(rng, 4)
        proj = PowerSumValues([2] * 4)
        with_level = tau.hyp_tau(p1, specialize_infty(4), tau.ContentFactorList((), (2,)), 0, 4)
        as_times = tau.hyp_tau(p1, proj, tau.ContentFactorList(), 0, 4)
        assert with_level == as_times


class TestGenerating:
    def test_one_edge_infinity(self):
        src = SourceAssignment.identity(TWO_LEAVES, 2)
        inf = specialize_infty(2)
        res = tau.generating_expectation(TWO_LEAVES, src, [inf, inf], 2)
        expected = 1 + sum(tau.schur_constant(l, 1, 2) * eval_schur(l, inf) ** 2
                           * eval_schur(l, PowerSumValues([2, 2])) for l in partitions_up_to(2)[1:])
        assert res.schur_sum == expected == F(5, 2)
        assert res.wick == res.schur_sum and res.holds

    def test_zero_times(self):
        rng = random.Random(2)
        g = RibbonGraph(2, ((1, 2), (-1,), (-2,)))
        src = SourceAssignment.random_diagonal(g, 3, rng)
        res = tau.generating_expectation(g, src, [rand_times(rng, 3), [0, 0, 0], rand_times(rng, 3)], 3)
        assert res.schur_sum == 1 and res.wick == 1

    def test_torus(self):
        rng = random.Random(7)
        src = SourceAssignment.random_diagonal(TORUS, 2, rng)
        res = tau.generating_expectation(TORUS, src, [rand_times(rng, 2)], 2)
        assert res.holds and res.wick == res.schur_sum

    def test_printed_coupling_differs(self):
        rng = random.Random(7)
        src = SourceAssignment.random_diagonal(TWO_LEAVES, 2, rng)
        plist = [rand_times(rng, 2), rand_times(rng, 2)]
        alt = tau.generating_expectation(TWO_LEAVES, src, plist, 2)
        printed = tau.generating_expectation(TWO_LEAVES, src, plist, 2, convention="printed")
        assert alt.holds and not printed.holds

    def test_depth_flag(self):
        src = SourceAssignment.identity(TWO_LEAVES, 1)
        inf = specialize_infty(2)
        res = tau.generating_expectation(TWO_LEAVES, src, [inf, inf], 2, way2="none")
        assert res.flags

    def test_monte_carlo_route(self):
        src = SourceAssignment.identity(TWO_LEAVES, 3)
        rng = random.Random(1)
        plist = [rand_times(rng, 2), rand_times(rng, 2)]
        res = tau.generating_expectation(TWO_LEAVES, src, plist, 2, way2="both", samples=10_000, seed=3)
        assert res.holds
        with pytest.raises(ValueError):
            tau.generating_expectation(TWO_LEAVES, src, plist, 2, way2="mc")


def projector_sources(g, N, free_faces, rng):
    """0/1 diagonal on the first corner of each specialized face, identity elsewhere;
    rational diagonals on the corners of free faces."""
    C = {}
    for b, face in enumerate(g.faces()):
        for k, h in enumerate(face):
            if b in free_faces:
                C[h] = diagonal_matrix([F(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(N)])
            elif k == 0:
                C[h] = diagonal_matrix([rng.randint(0, 1) for _ in range(N)])
            else:
                C[h] = diagonal_matrix([1] * N)
    return SourceAssignment(N, C)


class TestReducer:
    def test_case_one_levels_only(self):
        g = RibbonGraph(2, ((1, 2), (-1,), (-2,)))
        src = projector_sources(g, 3, set(), random.Random(0))
        red = tau.specialization_reducer(g, src, ["free", "free", "infty"], ["spectrum"] * g.f)
        assert red.case == 1 and red.free == (("vertex", 0), ("vertex", 1))
        assert red.factors.a_terms == ()
        ranks = []
        for face in g.faces():
            diag = np.ones(3, dtype=object)
            for h in face:
                diag = diag * np.diagonal(src[h])
            ranks.append(int(sum(diag)))
        assert red.factors.levels == tuple(ranks)

    def test_case_two_shape(self):
        g = RibbonGraph(1, ((1, -1),))
        src = projector_sources(g, 3, {0}, random.Random(2))
        red = tau.specialization_reducer(g, src, ["free"], ["free", "spectrum"])
        assert red.case == 2 and red.free == (("vertex", 0), ("face", 0))
        assert red.factors.a_terms == () and len(red.factors.levels) == 1

    def test_case_three_counts(self):
        # two free faces leave every vertex specialized: v = k + 2 a-terms and f - 2 levels
        g = next(g for g in all_graphs(3) if g.euler() == 2 and g.v == 2 and g.f == 3)
        src = projector_sources(g, 3, {0, 1}, random.Random(1))
        red = tau.specialization_reducer(g, src, [("const", F(1, 2)), ("const", 2)], ["free", "free", "spectrum"])
        assert red.case == 3 and red.free == (("face", 0), ("face", 1))
        assert red.factors.a_terms == (F(1, 2), 2)
        assert len(red.factors.levels) == g.f - 2

    def test_torus_rejected(self):
        src = SourceAssignment.identity(TORUS, 2)
        with pytest.raises(ValueError, match="sphere"):
            tau.specialization_reducer(TORUS, src, ["free"], ["spectrum"])

    def test_too_many_free(self):
        g = RibbonGraph(2, ((1, 2), (-1,), (-2,)))
        src = SourceAssignment.identity(g, 2)
        with pytest.raises(ValueError, match="two free"):
            tau.specialization_reducer(g, src, ["free"] * 3, ["spectrum"])

    def test_bad_spectrum(self):
        g = TWO_LEAVES
        src = SourceAssignment(2, {1: diagonal_matrix([2, 0]), -1: diagonal_matrix([1, 1])})
        with pytest.raises(ValueError, match="spectrum"):
            tau.specialization_reducer(g, src, ["free", "free"], ["spectrum"])

    def test_spectrum_level(self):
        assert tau.spectrum_level(diagonal_matrix([1, 0, 1])) == 2
        assert tau.spectrum_level(diagonal_matrix([1, F(1, 2)])) is None
        assert tau.spectrum_level(diagonal_matrix([0, 0])) == 0

    @pytest.mark.parametrize("case", [1, 2, 3])
    def test_reduction_equals_hypergeometric(self, case):
        rng = random.Random(case)
        D, N = 3, 3
        checked = 0
        for n in (1, 2):
            for g in all_graphs(n):
                if g.euler() != 2 or g.f < case - 1:
                    continue
                free_faces = set(range(case - 1))
                free_vertices = 2 - len(free_faces)
                src = projector_sources(g, N, free_faces, rng)
                vs = ["free" if a < free_vertices else
                      (("const", F(rng.randint(-2, 3), rng.randint(1, 2))) if rng.random() < 0.6 else "infty")
                      for a in range(g.v)]
                fs = ["free" if b in free_faces else "spectrum" for b in range(g.f)]
                red = tau.specialization_reducer(g, src, vs, fs)
                assert red.case == case
                p_free = {a: rand_times(rng, D) for a in range(g.v) if vs[a] == "free"}
                plist = red.vertex_times(p_free, D)
                p1, p2 = red.free_times(g, src, plist, D)
                expected = tau.hyp_tau(p1, p2, red.factors, g.n, D, N)
                res = tau.generating_expectation(g, src, plist, D)
                assert res.schur_sum == expected and res.wick == expected
                checked += 1
        assert checked >= 5
