import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from taulab.hurwitz import (
    HurwitzInstance, count_factorizations, cycle_type, hurwitz_bruteforce, hurwitz_frobenius,
    hurwitz_raw_scan,
)
from taulab.partitions import partitions_of

F = Fraction


def H(e, *profiles):
    return hurwitz_frobenius(HurwitzInstance(e, profiles))


class TestGolden:
    def test_sphere(self):
        assert H(2, (1,), (1,)) == 1
        assert H(2, (2,), (2,)) == F(1, 2)

    def test_torus(self):
        assert H(0, (1, 1)) == 2

    def test_oracle_golden(self):
        assert hurwitz_bruteforce(HurwitzInstance(2, ((1,), (1,)))) == 1
        assert hurwitz_bruteforce(HurwitzInstance(2, ((2,), (2,)))) == F(1, 2)
        inst = HurwitzInstance(2, ((3,), (3,), (3,)))
        assert hurwitz_bruteforce(inst) == hurwitz_frobenius(inst) == F(1, 3)


class TestValidation:
    @pytest.mark.parametrize("e,profiles", [(1, ((1,),)), (4, ((1,),)), (2, ()),
                                            (2, ((2,), (1,))), (2, ((),))])
    def test_rejects(self, e, profiles):
        with pytest.raises(ValueError):
            HurwitzInstance(e, profiles)

    def test_bruteforce_limits(self):
        with pytest.raises(ValueError):
            hurwitz_bruteforce(HurwitzInstance(2, ((7,),)))
        with pytest.raises(ValueError):
            hurwitz_bruteforce(HurwitzInstance(-2, ((1,),)))

    def test_genus(self):
        assert HurwitzInstance(0, ((1,),)).genus == 1
        assert HurwitzInstance(-2, ((1,),)).genus == 2


def test_cycle_type():
    assert cycle_type((1, 0, 2)) == (2, 1)
    assert cycle_type((1, 2, 0, 4, 3)) == (3, 2)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_raw_scan_tier(d):
    for m in (1, 2, 3):
        for profiles in itertools.combinations_with_replacement(partitions_of(d), m):
            for e in (2, 0):
                inst = HurwitzInstance(e, profiles)
                assert hurwitz_raw_scan(inst) == hurwitz_bruteforce(inst) == hurwitz_frobenius(inst)


def test_raw_scan_degree_four():
    inst = HurwitzInstance(2, ((2, 1, 1), (2, 1, 1), (3, 1)))
    assert hurwitz_raw_scan(inst) == hurwitz_frobenius(inst)


def test_genus_two_against_counting():
    inst = HurwitzInstance(-2, ((2, 1),))
    assert F(count_factorizations(inst), 6) == hurwitz_frobenius(inst)


profile_tuples = st.integers(1, 5).flatmap(
    lambda d: st.lists(st.sampled_from(partitions_of(d)), min_size=1, max_size=4))


@settings(max_examples=40, deadline=None)
@given(profile_tuples, st.sampled_from([2, 0]), st.randoms(use_true_random=False))
def test_symmetry_and_padding(profiles, e, rnd):
    d = sum(profiles[0])
    base = H(e, *profiles)
    shuffled = list(profiles)
    rnd.shuffle(shuffled)
    assert H(e, *shuffled) == base
    assert H(e, *profiles, (1,) * d) == base
