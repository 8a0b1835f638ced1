from fractions import Fraction

import pytest

from randaudit.integers import exact_distribution
from randaudit.pathenum import (
    ENUMERABLE_ALGORITHMS,
    exact_permutation_distribution,
    exact_subset_distribution,
    uniform_subset_reference,
)


@pytest.mark.parametrize("algorithm", ENUMERABLE_ALGORITHMS)
def test_uniform_on_subsets_spot_check(algorithm):
    assert exact_subset_distribution(algorithm, 4, 2) == uniform_subset_reference(4, 2)
    assert exact_subset_distribution(algorithm, 5, 3) == uniform_subset_reference(5, 3)


def test_cormen_five_choose_two_exhaustive():
    dist = exact_subset_distribution("cormen", 5, 2)
    assert len(dist) == 10
    assert all(p == Fraction(1, 10) for p in dist.values())


def test_fisher_yates_all_24_permutations_equally_often():
    dist = exact_permutation_distribution(4)
    assert len(dist) == 24
    assert set(dist.values()) == {Fraction(1, 24)}


def test_masses_always_sum_to_one():
    for algorithm in ENUMERABLE_ALGORITHMS:
        dist = exact_subset_distribution(algorithm, 6, 2)
        assert sum(dist.values()) == 1


def test_biased_draws_break_uniformity():
    # feed the floor method's width-4 distribution into the samplers: the
    # induced subset distribution must show the bias exactly
    def floor_dist(m):
        return exact_distribution("floor", 4, m).probs

    for algorithm in ("random_indices", "fisher_yates", "cormen", "reservoir_r"):
        dist = exact_subset_distribution(algorithm, 5, 2, draw_dist=floor_dist)
        assert sum(dist.values()) == 1
        assert any(p != Fraction(1, 10) for p in dist.values()), algorithm


def test_biased_random_indices_collapse_matches_direct_formula():
    # two draws without replacement: P({a,b}) = p_a p_b / (1-p_a) + p_b p_a / (1-p_b)
    def floor_dist(m):
        return exact_distribution("floor", 4, m).probs

    p = floor_dist(5)
    dist = exact_subset_distribution("random_indices", 5, 2, draw_dist=floor_dist)
    for pair, mass in dist.items():
        a, b = sorted(pair)
        expected = p[a] * p[b] / (1 - p[a]) + p[b] * p[a] / (1 - p[b])
        assert mass == expected


def test_draw_dist_rejected_where_meaningless():
    with pytest.raises(ValueError):
        exact_subset_distribution("pikk", 4, 2, draw_dist=lambda m: {})
    with pytest.raises(ValueError):
        exact_subset_distribution("vitter_z", 4, 2, draw_dist=lambda m: {})
