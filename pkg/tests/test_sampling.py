import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randaudit.errors import ShortStreamWarning
from randaudit.generators import HashCounterGenerator
from randaudit.integers import RandomSource
from randaudit.sampling import (
    SampleSpec,
    ScriptedSource,
    cormen_sample,
    fisher_yates,
    pikk,
    random_indices,
    reservoir_r,
    vitter_z,
)


def hash_source(seed: str) -> RandomSource:
    return RandomSource(HashCounterGenerator(seed))


class TestPikk:
    def test_traced_sort_order(self):
        s = ScriptedSource(fractions=[0.3, 0.1, 0.2])
        assert pikk(s, 3, 2).items == (2, 3)

    def test_k0_still_consumes_n_words(self):
        src = hash_source("pikk-k0")
        sample = pikk(src, 7, 0)
        assert sample.items == ()
        assert sample.words == 7

    def test_k_equals_n_is_a_permutation(self):
        src = hash_source("pikk-perm")
        sample = pikk(src, 10, 10)
        assert sorted(sample.items) == list(range(1, 11))
        assert sample.words == 10

    def test_stable_tie_break_by_index(self):
        s = ScriptedSource(fractions=[0.5, 0.5, 0.1])
        assert pikk(s, 3, 3).items == (3, 1, 2)

    @given(perm=st.permutations(list(range(5))))
    def test_equivariance_under_permuting_fractions(self, perm):
        base = [0.11, 0.42, 0.73, 0.25, 0.58]
        ref = pikk(ScriptedSource(fractions=base), 5, 5).items
        shuffled = [base[perm[i]] for i in range(5)]
        out = pikk(ScriptedSource(fractions=shuffled), 5, 5).items
        # item j in the shuffled run carries item perm[j-1]+1's fraction, so
        # mapping each output index through perm recovers the reference
        assert [perm[v - 1] + 1 for v in out] == list(ref)


class TestFisherYates:
    def test_identity_when_j_equals_i(self):
        s = ScriptedSource(ints=[3, 2])
        assert fisher_yates(s, 3).items == (1, 2, 3)

    def test_traced_j_zero(self):
        s = ScriptedSource(ints=[1, 1])
        assert fisher_yates(s, 3).items == (2, 3, 1)

    def test_consumes_n_minus_1_draws(self):
        src = hash_source("fy-count")
        sample = fisher_yates(src, 12)
        assert sample.draws == 11
        assert sorted(sample.items) == list(range(1, 13))

    def test_n1(self):
        assert fisher_yates(ScriptedSource(), 1).items == (1,)


class TestRandomIndices:
    def test_exhausting_the_range_gives_a_permutation(self):
        src = hash_source("ri-perm")
        sample = random_indices(src, 5, 5)
        assert sorted(sample.items) == [1, 2, 3, 4, 5]

    def test_with_replacement_traced(self):
        s = ScriptedSource(ints=[2, 2, 1])
        assert random_indices(s, 2, 3, with_replacement=True).items == (2, 2, 1)

    def test_duplicate_rejection_traced(self):
        s = ScriptedSource(ints=[2, 2, 1])
        sample = random_indices(s, 3, 2)
        assert sample.items == (2, 1)
        assert sample.draws == 3  # the duplicate cost a draw

    def test_k_greater_than_n_rejected(self):
        with pytest.raises(ValueError):
            random_indices(ScriptedSource(), 3, 4)

    def test_single_index_chi_square(self):
        from scipy.stats import chisquare

        src = hash_source("ri-chi2")
        counts = Counter(random_indices(src, 10, 1).items[0] for _ in range(10 ** 5))
        stat, p = chisquare([counts[v] for v in range(1, 11)])
        assert p >= 0.001  # 9 degrees of freedom


class TestCormen:
    def test_k0_consumes_nothing(self):
        s = ScriptedSource()
        sample = cormen_sample(s, 5, 0)
        assert sample.items == ()
        assert sample.draws == 0

    def test_traced_recursion(self):
        s = ScriptedSource(ints=[2, 2])
        assert cormen_sample(s, 3, 2).as_set() == {2, 3}

    def test_draws_exactly_k(self):
        src = hash_source("cormen-k")
        assert cormen_sample(src, 50, 7).draws == 7


class TestReservoirR:
    def test_stream_equal_k_is_deterministic(self):
        s = ScriptedSource()
        sample = reservoir_r([10, 20, 30], 3, s)
        assert sample.items == (10, 20, 30)
        assert sample.draws == 0

    def test_traced_replacement(self):
        s = ScriptedSource(ints=[1, 4])
        assert reservoir_r([1, 2, 3, 4], 2, s).items == (3, 2)

    def test_short_stream_flagged(self):
        with pytest.warns(ShortStreamWarning):
            sample = reservoir_r([1, 2], 5, ScriptedSource())
        assert sample.short
        assert sample.items == (1, 2)

    def test_draw_accounting(self):
        src = hash_source("rr-count")
        sample = reservoir_r(range(100), 4, src)
        assert sample.draws == 96

    def test_inclusion_probability(self):
        src = hash_source("rr-inclusion")
        runs = 10 ** 5
        counts = Counter()
        for _ in range(runs):
            counts.update(reservoir_r(range(1, 6), 2, src).items)
        for item in range(1, 6):
            assert abs(counts[item] / runs - 0.4) < 0.01


class TestVitterZ:
    def test_stream_equal_k_is_deterministic(self):
        sample = vitter_z([7, 8], 2, ScriptedSource())
        assert sample.items == (7, 8)

    def test_short_stream_flagged(self):
        with pytest.warns(ShortStreamWarning):
            sample = vitter_z([1], 3, ScriptedSource())
        assert sample.short

    def test_inclusion_probability_short_stream(self):
        src = hash_source("vz-inclusion")
        runs = 10 ** 5
        counts = Counter()
        for _ in range(runs):
            counts.update(vitter_z(range(1, 6), 2, src).items)
        for item in range(1, 6):
            assert abs(counts[item] / runs - 0.4) < 0.01

    def test_inclusion_probability_beyond_skip_threshold(self):
        # stream of 100 with k=2 crosses the switch at t=44, so the
        # rejection-based skips are exercised
        src = hash_source("vz-z-phase")
        runs = 2 * 10 ** 4
        length = 100
        counts = Counter()
        for _ in range(runs):
            counts.update(vitter_z(range(1, length + 1), 2, src).items)
        p = 2 / length
        bound = 6 * math.sqrt(p * (1 - p) / runs)
        for item in range(1, length + 1):
            assert abs(counts[item] / runs - p) < bound, item

    def test_z_phase_skip_distribution_chi_square(self):
        # k=1 pushes every selection after t=22 through the rejection-based
        # skip sampler; uniform inclusion across all 150 positions checks
        # the whole skip chain, not just the average rate
        from scipy.stats import chisquare

        src = hash_source("zphase-probe")
        runs = 30000
        length = 150
        counts = Counter()
        for _ in range(runs):
            counts.update(vitter_z(range(length), 1, src).items)
        stat, p = chisquare([counts[i] for i in range(length)])
        assert p >= 0.001

    def test_call_count_sublinear(self):
        src = hash_source("vz-calls")
        n_stream = 10 ** 6
        sample = vitter_z(range(n_stream), 3, src)
        assert len(sample.items) == 3
        assert sample.words < n_stream - 3
        assert sample.draws < 2000


class TestSampleSpec:
    def test_validation_matrix(self):
        with pytest.raises(ValueError):
            SampleSpec(n=5, k=6, algorithm="random_indices")
        with pytest.raises(ValueError):
            SampleSpec(n=5, k=2, with_replacement=True, algorithm="pikk")
        with pytest.raises(ValueError):
            SampleSpec(n=None, k=2, algorithm="cormen")
        with pytest.raises(ValueError):
            SampleSpec(n=5, k=2, algorithm="bogosample")
        with pytest.raises(ValueError):
            SampleSpec(n=5, k=0, algorithm="reservoir_r")
        SampleSpec(n=None, k=2, algorithm="vitter_z")  # stream provided later
        SampleSpec(n=5, k=6, with_replacement=True)  # k > n fine with replacement

    def test_dispatch_matches_direct_calls(self):
        for algorithm in ("pikk", "random_indices", "cormen"):
            spec = SampleSpec(n=8, k=3, algorithm=algorithm)
            via_spec = spec.run(hash_source(f"spec:{algorithm}"))
            direct_src = hash_source(f"spec:{algorithm}")
            if algorithm == "pikk":
                direct = pikk(direct_src, 8, 3)
            elif algorithm == "cormen":
                direct = cormen_sample(direct_src, 8, 3)
            else:
                direct = random_indices(direct_src, 8, 3)
            assert via_spec == direct

    def test_fisher_yates_tag_keeps_the_first_k(self):
        spec = SampleSpec(n=6, k=2, algorithm="fisher_yates")
        via_spec = spec.run(hash_source("spec:fy"))
        full = fisher_yates(hash_source("spec:fy"), 6)
        assert via_spec.items == full.items[:2]
        assert via_spec.draws == 5

    def test_streaming_from_n_or_stream(self):
        by_n = SampleSpec(n=9, k=2, algorithm="reservoir_r").run(hash_source("spec:rr"))
        by_stream = SampleSpec(n=None, k=2, algorithm="reservoir_r").run(
            hash_source("spec:rr"), stream=range(1, 10)
        )
        assert by_n == by_stream
        with pytest.raises(ValueError):
            SampleSpec(n=None, k=2, algorithm="vitter_z").run(hash_source("x"))


class TestBitsAccounting:
    def test_bits_are_words_times_width(self):
        src = hash_source("bits")
        sample = pikk(src, 5, 2)
        assert sample.bits == sample.words * 32

    def test_scripted_sources_report_zero(self):
        sample = fisher_yates(ScriptedSource(ints=[3, 2]), 3)
        assert sample.words == 0 and sample.bits == 0


class TestDistinctnessProperty:
    @given(
        n=st.integers(min_value=1, max_value=1000),
        k_frac=st.floats(min_value=0.0, max_value=1.0),
        tag=st.integers(min_value=0, max_value=10 ** 6),
    )
    @settings(max_examples=25, deadline=None)
    def test_without_replacement_samples_are_k_distinct_indices(self, n, k_frac, tag):
        k = max(1, round(k_frac * n))
        src = hash_source(f"distinct:{n}:{k}:{tag}")
        for sample in (
            random_indices(src, n, k),
            cormen_sample(src, n, k),
            pikk(src, n, k),
            SampleSpec(n=n, k=k, algorithm="fisher_yates").run(src),
            reservoir_r(range(1, n + 1), k, src),
            vitter_z(range(1, n + 1), k, src),
        ):
            items = sample.items
            assert len(items) == k
            assert len(set(items)) == k
            assert set(items) <= set(range(1, n + 1))
