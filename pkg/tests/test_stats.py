import itertools
import math

import pytest
import scipy.integrate
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from silentswarm.fstats import (
    anova_one_way,
    betainc_regularized,
    f_cdf,
    f_sf,
    rand_index,
)


def f_density(x, d1, d2):
    ln = (
        0.5 * d1 * math.log(d1) + 0.5 * d2 * math.log(d2)
        + (0.5 * d1 - 1.0) * math.log(x)
        - 0.5 * (d1 + d2) * math.log(d2 + d1 * x)
        - math.lgamma(0.5 * d1) - math.lgamma(0.5 * d2)
        + math.lgamma(0.5 * (d1 + d2))
    )
    return math.exp(ln)


class TestIncompleteBeta:
    def test_endpoints(self):
        assert betainc_regularized(2.0, 3.0, 0.0) == 0.0
        assert betainc_regularized(2.0, 3.0, 1.0) == 1.0

    def test_symmetric_halfway(self):
        assert betainc_regularized(5.0, 5.0, 0.5) == pytest.approx(0.5, abs=1e-12)

    def test_uniform_case(self):
        # a = b = 1 reduces to the identity
        for x in (0.1, 0.37, 0.9):
            assert betainc_regularized(1.0, 1.0, x) == pytest.approx(x, abs=1e-12)

    def test_against_scipy(self):
        for a in (0.5, 1.0, 2.5, 10.0):
            for b in (0.5, 1.0, 4.0, 15.0):
                for x in (0.05, 0.3, 0.5, 0.7, 0.95):
                    assert betainc_regularized(a, b, x) == pytest.approx(
                        float(scipy.stats.beta.cdf(x, a, b)), abs=1e-10
                    )

    def test_invalid_shapes_rejected(self):
        with pytest.raises(ValueError):
            betainc_regularized(0.0, 1.0, 0.5)


class TestFDistribution:
    def test_sf_edge_cases(self):
        assert f_sf(0.0, 2, 6) == 1.0
        assert f_sf(-1.0, 2, 6) == 1.0
        assert f_sf(math.inf, 2, 6) == 0.0

    def test_invalid_dof_rejected(self):
        with pytest.raises(ValueError):
            f_sf(1.0, 0, 6)

    def test_cdf_complements_sf(self):
        assert f_cdf(2.5, 3, 8) == pytest.approx(1.0 - f_sf(2.5, 3, 8))

    def test_reference_point(self):
        # see the acceptance gate for the quadrature cross-check
        assert f_sf(3.0, 2, 6) == pytest.approx(0.125, abs=1e-9)

    @pytest.mark.parametrize("d1", [1, 2, 5, 10, 30])
    @pytest.mark.parametrize("d2", [1, 2, 5, 10, 30])
    def test_cdf_matches_quadrature(self, d1, d2):
        for f in (0.5, 1.0, 3.0, 20.0):
            expected, _ = scipy.integrate.quad(
                f_density, 0.0, f, args=(d1, d2), epsabs=1e-10, limit=200
            )
            assert f_cdf(f, d1, d2) == pytest.approx(expected, abs=1e-6)


class TestAnova:
    def test_hand_worked_example(self):
        res = anova_one_way([[1, 2, 3], [2, 3, 4], [3, 4, 5]])
        assert res.F == pytest.approx(3.0, abs=1e-10)
        assert (res.df_between, res.df_within) == (2, 6)
        assert res.p_value == pytest.approx(0.125, abs=1e-9)

    def test_identical_groups(self):
        res = anova_one_way([[1, 2], [1, 2]])
        assert res.F == 0.0
        assert res.p_value == 1.0

    def test_constant_distinct_groups(self):
        res = anova_one_way([[1, 1], [2, 2]])
        assert res.F == math.inf
        assert res.p_value == 0.0

    def test_all_identical_observations(self):
        res = anova_one_way([[5, 5, 5], [5, 5]])
        assert res.F == 0.0
        assert res.p_value == 1.0

    def test_too_few_groups_rejected(self):
        with pytest.raises(ValueError):
            anova_one_way([[1, 2, 3]])

    def test_small_groups_rejected(self):
        with pytest.raises(ValueError):
            anova_one_way([[1, 2], [3]])

    @settings(max_examples=150, deadline=None)
    @given(
        st.lists(
            st.lists(st.integers(-5, 5), min_size=2, max_size=4),
            min_size=3, max_size=3,
        )
    )
    def test_matches_direct_sums_of_squares(self, groups):
        """F agrees with an independent sum-of-squares evaluation and the
        p-value with an external F survival function."""
        res = anova_one_way(groups)

        n = sum(len(g) for g in groups)
        grand = sum(x for g in groups for x in g) / n
        ssb = sum(
            len(g) * (sum(g) / len(g) - grand) ** 2 for g in groups
        )
        ssw = sum((x - sum(g) / len(g)) ** 2 for g in groups for x in g)
        if ssw == 0.0:
            assert res.F == (0.0 if ssb == 0.0 else math.inf)
            return
        expected_f = (ssb / (len(groups) - 1)) / (ssw / (n - len(groups)))
        assert res.F == pytest.approx(expected_f, rel=1e-10)
        assert res.p_value == pytest.approx(
            float(scipy.stats.f.sf(expected_f, res.df_between, res.df_within)),
            abs=1e-9,
        )


def brute_force_rand(a, b):
    agree = 0
    pairs = list(itertools.combinations(range(len(a)), 2))
    for i, j in pairs:
        if (a[i] == a[j]) == (b[i] == b[j]):
            agree += 1
    return agree / len(pairs)


class TestRandIndex:
    def test_identical_labelings(self):
        assert rand_index([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0

    def test_relabeled_partition_still_identical(self):
        assert rand_index([0, 0, 1, 1], [5, 5, 2, 2]) == 1.0

    def test_orthogonal_partitions(self):
        # all together vs. all apart: no pair agreement
        assert rand_index([0, 0, 0], [0, 1, 2]) == 0.0

    def test_partial_agreement(self):
        assert rand_index([0, 0, 1, 1], [0, 0, 0, 1]) == pytest.approx(3 / 6)

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            rand_index([0, 1], [0, 1, 2])

    def test_single_item(self):
        assert rand_index([0], [3]) == 1.0

    @settings(max_examples=150)
    @given(
        st.integers(2, 8).flatmap(
            lambda n: st.tuples(
                st.lists(st.integers(0, 3), min_size=n, max_size=n),
                st.lists(st.integers(0, 3), min_size=n, max_size=n),
            )
        )
    )
    def test_range_symmetry_and_identity(self, labelings):
        a, b = labelings
        r = rand_index(a, b)
        assert 0.0 <= r <= 1.0
        assert r == rand_index(b, a)
        assert r == pytest.approx(brute_force_rand(a, b))
        same_partition = all(
            (a[i] == a[j]) == (b[i] == b[j])
            for i in range(len(a)) for j in range(i + 1, len(a))
        )
        assert (r == 1.0) == same_partition
