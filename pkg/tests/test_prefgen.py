import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from app.algorithms.service import mpda
from app.oracle.service import enumerate_all_stable
from app.prefgen.analytics import (
    compute_idpop_ratios, compute_RM_QW, compute_symmetry_ratio, compute_uk, uk_sequence,
)
from app.prefgen.schemas import GaussianModel, LogWeights, MasterListModel, ModelDescriptor, ModelName
from app.prefgen.service import (
    build_folklore_cyclic, build_folklore_original, build_from_descriptor, build_gaussian,
    build_geometric_popularity, build_grouped_incomplete, build_intrinsic_popularity,
    build_master_list, build_popularity, build_swap_pairs, build_symmetric_popularity, build_uniform,
    geometric_log_weights, realize_popularity, sample_gaussian_list, sample_popularity_list,
    prefgen_service, sample_popularity_order,
)
from app.shared.errors import ModelParameterError, UnsupportedModelError
from app.shared.seeding import SeedStream

Z = 3.0


def within(freq: float, p: float, draws: int) -> bool:
    return abs(freq - p) <= Z * math.sqrt(p * (1 - p) / draws)


class TestPopularitySampling:
    def test_single_candidate(self):
        rng = np.random.default_rng(1)
        assert all(sample_popularity_list({4: 0.3}, rng) == (4,) for _ in range(20))

    def test_rejects_non_positive_weight(self):
        with pytest.raises(ModelParameterError):
            sample_popularity_list({0: 1.0, 1: 0.0}, np.random.default_rng(0))
        with pytest.raises(ModelParameterError):
            sample_popularity_list({}, np.random.default_rng(0))

    def test_two_item_marginal(self):
        rng = np.random.default_rng(7)
        weights = LogWeights.from_logs([0, 1], np.log([2.0, 1.0]))
        draws = 100_000
        heavy_first = sum(sample_popularity_order(weights, rng)[0] == 0 for _ in range(draws))
        assert within(heavy_first / draws, 2 / 3, draws)

    def test_full_order_probabilities(self):
        rng = np.random.default_rng(11)
        p = {0: 3.0, 1: 2.0, 2: 1.0}
        weights = LogWeights.from_logs(list(p), np.log(list(p.values())))
        orders = list(itertools.permutations(p))

        def pl(order):
            remaining = sum(p.values())
            prob = 1.0
            for c in order:
                prob *= p[c] / remaining
                remaining -= p[c]
            return prob

        draws = 30_000
        counts = dict.fromkeys(orders, 0)
        for _ in range(draws):
            counts[sample_popularity_order(weights, rng)] += 1
        expected = [pl(order) * draws for order in orders]
        _, p_value = stats.chisquare([counts[o] for o in orders], expected)
        assert p_value > 0.001

    def test_uniform_weights_are_uniform_permutations(self):
        rng = np.random.default_rng(3)
        weights = LogWeights.uniform(3)
        draws = 30_000
        counts = dict.fromkeys(itertools.permutations(range(3)), 0)
        for _ in range(draws):
            counts[sample_popularity_order(weights, rng)] += 1
        _, p_value = stats.chisquare(list(counts.values()))
        assert p_value > 0.001

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(0.01, 100.0), min_size=1, max_size=8), st.integers(0, 2**32 - 1))
    def test_output_is_a_permutation_of_the_support(self, values, seed):
        weights = dict(enumerate(values))
        order = sample_popularity_list(weights, np.random.default_rng(seed))
        assert sorted(order) == list(weights)


class TestModels:
    def test_uniform_single_pair(self, stream):
        inst = build_uniform(1, 1, True, stream).instance
        assert inst.men == ((0,),) and inst.women == ((0,),)

    def test_uniform_lists_are_permutations(self, stream):
        inst = build_uniform(4, 3, True, stream).instance
        assert all(sorted(order) == [0, 1, 2] for order in inst.men)
        assert all(sorted(order) == [0, 1, 2, 3] for order in inst.women)

    def test_incomplete_uniform_lists_are_valid(self, stream):
        inst = build_uniform(6, 6, False, stream, accept_probability=0.5).instance
        assert all(len(set(order)) == len(order) for order in inst.men + inst.women)

    def test_master_list(self):
        built = build_master_list(3, 4)
        assert all(order == (0, 1, 2) for order in built.instance.women)
        assert isinstance(built.model, MasterListModel)
        assert compute_uk(built, 1) == 0.0

    def test_master_list_has_unique_stable_matching(self):
        for trial in range(10):
            built = build_master_list(5, 5, SeedStream(5).trial(trial))
            assert len(enumerate_all_stable(built.instance).matchings) == 1

    def test_geometric_log_weights_do_not_underflow(self):
        weights = geometric_log_weights(200, 0.99)
        assert weights.log_weight_of(199) == pytest.approx(199 * math.log(0.99))
        assert np.all(np.isfinite(weights.log_weights))

    def test_geometric_requires_base_in_unit_interval(self):
        with pytest.raises(ModelParameterError):
            build_geometric_popularity(3, 3, 1.0)

    def test_gaussian_tiny_sigma_is_identity(self):
        model = GaussianModel(M=6, W=1, sigma=1e-9)
        assert sample_gaussian_list(model, 0, np.random.default_rng(0)) == tuple(range(6))

    def test_gaussian_adjacent_swap_probability(self):
        model = GaussianModel(M=2, W=1, sigma=1.0)
        rng = np.random.default_rng(21)
        draws = 20_000
        swapped = sum(sample_gaussian_list(model, 0, rng)[0] == 1 for _ in range(draws))
        assert within(swapped / draws, stats.norm.cdf(-1 / math.sqrt(2)), draws)

    def test_gaussian_rejects_bad_sigma(self, stream):
        with pytest.raises(ModelParameterError):
            build_gaussian(3, 3, 0.0, stream)

    def test_swap_pairs_small(self, stream):
        inst = build_swap_pairs(2, stream).instance
        assert all(sorted(order) == [0, 1] for order in inst.men + inst.women)

    def test_swap_pair_frequency(self):
        draws = 4_000
        swapped = sum(
            build_swap_pairs(4, SeedStream(9).trial(t)).instance.men[0][0] == 1 for t in range(draws)
        )
        assert within(swapped / draws, 0.5, draws)

    def test_swap_keeps_pairs_adjacent(self, stream):
        inst = build_swap_pairs(8, stream).instance
        for order in inst.men + inst.women:
            assert all({order[2 * i], order[2 * i + 1]} == {2 * i, 2 * i + 1} for i in range(4))

    def test_odd_n_rejected(self, stream):
        with pytest.raises(ModelParameterError):
            build_swap_pairs(3, stream)
        with pytest.raises(ModelParameterError):
            build_grouped_incomplete(5, stream)

    def test_grouped_lists_stay_in_group(self, stream):
        inst = build_grouped_incomplete(6, stream).instance
        for person, order in enumerate(inst.men + inst.women):
            base = 2 * ((person % 6) // 2)
            assert sorted(order) == [base, base + 1]

    def test_folklore_cyclic_structure(self, stream):
        inst = build_folklore_cyclic(5, 0.5, stream).instance
        assert inst.men[0] == (1, 2, 3, 4, 0)
        assert inst.women[1] == (1, 2, 3, 4, 0)
        assert sorted(inst.women[0]) == list(range(5))
        mu, trace = mpda(inst)
        assert mu.women[0] == 4
        assert all(mu.women[k] == k - 1 for k in range(1, 5))
        assert len(trace) == 5

    def test_folklore_original(self):
        inst = build_folklore_original(4).instance
        assert inst.women[0] == (0, 1, 2, 3)
        assert inst.men[3] == (0, 1, 2, 3)


class TestDescriptors:
    def test_randomized_model_needs_seed(self):
        with pytest.raises(ModelParameterError):
            build_from_descriptor(ModelDescriptor(model=ModelName.UNIFORM, M=3, W=3))

    def test_same_seed_same_instance(self):
        desc = ModelDescriptor(model=ModelName.GAUSSIAN, params={"sigma": 2.0}, M=5, W=4, seed=3, trial=2)
        assert build_from_descriptor(desc).instance == build_from_descriptor(desc).instance

    def test_different_trials_differ(self):
        first = ModelDescriptor(model=ModelName.UNIFORM, M=8, W=8, seed=3, trial=0)
        second = first.model_copy(update={"trial": 1})
        assert build_from_descriptor(first).instance != build_from_descriptor(second).instance

    def test_popularity_needs_weights(self):
        with pytest.raises(ModelParameterError):
            build_from_descriptor(ModelDescriptor(model=ModelName.POPULARITY, M=3, W=3, seed=1))

    def test_popularity_explicit_tables(self):
        desc = ModelDescriptor(
            model=ModelName.POPULARITY, M=3, W=2, seed=1,
            params={"women_weights": [[1, None, 2], {"0": 1.0}]},
        )
        inst = build_from_descriptor(desc).instance
        assert sorted(inst.women[0]) == [0, 2]
        assert inst.women[1] == (0,)

    def test_popularity_table_errors(self):
        desc = ModelDescriptor(
            model=ModelName.POPULARITY, M=2, W=1, seed=1, params={"women_weights": [[1, -1]]},
        )
        with pytest.raises(ModelParameterError):
            build_from_descriptor(desc)

    def test_master_without_seed_is_deterministic(self):
        desc = ModelDescriptor(model=ModelName.MASTER, M=3, W=3)
        assert build_from_descriptor(desc).instance.men == ((0, 1, 2),) * 3

    def test_build_popularity_support_is_acceptable_set(self, stream):
        women = [LogWeights.from_logs([1, 2], [0.0, -1.0])]
        built = build_popularity(3, 1, women, None, stream)
        assert sorted(built.instance.women[0]) == [1, 2]

    def test_service_generates_from_descriptor(self):
        desc = ModelDescriptor(model=ModelName.SWAP, M=4, W=4, seed=2)
        assert prefgen_service.generate(desc).instance == build_from_descriptor(desc).instance

    def test_service_weights(self):
        weights = prefgen_service.weights({0: 1.0, 2: math.e})
        assert weights.log_weight_of(2) == pytest.approx(1.0)
        with pytest.raises(ModelParameterError):
            prefgen_service.weights({0: 0.0})


class TestAnalytics:
    def test_geometric_uk(self):
        model = build_geometric_popularity(8, 3, 0.5)
        for k in range(1, 5):
            assert compute_uk(model, k) == pytest.approx(2.0**-k)
        assert compute_uk(model, 8) == 0.0

    def test_gaussian_uk(self):
        assert compute_uk(GaussianModel(M=5, W=5, sigma=1.0), 2) == pytest.approx(2 * math.exp(-1))

    def test_uk_of_fixed_list_model_unsupported(self, stream):
        with pytest.raises(UnsupportedModelError):
            compute_uk(build_uniform(3, 3, True, stream), 1)

    def test_uk_sequence_popularity(self):
        u = uk_sequence(build_geometric_popularity(4, 2, 0.5))
        assert u.values == pytest.approx((0.5, 0.25, 0.125))

    def test_uk_matches_monte_carlo_odds(self):
        weights = LogWeights.from_logs([0, 1, 2], np.log([1.0, 0.5, 2.0]))
        model = build_popularity(3, 1, [weights], None, SeedStream(1).trial(0)).popularity
        assert compute_uk(model, 1) == pytest.approx(4.0)
        rng = np.random.default_rng(5)
        draws = 20_000
        later_first = 0
        for _ in range(draws):
            order = sample_popularity_order(weights, rng)
            later_first += order.index(2) < order.index(1)
        assert within(later_first / draws, 4 / 5, draws)

    def test_rm_qw_uniform_men_geometric_women(self):
        assert compute_RM_QW(build_geometric_popularity(4, 4, 0.5)) == pytest.approx((1.0, 1.0))

    def test_intrinsic_q_w_is_one(self):
        _, q_w = compute_RM_QW(build_intrinsic_popularity(5, 4, 0.7, men_base=0.5))
        assert q_w == pytest.approx(1.0)

    def test_symmetric_ratios(self):
        model = build_symmetric_popularity(4, 3, 0.5, 0.5)
        r_m, q_w = compute_RM_QW(model)
        assert r_m == pytest.approx(4.0)
        assert q_w == pytest.approx(1.0)
        assert compute_symmetry_ratio(model) == pytest.approx(1.0)

    def test_idpop_ratios(self):
        assert compute_idpop_ratios(build_intrinsic_popularity(4, 4, 0.5)) == pytest.approx(np.ones(4))
        assert compute_idpop_ratios(build_symmetric_popularity(3, 3, 0.5, 0.5)) == pytest.approx(np.full(3, 4.0))

    def test_rm_qw_needs_men_weights(self, stream):
        model = build_folklore_cyclic(3, 0.5, stream).popularity
        with pytest.raises((ModelParameterError, UnsupportedModelError)):
            compute_RM_QW(model)

    def test_realize_is_reproducible(self):
        model = build_geometric_popularity(6, 6, 0.8)
        first = realize_popularity(model, SeedStream(4).trial(3), ModelDescriptor(model=ModelName.POPULARITY, M=6, W=6))
        second = realize_popularity(model, SeedStream(4).trial(3), ModelDescriptor(model=ModelName.POPULARITY, M=6, W=6))
        assert first.instance == second.instance
