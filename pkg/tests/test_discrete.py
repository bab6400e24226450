import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wiretapsi import (
    AuxiliaryPolicy,
    SearchConfig,
    TransitionKernel,
    UsageError,
    achievable_points,
    main_channel_capacity,
    rate_triplet,
    search_summary,
    secrecy_rate,
    secrecy_upper_bound,
)
from wiretapsi.discrete import iter_policies
from wiretapsi.reference import (
    blind_wiretap_model,
    bsc,
    degraded_bsc_pair,
    mirrored_wiretap_model,
    stateless_model,
    uniform_input_policy,
)

from conftest import random_binary_model


def h2(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def test_degraded_pair_uniform_policy_rate(degraded_pair):
    model, policy = degraded_pair
    triplet = rate_triplet(model, policy)
    assert triplet.mi_uv == 0.0
    assert triplet.r_u1 == pytest.approx(h2(0.2) - h2(0.05), abs=1e-12)
    assert triplet.r_u2 == pytest.approx(1.0 - h2(0.05), abs=1e-12)
    assert triplet.d_u2 == pytest.approx(triplet.r_u1 / triplet.r_u2, abs=1e-12)


def test_trend_instance_triplet_closed_form(trend):
    # u is uniform, y = u xor Bern(0.03), u = v1 xor Bern(0.25), z blind to u
    model, policy = trend
    triplet = rate_triplet(model, policy)
    assert triplet.mi_uy == pytest.approx(1.0 - h2(0.03), abs=1e-12)
    assert triplet.mi_uv == pytest.approx(1.0 - h2(0.25), abs=1e-12)
    assert triplet.mi_uz == pytest.approx(0.0, abs=1e-12)
    assert triplet.d_u2 == 1.0


def test_mirrored_channel_has_zero_secrecy_rate(small_search):
    main = np.zeros((2, 2, 2))
    for x in range(2):
        for v1 in range(2):
            main[x, v1] = bsc(0.1)[x ^ v1]
    model = mirrored_wiretap_model(main, np.array([0.6, 0.4]))
    policy = uniform_input_policy(model)
    triplet = rate_triplet(model, policy)
    assert triplet.mi_uz == pytest.approx(triplet.mi_uy, abs=1e-12)
    assert secrecy_rate(model, small_search) == 0.0


def test_blind_wiretap_rate_meets_capacity_under_matched_budget(small_search):
    main = np.zeros((2, 2, 2))
    for x in range(2):
        for v1 in range(2):
            main[x, v1] = bsc(0.05)[x ^ v1]
    model = blind_wiretap_model(main, np.array([0.7, 0.3]))
    rate = secrecy_rate(model, small_search)
    cap = main_channel_capacity(model, small_search)
    assert rate == pytest.approx(cap, abs=1e-12)


def test_policy_stream_is_prefix_stable(trend):
    model, _ = trend
    short = SearchConfig(u_card=2, n_random=5, seed=9)
    long = SearchConfig(u_card=2, n_random=12, seed=9)
    first = [p.table.table for p in iter_policies(model, short)]
    head = [p.table.table for p in iter_policies(model, long)][:5]
    for a, b in zip(first, head):
        np.testing.assert_array_equal(a, b)


def test_budget_monotonicity(trend):
    model, _ = trend
    rates = [secrecy_rate(model, SearchConfig(u_card=2, n_random=n, seed=2))
             for n in (5, 15, 40)]
    assert rates[0] <= rates[1] <= rates[2]


def test_grid_enumeration_count():
    model = degraded_bsc_pair()
    # one (v1, v2) cell, 4 outcomes, simplex grid with 2 steps: C(5,3) points
    search = SearchConfig(u_card=2, grid_steps=2, seed=0)
    assert sum(1 for _ in iter_policies(model, search)) == math.comb(5, 3)


def test_grid_includes_deterministic_corner_on_stateless_model():
    model = degraded_bsc_pair(0.05, 0.2)
    search = SearchConfig(u_card=2, grid_steps=8, seed=0)
    best = secrecy_rate(model, search)
    # the u = x uniform corner lies on the grid, so the search is exact here
    assert best == pytest.approx(h2(0.2) - h2(0.05), abs=1e-12)


def test_grid_cap_enforced(trend):
    model, _ = trend
    with pytest.raises(UsageError):
        list(iter_policies(model, SearchConfig(u_card=2, grid_steps=40)))


def test_zero_budget_rejected(trend):
    model, _ = trend
    with pytest.raises(UsageError):
        list(iter_policies(model, SearchConfig(u_card=2)))


def test_u_card_bound_enforced(trend):
    model, _ = trend
    assert model.u_card_bound == 2 * 2 * 1 + 4
    with pytest.raises(UsageError):
        list(iter_policies(model, SearchConfig(u_card=9, n_random=1)))
    table = np.zeros((2, 1, 9, 2))
    table[:, :, 0, 0] = 1.0
    policy = AuxiliaryPolicy(9, TransitionKernel(
        (("v1", 2), ("v2", 1)), (("u", 9), ("x", 2)), table))
    with pytest.raises(UsageError):
        rate_triplet(model, policy)


def test_v1_mode_policies_ignore_v2():
    rng = np.random.default_rng(8)
    model = random_binary_model(rng)
    search = SearchConfig(u_card=2, n_random=4, seed=1, mode="v1")
    for policy in iter_policies(model, search):
        np.testing.assert_array_equal(policy.table.table[:, 0],
                                      policy.table.table[:, 1])


def test_search_summary_matches_single_metrics(trend):
    model, _ = trend
    search = SearchConfig(u_card=2, n_random=30, seed=4)
    summary = search_summary(model, search)
    assert summary["secrecy_rate"] == pytest.approx(
        secrecy_rate(model, search), abs=1e-15)
    assert summary["secrecy_upper_bound"] == pytest.approx(
        secrecy_upper_bound(model, search), abs=1e-15)
    assert summary["main_channel_capacity"] == pytest.approx(
        main_channel_capacity(model, search), abs=1e-15)
    assert summary["secrecy_rate"] <= summary["secrecy_upper_bound"] + 1e-9


def test_achievable_points_structure(trend):
    model, _ = trend
    search = SearchConfig(u_card=2, n_random=20, seed=6, curve_points=9)
    region = achievable_points(model, search)
    assert any(p.r == 0.0 and p.d == 1.0 and p.policy_id == -1
               for p in region.points)
    assert region.contains(0.0, 1.0)
    assert region.contains(region.max_r_u1, 1.0)
    assert not region.contains(region.max_r_u1 + 0.1, 1.0)
    assert not region.contains(-0.01, 0.5)
    for p in region.points:
        assert 0.0 <= p.d <= 1.0
        assert p.r >= 0.0
        if p.policy_id >= 0:
            assert p.policy_id in region.policies


def test_achievable_curve_products(trend):
    # interior samples sit on R*d = r_u1 for their policy
    model, _ = trend
    search = SearchConfig(u_card=2, n_random=10, seed=3, curve_points=7)
    region = achievable_points(model, search)
    by_policy = {}
    for p in region.points:
        if p.policy_id >= 0:
            by_policy.setdefault(p.policy_id, []).append(p)
    for pid, pts in by_policy.items():
        triplet = rate_triplet(model, region.policies[pid])
        r1 = max(triplet.r_u1, 0.0)
        for p in pts:
            if p.d < 1.0:
                assert p.r * p.d == pytest.approx(r1, abs=1e-9)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=15, deadline=None)
def test_sandwich_on_random_models(seed):
    rng = np.random.default_rng(seed)
    model = random_binary_model(rng)
    search = SearchConfig(u_card=2, n_random=12, seed=seed % 1000)
    assert (secrecy_rate(model, search)
            <= secrecy_upper_bound(model, search) + 1e-9)


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=15, deadline=None)
def test_rate_triplet_equivocation_identity(seed):
    rng = np.random.default_rng(seed)
    model = random_binary_model(rng)
    policy = next(iter_policies(model, SearchConfig(
        u_card=2, n_random=1, seed=seed % 997)))
    t = rate_triplet(model, policy)
    assert 0.0 <= t.d_u2 <= 1.0
    assert t.r_u1 <= t.r_u2 + 1e-12
    if t.r_u2 > 1e-9 and t.r_u1 > 0.0:
        assert t.d_u2 == pytest.approx(min(1.0, t.r_u1 / t.r_u2), abs=1e-12)
