import itertools

import numpy as np
import pytest

from wiretapsi import SearchConfig
from wiretapsi.reference import (
    bsc,
    degraded_bsc_pair,
    trend_instance,
    uniform_input_policy,
)


@pytest.fixture(scope="session")
def trend():
    return trend_instance()


@pytest.fixture(scope="session")
def degraded_pair():
    model = degraded_bsc_pair(0.05, 0.2)
    return model, uniform_input_policy(model)


@pytest.fixture
def small_search():
    return SearchConfig(u_card=2, n_random=40, seed=0)


def random_binary_model(rng: np.random.Generator, card_v1=2, card_v2=2):
    """A dense random model: all kernels strictly positive."""
    from wiretapsi import DiscreteWiretapModel, JointPmf, TransitionKernel

    state = rng.dirichlet(np.ones(card_v1 * card_v2)).reshape(card_v1, card_v2)
    main = rng.dirichlet(np.ones(2), size=(2, card_v1))
    tap = rng.dirichlet(np.ones(2), size=(2, card_v2))
    return DiscreteWiretapModel(
        state_pmf=JointPmf((("v1", card_v1), ("v2", card_v2)), state),
        main_kernel=TransitionKernel((("x", 2), ("v1", card_v1)), (("y", 2),), main),
        wiretap_kernel=TransitionKernel((("x", 2), ("v2", card_v2)), (("z", 2),), tap),
    )


def random_small_model(rng: np.random.Generator):
    """Random model with mixed binary/ternary output alphabets."""
    from wiretapsi import DiscreteWiretapModel, JointPmf, TransitionKernel

    cx = int(rng.integers(2, 4))
    cy = int(rng.integers(2, 4))
    cz = int(rng.integers(2, 4))
    cv1 = int(rng.integers(1, 3))
    cv2 = int(rng.integers(1, 3))
    state = rng.dirichlet(np.ones(cv1 * cv2)).reshape(cv1, cv2)
    main = rng.dirichlet(np.ones(cy), size=(cx, cv1))
    tap = rng.dirichlet(np.ones(cz), size=(cx, cv2))
    return DiscreteWiretapModel(
        state_pmf=JointPmf((("v1", cv1), ("v2", cv2)), state),
        main_kernel=TransitionKernel((("x", cx), ("v1", cv1)), (("y", cy),), main),
        wiretap_kernel=TransitionKernel((("x", cx), ("v2", cv2)), (("z", cz),), tap),
    )


def make_correlated_sim_instance():
    """Correlated states, v1-dependent main noise, v2 XORed into the tap,
    and a stochastic u -> x link: nothing about the posterior is degenerate."""
    from wiretapsi import DiscreteWiretapModel, JointPmf, TransitionKernel
    from wiretapsi.discrete import AuxiliaryPolicy

    state = np.array([[0.4, 0.1], [0.2, 0.3]])
    main = np.zeros((2, 2, 2))
    for x in range(2):
        main[x, 0] = bsc(0.05)[x]
        main[x, 1] = bsc(0.2)[x]
    tap = np.zeros((2, 2, 2))
    for x in range(2):
        for v2 in range(2):
            tap[x, v2] = bsc(0.1)[x ^ v2]
    model = DiscreteWiretapModel(
        state_pmf=JointPmf((("v1", 2), ("v2", 2)), state),
        main_kernel=TransitionKernel((("x", 2), ("v1", 2)), (("y", 2),), main),
        wiretap_kernel=TransitionKernel((("x", 2), ("v2", 2)), (("z", 2),), tap))
    p_u = np.array([0.6, 0.4])
    table = np.zeros((2, 2, 2, 2))
    for u in range(2):
        for x in range(2):
            table[:, :, u, x] = p_u[u] * bsc(0.1)[u, x]
    policy = AuxiliaryPolicy(2, TransitionKernel(
        (("v1", 2), ("v2", 2)), (("u", 2), ("x", 2)), table))
    return model, policy


def first_typical_replica(book, config, p_uv1, v1_seq, message):
    """Independent replica of the encoder's selection rule."""
    h = -(p_uv1 * np.log2(np.where(p_uv1 > 0, p_uv1, 1.0))).sum()
    members = np.flatnonzero(book.bin_index == message)
    for k in members:
        score = -np.log2(p_uv1[book.sequences[k], v1_seq]).mean()
        if abs(score - h) <= config.epsilon_typ:
            return int(k), False
    return int(np.flatnonzero(book.bin_index == 1)[0]), True


def brute_force_posterior(book, config, z_seq):
    """Full enumeration over (v1^n, v2^n, x^n) with the selection rule
    replayed; uniform message prior."""
    model, policy = config.model, config.policy
    n = config.n
    state = model.state_pmf.table
    tap = model.wiretap_kernel.table
    joint_uxv1 = np.einsum("ab,abux->uxa", state, policy.table.table)
    p_uv1 = joint_uxv1.sum(axis=1)
    x_given_uv1 = joint_uxv1 / p_uv1[:, None, :]
    p_v2_given_v1 = state / state.sum(axis=1, keepdims=True)

    weights = np.zeros(book.bin_count)
    for message in range(1, book.bin_count + 1):
        total = 0.0
        for v1 in itertools.product(range(model.card_v1), repeat=n):
            v1_seq = np.array(v1)
            k, _ = first_typical_replica(book, config, p_uv1, v1_seq, message)
            u_seq = book.sequences[k]
            p_v1 = np.prod(state.sum(axis=1)[v1_seq])
            for v2 in itertools.product(range(model.card_v2), repeat=n):
                v2_seq = np.array(v2)
                p_v2 = np.prod(p_v2_given_v1[v1_seq, v2_seq])
                like = 0.0
                for x in itertools.product(range(model.card_x), repeat=n):
                    x_seq = np.array(x)
                    p_x = np.prod(x_given_uv1[u_seq, x_seq, v1_seq])
                    p_z = np.prod(tap[x_seq, v2_seq, z_seq])
                    like += p_x * p_z
                total += p_v1 * p_v2 * like
        weights[message - 1] = total
    return weights / weights.sum()
