"""Shipped fixtures: small models with known structure.

These instances anchor the test suite and the command-line examples.  The
trend instance is sized so that the full posterior enumeration stays inside
the simulator caps at block lengths 6 and 12.
"""

from __future__ import annotations

import numpy as np

from .discrete import AuxiliaryPolicy, DiscreteWiretapModel
from .probability import JointPmf, TransitionKernel


def bsc(flip: float) -> np.ndarray:
    """Binary symmetric channel table, rows indexed by the input."""
    return np.array([[1.0 - flip, flip], [flip, 1.0 - flip]])


def stateless_model(main_table: np.ndarray, tap_table: np.ndarray) -> DiscreteWiretapModel:
    """Wrap plain channel matrices (x -> y, x -> z) with constant states."""
    main_table = np.asarray(main_table, dtype=float)
    tap_table = np.asarray(tap_table, dtype=float)
    cx, cy = main_table.shape
    cz = tap_table.shape[1]
    return DiscreteWiretapModel(
        state_pmf=JointPmf((("v1", 1), ("v2", 1)), np.ones((1, 1))),
        main_kernel=TransitionKernel((("x", cx), ("v1", 1)), (("y", cy),),
                                     main_table[:, None, :]),
        wiretap_kernel=TransitionKernel((("x", cx), ("v2", 1)), (("z", cz),),
                                        tap_table[:, None, :]),
    )


def uniform_input_policy(model: DiscreteWiretapModel) -> AuxiliaryPolicy:
    """u = x, uniform over the input alphabet, ignoring the states."""
    cx = model.card_x
    table = np.zeros((model.card_v1, model.card_v2, cx, cx))
    for s in range(cx):
        table[:, :, s, s] = 1.0 / cx
    kernel = TransitionKernel((("v1", model.card_v1), ("v2", model.card_v2)),
                              (("u", cx), ("x", cx)), table)
    return AuxiliaryPolicy(cx, kernel)


def degraded_bsc_pair(main_flip: float = 0.05, tap_flip: float = 0.2) -> DiscreteWiretapModel:
    """Stateless degraded pair: a clean main channel, a noisier wiretap."""
    return stateless_model(bsc(main_flip), bsc(tap_flip))


def mirrored_wiretap_model(main_table: np.ndarray,
                           state_probs: np.ndarray) -> DiscreteWiretapModel:
    """Both receivers see the same channel: v2 is a copy of v1 and the
    wiretap kernel equals the main kernel, so I(u;z) = I(u;y) exactly."""
    main_table = np.asarray(main_table, dtype=float)  # (x, v1, y)
    state_probs = np.asarray(state_probs, dtype=float)
    cards = main_table.shape
    state = np.diag(state_probs)
    return DiscreteWiretapModel(
        state_pmf=JointPmf((("v1", cards[1]), ("v2", cards[1])), state),
        main_kernel=TransitionKernel((("x", cards[0]), ("v1", cards[1])),
                                     (("y", cards[2]),), main_table),
        wiretap_kernel=TransitionKernel((("x", cards[0]), ("v2", cards[1])),
                                        (("z", cards[2]),), main_table),
    )


def blind_wiretap_model(main_table: np.ndarray, state_probs: np.ndarray,
                        card_z: int = 2) -> DiscreteWiretapModel:
    """Wiretap output independent of everything: uniform z for every input."""
    main_table = np.asarray(main_table, dtype=float)  # (x, v1, y)
    state_probs = np.asarray(state_probs, dtype=float)
    cx, cv1, _ = main_table.shape
    tap = np.full((cx, 1, card_z), 1.0 / card_z)
    return DiscreteWiretapModel(
        state_pmf=JointPmf((("v1", cv1), ("v2", 1)), state_probs[:, None]),
        main_kernel=TransitionKernel((("x", cx), ("v1", cv1)),
                                     (("y", main_table.shape[2]),), main_table),
        wiretap_kernel=TransitionKernel((("x", cx), ("v2", 1)), (("z", card_z),), tap),
    )


def trend_instance() -> tuple[DiscreteWiretapModel, AuxiliaryPolicy]:
    """Binary reference instance for the block-length trend experiments.

    The state v1 ~ Bernoulli(0.5) XORs into the main channel on top of a 3%
    flip; the wiretap is a plain BSC(0.25) that never sees v1.  The policy
    draws w ~ Bernoulli(0.25) per symbol and sends x = w with u = v1 XOR w:
    the encoder pre-cancels the state, so y = u + noise.  Two properties
    make this the designated trend fixture: u comes out uniform, which keeps
    the typicality score of a codeword flat, and w is Bernoulli(0.25) no
    matter the value of u, so the per-letter leakage I(u;z) is exactly zero
    and the secrecy corner sits at full equivocation.
    """
    p1 = 0.5
    state = np.array([[1.0 - p1], [p1]])
    main = np.zeros((2, 2, 2))
    for x in range(2):
        for v1 in range(2):
            main[x, v1] = bsc(0.03)[x ^ v1]
    tap = np.zeros((2, 1, 2))
    tap[:, 0, :] = bsc(0.25)
    model = DiscreteWiretapModel(
        state_pmf=JointPmf((("v1", 2), ("v2", 1)), state),
        main_kernel=TransitionKernel((("x", 2), ("v1", 2)), (("y", 2),), main),
        wiretap_kernel=TransitionKernel((("x", 2), ("v2", 1)), (("z", 2),), tap),
    )

    w_prob = 0.25
    table = np.zeros((2, 1, 2, 2))
    for v1 in range(2):
        for w in range(2):
            prob = w_prob if w else 1.0 - w_prob
            table[v1, 0, v1 ^ w, w] = prob
    policy = AuxiliaryPolicy(2, TransitionKernel(
        (("v1", 2), ("v2", 1)), (("u", 2), ("x", 2)), table))
    return model, policy


def constant_wiretap_instance() -> tuple[DiscreteWiretapModel, AuxiliaryPolicy]:
    """Trend instance's encoder over a wiretap channel that outputs coin
    flips regardless of the input; the posterior is uniform by symmetry."""
    model, policy = trend_instance()
    blind = DiscreteWiretapModel(
        state_pmf=model.state_pmf,
        main_kernel=model.main_kernel,
        wiretap_kernel=TransitionKernel((("x", 2), ("v2", 1)), (("z", 2),),
                                        np.full((2, 1, 2), 0.5)),
    )
    return blind, policy
