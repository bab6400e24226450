"""Achievable rate-equivocation points for discrete wiretap channels.

The transmitter sees the main-channel state noncausally, the eavesdropper's
state stays hidden, and an auxiliary variable u carries the message.  For a
policy p(u,x|v1,v2) the operative quantities are

    r_u1 = I(u;y) - max{I(u;v1,v2), I(u;z)}
    r_u2 = I(u;y) - I(u;v1,v2)

and every pair (R, d) with r_u1 <= R <= r_u2, 0 <= d <= 1 and R*d = r_u1 is
achievable, together with everything dominated by such a pair.  Policies are
searched by seeded Dirichlet sampling over the conditional simplex plus an
optional coarse deterministic grid.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import UsageError
from .probability import (JointPmf, TransitionKernel, compose, marginalize,
                          mutual_information, _entropy_bits)

U_CARD_SLACK = 4           # auxiliary alphabet may exceed |x||v1||v2| by this much
GRID_POLICY_CAP = 300_000  # refuse grids that would enumerate more policies
RATE_FLOOR = 1e-12


@dataclass(frozen=True)
class DiscreteWiretapModel:
    """State pair distribution plus the two state-dependent channels."""

    state_pmf: JointPmf                 # axes ('v1', 'v2')
    main_kernel: TransitionKernel       # (x, v1) -> y
    wiretap_kernel: TransitionKernel    # (x, v2) -> z

    def __post_init__(self):
        if self.state_pmf.axis_names != ("v1", "v2"):
            raise UsageError(
                f"state pmf axes must be ('v1','v2'), got {self.state_pmf.axis_names}")
        if self.main_kernel.input_names != ("x", "v1") or self.main_kernel.output_names != ("y",):
            raise UsageError("main kernel must map (x, v1) -> y")
        if self.wiretap_kernel.input_names != ("x", "v2") or self.wiretap_kernel.output_names != ("z",):
            raise UsageError("wiretap kernel must map (x, v2) -> z")
        cards = dict(self.main_kernel.input_axes)
        if cards["v1"] != self.state_pmf.cardinality("v1"):
            raise UsageError("main kernel v1 cardinality does not match the state pmf")
        if dict(self.wiretap_kernel.input_axes)["v2"] != self.state_pmf.cardinality("v2"):
            raise UsageError("wiretap kernel v2 cardinality does not match the state pmf")
        if dict(self.wiretap_kernel.input_axes)["x"] != cards["x"]:
            raise UsageError("main and wiretap kernels disagree on |x|")

    @property
    def card_x(self) -> int:
        return dict(self.main_kernel.input_axes)["x"]

    @property
    def card_y(self) -> int:
        return dict(self.main_kernel.output_axes)["y"]

    @property
    def card_z(self) -> int:
        return dict(self.wiretap_kernel.output_axes)["z"]

    @property
    def card_v1(self) -> int:
        return self.state_pmf.cardinality("v1")

    @property
    def card_v2(self) -> int:
        return self.state_pmf.cardinality("v2")

    @property
    def u_card_bound(self) -> int:
        return self.card_x * self.card_v1 * self.card_v2 + U_CARD_SLACK


@dataclass(frozen=True)
class AuxiliaryPolicy:
    """Encoder policy p(u, x | v1, v2) as a transition kernel."""

    u_card: int
    table: TransitionKernel   # (v1, v2) -> (u, x)

    def __post_init__(self):
        if self.table.input_names != ("v1", "v2") or self.table.output_names != ("u", "x"):
            raise UsageError("policy kernel must map (v1, v2) -> (u, x)")
        if dict(self.table.output_axes)["u"] != self.u_card:
            raise UsageError(
                f"policy u cardinality {dict(self.table.output_axes)['u']} does not "
                f"match declared {self.u_card}")


@dataclass(frozen=True)
class RateTriplet:
    """Per-policy rates, unclamped except for the equivocation fraction."""

    r_u1: float
    r_u2: float
    d_u2: float
    mi_uy: float
    mi_uv: float
    mi_uz: float


@dataclass(frozen=True)
class SearchConfig:
    """Budget and shape of a policy search; the seed is part of the identity.

    mode 'v1v2' samples p(u,x|v1,v2); mode 'v1' restricts the policy to
    depend on the encoder-visible state only (it is then broadcast over v2).
    """

    u_card: int
    n_random: int = 0
    grid_steps: int = 0
    seed: int = 0
    mode: str = "v1v2"
    curve_points: int = 33

    def __post_init__(self):
        if self.u_card < 1:
            raise UsageError("u_card must be at least 1")
        if self.n_random < 0 or self.grid_steps < 0:
            raise UsageError("search budgets cannot be negative")
        if self.mode not in ("v1v2", "v1"):
            raise UsageError(f"unknown search mode {self.mode!r}")
        if self.curve_points < 2:
            raise UsageError("curve_points must be at least 2")


@dataclass(frozen=True)
class RegionPoint:
    r: float
    d: float
    policy_id: int


@dataclass(frozen=True)
class RegionPointSet:
    """Downward-closed achievable set, sampled along each policy's curve."""

    points: tuple[RegionPoint, ...]
    policies: dict[int, AuxiliaryPolicy]
    max_r_u1: float

    def contains(self, r: float, d: float, tol: float = 1e-12) -> bool:
        """True when (r, d) is dominated by some stored point."""
        if r < 0.0 or d < 0.0:
            return False
        return any(r <= p.r + tol and d <= p.d + tol for p in self.points)


def _check_policy_bound(model: DiscreteWiretapModel, policy: AuxiliaryPolicy) -> None:
    if policy.u_card > model.u_card_bound:
        raise UsageError(
            f"auxiliary cardinality {policy.u_card} exceeds the bound "
            f"{model.u_card_bound} for this model")


def _policy_card_check(model: DiscreteWiretapModel, policy: AuxiliaryPolicy) -> None:
    cards = dict(policy.table.input_axes)
    if cards["v1"] != model.card_v1 or cards["v2"] != model.card_v2:
        raise UsageError("policy state cardinalities do not match the model")
    if dict(policy.table.output_axes)["x"] != model.card_x:
        raise UsageError("policy x cardinality does not match the model")


def _mi_profile(joint: JointPmf) -> tuple[float, float, float, float]:
    """(I(u;y), I(u;v1,v2), I(u;z), I(u;v1)) from one composed joint."""
    mi_uy = mutual_information(joint, ("u",), ("y",))
    mi_uv = mutual_information(joint, ("u",), ("v1", "v2"))
    mi_uz = mutual_information(joint, ("u",), ("z",))
    uv = marginalize(joint, ("u", "v1", "v2"))
    h_uv1 = _entropy_bits(uv.table.sum(axis=2))
    h_u = _entropy_bits(uv.table.sum(axis=(1, 2)))
    h_v1 = _entropy_bits(uv.table.sum(axis=(0, 2)))
    mi_uv1 = h_u + h_v1 - h_uv1
    if -1e-10 <= mi_uv1 < 0.0:
        mi_uv1 = 0.0
    return mi_uy, mi_uv, mi_uz, mi_uv1


def _triplet_from_profile(mi_uy: float, mi_uv: float, mi_uz: float) -> RateTriplet:
    r_u1 = mi_uy - max(mi_uv, mi_uz)
    r_u2 = mi_uy - mi_uv
    # differences below the rate floor are float noise, e.g. z a copy of y
    if abs(r_u1) <= RATE_FLOOR:
        r_u1 = 0.0
    if abs(r_u2) <= RATE_FLOOR:
        r_u2 = 0.0
    if r_u2 > RATE_FLOOR:
        d_u2 = min(1.0, max(0.0, r_u1 / r_u2))
    else:
        d_u2 = 1.0
    return RateTriplet(r_u1, r_u2, d_u2, mi_uy, mi_uv, mi_uz)


def rate_triplet(model: DiscreteWiretapModel, policy: AuxiliaryPolicy) -> RateTriplet:
    """Evaluate one policy; r_u1 may be negative and is returned as is."""
    _check_policy_bound(model, policy)
    _policy_card_check(model, policy)
    joint = compose(model.state_pmf, policy.table, model.main_kernel, model.wiretap_kernel)
    mi_uy, mi_uv, mi_uz, _ = _mi_profile(joint)
    return _triplet_from_profile(mi_uy, mi_uv, mi_uz)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # All nonnegative integer tuples of length `parts` summing to `total`.
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _grid_cell_count(steps: int, outcomes: int) -> int:
    return math.comb(steps + outcomes - 1, outcomes - 1)


def _policy_from_cells(model: DiscreteWiretapModel, u_card: int, mode: str,
                       cells: list[np.ndarray]) -> AuxiliaryPolicy:
    c_v1, c_v2, c_x = model.card_v1, model.card_v2, model.card_x
    table = np.empty((c_v1, c_v2, u_card, c_x))
    if mode == "v1":
        for i in range(c_v1):
            block = cells[i].reshape(u_card, c_x)
            for j in range(c_v2):
                table[i, j] = block
    else:
        k = 0
        for i in range(c_v1):
            for j in range(c_v2):
                table[i, j] = cells[k].reshape(u_card, c_x)
                k += 1
    kernel = TransitionKernel((("v1", c_v1), ("v2", c_v2)),
                              (("u", u_card), ("x", c_x)), table)
    return AuxiliaryPolicy(u_card, kernel)


def iter_policies(model: DiscreteWiretapModel,
                  search: SearchConfig) -> Iterator[AuxiliaryPolicy]:
    """Deterministic policy stream: grid block first, then seeded random draws.

    Random draw i depends only on (seed, i), so growing n_random extends the
    stream without disturbing earlier policies.
    """
    if search.u_card > model.u_card_bound:
        raise UsageError(
            f"u_card {search.u_card} exceeds the bound {model.u_card_bound}")
    n_cells = model.card_v1 * (model.card_v2 if search.mode == "v1v2" else 1)
    outcomes = search.u_card * model.card_x
    grid_total = 0
    if search.grid_steps > 0:
        per_cell = _grid_cell_count(search.grid_steps, outcomes)
        grid_total = per_cell ** n_cells
        if grid_total > GRID_POLICY_CAP:
            raise UsageError(
                f"grid of {grid_total} policies exceeds the {GRID_POLICY_CAP} cap; "
                f"lower grid_steps or use random sampling")
    if grid_total + search.n_random == 0:
        raise UsageError("search budget is zero: set n_random or grid_steps")

    if search.grid_steps > 0:
        cell_points = [np.asarray(c, dtype=float) / search.grid_steps
                       for c in _compositions(search.grid_steps, outcomes)]
        for combo in itertools.product(cell_points, repeat=n_cells):
            yield _policy_from_cells(model, search.u_card, search.mode, list(combo))

    alpha = np.ones(outcomes)
    for i in range(search.n_random):
        rng = np.random.default_rng([search.seed, i])
        cells = [rng.dirichlet(alpha) for _ in range(n_cells)]
        yield _policy_from_cells(model, search.u_card, search.mode, cells)


def _sweep(model: DiscreteWiretapModel, search: SearchConfig):
    """Yield (policy_id, policy, triplet, mi_uv1) over the search stream."""
    for pid, policy in enumerate(iter_policies(model, search)):
        joint = compose(model.state_pmf, policy.table, model.main_kernel,
                        model.wiretap_kernel)
        mi_uy, mi_uv, mi_uz, mi_uv1 = _mi_profile(joint)
        yield pid, policy, _triplet_from_profile(mi_uy, mi_uv, mi_uz), mi_uv1


def secrecy_rate(model: DiscreteWiretapModel, search: SearchConfig) -> float:
    """Largest max(r_u1, 0) over the searched policies."""
    best = 0.0
    for _, _, triplet, _ in _sweep(model, search):
        if triplet.r_u1 > best:
            best = triplet.r_u1
    return best


def secrecy_upper_bound(model: DiscreteWiretapModel, search: SearchConfig) -> float:
    """min{ max I(u;y)-I(u;v1), max I(u;y)-I(u;z) } over the same policy stream.

    Both terms are floored at zero: the constant auxiliary, which scores zero
    on each, belongs to every search space even when sampling misses it.
    This keeps secrecy_rate <= secrecy_upper_bound for any matched budget.
    """
    against_state = 0.0
    against_tap = 0.0
    for _, _, triplet, mi_uv1 in _sweep(model, search):
        against_state = max(against_state, triplet.mi_uy - mi_uv1)
        against_tap = max(against_tap, triplet.mi_uy - triplet.mi_uz)
    return min(against_state, against_tap)


def main_channel_capacity(model: DiscreteWiretapModel, search: SearchConfig) -> float:
    """Searched max of I(u;y) - I(u;v1) over policies p(u,x|v1).

    The conditioning is forced to the encoder-visible state regardless of
    search.mode, matching the interference-cancellation capacity target.
    """
    restricted = dataclasses.replace(search, mode="v1")
    best = 0.0
    for _, _, triplet, mi_uv1 in _sweep(model, restricted):
        best = max(best, triplet.mi_uy - mi_uv1)
    return best


def search_summary(model: DiscreteWiretapModel, search: SearchConfig) -> dict:
    """One-pass summary for reporting: rates, bound, capacity, best ids.

    Ties break to the first policy in iteration order so identical seeds
    give identical ids.
    """
    best_rate, best_rate_id = 0.0, -1
    against_state, against_state_id = 0.0, -1
    against_tap, against_tap_id = 0.0, -1
    for pid, _, triplet, mi_uv1 in _sweep(model, search):
        if triplet.r_u1 > best_rate:
            best_rate, best_rate_id = triplet.r_u1, pid
        if triplet.mi_uy - mi_uv1 > against_state:
            against_state, against_state_id = triplet.mi_uy - mi_uv1, pid
        if triplet.mi_uy - triplet.mi_uz > against_tap:
            against_tap, against_tap_id = triplet.mi_uy - triplet.mi_uz, pid

    capacity, capacity_id = 0.0, -1
    for pid, _, triplet, mi_uv1 in _sweep(model, dataclasses.replace(search, mode="v1")):
        if triplet.mi_uy - mi_uv1 > capacity:
            capacity, capacity_id = triplet.mi_uy - mi_uv1, pid

    return {
        "secrecy_rate": best_rate,
        "secrecy_upper_bound": min(against_state, against_tap),
        "main_channel_capacity": capacity,
        "best_policies": {
            "secrecy_rate": best_rate_id,
            "state_bound": against_state_id,
            "wiretap_bound": against_tap_id,
            "main_channel_capacity": capacity_id,
        },
    }


def achievable_points(model: DiscreteWiretapModel,
                      search: SearchConfig) -> RegionPointSet:
    """Sample the achievable region: per-policy curve R*d = r_u1 plus endpoints.

    Policies with negative r_u1 are excluded; (0, 1) is always present so the
    trivial point survives even when every sampled policy leaks.
    """
    points: list[RegionPoint] = [RegionPoint(0.0, 1.0, -1)]
    kept: dict[int, AuxiliaryPolicy] = {}
    max_r_u1 = 0.0
    for pid, policy, triplet, _ in _sweep(model, search):
        r1 = triplet.r_u1
        if r1 < -RATE_FLOOR:
            continue
        r1 = max(r1, 0.0)
        r2 = max(triplet.r_u2, r1)
        kept[pid] = policy
        max_r_u1 = max(max_r_u1, r1)
        points.append(RegionPoint(r1, 1.0, pid))
        if r2 <= r1 + RATE_FLOOR:
            continue
        points.append(RegionPoint(r2, triplet.d_u2, pid))
        for k in range(1, search.curve_points - 1):
            r = r1 + (r2 - r1) * k / (search.curve_points - 1)
            d = r1 / r if r > RATE_FLOOR else 1.0
            points.append(RegionPoint(r, d, pid))
    return RegionPointSet(tuple(points), kept, max_r_u1)
