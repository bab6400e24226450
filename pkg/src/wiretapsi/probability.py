"""Exact probability computations over dense finite-alphabet tables.

A distribution is a nonnegative numpy array summing to one, axes carry
names, and every information quantity is reported in bits with the
convention 0*log(0) = 0.  All functions are pure: same inputs give
bit-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError, ValidationError

MASS_TOL = 1e-12
MI_CLAMP = 1e-10
MAX_TABLE_ENTRIES = 10_000_000

Axes = tuple[tuple[str, int], ...]


def _freeze(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.flags.writeable = False
    return out


def _entropy_bits(table: np.ndarray) -> float:
    flat = np.asarray(table, dtype=float).ravel()
    pos = flat[flat > 0.0]
    if pos.size == 0:
        return 0.0
    return float(-(pos * np.log2(pos)).sum())


def _clamp_mi(value: float) -> float:
    # Tiny negative values are rounding noise; anything below the clamp
    # band is left visible so broken inputs fail loudly in tests.
    if -MI_CLAMP <= value < 0.0:
        return 0.0
    return value


@dataclass(frozen=True)
class Pmf:
    """Distribution of a single named variable."""

    label: str
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1:
            raise ValidationError(f"pmf '{self.label}' must be a vector, got shape {probs.shape}")
        if probs.size == 0:
            raise ValidationError(f"pmf '{self.label}' is empty")
        if np.any(probs < 0.0):
            raise ValidationError(f"pmf '{self.label}' has a negative entry")
        mass = float(probs.sum())
        if abs(mass - 1.0) > MASS_TOL:
            raise ValidationError(f"pmf '{self.label}' mass {mass!r} is not 1 within {MASS_TOL}")
        object.__setattr__(self, "probs", _freeze(probs))

    @property
    def cardinality(self) -> int:
        return int(self.probs.size)


@dataclass(frozen=True)
class JointPmf:
    """Joint distribution over named axes, stored as one dense table."""

    axes: Axes
    table: np.ndarray

    def __post_init__(self):
        axes = tuple((str(n), int(c)) for n, c in self.axes)
        names = [n for n, _ in axes]
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate axis names in {names}")
        if any(c < 1 for _, c in axes):
            raise ValidationError("axis cardinalities must be positive")
        expected = tuple(c for _, c in axes)
        if math.prod(expected) > MAX_TABLE_ENTRIES:
            raise UsageError(
                f"dense table with {math.prod(expected)} entries exceeds the "
                f"{MAX_TABLE_ENTRIES}-entry cap")
        table = np.asarray(self.table, dtype=float)
        if table.shape != expected:
            raise ValidationError(f"table shape {table.shape} does not match axes {axes}")
        if np.any(table < 0.0):
            raise ValidationError("joint table has a negative entry")
        mass = float(table.sum())
        if abs(mass - 1.0) > MASS_TOL:
            raise ValidationError(f"joint mass {mass!r} is not 1 within {MASS_TOL}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "table", _freeze(table))

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.axes)

    def axis_index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.axes):
            if n == name:
                return i
        raise UsageError(f"unknown axis '{name}'; have {self.axis_names}")

    def cardinality(self, name: str) -> int:
        return self.axes[self.axis_index(name)][1]


@dataclass(frozen=True)
class TransitionKernel:
    """Conditional distribution of the output axes given the input axes.

    The table has shape inputs + outputs and every conditional slice
    (inputs fixed) sums to one.
    """

    input_axes: Axes
    output_axes: Axes
    table: np.ndarray

    def __post_init__(self):
        inputs = tuple((str(n), int(c)) for n, c in self.input_axes)
        outputs = tuple((str(n), int(c)) for n, c in self.output_axes)
        names = [n for n, _ in inputs + outputs]
        if len(set(names)) != len(names):
            raise UsageError(f"duplicate axis names in kernel: {names}")
        expected = tuple(c for _, c in inputs + outputs)
        table = np.asarray(self.table, dtype=float)
        if table.shape != expected:
            raise ValidationError(
                f"kernel shape {table.shape} does not match axes {inputs} -> {outputs}")
        if np.any(table < 0.0):
            raise ValidationError("kernel has a negative entry")
        sums = table.sum(axis=tuple(range(len(inputs), len(inputs) + len(outputs))))
        worst = float(np.abs(sums - 1.0).max()) if sums.size else 0.0
        if worst > MASS_TOL:
            cell = np.unravel_index(int(np.abs(sums - 1.0).argmax()), sums.shape)
            raise ValidationError(
                f"kernel rows must sum to 1: conditional cell {cell} is off by {worst:.3e}")
        object.__setattr__(self, "input_axes", inputs)
        object.__setattr__(self, "output_axes", outputs)
        object.__setattr__(self, "table", _freeze(table))

    @property
    def input_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.input_axes)

    @property
    def output_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.output_axes)


def entropy(p: Pmf) -> float:
    """Shannon entropy in bits."""
    return _entropy_bits(p.probs)


def joint_entropy(joint: JointPmf, group: Iterable[str] | None = None) -> float:
    """Entropy in bits of a group of axes (all axes when group is None)."""
    if group is None:
        return _entropy_bits(joint.table)
    return _entropy_bits(marginalize(joint, tuple(group)).table)


def marginalize(joint: JointPmf, keep: Sequence[str]) -> JointPmf:
    """Sum out every axis not listed in `keep`, preserving axis order."""
    keep = tuple(keep)
    if len(set(keep)) != len(keep):
        raise UsageError(f"duplicate axes in keep list {keep}")
    indices = {name: joint.axis_index(name) for name in keep}
    drop = tuple(i for i, (n, _) in enumerate(joint.axes) if n not in indices)
    table = joint.table.sum(axis=drop) if drop else joint.table
    axes = tuple(a for a in joint.axes if a[0] in indices)
    return JointPmf(axes, table)


def _group_entropies(joint: JointPmf, groups: Sequence[tuple[str, ...]]) -> list[float]:
    out = []
    for group in groups:
        sub = marginalize(joint, group) if set(group) != set(joint.axis_names) else joint
        out.append(_entropy_bits(sub.table))
    return out


def mutual_information(joint: JointPmf, group_a: Iterable[str],
                       group_b: Iterable[str]) -> float:
    """I(A;B) in bits between two disjoint groups of axes."""
    a = tuple(group_a)
    b = tuple(group_b)
    if not a or not b:
        raise UsageError("mutual information needs two nonempty groups")
    if set(a) & set(b):
        raise UsageError(f"groups overlap: {sorted(set(a) & set(b))}")
    sub = marginalize(joint, a + b)
    h_ab = _entropy_bits(sub.table)
    h_a = _entropy_bits(marginalize(sub, a).table)
    h_b = _entropy_bits(marginalize(sub, b).table)
    return _clamp_mi(h_a + h_b - h_ab)


def conditional_mutual_information(joint: JointPmf, group_a: Iterable[str],
                                   group_b: Iterable[str],
                                   group_c: Iterable[str]) -> float:
    """I(A;B|C) in bits; the three groups must be pairwise disjoint."""
    a, b, c = tuple(group_a), tuple(group_b), tuple(group_c)
    if not a or not b:
        raise UsageError("conditional mutual information needs nonempty A and B")
    for left, right in (((a, b)), ((a, c)), ((b, c))):
        if set(left) & set(right):
            raise UsageError(f"groups overlap: {sorted(set(left) & set(right))}")
    sub = marginalize(joint, a + b + c)
    h_ac, h_bc, h_abc, h_c = _group_entropies(sub, [a + c, b + c, a + b + c, c])
    return _clamp_mi(h_ac + h_bc - h_abc - h_c)


def compose(state_pmf: JointPmf, policy: TransitionKernel,
            main_kernel: TransitionKernel,
            wiretap_kernel: TransitionKernel) -> JointPmf:
    """Assemble the full joint over (u, x, v1, v2, y, z).

    The factorization p(v1,v2) * p(u,x|v1,v2) * p(y|x,v1) * p(z|x,v2) makes
    u -> (x,v1,v2) -> (y,z) a Markov chain by construction.
    """
    if state_pmf.axis_names != ("v1", "v2"):
        raise UsageError(f"state pmf axes must be ('v1','v2'), got {state_pmf.axis_names}")
    c_v1 = state_pmf.cardinality("v1")
    c_v2 = state_pmf.cardinality("v2")
    _require_kernel(policy, ("v1", "v2"), ("u", "x"), {"v1": c_v1, "v2": c_v2})
    c_u = dict(policy.output_axes)["u"]
    c_x = dict(policy.output_axes)["x"]
    _require_kernel(main_kernel, ("x", "v1"), ("y",), {"x": c_x, "v1": c_v1})
    _require_kernel(wiretap_kernel, ("x", "v2"), ("z",), {"x": c_x, "v2": c_v2})
    c_y = dict(main_kernel.output_axes)["y"]
    c_z = dict(wiretap_kernel.output_axes)["z"]
    total = c_u * c_x * c_v1 * c_v2 * c_y * c_z
    if total > MAX_TABLE_ENTRIES:
        raise UsageError(
            f"composed joint would hold {total} entries, above the "
            f"{MAX_TABLE_ENTRIES}-entry cap")
    table = np.einsum("ab,abux,xay,xbz->uxabyz", state_pmf.table, policy.table,
                      main_kernel.table, wiretap_kernel.table, optimize=True)
    axes = (("u", c_u), ("x", c_x), ("v1", c_v1), ("v2", c_v2), ("y", c_y), ("z", c_z))
    return JointPmf(axes, table)


def _require_kernel(kernel: TransitionKernel, inputs: tuple[str, ...],
                    outputs: tuple[str, ...], cards: dict[str, int]) -> None:
    if kernel.input_names != inputs or kernel.output_names != outputs:
        raise UsageError(
            f"kernel axes {kernel.input_names} -> {kernel.output_names} do not "
            f"match required {inputs} -> {outputs}")
    for name, card in kernel.input_axes:
        if cards.get(name, card) != card:
            raise UsageError(
                f"kernel input '{name}' has cardinality {card}, expected {cards[name]}")
