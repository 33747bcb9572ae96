"""Product-inference fuzzy engine on triangular partitions.

Each input gets an ordered bank of triangular membership functions whose feet
sit at the neighboring peaks, with shouldered triangles at the domain edges.
Evenly spaced peaks make the bank a partition of unity, so the normalized
rule firing strengths of the full cross-product rule grid are exact and the
derivative of the inferred output with respect to a rule consequent is simply
that rule's firing strength.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "TriangularMF",
    "InputPartition",
    "RuleBase",
    "uniform_partition",
    "build_default_partitions",
    "infer",
    "firing_entropy",
    "DISTANCE_DOMAIN",
    "ANGLE_DOMAIN",
]

DISTANCE_DOMAIN = (0.0, 35.0)
ANGLE_DOMAIN = (-math.pi, math.pi)


@dataclass(frozen=True)
class TriangularMF:
    """Triangular membership with optional shoulders.

    Membership is 1 at ``peak``, falls linearly to 0 at ``left`` and
    ``right``.  A degenerate side (``left == peak`` or ``right == peak``)
    marks a shoulder: membership stays 1 beyond the peak on that side.
    """

    left: float
    peak: float
    right: float

    def __post_init__(self):
        if not self.left <= self.peak <= self.right:
            raise ValueError(f"require left <= peak <= right, got {self}")

    def membership(self, x: float) -> float:
        if x < self.peak:
            if self.left == self.peak:
                return 1.0
            if x <= self.left:
                return 0.0
            return (x - self.left) / (self.peak - self.left)
        if x > self.peak:
            if self.right == self.peak:
                return 1.0
            if x >= self.right:
                return 0.0
            return (self.right - x) / (self.right - self.peak)
        return 1.0

    __call__ = membership


@dataclass(frozen=True)
class InputPartition:
    """Ordered bank of membership functions covering ``[lo, hi]``."""

    lo: float
    hi: float
    mfs: tuple[TriangularMF, ...]

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("partition domain must have lo < hi")
        peaks = [mf.peak for mf in self.mfs]
        if peaks != sorted(peaks):
            raise ValueError("membership functions must be ordered by peak")
        for a, b in zip(self.mfs, self.mfs[1:]):
            if a.right <= b.left:
                raise ValueError("adjacent membership functions must overlap")

    @property
    def peaks(self) -> tuple[float, ...]:
        return tuple(mf.peak for mf in self.mfs)

    def clamp(self, x: float) -> float:
        return min(max(x, self.lo), self.hi)

    def memberships(self, x: float) -> np.ndarray:
        """Membership degree of the clamped input in every bank member."""
        xc = self.clamp(x)
        return np.array([mf.membership(xc) for mf in self.mfs])


def uniform_partition(lo: float, hi: float, n_mfs: int = 5) -> InputPartition:
    """Evenly spaced shouldered triangles with feet at the neighboring peaks.

    This layout is a partition of unity on ``[lo, hi]``: memberships at any
    point sum to exactly 1.
    """
    if n_mfs < 2:
        raise ValueError("need at least 2 membership functions")
    peaks = [lo + k * (hi - lo) / (n_mfs - 1) for k in range(n_mfs)]
    mfs = []
    for k, peak in enumerate(peaks):
        left = peaks[k - 1] if k > 0 else peak
        right = peaks[k + 1] if k < n_mfs - 1 else peak
        mfs.append(TriangularMF(left=left, peak=peak, right=right))
    return InputPartition(lo=lo, hi=hi, mfs=tuple(mfs))


class RuleBase:
    """Full cross-product rule grid over the input partitions.

    Rule ``l`` pairs one membership function per input; rules are ordered
    row-major (the last input varies fastest), matching the flattening of
    the outer product in :meth:`fire`.
    """

    def __init__(self, partitions):
        self.partitions = tuple(partitions)
        if not self.partitions:
            raise ValueError("rule base needs at least one input partition")
        self.shape = tuple(len(p.mfs) for p in self.partitions)
        self.n_rules = int(np.prod(self.shape))
        self.rules = tuple(itertools.product(*(range(n) for n in self.shape)))

    @property
    def n_inputs(self) -> int:
        return len(self.partitions)

    def fire(self, x) -> np.ndarray:
        """Normalized firing strength of every rule for input vector ``x``.

        Inputs are clamped to their partition domains.  Each rule's raw
        strength is the product of its per-input memberships; the vector is
        normalized to sum to 1.
        """
        if len(x) != len(self.partitions):
            raise ValueError(f"expected {len(self.partitions)} inputs, got {len(x)}")
        degrees = [p.memberships(xi) for p, xi in zip(self.partitions, x)]
        raw = reduce(np.multiply.outer, degrees).ravel()
        total = raw.sum()
        if total < 1e-300:
            raise ValueError("degenerate firing: no rule is active (gap in a partition)")
        return raw / total

    def to_dict(self) -> dict:
        """Peak-parameterized layout, sufficient to rebuild the rule base."""
        return {
            "inputs": [
                {"lo": p.lo, "hi": p.hi, "peaks": list(p.peaks)} for p in self.partitions
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RuleBase":
        partitions = []
        for spec in data["inputs"]:
            peaks = [float(v) for v in spec["peaks"]]
            mfs = []
            for k, peak in enumerate(peaks):
                left = peaks[k - 1] if k > 0 else peak
                right = peaks[k + 1] if k < len(peaks) - 1 else peak
                mfs.append(TriangularMF(left=left, peak=peak, right=right))
            partitions.append(
                InputPartition(lo=float(spec["lo"]), hi=float(spec["hi"]), mfs=tuple(mfs))
            )
        return cls(partitions)


def build_default_partitions(
    distance_domain: tuple[float, float] = DISTANCE_DOMAIN,
    angle_domain: tuple[float, float] = ANGLE_DOMAIN,
    n_mfs: int = 5,
) -> RuleBase:
    """Rule base for the four chase features: [distance, angle, distance, angle]."""
    distance = uniform_partition(*distance_domain, n_mfs=n_mfs)
    angle = uniform_partition(*angle_domain, n_mfs=n_mfs)
    return RuleBase([distance, angle, distance, angle])


def infer(phi, params) -> float:
    """Firing-weighted sum of rule consequents: ``sum_l phi_l * params_l``."""
    phi = np.asarray(phi, dtype=float)
    params = np.asarray(params, dtype=float)
    if phi.shape != params.shape:
        raise ValueError(f"length mismatch: firing {phi.shape} vs params {params.shape}")
    return float(phi @ params)


def firing_entropy(phi) -> float:
    """Shannon entropy (nats) of a firing vector; a rule-activation spread diagnostic."""
    phi = np.asarray(phi, dtype=float)
    active = phi[phi > 0.0]
    return float(-(active * np.log(active)).sum())
