"""Probability and distortion primitives shared by every other module.

All quantities are in bits.  Objects are immutable: the numpy arrays they
hold are copied on construction and marked read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NEG_TOL = 1e-12
SUM_TOL = 1e-9
NORMALIZE_TOL = 1e-6
SUPPORT_THRESHOLD = 1e-12
REDUNDANCY_TOL = 1e-12


class ValidationError(ValueError):
    """Raised when an input violates a domain invariant."""


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function over ``range(len(probs))``.

    Zero-mass symbols stay in the alphabet so that indices are stable.
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = _frozen(self.probs)
        if probs.ndim != 1 or probs.size == 0:
            raise ValidationError(f"pmf must be a non-empty vector, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)):
            raise ValidationError("pmf contains non-finite entries")
        if probs.min() < -NEG_TOL:
            raise ValidationError(f"pmf has negative mass {probs.min():.3g}")
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"pmf sums to {total!r}, not 1")
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return self.probs.size

    def __eq__(self, other):
        return isinstance(other, Pmf) and np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def __repr__(self):
        return f"Pmf({np.array2string(self.probs, precision=6, separator=', ')})"

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.probs > SUPPORT_THRESHOLD))

    @classmethod
    def point_mass(cls, size: int, index: int) -> "Pmf":
        probs = np.zeros(size)
        probs[index] = 1.0
        return cls(probs)

    @classmethod
    def uniform(cls, size: int) -> "Pmf":
        return cls(np.full(size, 1.0 / size))


def normalize(values: Sequence[float]) -> Pmf:
    """Rescale ``values`` to sum to one.

    Only small rounding error is forgiven: inputs whose total is off by
    more than 1e-6, or that carry negative mass, are rejected.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError("can only normalize a non-empty vector")
    if arr.min() < -NEG_TOL:
        raise ValidationError(f"cannot normalize negative mass {arr.min():.3g}")
    total = arr.sum()
    if abs(total - 1.0) > NORMALIZE_TOL:
        raise ValidationError(f"total mass {total!r} is too far from 1 to normalize")
    return Pmf(np.clip(arr, 0.0, None) / total)


def as_pmf(p) -> Pmf:
    return p if isinstance(p, Pmf) else Pmf(p)


@dataclass(frozen=True, eq=False)
class DistortionMatrix:
    """Distortion table ``values[x, z]``; rows are source symbols."""

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 2 or 0 in values.shape:
            raise ValidationError(f"distortion must be a non-empty 2-D table, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("distortion contains non-finite entries")
        nz = values.shape[1]
        for a in range(nz):
            for b in range(a + 1, nz):
                if np.max(np.abs(values[:, a] - values[:, b])) <= REDUNDANCY_TOL:
                    raise ValidationError(
                        f"redundant distortion columns {a} and {b} are identical"
                    )
        object.__setattr__(self, "values", values)

    @property
    def n_source(self) -> int:
        return self.values.shape[0]

    @property
    def n_recon(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __eq__(self, other):
        return isinstance(other, DistortionMatrix) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.values.shape, self.values.tobytes()))

    def __repr__(self):
        return f"DistortionMatrix(shape={self.values.shape})"

    @classmethod
    def hamming(cls, size: int) -> "DistortionMatrix":
        return cls(1.0 - np.eye(size))


def as_distortion(d) -> DistortionMatrix:
    return d if isinstance(d, DistortionMatrix) else DistortionMatrix(d)


@dataclass(frozen=True)
class ProblemInstance:
    source: Pmf
    distortion: DistortionMatrix

    def __post_init__(self):
        object.__setattr__(self, "source", as_pmf(self.source))
        object.__setattr__(self, "distortion", as_distortion(self.distortion))
        if len(self.source) != self.distortion.n_source:
            raise ValidationError(
                f"source has {len(self.source)} symbols but distortion has "
                f"{self.distortion.n_source} rows"
            )


def _plogp(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p, dtype=float)
    mask = p > 0
    out[mask] = p[mask] * np.log2(p[mask])
    return out


def entropy(p) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    probs = np.clip(as_pmf(p).probs, 0.0, None)
    h = -float(_plogp(probs).sum())
    return max(h, 0.0) + 0.0


def conditional_entropy(joint) -> float:
    """H(X|U) for a joint table indexed ``joint[u, x]``."""
    joint = np.asarray(joint, dtype=float)
    if joint.ndim != 2:
        raise ValidationError("joint must be a 2-D table indexed [u, x]")
    if not np.all(np.isfinite(joint)) or joint.min() < -NEG_TOL:
        raise ValidationError("joint has negative or non-finite entries")
    if abs(joint.sum() - 1.0) > SUM_TOL:
        raise ValidationError(f"joint sums to {joint.sum()!r}, not 1")
    joint = np.clip(joint, 0.0, None)
    pu = joint.sum(axis=1)
    h = float(_plogp(pu).sum() - _plogp(joint).sum())
    return max(h, 0.0) + 0.0


def expected_distortion(p, d, z: int) -> float:
    p = as_pmf(p)
    d = as_distortion(d)
    if len(p) != d.n_source:
        raise ValidationError("pmf size does not match distortion rows")
    if not 0 <= z < d.n_recon:
        raise IndexError(f"reconstruction index {z} out of range [0, {d.n_recon})")
    return float(p.probs @ d.values[:, z])
