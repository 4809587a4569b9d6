"""Eavesdropper best response to a known source distribution.

The eavesdropper picks the reconstruction that minimizes expected
distortion.  Ties are resolved with an absolute tolerance, so tables whose
entries are much larger than one should be rescaled first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ValidationError, as_distortion, as_pmf

TIE_TOL = 1e-9


@dataclass(frozen=True)
class BestResponse:
    value: float
    argmin_set: tuple[int, ...]

    @property
    def choice(self) -> int:
        """Lowest-index optimal reconstruction."""
        return self.argmin_set[0]


def best_response(p, d, tie_tol: float = TIE_TOL) -> BestResponse:
    p = as_pmf(p)
    d = as_distortion(d)
    if tie_tol <= 0:
        raise ValueError("tie_tol must be positive")
    if d.n_recon == 0:
        raise ValidationError("empty reconstruction alphabet")
    if len(p) != d.n_source:
        raise ValidationError("pmf size does not match distortion rows")
    costs = p.probs @ d.values
    value = float(costs.min())
    ties = tuple(int(z) for z in np.flatnonzero(costs <= value + tie_tol))
    return BestResponse(value, ties)


def min_distortion(p, d) -> float:
    return best_response(p, d).value


def best_response_rows(
    weights: np.ndarray, d: np.ndarray, tie_tol: float = TIE_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized best response for each row of ``weights``.

    Rows need not be normalized (joint slices work too).  Returns the
    lowest-index reconstruction within ``tie_tol`` of the optimum, and the
    optimal cost, per row.
    """
    costs = np.asarray(weights, dtype=float) @ np.asarray(d, dtype=float)
    value = costs.min(axis=-1)
    choice = np.argmax(costs <= value[..., None] + tie_tol, axis=-1)
    return choice, value
