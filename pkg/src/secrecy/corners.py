"""Enumeration of the corner distributions of the eavesdropper's game.

A distribution ``p`` is a corner point when the number of tied optimal
reconstructions is at least the size of its support.  These are the
isolated kinks of the concave function ``p -> min_z E_p d(X, z)`` and the
only posteriors an optimal code needs.

For each support ``T`` and tie set ``S`` with ``|T| = |S| = m`` the square
system ``{sum_T p = 1, E_p d(., z) equal on S}`` pins down at most one
candidate; a candidate is kept if it is strictly positive on ``T`` and its
global argmin contains ``S`` and has at least ``m`` elements.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adversary import TIE_TOL, best_response
from .core import DistortionMatrix, Pmf, ValidationError, as_distortion, entropy
from .lp import Infeasible, linprog_max

log = logging.getLogger(__name__)

DEDUP_TOL = 1e-7
MAX_ALPHABET = 12
POSITIVE_TOL = 1e-9
COND_LIMIT = 1e12


class DegenerateDistortionError(ValidationError):
    """The tie conditions hold on a continuum, so the corner set is infinite."""


@dataclass(frozen=True)
class CornerPoint:
    p: Pmf
    alpha: float
    beta: float
    ties: tuple[int, ...]
    support: tuple[int, ...]


@dataclass
class EnumerationStats:
    systems: int = 0
    singular: int = 0
    accepted: int = 0
    notes: list[str] = field(default_factory=list)


def thread_budget() -> int:
    """Worker count: ``SECRECY_THREADS`` if set, else the available cores."""
    env = os.environ.get("SECRECY_THREADS", "").strip()
    cores = os.cpu_count() or 1
    if not env:
        return cores
    try:
        value = int(env)
    except ValueError:
        raise ValidationError(f"SECRECY_THREADS must be an integer, got {env!r}") from None
    return max(1, min(value, cores))


def make_corner(p, d: DistortionMatrix, tie_tol: float = TIE_TOL) -> CornerPoint:
    p = p if isinstance(p, Pmf) else Pmf(p)
    br = best_response(p, d, tie_tol)
    return CornerPoint(p=p, alpha=entropy(p), beta=br.value, ties=br.argmin_set, support=p.support)


def _check_degenerate(D: np.ndarray, T: tuple, S: tuple) -> None:
    """Raise if the singular system for (T, S) admits a segment of valid points."""
    m = len(T)
    sub = D[list(T)]
    rows = [np.ones(m)] + [sub[:, z] - sub[:, S[0]] for z in S[1:]]
    rhs = [1.0] + [0.0] * (m - 1)
    others = [z for z in range(D.shape[1]) if z not in S]
    # S[0] must stay optimal: E d(z) - E d(S[0]) >= 0 for every other z
    A_ub = np.array([sub[:, S[0]] - sub[:, z] for z in others]).reshape(len(others), m)
    # shift p = q + margin so that p > 0 strictly on T
    margin = POSITIVE_TOL
    A_eq = np.array(rows)
    b_eq = np.array(rhs) - A_eq.sum(axis=1) * margin
    b_ub = -A_ub.sum(axis=1) * margin if len(others) else None
    probe = np.sqrt(np.arange(2, m + 2, dtype=float))
    try:
        hi = linprog_max(probe, A_eq, b_eq, A_ub if len(others) else None, b_ub).value
        lo = -linprog_max(-probe, A_eq, b_eq, A_ub if len(others) else None, b_ub).value
    except Infeasible:
        return
    if hi - lo > DEDUP_TOL:
        raise DegenerateDistortionError(
            f"degenerate distortion matrix: reconstructions {list(S)} tie on a "
            f"continuum of distributions supported on {list(T)}"
        )


def _candidates_for_support(D: np.ndarray, T: tuple, tie_tol: float, stats: EnumerationStats):
    m = len(T)
    nz = D.shape[1]
    sub = D[list(T)]
    tie_sets = list(itertools.combinations(range(nz), m))
    if m == 1:
        p = np.zeros(D.shape[0])
        p[T[0]] = 1.0
        stats.systems += len(tie_sets)
        return [(T, p)]

    S_arr = np.array(tie_sets)
    # rows: sum constraint, then E d(S[j]) - E d(S[0]) = 0
    cols = sub[:, S_arr]                      # (m, nS, m)
    cols = np.transpose(cols, (1, 2, 0))      # (nS, m, m): [s, tie j, x]
    M = np.empty((len(tie_sets), m, m))
    M[:, 0, :] = 1.0
    M[:, 1:, :] = cols[:, 1:, :] - cols[:, :1, :]
    rhs = np.zeros(m)
    rhs[0] = 1.0
    stats.systems += len(tie_sets)
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(M)
    ok = np.isfinite(cond) & (cond < COND_LIMIT)
    found = []
    for i in np.flatnonzero(~ok):
        stats.singular += 1
        _check_degenerate(D, T, tie_sets[i])
    if not ok.any():
        return found
    sols = np.linalg.solve(M[ok], np.broadcast_to(rhs, (int(ok.sum()), m))[..., None])[..., 0]
    for S, q in zip((tie_sets[i] for i in np.flatnonzero(ok)), sols):
        if q.min() <= POSITIVE_TOL:
            continue
        p = np.zeros(D.shape[0])
        p[list(T)] = q / q.sum()
        costs = p @ D
        argmin = np.flatnonzero(costs <= costs.min() + tie_tol)
        if not set(S) <= set(argmin.tolist()) or argmin.size < m:
            continue
        found.append((T, p))
    return found


def enumerate_corner_points(
    d,
    tol: float = DEDUP_TOL,
    tie_tol: float = TIE_TOL,
    workers: int | None = None,
    stats: EnumerationStats | None = None,
) -> list[CornerPoint]:
    """All corner points of ``d``, deduplicated and deterministically ordered.

    Point masses always qualify.  Output is sorted by support, then by tie
    set, then by probabilities.  Raises :class:`DegenerateDistortionError`
    when some tie set holds along a whole segment of distributions.
    """
    d = as_distortion(d)
    nx, nz = d.shape
    if nx > MAX_ALPHABET or nz > MAX_ALPHABET:
        raise ValidationError(f"alphabets larger than {MAX_ALPHABET} are not supported")
    D = d.values
    stats = stats if stats is not None else EnumerationStats()

    supports = [T for m in range(1, min(nx, nz) + 1) for T in itertools.combinations(range(nx), m)]
    if workers is None:
        workers = thread_budget()
    if workers > 1 and len(supports) > 8:
        per_task = [EnumerationStats() for _ in supports]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(
                lambda a: _candidates_for_support(D, a[0], tie_tol, a[1]),
                zip(supports, per_task),
            ))
        for s in per_task:
            stats.systems += s.systems
            stats.singular += s.singular
    else:
        chunks = [_candidates_for_support(D, T, tie_tol, stats) for T in supports]

    corners: list[CornerPoint] = []
    for chunk in chunks:
        for _, p in chunk:
            corners.append(make_corner(Pmf(p), d, tie_tol))

    corners.sort(key=lambda c: (c.support, c.ties, tuple(c.p.probs)))
    unique: list[CornerPoint] = []
    for c in corners:
        if all(np.max(np.abs(c.p.probs - u.p.probs)) > tol for u in unique):
            unique.append(c)
    stats.accepted = len(unique)
    if stats.singular:
        log.debug("skipped %d singular tie systems out of %d", stats.singular, stats.systems)
    return unique
