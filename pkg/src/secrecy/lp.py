"""Key-rate versus forced-distortion linear program.

The best forced distortion at key rate ``R0`` is obtained by writing the
source as a mixture of corner distributions ``p_k`` and maximizing the
mixed eavesdropper distortion subject to the mixed entropy budget::

    maximize    mu @ beta
    subject to  mu >= 0,  mu @ alpha <= R0,  sum_k mu_k p_k = p0

The solver is a dense two-phase tableau simplex with Bland's rule; the
instances here have a handful of rows and at most a few hundred columns.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ProblemInstance, ValidationError, as_pmf, entropy

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-8
COLLINEAR_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9


class SolverError(RuntimeError):
    """The LP routine failed; no answer is returned in that case."""


class Infeasible(SolverError):
    pass


class Unbounded(SolverError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    T[np.abs(T) < 1e-15] = 0.0


def _run_simplex(T: np.ndarray, basis: list[int], allowed: np.ndarray, max_iter: int) -> None:
    """Maximize the objective stored in the last row of ``T`` (as -c).

    Bland's rule: lowest-index improving column enters, ties in the ratio
    test leave by lowest basic index.
    """
    m = T.shape[0] - 1
    for _ in range(max_iter):
        obj = T[-1, :-1]
        candidates = np.flatnonzero((obj < -PIVOT_TOL) & allowed)
        if candidates.size == 0:
            return
        col = int(candidates[0])
        column = T[:m, col]
        pos = column > PIVOT_TOL
        if not pos.any():
            raise Unbounded("objective is unbounded")
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / column[pos]
        best = ratios.min()
        rows = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        row = int(min(rows, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
    raise SolverError(f"simplex did not terminate in {max_iter} iterations")


def linprog_max(
    c,
    A_eq=None,
    b_eq=None,
    A_ub=None,
    b_ub=None,
    feas_tol: float = FEAS_TOL,
    max_iter: int = 50_000,
) -> LPResult:
    """Maximize ``c @ x`` over ``x >= 0`` with equality and <= constraints."""
    c = np.asarray(c, dtype=float)
    n = c.size
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    m_eq, m_ub = A_eq.shape[0], A_ub.shape[0]
    m = m_eq + m_ub
    if A_eq.shape[1] != n or A_ub.shape[1] != n:
        raise ValueError("constraint matrices do not match objective length")

    # columns: x (n), slacks (m_ub), artificials (m)
    A = np.zeros((m, n + m_ub))
    A[:m_eq, :n] = A_eq
    A[m_eq:, :n] = A_ub
    A[m_eq:, n:] = np.eye(m_ub)
    b = np.concatenate([b_eq, b_ub])
    neg = b < 0
    A[neg] *= -1
    b = np.where(neg, -b, b)

    nv = n + m_ub
    T = np.zeros((m + 1, nv + m + 1))
    T[:m, :nv] = A
    T[:m, nv:nv + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(nv, nv + m))

    # phase 1: maximize -sum(artificials)
    T[-1, :] = 0.0
    T[-1, nv:nv + m] = 1.0
    for r in range(m):
        T[-1] -= T[r]
    allowed = np.ones(nv + m, dtype=bool)
    _run_simplex(T, basis, allowed, max_iter)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -T[-1, -1] > feas_tol * scale:
        raise Infeasible(f"constraints infeasible (phase-1 residual {-T[-1, -1]:.3g})")

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= nv:
            cols = np.flatnonzero(np.abs(T[r, :nv]) > 1e-9)
            if cols.size:
                _pivot(T, r, int(cols[0]))
                basis[r] = int(cols[0])
                keep.append(r)
        else:
            keep.append(r)
    T = np.vstack([T[keep], T[-1:]])
    basis = [basis[r] for r in keep]
    T = np.delete(T, np.s_[nv:nv + m], axis=1)
    m = len(basis)

    # phase 2
    cost = np.concatenate([c, np.zeros(m_ub)])
    T[-1, :] = 0.0
    T[-1, :nv] = -cost
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    _run_simplex(T, basis, np.ones(nv, dtype=bool), max_iter)

    sol = np.zeros(nv)
    for r, j in enumerate(basis):
        sol[j] = T[r, -1]
    x = np.clip(sol[:n], 0.0, None)
    return LPResult(x=x, value=float(c @ x))


# --------------------------------------------------------------------------
# key-distortion program


@dataclass(frozen=True)
class Decomposition:
    """Mixture weights over corner points that reproduce the source."""

    mu: np.ndarray

    def key_rate(self, alphas: np.ndarray) -> float:
        return float(self.mu @ alphas)

    def check(self, P: np.ndarray, p0: np.ndarray, tol: float = FEAS_TOL) -> None:
        if self.mu.min(initial=0.0) < -tol:
            raise SolverError("decomposition has negative weight")
        resid = np.abs(self.mu @ P - p0).max()
        if resid > tol:
            raise SolverError(f"decomposition misses the source by {resid:.3g}")


@dataclass(frozen=True)
class TradeoffCurve:
    """Concave piecewise-linear map from key rate to forced distortion."""

    breakpoints: tuple[tuple[float, float], ...]
    saturation_rate: float
    saturation_distortion: float
    decompositions: tuple[Decomposition, ...] = ()

    @property
    def rates(self) -> np.ndarray:
        return np.array([r for r, _ in self.breakpoints])

    @property
    def distortions(self) -> np.ndarray:
        return np.array([d for _, d in self.breakpoints])

    def __call__(self, R0):
        """Interpolated D*(R0); constant past the saturation rate."""
        if np.any(np.asarray(R0) < 0):
            raise ValueError("key rate must be nonnegative")
        out = np.interp(R0, self.rates, self.distortions)
        return float(out) if np.ndim(out) == 0 else out


def _corner_arrays(corners, p0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not corners:
        raise ValidationError("corner list is empty")
    P = np.array([c.p.probs for c in corners])
    if P.shape[1] != len(p0):
        raise ValidationError(
            f"corner points live on {P.shape[1]} symbols but the source has {len(p0)}"
        )
    alphas = np.array([c.alpha for c in corners])
    betas = np.array([c.beta for c in corners])
    return P, alphas, betas


def _solve(c, P, p0, A_ub=None, b_ub=None) -> LPResult:
    try:
        return linprog_max(c, A_eq=P.T, b_eq=p0, A_ub=A_ub, b_ub=b_ub)
    except SolverError:
        raise
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        raise SolverError(f"numerical failure in LP: {exc}") from exc


def solve_key_distortion_lp(corners, p0, R0: float) -> tuple[float, Decomposition]:
    """Largest distortion the code can force with key rate ``R0``."""
    if R0 < 0:
        raise ValueError("key rate must be nonnegative")
    p0 = as_pmf(p0).probs
    P, alphas, betas = _corner_arrays(corners, p0)
    res = _solve(betas, P, p0, A_ub=alphas[None, :], b_ub=[R0])
    mu = Decomposition(res.x)
    mu.check(P, p0)
    if mu.key_rate(alphas) > R0 + FEAS_TOL:
        raise SolverError("decomposition exceeds the key-rate budget")
    return float(res.value), mu


def tradeoff_curve(corners, p0) -> TradeoffCurve:
    """Exact breakpoints of R0 -> D*(R0).

    The achievable (key rate, distortion) pairs form a polygon; its upper
    boundary is traced by repeatedly maximizing ``distortion - s * rate``
    with ``s`` the slope of the current chord until no point lies above it.
    """
    p0v = as_pmf(p0).probs
    P, alphas, betas = _corner_arrays(corners, p0v)
    scale = max(1.0, float(np.abs(betas).max()))

    d0, mu0 = solve_key_distortion_lp(corners, p0, 0.0)
    top = _solve(betas, P, p0v)
    d_sat = top.value
    if d_sat - d0 <= 1e-12 * scale:
        return TradeoffCurve(((0.0, d0),), 0.0, d0, (mu0,))

    low = _solve(-alphas, P, p0v, A_ub=-betas[None, :], b_ub=[-d_sat])
    sat = Decomposition(low.x)
    sat.check(P, p0v)
    r_sat = sat.key_rate(alphas)

    points = {0.0: (d0, mu0), r_sat: (float(sat.mu @ betas), sat)}

    def refine(ra, da, rb, db, depth=0):
        if rb - ra <= 1e-12 or depth > 200:
            return
        slope = (db - da) / (rb - ra)
        if slope <= 0:
            return
        res = _solve(betas - slope * alphas, P, p0v)
        chord = da - slope * ra
        if res.value <= chord + 1e-11 * scale:
            return
        mu = Decomposition(res.x)
        mu.check(P, p0v)
        rc, dc = mu.key_rate(alphas), float(mu.mu @ betas)
        if not ra + 1e-12 < rc < rb - 1e-12:
            return
        points[rc] = (dc, mu)
        refine(ra, da, rc, dc, depth + 1)
        refine(rc, dc, rb, db, depth + 1)

    refine(0.0, d0, r_sat, points[r_sat][0])

    rates = sorted(points)
    pts = [(r, points[r][0], points[r][1]) for r in rates]
    pruned = [pts[0]]
    for i in range(1, len(pts) - 1):
        (r1, d1, _), (r2, d2, _), (r3, d3, _) = pruned[-1], pts[i], pts[i + 1]
        cross = (r2 - r1) * (d3 - d1) - (d2 - d1) * (r3 - r1)
        if abs(cross) > COLLINEAR_TOL:
            pruned.append(pts[i])
    pruned.append(pts[-1])

    return TradeoffCurve(
        breakpoints=tuple((float(r), float(d)) for r, d, _ in pruned),
        saturation_rate=float(r_sat),
        saturation_distortion=float(d_sat),
        decompositions=tuple(mu for _, _, mu in pruned),
    )


def rate_requirement(p0) -> float:
    """Public rate needed for lossless recovery; independent of the key."""
    return entropy(p0)


def in_region(instance: ProblemInstance, R0: float, R: float, D: float, corners=None, curve=None) -> bool:
    if R < rate_requirement(instance.source) - MEMBERSHIP_TOL:
        return False
    if R0 < 0:
        return False
    if curve is not None:
        d_star = curve(R0)
    else:
        if corners is None:
            from .corners import enumerate_corner_points

            corners = enumerate_corner_points(instance.distortion)
        d_star, _ = solve_key_distortion_lp(corners, instance.source, R0)
    return bool(D <= d_star + MEMBERSHIP_TOL)


def grid_values(corners, p0, rates: Sequence[float]) -> np.ndarray:
    return np.array([solve_key_distortion_lp(corners, p0, r)[0] for r in rates])
