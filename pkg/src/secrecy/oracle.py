"""Brute-force search over auxiliary channels ``p(u|x)``.

Every channel yields an achievable pair: key rate ``H(X|U)`` and the
distortion the eavesdropper suffers when it only learns ``U``.  Searching
channels directly gives a lower bound on the forced distortion that is
independent of the corner-point linear program, which makes it a useful
cross-check of that program.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .adversary import min_distortion
from .core import ProblemInstance, ValidationError, conditional_entropy

KEY_SLACK = 1e-6
GRID_STEP = 0.05
GRID_LIMIT = 6


@dataclass(frozen=True, eq=False)
class AuxChannel:
    """Conditional table ``cond[u, x] = p(u | x)``; each column sums to one."""

    cond: np.ndarray

    def __post_init__(self):
        cond = np.array(self.cond, dtype=float, copy=True)
        if cond.ndim != 2 or 0 in cond.shape:
            raise ValidationError(f"channel must be a non-empty 2-D table, got shape {cond.shape}")
        if not np.all(np.isfinite(cond)) or cond.min() < -1e-12:
            raise ValidationError("channel has negative or non-finite entries")
        sums = cond.sum(axis=0)
        if np.max(np.abs(sums - 1.0)) > 1e-9:
            raise ValidationError(f"channel columns must sum to 1, got {sums}")
        cond = np.clip(cond, 0.0, None)
        cond.setflags(write=False)
        object.__setattr__(self, "cond", cond)

    @property
    def u_size(self) -> int:
        return self.cond.shape[0]

    def joint(self, p0: np.ndarray) -> np.ndarray:
        return self.cond * p0[None, :]

    @classmethod
    def identity(cls, size: int) -> "AuxChannel":
        return cls(np.eye(size))

    @classmethod
    def constant(cls, n_source: int) -> "AuxChannel":
        return cls(np.ones((1, n_source)))


@dataclass(frozen=True)
class AchievablePoint:
    key_rate: float
    distortion: float


@dataclass(frozen=True)
class OracleResult:
    d_lower: float
    best: AuxChannel | None
    point: AchievablePoint | None
    evaluated: int


def evaluate_channel(instance: ProblemInstance, ch: AuxChannel) -> AchievablePoint:
    p0 = instance.source.probs
    if ch.cond.shape[1] != p0.size:
        raise ValidationError(
            f"channel has {ch.cond.shape[1]} input columns but the source has {p0.size} symbols"
        )
    joint = ch.joint(p0)
    key = conditional_entropy(joint / joint.sum())
    dist = 0.0
    for u in range(ch.u_size):
        pu = joint[u].sum()
        if pu <= 0:
            continue
        dist += pu * min_distortion(joint[u] / pu, instance.distortion)
    return AchievablePoint(key_rate=key, distortion=float(dist))


def _plogp(a: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(a > 0, a * np.log2(np.where(a > 0, a, 1.0)), 0.0)


def batch_evaluate(W: np.ndarray, p0: np.ndarray, D: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Key rate and distortion for a stack of channels ``W[..., u, x]``."""
    joint = W * p0
    pu = joint.sum(axis=-1)
    key = _plogp(pu).sum(axis=-1) - _plogp(joint).sum(axis=(-2, -1))
    dist = (joint @ D).min(axis=-1).sum(axis=-1)
    return np.maximum(key, 0.0), dist


def _compositions(total: int, parts: int):
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield out


def _grid_search(p0, D, R0, u_size):
    steps = int(round(1 / GRID_STEP))
    cols = np.array(list(_compositions(steps, u_size)), dtype=float) / steps  # (C, U)
    nx = p0.size
    idx = np.array(list(itertools.product(range(len(cols)), repeat=nx)))
    W = np.transpose(cols[idx], (0, 2, 1))  # (N, U, X)
    key, dist = batch_evaluate(W, p0, D)
    ok = key <= R0 + KEY_SLACK
    return W[ok], key[ok], dist[ok], len(W)


def _initial_channels(rng, R, u_size, nx, p0, D, R0):
    rand = rng.dirichlet(np.ones(u_size), size=(R, nx)).transpose(0, 2, 1)
    det = np.zeros((R, u_size, nx))
    for r in range(R):
        labels = rng.permutation(max(u_size, nx))[:nx] % u_size
        det[r, labels, np.arange(nx)] = 1.0
    ts = np.concatenate([[1.0], 0.5 ** np.arange(1, 12), [0.0]])
    W = det.copy()
    found = np.zeros(R, dtype=bool)
    for t in ts:
        cand = t * rand + (1 - t) * det
        key, _ = batch_evaluate(cand, p0, D)
        take = (~found) & (key <= R0 + KEY_SLACK)
        W[take] = cand[take]
        found |= take
    return W, found


def hill_climb(p0, D, R0, u_size, restarts, rng, levels=12, iters=120):
    """Random-restart hill climbing, all restarts advanced in lockstep."""
    nx = p0.size
    W, alive = _initial_channels(rng, restarts, u_size, nx, p0, D, R0)
    key, dist = batch_evaluate(W, p0, D)
    dist = np.where(alive, dist, -np.inf)
    steps = 0.1 * (1e-3) ** (np.arange(levels) / max(levels - 1, 1))
    rows = np.arange(restarts)
    for step in steps:
        for it in range(iters):
            noise = rng.normal(0.0, step, size=W.shape)
            if it % 2 == 0:
                mask = np.zeros((restarts, 1, nx))
                mask[rows, 0, rng.integers(nx, size=restarts)] = 1.0
                noise *= mask
            prop = np.clip(W + noise, 0.0, None)
            sums = prop.sum(axis=1, keepdims=True)
            bad = (sums <= 1e-15).any(axis=(1, 2))
            prop = prop / np.where(sums > 1e-15, sums, 1.0)
            k2, d2 = batch_evaluate(prop, p0, D)
            better = (d2 > dist) | ((d2 == dist) & (k2 < key))
            acc = alive & ~bad & (k2 <= R0 + KEY_SLACK) & better
            W[acc] = prop[acc]
            key[acc] = k2[acc]
            dist[acc] = d2[acc]
    return W, key, dist


def oracle_max_distortion(
    instance: ProblemInstance,
    R0: float,
    u_size: int | None = None,
    restarts: int = 200,
    seed: int = 0,
    levels: int = 12,
    iters: int = 120,
) -> OracleResult:
    """Best distortion found among channels whose key rate fits in ``R0``.

    ``u_size`` defaults to the number of corner points.  When no searched
    channel meets the budget the result has ``d_lower = -inf``.
    """
    p0 = instance.source.probs
    D = instance.distortion.values
    if u_size is None:
        from .corners import enumerate_corner_points

        u_size = len(enumerate_corner_points(instance.distortion))
    if u_size < 1 or restarts < 1:
        raise ValueError("u_size and restarts must be at least 1")
    rng = np.random.default_rng(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))

    W, key, dist = hill_climb(p0, D, R0, u_size, restarts, rng, levels, iters)
    evaluated = restarts * (1 + levels * iters)
    if u_size * p0.size <= GRID_LIMIT:
        gW, gkey, gdist, n = _grid_search(p0, D, R0, u_size)
        evaluated += n
        W = np.concatenate([W, gW])
        key = np.concatenate([key, gkey])
        dist = np.concatenate([dist, gdist])

    feasible = np.isfinite(dist) & (key <= R0 + KEY_SLACK)
    if not feasible.any():
        return OracleResult(-np.inf, None, None, evaluated)
    # max by value, then lexicographically smallest channel, so order is irrelevant
    top = dist[feasible].max()
    idx = np.flatnonzero(feasible & (dist == top))
    flat = W[idx].reshape(len(idx), -1)
    pick = idx[np.lexsort(flat.T[::-1])[0]]
    best = AuxChannel(W[pick])
    return OracleResult(float(top), best, AchievablePoint(float(key[pick]), float(top)), evaluated)
