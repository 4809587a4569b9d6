"""Acceptance criteria, each printed as one PASS/FAIL line."""

import time

import numpy as np
import pytest

from secrecy import (
    DistortionMatrix,
    Pmf,
    ProblemInstance,
    enumerate_corner_points,
    entropy,
    solve_key_distortion_lp,
    tradeoff_curve,
)
from secrecy.cli import auto_channel
from secrecy.oracle import oracle_max_distortion
from secrecy.scheme_sim import SchemeConfig, run_monte_carlo

from oracles import binary_closed_form, grid_scan_corners, h2, random_matrix, random_pmf

H2 = DistortionMatrix.hamming(2)
P = 0.25
BINARY = ProblemInstance([1 - P, P], H2)


def test_binary_closed_form(criterion):
    start = time.perf_counter()
    corners = enumerate_corner_points(H2)
    worst = 0.0
    for p in (0.1, 0.25, 0.4):
        src = Pmf([1 - p, p])
        for r0 in [2 * p * k / 10 for k in range(11)] + [1.5 * 2 * p]:
            d, _ = solve_key_distortion_lp(corners, src, r0)
            worst = max(worst, abs(d - binary_closed_form(p, r0)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 1.0
    criterion(ok, f"max |LP - min(R0, 2p)/2| = {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_saturation_below_entropy(criterion):
    corners = enumerate_corner_points(H2)
    worst, margins = 0.0, []
    for p in (0.1, 0.25, 0.4):
        curve = tradeoff_curve(corners, [1 - p, p])
        worst = max(worst, abs(curve.saturation_rate - 2 * p))
        margins.append(h2(p) - curve.saturation_rate)
    ok = worst <= 1e-9 and min(margins) > 0
    criterion(ok, f"|rate - 2p| <= {worst:.2e}, min H(p) - 2p = {min(margins):.4f}")
    assert ok


def test_naive_padding_suboptimal(criterion):
    corners = enumerate_corner_points(H2)
    h = entropy(BINARY.source)
    worst = np.inf
    for r0 in np.linspace(0, 2 * P, 51)[1:-1]:
        lp, _ = solve_key_distortion_lp(corners, BINARY.source, r0)
        naive = r0 / h * P
        worst = min(worst, (lp - naive) / r0)
    ok = worst >= 0.05
    criterion(ok, f"min (LP - naive) / R0 over (0, 2p) = {worst:.4f} (need >= 0.05)")
    assert ok


def test_corner_grid_equivalence(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for i in range(25):
        nx = 2 if i % 2 == 0 else 3
        D = random_matrix(rng, nx, nx)
        cs = np.array([c.p.probs for c in enumerate_corner_points(D)])
        grid = grid_scan_corners(D, 200)
        worst = max(
            worst,
            np.abs(grid[:, None] - cs[None]).max(-1).min(1).max(),
            np.abs(cs[:, None] - grid[None]).max(-1).min(1).max(),
        )
    elapsed = time.perf_counter() - start
    ok = worst <= 2 / 200 and elapsed < 30
    criterion(ok, f"worst L-inf mismatch {worst:.4f} (limit 0.01), {elapsed:.1f}s")
    assert ok


def test_oracle_lp_agreement(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(12345)
    cases = sound = close = 0
    for i in range(20):
        inst = ProblemInstance(random_pmf(rng, 3), random_matrix(rng, 3, 3))
        corners = enumerate_corner_points(inst.distortion)
        curve = tradeoff_curve(corners, inst.source)
        for frac in (0.25, 0.5, 0.9):
            r0 = frac * curve.saturation_rate
            d_star, _ = solve_key_distortion_lp(corners, inst.source, r0)
            res = oracle_max_distortion(inst, r0, u_size=len(corners), restarts=500, seed=i)
            cases += 1
            sound += res.d_lower <= d_star + 1e-6
            close += res.d_lower >= d_star - 1e-2
    elapsed = time.perf_counter() - start
    ok = sound == cases and close >= 0.95 * cases and elapsed < 300
    criterion(ok, f"sound {sound}/{cases}, within 1e-2 {close}/{cases}, {elapsed:.0f}s")
    assert ok


def test_curve_shape(criterion):
    rng = np.random.default_rng(7)
    failures = []
    for i in range(30):
        nx = (2, 3, 4)[i % 3]
        D = random_matrix(rng, nx, int(rng.integers(2, 5)))
        p0 = random_pmf(rng, nx)
        curve = tradeoff_curve(enumerate_corner_points(D), p0)
        grid = np.linspace(0, entropy(p0) + 0.5, 401)
        vals = curve(grid)
        mids = curve((grid[:-2] + grid[2:]) / 2)
        checks = {
            "nondecreasing": np.all(np.diff(vals) >= -1e-9),
            "concave": np.all(mids >= (vals[:-2] + vals[2:]) / 2 - 1e-9),
            "start": abs(vals[0] - p0 @ D.min(axis=1)) <= 1e-9,
            "saturation": curve.saturation_rate <= entropy(p0) + 1e-9,
        }
        failures += [f"{i}:{k}" for k, v in checks.items() if not v]
    ok = not failures
    criterion(ok, "30 random curves" + ("" if ok else f", failures {failures}"))
    assert ok


@pytest.fixture(scope="module")
def auto_reveal():
    return auto_channel(BINARY, 0.5)


def test_simulator_trend(criterion, auto_reveal):
    start = time.perf_counter()
    report = run_monte_carlo(SchemeConfig(BINARY, auto_reveal, 12, eps=0.15, seed=0), 10_000)
    elapsed = time.perf_counter() - start
    ok = (
        report.decode_error_rate < 0.1
        and abs(report.per_letter_distortion - 0.25) <= 0.03
        and report.pad_mutual_information < 0.01
        and elapsed < 120
    )
    criterion(
        ok,
        f"decode error {report.decode_error_rate:.4f}, per-letter {report.per_letter_distortion:.4f}, "
        f"pad MI {report.pad_mutual_information:.4f} bits, {elapsed:.1f}s",
    )
    assert ok


def test_exact_causal_sanity(criterion, auto_reveal):
    report = run_monte_carlo(
        SchemeConfig(BINARY, auto_reveal, 10, eps=0.15, seed=0), 10_000, exact_causal=True
    )
    exact, per_letter = report.exact_causal_distortion, report.per_letter_distortion
    ok = per_letter - 0.05 <= exact <= per_letter
    criterion(ok, f"exact {exact:.4f}, per-letter {per_letter:.4f}, gap {per_letter - exact:.4f}")
    assert ok
