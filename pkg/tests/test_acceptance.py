"""Acceptance criteria, each at its stated tolerance.

Every test records a single PASS/FAIL line that the conftest hook prints at
the end of the run.
"""

import math
import time

import numpy as np
import pytest

from netsecgame.game import PayoffMatrix, load_table1, solve_zero_sum, verify_saddle
from netsecgame.graph import algebraic_monitor_set, distance, feasible_monitor_set
from netsecgame.lti import (
    channel_table,
    check_no_closed_positive_real_zeros,
    relative_degree,
    zeros_of,
)
from netsecgame.oog import Feasibility, grid_gain_table, magnitude_squared
from netsecgame.sim import (
    AttackSignal,
    asymptotic_band,
    default_horizon,
    default_step,
    energy_ratio_sweep,
    loglog_slope,
    probe_frequency,
    simulate,
)
from sample import ACCEPTANCE_LINES, desk_sample, sample_gains


def report(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_table1_equilibrium():
    t0 = time.perf_counter()
    table = load_table1()
    eq = solve_zero_sum(table)
    elapsed = time.perf_counter() - t0
    ok = (
        abs(eq.value - 1.4669) <= 1e-4
        and eq.support_a == (2,)
        and eq.support_m == (6,)
        and table.feasible_monitors == [3, 6]
        and verify_saddle(table, eq)
        and elapsed < 1.0
    )
    report(1, ok, f"value {eq.value:.6g}, attack support {list(eq.support_a)}, "
                  f"monitor support {list(eq.support_m)}, feasible columns {table.feasible_monitors}, "
                  f"{elapsed * 1e3:.1f} ms")


def test_criterion_2_bounded_iff_relative_degree():
    t0 = time.perf_counter()
    data = sample_gains()
    elapsed = time.perf_counter() - t0
    exceptions = axis = triples = 0
    for g, table in data:
        for (t, a, m), (sc, res) in table.items():
            triples += 1
            if res.reason is Feasibility.IMAGINARY_AXIS_ZERO:
                axis += 1
            predicted = relative_degree(g.laplacian, m, a) <= relative_degree(g.laplacian, t, a)
            if res.bounded != predicted:
                exceptions += 1
    ok = exceptions == 0 and axis == 0 and len(data) >= 100 and elapsed < 300
    report(2, ok, f"{len(data)} graphs, {triples} triples, {exceptions} exceptions, "
                  f"{axis} imaginary-axis zeros, {elapsed:.1f} s")


def test_criterion_3_no_closed_positive_real_zeros():
    bad = channels = 0
    for g in desk_sample():
        tab = channel_table(g)
        for u in g.vertices:
            for a in g.vertices:
                channels += 1
                zs = zeros_of(tab.numerator(u, a), tab.relative_degree(u, a))
                if not check_no_closed_positive_real_zeros(zs, 1e-7, 1e-7):
                    bad += 1
    report(3, bad == 0, f"{channels} channel numerators, {bad} with a root in Re >= -1e-7, |Im| <= 1e-7")


def test_criterion_4_algebraic_condition_sufficient():
    bad = hits = 0
    for g in desk_sample():
        for t in g.vertices:
            feasible = set(feasible_monitor_set(g, t))
            for m in algebraic_monitor_set(g, t):
                hits += 1
                bad += m not in feasible
    report(4, bad == 0, f"{hits} algebraic-condition vertices, {bad} outside the feasible set")


def test_criterion_5_relative_degree_is_distance_plus_one():
    bad = pairs = 0
    for g in desk_sample():
        lap = g.laplacian
        assert lap.dtype == object  # exact integer Markov parameters
        for u in g.vertices:
            for a in g.vertices:
                pairs += 1
                bad += relative_degree(lap, u, a) != distance(g, u, a) + 1
    report(5, bad == 0, f"{pairs} channels, {bad} mismatches")


# The 1e5-point grid spans [1e-6, 1e6]; cases whose supremum is the w -> inf
# limit need the grid to reach far past the last pole before it gets within 1e-6.
GRID_OMEGA_MAX = 1e6


def test_criterion_6_engine_matches_grid_oracle():
    worst = 0.0
    below = bounded = 0
    for g, table in sample_gains():
        grid = grid_gain_table(g, omega_max=GRID_OMEGA_MAX, n_points=100_000)
        for (t, a, m), (_, res) in table.items():
            if not res.bounded:
                continue
            bounded += 1
            lower = grid[t - 1, a - 1, m - 1]
            # round-off slack for the ratio evaluation itself
            if res.value < lower * (1 - 1e-12):
                below += 1
            worst = max(worst, abs(res.value - lower) / res.value)
    ok = worst <= 1e-6 and below == 0
    report(6, ok, f"{bounded} bounded pairs, worst relative gap {worst:.2e}, {below} below the grid")


def _pick(rng, items, count):
    idx = rng.choice(len(items), size=min(count, len(items)), replace=False)
    return [items[i] for i in sorted(idx)]


def test_criterion_7_simulation_attains_gain():
    rng = np.random.default_rng(7)
    interior, edge, unbounded = [], [], []
    for g, table in sample_gains():
        for key, (sc, res) in table.items():
            if res.bounded:
                (interior if 0 < res.omega_star < math.inf else edge).append((g, sc, res))
            elif res.reason is Feasibility.RELATIVE_DEGREE:
                unbounded.append((g, sc, res))
    chosen = _pick(rng, interior, 10)
    chosen += _pick(rng, edge, 20 - len(chosen))
    ratios = []
    for g, sc, res in chosen:
        nt, nm = magnitude_squared(sc.numerator_target), magnitude_squared(sc.numerator_monitor)
        start = g.algebraic_connectivity if res.omega_star == 0 else g.lambda_max
        om = probe_frequency(nt, nm, res.value, res.omega_star, start)
        f = om / (2 * math.pi)
        tr = simulate(g, sc.roles, AttackSignal.cosine(f), default_horizon(g, f), default_step(g, f))
        ratios.append(tr.steady_ratio() / res.value)
    bounded_ok = len(ratios) == 20 and all(0.95 <= r <= 1.05 for r in ratios)

    slopes = []
    for g, sc, res in _pick(rng, unbounded, 20):
        order = 2 * (sc.r_monitor - sc.r_target)
        nt, nm = magnitude_squared(sc.numerator_target), magnitude_squared(sc.numerator_monitor)
        lo, hi = asymptotic_band(nt, nm, order, g.lambda_max)
        freqs = np.geomspace(lo, hi, 5) / (2 * math.pi)
        slopes.append(loglog_slope(energy_ratio_sweep(g, sc.roles, freqs)) / order)
    slope_ok = len(slopes) == 20 and all(abs(s - 1) <= 0.1 for s in slopes)
    n_interior = min(10, len(interior))
    report(
        7, bounded_ok and slope_ok,
        f"{n_interior} interior-peak and {20 - n_interior} edge-peak scenarios, bounded ratio/gain in [{min(ratios):.4f}, {max(ratios):.4f}] over {len(ratios)} scenarios; "
        f"slope/2(r_m - r_t) in [{min(slopes):.4f}, {max(slopes):.4f}] over {len(slopes)} scenarios",
    )


def test_criterion_8_lp_correctness():
    rng = np.random.default_rng(8)
    failures = 0
    worst_gap = 0.0
    for _ in range(100):
        shape = rng.integers(2, 9, size=2)
        a = rng.uniform(0, 10, size=shape)
        pm = PayoffMatrix.from_array(a)
        eq = solve_zero_sum(pm)
        lo, hi = a.min(axis=1).max(), a.max(axis=0).min()
        worst_gap = max(worst_gap, eq.duality_gap)
        if not (lo - 1e-12 <= eq.value <= hi + 1e-12 and eq.duality_gap <= 1e-8 and verify_saddle(pm, eq)):
            failures += 1
    sym = PayoffMatrix.from_array([[3, 1], [1, 3]])
    eq = solve_zero_sum(sym)
    sym_ok = (
        abs(eq.value - 2) <= 1e-12
        and np.allclose(eq.p_a, 0.5, atol=1e-12)
        and np.allclose(eq.p_m, 0.5, atol=1e-12)
    )
    report(8, failures == 0 and sym_ok,
           f"100 random games, {failures} failures, worst duality gap {worst_gap:.1e}; "
           f"[[3,1],[1,3]] value {eq.value:.12g}")
