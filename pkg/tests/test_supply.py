import math

import numpy as np
import pytest

from heatscreen.catalog import (
    DEFAULT_CATALOG,
    TECHS,
    Tech,
    balanced_scheme,
    unperturbed_scheme,
    with_overrides,
)
from heatscreen.demand import DemandConfig, heat_load_factor
from heatscreen.errors import GridMismatch, ZeroDemand
from heatscreen.gridio import GridSpec
from heatscreen.supply import (
    DOMINANT,
    MARGINAL,
    NO_DEMAND,
    CostLine,
    classify,
    cop,
    cost_line,
    crf,
    crossing,
    effective_efficiency,
    grid_efficiencies,
    grid_lines,
    screen_grid,
    screening_curve,
    select_optimal,
)
from tests.helpers import make_daily

CAT = DEFAULT_CATALOG


def test_cop_examples():
    assert cop(55, 45, "air") == pytest.approx(6.81 - 0.121 * 15 + 0.000630 * 225, abs=1e-12)
    assert cop(55, 45, "air") == pytest.approx(5.13675, abs=1e-12)
    assert cop(55, 5, "ground") == pytest.approx(3.105, abs=1e-12)
    assert cop(55, -20, "air") == pytest.approx(6.81 - 7.26 + 2.268, abs=1e-12)
    assert cop(55, -20, "air") == pytest.approx(1.818, abs=1e-12)
    assert cop(55, -40, "air") == cop(55, -5, "air")


def test_cop_sweep_positive_decreasing_ground_above_air():
    dts = np.round(np.arange(15.0, 60.0 + 1e-9, 0.1), 10)
    air = cop(55.0, 55.0 - dts, "air")
    ground = cop(55.0, 55.0 - dts, "ground")
    for c in (air, ground):
        assert np.all(c > 0)
        assert np.all(np.diff(c) < 0)
    assert np.all(ground > air)


def test_fixed_efficiency_passes_through():
    temps = np.array([-10.0, 0.0, 10.0])
    hdd = np.maximum(0, 17 - temps)
    eta = effective_efficiency(CAT[Tech.GasBoiler], temps, hdd, DemandConfig(), 5.0)
    assert eta == pytest.approx(0.97, rel=1e-15)


def test_hybrid_without_hot_water_is_air_cop_mean():
    temps = np.array([-10.0, 0.0, 10.0])
    hdd = np.maximum(0, 17 - temps)
    eta = effective_efficiency(CAT[Tech.A2A_EB], temps, hdd, DemandConfig(dhw_dd_per_day=0.0), 0.0)
    c = [cop(30, t, "air") for t in temps]
    oracle = sum(hdd) / sum(h / x for h, x in zip(hdd, c))
    assert eta == pytest.approx(oracle, rel=1e-13)


def test_two_day_harmonic_mean():
    # linear air COP 6 - 0.1*dT: source temps give dT 20 and 40 -> COP 4 and 2
    coeffs = {"air": (6.0, -0.1, 0.0), "ground": (8.77, -0.15, 0.000734)}
    spec = CAT[Tech.ASHP]
    eta = effective_efficiency(spec, [35.0, 15.0], [5.0, 5.0], DemandConfig(dhw_dd_per_day=0.0),
                               10.0, coeffs)
    assert eta == pytest.approx(2 / (1 / 2 + 1 / 4), rel=1e-13)
    assert round(eta, 3) == 2.667


def test_zero_demand_raises():
    with pytest.raises(ZeroDemand):
        effective_efficiency(CAT[Tech.ASHP], [20.0], [0.0], DemandConfig(dhw_dd_per_day=0.0), 20.0)


def test_gas_cost_line_balanced():
    p = balanced_scheme()[Tech.GasBoiler]
    line = cost_line(CAT[Tech.GasBoiler], p, 0.97)
    r, n = 0.04, 20
    assert crf(r, n) == pytest.approx(r / (1 - (1 + r) ** -n), rel=1e-13)
    assert round(crf(r, n), 6) == 0.073582
    assert line.intercept == pytest.approx(413.25, abs=0.01)
    # 65 * 10 kW * 8760 h / 1000 / 0.97
    assert line.slope == pytest.approx(65 * 87.6 / 0.97, rel=1e-13)
    assert line.slope == pytest.approx(5870.10, abs=0.01)


def test_crf_zero_rate_limit():
    assert crf(1e-9, 20) == pytest.approx(1 / 20, rel=1e-6)


def test_capacity_doubling_scales_line():
    p = balanced_scheme()[Tech.GSHP]
    cat2 = with_overrides(CAT, {f"{t.key}.capacity": "20" for t in TECHS})
    a = cost_line(CAT[Tech.GSHP], p, 3.1)
    b = cost_line(cat2[Tech.GSHP], p, 3.1)
    assert b.intercept == pytest.approx(2 * a.intercept, rel=1e-14)
    assert b.slope == pytest.approx(2 * a.slope, rel=1e-14)


def test_select_optimal_example():
    lines = [CostLine(Tech.GasBoiler, 1.0, 10.0), CostLine(Tech.GSHP, 2.0, 1.0)]
    s = select_optimal(lines, 0.05)
    assert s.winner == Tech.GasBoiler and s.runner_up == Tech.GSHP
    assert s.mu_shift == pytest.approx(1 / 9, rel=1e-15)
    # |0.05 - 1/9| = 0.061 lies outside the 0.05 band
    assert s.dominance == DOMINANT
    assert select_optimal(lines, 0.08).dominance == MARGINAL
    assert select_optimal(lines, 0.5).winner == Tech.GSHP


def test_identical_lines_tie_goes_to_gas():
    lines = [CostLine(t, 5.0, 3.0) for t in reversed(TECHS)]
    s = select_optimal(lines, 0.4)
    assert s.winner == Tech.GasBoiler and s.tie
    assert s.runner_up == Tech.OilBoiler
    assert s.mu_shift is None and s.dominance == DOMINANT


def test_crossing_outside_unit_interval_not_reported():
    lines = [CostLine(Tech.GasBoiler, 1.0, 1.0), CostLine(Tech.OilBoiler, 5.0, 2.0)]
    s = select_optimal(lines, 0.5)
    assert crossing(*lines) == pytest.approx(-4.0)
    assert s.mu_shift is None


def test_select_optimal_preconditions():
    with pytest.raises(ValueError):
        select_optimal([CostLine(Tech.GasBoiler, 1, 1)], 0.5)
    with pytest.raises(ValueError):
        select_optimal([CostLine(Tech.GasBoiler, 1, 1), CostLine(Tech.GSHP, 2, 0.5)], 1.2)


def test_classify_band_is_open():
    assert classify(0.2, 0.1) == DOMINANT
    assert classify(0.3, None) == DOMINANT
    assert classify(0.12, 0.1) == MARGINAL


def random_lines(rng, n=7):
    return [CostLine(TECHS[k], float(rng.uniform(100, 2000)), float(rng.uniform(200, 12000)))
            for k in range(n)]


def test_scale_invariance(rng):
    for _ in range(200):
        lines = random_lines(rng)
        c = float(rng.uniform(0.1, 50))
        scaled = [CostLine(ln.tech, ln.intercept * c, ln.slope * c) for ln in lines]
        for mu in (0.0, 0.13, 0.5, 0.97):
            a, b = select_optimal(lines, mu), select_optimal(scaled, mu)
            assert (a.winner, a.runner_up) == (b.winner, b.runner_up)
            if a.mu_shift is None:
                assert b.mu_shift is None
            else:
                assert b.mu_shift == pytest.approx(a.mu_shift, rel=1e-12)


def test_crossing_consistency(rng):
    for _ in range(500):
        lines = random_lines(rng)
        s = select_optimal(lines, float(rng.uniform()))
        if s.mu_shift is None:
            continue
        by = {ln.tech: ln for ln in lines}
        a, b = by[s.winner].cost(s.mu_shift), by[s.runner_up].cost(s.mu_shift)
        assert abs(a - b) <= 1e-9 * max(abs(a), abs(b))


def test_winner_matches_fine_scan(rng):
    grid = np.arange(0, 10001) / 10000.0
    for _ in range(1000):
        lines = random_lines(rng)
        a = np.array([ln.intercept for ln in lines])
        b = np.array([ln.slope for ln in lines])
        k = int(rng.integers(0, grid.size))
        mu = grid[k]
        costs = a + mu * b
        assert select_optimal(lines, mu).winner == lines[int(np.argmin(costs))].tech


def test_gshp_slope_falls_with_warming():
    p = balanced_scheme()
    d = np.arange(3 * 365)
    base = 6.0 - 10.0 * np.cos(2 * np.pi * d / 365.0)
    slopes = []
    for delta in (0.0, 1.0, 2.5, 4.0):
        daily = make_daily(base + delta)
        eff = grid_efficiencies(daily, DemandConfig())
        slopes.append(grid_lines(eff, p).slope[list(TECHS).index(Tech.GSHP), 0, 0])
    assert all(x >= y for x, y in zip(slopes, slopes[1:]))


def scalar_winner(temps, prices, cfg=DemandConfig()):
    """Per-cell oracle: scalar efficiency, cost line and plain argmin loop."""
    temps = np.asarray(temps, dtype=float)
    hdd = np.array([max(0.0, cfg.t_threshold - t) for t in temps])
    ground = float(np.mean(temps))
    peak = max(0.0, cfg.t_threshold - float(np.min(temps))) + cfg.dhw_dd_per_day
    mu = float(np.mean(hdd + cfg.dhw_dd_per_day)) / peak
    lines = [cost_line(CAT[t], prices[t], effective_efficiency(CAT[t], temps, hdd, cfg, ground))
             for t in TECHS]
    best = None
    for ln in lines:
        if best is None or ln.cost(mu) < best.cost(mu):
            best = ln
    others = [ln for ln in lines if ln.tech != best.tech]
    second = min(others, key=lambda ln: (ln.cost(mu), ln.tech))
    shift = (second.intercept - best.intercept) / (best.slope - second.slope)
    return best.tech, mu, (shift if 0 <= shift <= 1 else None)


def test_single_cell_grid_matches_select_optimal():
    d = np.arange(2 * 365)
    daily = make_daily(7.0 - 11.0 * np.cos(2 * np.pi * d / 365.0))
    cfg = DemandConfig()
    summary = heat_load_factor(daily, cfg)
    prices = balanced_scheme()
    tmap = screen_grid(daily, summary, prices)
    eff = grid_efficiencies(daily, cfg)
    lines = [cost_line(CAT[t], prices[t], float(eff[t][0, 0])) for t in TECHS]
    s = select_optimal(lines, float(summary.mu[0, 0]))
    assert tmap.winner[0, 0] == s.winner and tmap.runner_up[0, 0] == s.runner_up
    assert tmap.dominance[0, 0] == s.dominance
    if s.mu_shift is None:
        assert math.isnan(tmap.mu_shift[0, 0])
    else:
        assert tmap.mu_shift[0, 0] == pytest.approx(s.mu_shift, rel=1e-12)


def test_uniform_grid_constant_winner():
    d = np.arange(365)
    series = 5.0 - 12.0 * np.cos(2 * np.pi * d / 365.0)
    daily = make_daily(np.broadcast_to(series[:, None, None], (365, 4, 3)).copy())
    tmap = screen_grid(daily, heat_load_factor(daily, DemandConfig()), balanced_scheme())
    assert np.unique(tmap.winner).size == 1


def gradient_field(n=20, years=2):
    d = np.arange(years * 365)
    season = -np.cos(2 * np.pi * d / 365.0)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    mean = 12.0 - 10.0 * i / (n - 1) + 0.0 * j
    amp = 4.0 + 10.0 * j / (n - 1) + 0.0 * i
    return mean[None] + amp[None] * season[:, None, None]


def test_gradient_grid_matches_scalar_oracle():
    v = gradient_field()
    daily = make_daily(v)
    prices = balanced_scheme()
    tmap = screen_grid(daily, heat_load_factor(daily, DemandConfig()), prices)
    n_lat, n_lon = tmap.grid.shape
    for i in range(n_lat):
        for j in range(n_lon):
            w, mu, shift = scalar_winner(v[:, i, j], prices)
            assert tmap.winner[i, j] == w
            assert tmap.mu[i, j] == pytest.approx(mu, rel=1e-12)
            if shift is None:
                assert math.isnan(tmap.mu_shift[i, j])
            else:
                assert tmap.mu_shift[i, j] == pytest.approx(shift, rel=1e-9)
    assert len(set(tmap.winner.ravel().tolist())) > 1


def test_no_demand_cells_flagged():
    v = np.stack([np.full(10, 25.0), np.full(10, 0.0)], axis=1)[:, None, :]
    daily = make_daily(v)
    cfg = DemandConfig(dhw_dd_per_day=0.0)
    tmap = screen_grid(daily, heat_load_factor(daily, cfg), balanced_scheme(), cfg=cfg)
    assert tmap.winner[0, 0] == NO_DEMAND and tmap.winner[0, 1] != NO_DEMAND
    rows = list(tmap.csv_rows())
    assert rows[1][2] == "NoDemand"


def test_screen_grid_mismatch():
    a = make_daily(np.zeros((5, 2, 2)))
    b = make_daily(np.zeros((5, 2, 2)), grid=GridSpec(2, 2, 0, 0, 1, 1))
    with pytest.raises(GridMismatch):
        screen_grid(a, heat_load_factor(b, DemandConfig()), balanced_scheme())


def test_screening_curve_rows():
    lines = [CostLine(Tech.GasBoiler, 400.0, 5000.0), CostLine(Tech.GSHP, 1000.0, 2000.0)]
    rows = screening_curve(lines, 10.0)
    assert rows[0] == ("mu", "GasBoiler", "GSHP")
    assert len(rows) == 102
    assert rows[51][0] == "0.50" and float(rows[51][1]) == pytest.approx(290.0)


def test_unperturbed_prices_positive_lines():
    p = unperturbed_scheme()
    for t in TECHS:
        ln = cost_line(CAT[t], p[t], 2.5 if t in (Tech.ASHP, Tech.GSHP) else 0.95)
        assert ln.intercept > 0 and ln.slope > 0
