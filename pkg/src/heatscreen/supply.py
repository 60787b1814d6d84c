"""COP models, annualised cost lines and screening-curve selection.

Each technology's annual cost at heat load factor ``mu`` is a straight line
``intercept + mu * slope``: the intercept holds annualised capital plus fixed
maintenance, the slope is the fuel bill when running at full capacity all year.
The cheapest line at a cell's ``mu`` wins the cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import DEFAULT_CATALOG, TECHS, PricingScheme, Tech, TechnologySpec
from .demand import DemandConfig, HeatLoadSummary, hdd_series
from .errors import ZeroDemand
from .gridio import GridSpec, TemperatureField, check_compatible

HOURS_PER_YEAR = 8760.0
DT_MIN, DT_MAX = 15.0, 60.0
MARGIN = 0.05

# quadratic COP(dT) = c0 + c1*dT + c2*dT^2 fits for domestic heat pumps
COP_COEFFS = {
    "air": (6.81, -0.121, 0.000630),
    "ground": (8.77, -0.150, 0.000734),
}

DOMINANT = 0
MARGINAL = 1
DOMINANCE_NAMES = {DOMINANT: "Dominant", MARGINAL: "MarginallyBetter"}
NO_DEMAND = -1


def cop(sink, source, kind: str, coeffs=None):
    """Heat pump COP for a sink/source temperature pair, lift clamped to [15, 60] K.

    Works elementwise on arrays.
    """
    c0, c1, c2 = (coeffs or COP_COEFFS)[kind]
    dt = np.clip(np.asarray(sink, dtype=np.float64) - source, DT_MIN, DT_MAX)
    out = c0 + c1 * dt + c2 * dt * dt
    return float(out) if np.ndim(out) == 0 else out


def ground_temperature(daily_air) -> np.ndarray:
    """Ground temperature as the mean daily air temperature of the period."""
    return np.nanmean(np.asarray(daily_air, dtype=np.float64), axis=0)


def _service_efficiencies(spec: TechnologySpec, air, ground, coeffs=None):
    """(eta_space_heat, eta_hot_water) broadcastable to ``air``."""
    e = spec.efficiency
    if e.kind == "fixed":
        return e.eta, e.eta
    if e.kind == "heatpump":
        src = ground if e.source == "ground" else air
        c = cop(e.sink, src, e.source, coeffs)
        return c, c
    return cop(e.sink, air, "air", coeffs), e.eta


def effective_efficiencies(spec: TechnologySpec, daily_air, hdd, dhw_dd_per_day: float,
                           ground, coeffs=None) -> np.ndarray:
    """Demand-weighted harmonic-mean efficiency, vectorised over trailing axes.

    ``daily_air`` and ``hdd`` are [n_days, ...]; ``ground`` matches the
    trailing shape. Missing days are skipped. Cells without demand give NaN.
    """
    air = np.asarray(daily_air, dtype=np.float64)
    q_sh = np.asarray(hdd, dtype=np.float64)
    valid = ~(np.isnan(air) | np.isnan(q_sh))
    eta_sh, eta_dhw = _service_efficiencies(spec, np.where(valid, air, 0.0),
                                            np.asarray(ground, dtype=np.float64), coeffs)
    q_sh = np.where(valid, q_sh, 0.0)
    q_dhw = np.where(valid, dhw_dd_per_day, 0.0)
    heat = (q_sh + q_dhw).sum(axis=0)
    energy = (q_sh / eta_sh + q_dhw / eta_dhw).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(heat > 0, heat / energy, np.nan)


def effective_efficiency(spec: TechnologySpec, daily_source_temps, hdd, cfg: DemandConfig,
                         ground_temp: float, coeffs=None) -> float:
    """Single-cell effective efficiency; raises ZeroDemand if nothing is demanded."""
    eta = effective_efficiencies(spec, daily_source_temps, hdd, cfg.dhw_dd_per_day,
                                 ground_temp, coeffs)
    if np.isnan(eta):
        raise ZeroDemand(f"{spec.tech.name}: no heat demand over the series")
    return float(eta)


def crf(rate: float, lifetime: float) -> float:
    """Capital recovery factor r / (1 - (1 + r)^-n)."""
    return rate / -math.expm1(-lifetime * math.log1p(rate))


@dataclass(frozen=True)
class CostLine:
    tech: Tech
    intercept: float
    slope: float

    def cost(self, mu):
        return self.intercept + mu * self.slope


def capital_cost(spec: TechnologySpec, prices) -> float:
    """Annualised capital plus fixed maintenance, EUR/yr."""
    p = prices
    return crf(spec.discount_rate, spec.lifetime) * (p.install + p.equip) * spec.capacity \
        + p.maint * spec.capacity


def operating_cost(spec: TechnologySpec, prices, eta_eff):
    """Fuel bill at full load all year, EUR/yr; elementwise in ``eta_eff``."""
    return prices.fuel * spec.capacity * HOURS_PER_YEAR / 1000.0 / eta_eff


def cost_line(spec: TechnologySpec, prices, eta_eff: float) -> CostLine:
    if not eta_eff > 0:
        raise ValueError(f"effective efficiency must be positive, got {eta_eff}")
    return CostLine(spec.tech, capital_cost(spec, prices), float(operating_cost(spec, prices, eta_eff)))


@dataclass(frozen=True)
class Selection:
    winner: Tech
    runner_up: Tech
    mu: float
    mu_shift: float | None
    dominance: int
    tie: bool

    @property
    def dominance_name(self) -> str:
        return DOMINANCE_NAMES[self.dominance]


def crossing(a: CostLine, b: CostLine) -> float | None:
    """mu where two lines intersect, or None for parallel lines."""
    if a.slope == b.slope:
        return None
    return (b.intercept - a.intercept) / (a.slope - b.slope)


def classify(mu: float, mu_shift: float | None) -> int:
    if mu_shift is not None and mu_shift - MARGIN < mu < mu_shift + MARGIN:
        return MARGINAL
    return DOMINANT


def select_optimal(lines: list[CostLine], mu: float) -> Selection:
    """Cheapest technology at ``mu``, with its runner-up and their crossing.

    Exact ties go to the technology earliest in enum order. ``mu_shift`` is
    reported only when the crossing lies in [0, 1].
    """
    if len(lines) < 2:
        raise ValueError("need at least two cost lines")
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    ranked = sorted(lines, key=lambda ln: (ln.intercept + mu * ln.slope, ln.tech))
    best, second = ranked[0], ranked[1]
    tie = best.intercept + mu * best.slope == second.intercept + mu * second.slope
    shift = crossing(best, second)
    if shift is not None and not 0.0 <= shift <= 1.0:
        shift = None
    return Selection(best.tech, second.tech, mu, shift, classify(mu, shift), tie)


@dataclass(eq=False)
class TechnologyMap:
    """Per-cell screening result; arrays shaped like the grid.

    ``winner`` and ``runner_up`` hold Tech values, or -1 for cells without
    demand. ``mu_shift`` is NaN where the crossing is outside [0, 1].
    """

    grid: GridSpec
    mu: np.ndarray
    winner: np.ndarray
    runner_up: np.ndarray
    mu_shift: np.ndarray
    dominance: np.ndarray
    tie: np.ndarray

    @property
    def demand_cells(self) -> np.ndarray:
        return self.winner != NO_DEMAND

    def counts(self) -> dict[Tech, int]:
        return {t: int((self.winner == t).sum()) for t in TECHS}

    def csv_rows(self):
        yield ("cell_i", "cell_j", "winner", "dominance", "mu", "mu_shift", "runner_up")
        n_lat, n_lon = self.grid.shape
        for i in range(n_lat):
            for j in range(n_lon):
                w = int(self.winner[i, j])
                if w == NO_DEMAND:
                    yield (i, j, "NoDemand", "", "", "", "")
                    continue
                s = self.mu_shift[i, j]
                yield (i, j, Tech(w).name, DOMINANCE_NAMES[int(self.dominance[i, j])],
                       _fmt(self.mu[i, j]), "" if np.isnan(s) else _fmt(s),
                       Tech(int(self.runner_up[i, j])).name)


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(eq=False)
class GridLines:
    """Cost lines for every cell: intercept [n_tech], slope [n_tech, n_lat, n_lon]."""

    techs: tuple[Tech, ...]
    intercept: np.ndarray
    slope: np.ndarray

    def line(self, k: int, i: int, j: int) -> CostLine:
        return CostLine(self.techs[k], float(self.intercept[k]), float(self.slope[k, i, j]))

    def cell_lines(self, i: int, j: int) -> list[CostLine]:
        return [self.line(k, i, j) for k in range(len(self.techs))]


def grid_efficiencies(daily: TemperatureField, cfg: DemandConfig,
                      catalog: dict[Tech, TechnologySpec] = DEFAULT_CATALOG,
                      coeffs=None) -> dict[Tech, np.ndarray]:
    """Effective efficiency per technology per cell. Independent of prices."""
    hdd = hdd_series(daily, cfg)
    air = np.asarray(daily.values, dtype=np.float64)
    ground = ground_temperature(air)
    return {t: effective_efficiencies(catalog[t], air, hdd, cfg.dhw_dd_per_day, ground, coeffs)
            for t in catalog}


def grid_lines(efficiencies: dict[Tech, np.ndarray], prices: PricingScheme,
               catalog: dict[Tech, TechnologySpec] = DEFAULT_CATALOG) -> GridLines:
    techs = tuple(sorted(efficiencies))
    intercept = np.array([capital_cost(catalog[t], prices[t]) for t in techs])
    with np.errstate(invalid="ignore", divide="ignore"):
        slope = np.stack([operating_cost(catalog[t], prices[t], efficiencies[t]) for t in techs])
    return GridLines(techs, intercept, slope)


def select_grid(lines: GridLines, mu: np.ndarray, no_demand: np.ndarray, grid: GridSpec) -> TechnologyMap:
    """Vectorised select_optimal over all cells."""
    mu_f = np.where(no_demand, 0.0, mu)
    techs = np.array(lines.techs)
    cost = lines.intercept[:, None, None] + mu_f[None] * lines.slope
    cost = np.where(np.isnan(cost), np.inf, cost)
    # stable sort keeps enum order among exact ties
    order = np.argsort(cost, axis=0, kind="stable")
    w, r = order[0], order[1]
    cw = np.take_along_axis(cost, w[None], 0)[0]
    cr = np.take_along_axis(cost, r[None], 0)[0]
    aw, ar = lines.intercept[w], lines.intercept[r]
    bw = np.take_along_axis(lines.slope, w[None], 0)[0]
    br = np.take_along_axis(lines.slope, r[None], 0)[0]
    with np.errstate(invalid="ignore", divide="ignore"):
        shift = np.where(bw != br, (ar - aw) / (bw - br), np.nan)
    shift = np.where((shift >= 0.0) & (shift <= 1.0), shift, np.nan)
    marginal = (shift - MARGIN < mu_f) & (mu_f < shift + MARGIN)
    winner = np.where(no_demand, NO_DEMAND, techs[w])
    runner = np.where(no_demand, NO_DEMAND, techs[r])
    return TechnologyMap(
        grid=grid,
        mu=np.where(no_demand, np.nan, mu),
        winner=winner,
        runner_up=runner,
        mu_shift=np.where(no_demand, np.nan, shift),
        dominance=np.where(no_demand, NO_DEMAND, np.where(marginal, MARGINAL, DOMINANT)),
        tie=~no_demand & (cw == cr),
    )


def screen_grid(daily: TemperatureField, summary: HeatLoadSummary, prices: PricingScheme,
                catalog: dict[Tech, TechnologySpec] = DEFAULT_CATALOG,
                cfg: DemandConfig = DemandConfig(), coeffs=None) -> TechnologyMap:
    """Cost-optimal technology in every cell of ``daily`` under ``prices``."""
    check_compatible(daily.grid, summary.grid)
    eff = grid_efficiencies(daily, cfg, catalog, coeffs)
    lines = grid_lines(eff, prices, catalog)
    no_demand = summary.no_demand | np.any(np.isnan(lines.slope), axis=0)
    return select_grid(lines, summary.mu, no_demand, daily.grid)


def screening_curve(lines: list[CostLine], capacity: float, step: float = 0.01):
    """Rows of (mu, cost per kW for each line) on a regular mu grid over [0, 1]."""
    n = int(round(1.0 / step))
    header = ("mu",) + tuple(ln.tech.name for ln in lines)
    rows = [header]
    for k in range(n + 1):
        mu = k / n
        rows.append((f"{mu:.2f}",) + tuple(_fmt(ln.cost(mu) / capacity) for ln in lines))
    return rows
