"""Degree-days, design temperatures and heat load factors.

Demand is expressed in degree-day equivalents throughout. A day's space-heat
demand is its heating degree-days ``max(0, T0 - T)``; hot water adds a constant
``dhw_dd_per_day``. The heat load factor of a cell is its mean daily demand
divided by the demand on the design day (the coldest daily mean of the period).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import AllMissingCell, ConfigError, WrongStep, ZeroPeak
from .gridio import STEP_3H, STEP_DAY, GridSpec, TemperatureField

log = logging.getLogger(__name__)

SAMPLES_PER_DAY = STEP_DAY // STEP_3H
MIN_VALID_SAMPLES = 4


@dataclass(frozen=True)
class DemandConfig:
    t_threshold: float = 17.0
    dhw_dd_per_day: float = 3.0
    design_rule: str = "PeriodMinDailyMean"

    def __post_init__(self):
        if not 10.0 <= self.t_threshold <= 25.0:
            raise ConfigError(f"t_threshold must lie in [10, 25] degC, got {self.t_threshold}")
        if not self.dhw_dd_per_day >= 0:
            raise ConfigError(f"dhw_dd_per_day must be >= 0, got {self.dhw_dd_per_day}")
        if self.design_rule != "PeriodMinDailyMean":
            raise ConfigError(f"unknown design_rule {self.design_rule!r}")


@dataclass(eq=False)
class HeatLoadSummary:
    """Per-cell demand statistics, every array shaped like the grid.

    Cells flagged in ``no_demand`` (no heat demand on any day) carry NaN for
    ``mu`` and the shares and are excluded from technology maps.
    """

    grid: GridSpec
    mu: np.ndarray
    t_design: np.ndarray
    hdd_total: np.ndarray
    share_space_heat: np.ndarray
    share_hot_water: np.ndarray
    n_days: np.ndarray
    no_demand: np.ndarray

    @property
    def n_flagged(self) -> int:
        return int(self.no_demand.sum())


def daily_mean(field: TemperatureField) -> TemperatureField:
    """Average 3-hourly samples into daily means.

    A day needs at least four valid samples, otherwise it is missing. A partial
    trailing day is dropped.
    """
    if field.dt != STEP_3H:
        raise WrongStep(f"daily_mean expects a 3-hourly field (dt={STEP_3H}), got dt={field.dt}")
    n_days, rest = divmod(field.n_t, SAMPLES_PER_DAY)
    if rest:
        log.warning("dropping %d trailing samples of an incomplete day", rest)
    if n_days == 0:
        raise WrongStep("field is shorter than one day")
    v = np.asarray(field.values[: n_days * SAMPLES_PER_DAY], dtype=np.float64)
    v = v.reshape(n_days, SAMPLES_PER_DAY, *field.grid.shape)
    valid = ~np.isnan(v)
    count = valid.sum(axis=1)
    total = np.where(valid, v, 0.0).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(count >= MIN_VALID_SAMPLES, total / count, np.nan)
    return TemperatureField(field.grid, field.t_start, STEP_DAY, out)


def _require_daily(daily: TemperatureField) -> None:
    if daily.dt != STEP_DAY:
        raise WrongStep(f"expected a daily field (dt={STEP_DAY}), got dt={daily.dt}")


def hdd_series(daily: TemperatureField, cfg: DemandConfig = DemandConfig()) -> np.ndarray:
    """Daily heating degree-days [n_days, n_lat, n_lon]; missing days stay NaN."""
    _require_daily(daily)
    t = np.asarray(daily.values, dtype=np.float64)
    return np.where(np.isnan(t), np.nan, np.maximum(0.0, cfg.t_threshold - t))


def design_temperature(daily: TemperatureField) -> np.ndarray:
    """Coldest valid daily mean per cell over the whole field."""
    _require_daily(daily)
    t = np.asarray(daily.values, dtype=np.float64)
    empty = np.all(np.isnan(t), axis=0)
    if empty.any():
        i, j = np.argwhere(empty)[0]
        raise AllMissingCell(f"{int(empty.sum())} cells have no valid day, first at ({i}, {j})")
    return np.nanmin(t, axis=0)


def heat_load_factor(daily: TemperatureField, cfg: DemandConfig = DemandConfig()) -> HeatLoadSummary:
    t_design = design_temperature(daily)
    hdd = hdd_series(daily, cfg)
    valid = ~np.isnan(hdd)
    n_days = valid.sum(axis=0)
    hdd_total = np.where(valid, hdd, 0.0).sum(axis=0)
    dw = cfg.dhw_dd_per_day

    q_mean = hdd_total / n_days + dw
    q_peak = np.maximum(0.0, cfg.t_threshold - t_design) + dw
    no_demand = q_peak <= 0.0
    total = hdd_total + n_days * dw
    with np.errstate(invalid="ignore", divide="ignore"):
        mu = np.where(no_demand, np.nan, q_mean / q_peak)
        share_sh = np.where(no_demand, np.nan, hdd_total / total)
    # float rounding can push a flat load a hair above 1
    mu = np.minimum(mu, 1.0)
    if no_demand.any():
        log.info("%d cells have no heat demand and are flagged", int(no_demand.sum()))
    return HeatLoadSummary(
        grid=daily.grid,
        mu=mu,
        t_design=t_design,
        hdd_total=hdd_total,
        share_space_heat=share_sh,
        share_hot_water=1.0 - share_sh,
        n_days=n_days,
        no_demand=no_demand,
    )


def cell_heat_load_factor(daily_temps, cfg: DemandConfig = DemandConfig()) -> float:
    """Heat load factor of a single series of daily means; raises ZeroPeak."""
    t = np.asarray(daily_temps, dtype=np.float64)
    t = t[~np.isnan(t)]
    if t.size == 0:
        raise AllMissingCell("series has no valid day")
    hdd = np.maximum(0.0, cfg.t_threshold - t)
    peak = max(0.0, cfg.t_threshold - t.min()) + cfg.dhw_dd_per_day
    if peak <= 0:
        raise ZeroPeak("no heat demand on the design day")
    return min(1.0, float((hdd.mean() + cfg.dhw_dd_per_day) / peak))
