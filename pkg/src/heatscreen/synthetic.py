"""Synthetic temperature fields for tests and demonstrations.

A cell's daily mean is a seasonal cosine (coldest mid-January) plus AR(1)
weather noise. 3-hourly fields add a diurnal cycle that averages out over a
day.
"""

from __future__ import annotations

import numpy as np

from .gridio import STEP_3H, STEP_DAY, GridSpec, TemperatureField

DAYS_PER_YEAR = 365
AR_COEF = 0.7


def _ar1(rng, n, shape, sigma):
    """AR(1) noise with stationary standard deviation ``sigma``."""
    out = np.empty((n,) + shape)
    e = rng.normal(0.0, sigma * np.sqrt(1 - AR_COEF**2), (n,) + shape)
    out[0] = rng.normal(0.0, sigma, shape)
    for k in range(1, n):
        out[k] = AR_COEF * out[k - 1] + e[k]
    return out


def daily_series(n_days, mean=7.0, amplitude=10.0, noise=3.0, seed=0, warming=0.0):
    """Daily means for one cell; ``warming`` is a linear trend in K over the series."""
    rng = np.random.default_rng(seed)
    d = np.arange(n_days)
    season = -np.cos(2 * np.pi * (d - 15) / DAYS_PER_YEAR)
    trend = warming * d / max(n_days - 1, 1)
    return mean + amplitude * season + _ar1(rng, n_days, (), noise) + trend


def seasonal_field(grid: GridSpec, years: int, mean, amplitude, noise=3.0, seed=0,
                   offset=0.0, start="1970-01-01T00:00:00", three_hourly=False,
                   diurnal=4.0) -> TemperatureField:
    """Field with per-cell ``mean``/``amplitude`` (scalars or [n_lat, n_lon]).

    Covers ``years`` calendar years from ``start`` (which should be midnight).
    """
    rng = np.random.default_rng(seed)
    first = np.datetime64(start[:10], "D")
    last = np.datetime64(f"{int(start[:4]) + years}{start[4:10]}", "D")
    days = np.arange(first, last)
    n_days = days.size
    doy = (days - days.astype("datetime64[Y]")).astype(np.int64)
    mean = np.broadcast_to(np.asarray(mean, dtype=np.float64), grid.shape)
    amplitude = np.broadcast_to(np.asarray(amplitude, dtype=np.float64), grid.shape)
    season = -np.cos(2 * np.pi * (doy - 15) / DAYS_PER_YEAR)[:, None, None]
    daily = mean + amplitude * season + _ar1(rng, n_days, grid.shape, noise) + offset
    if not three_hourly:
        return TemperatureField(grid, start, STEP_DAY, daily)
    phase = -np.cos(2 * np.pi * (np.arange(8) + 0.5) / 8)
    sub = daily[:, None] + diurnal * phase[None, :, None, None]
    return TemperatureField(grid, start, STEP_3H, sub.reshape(n_days * 8, *grid.shape))


def europe_like(n: int = 30, years: int = 20, offset: float = 0.0, seed: int = 0,
                three_hourly: bool = False) -> TemperatureField:
    """Square grid from a mild south (row n-1) to a cold north (row 0) and from
    an oceanic west to a continental east."""
    grid = GridSpec(n, n, 70.0, -10.0, -30.0 / max(n - 1, 1), 40.0 / max(n - 1, 1))
    north = np.linspace(1.0, 0.0, n)[:, None]
    east = np.linspace(0.0, 1.0, n)[None, :]
    mean = 16.0 - 16.0 * north + 0.0 * east
    amplitude = 5.0 + 9.0 * east + 2.0 * north
    return seasonal_field(grid, years, mean, amplitude, noise=3.0, seed=seed, offset=offset,
                          three_hourly=three_hourly)
