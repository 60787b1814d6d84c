"""National and European aggregates, trends, ensemble statistics and CO2.

Country degree-days are a population-weighted mean over the country's cells
scaled by the cell count, so sparsely populated cold cells do not dominate
while the magnitude stays comparable to a plain sum over cells.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .catalog import TECHS
from .demand import DemandConfig, hdd_series
from .errors import EmptySeries, GridMismatch, ZeroPopulation
from .gridio import CountryMask, PopulationRaster, TemperatureField, check_compatible
from .pricing import ShareVector
from .supply import TechnologyMap

log = logging.getLogger(__name__)

DAYS_PER_YEAR = 365.25

# share of total CO2 emissions that scales with space-heating degree-days
CO2_HEAT_FACTOR = 0.2976


def yearly_hdd(daily: TemperatureField, cfg: DemandConfig = DemandConfig()):
    """(years, per-cell annual degree-days [n_years, n_lat, n_lon]).

    Annual degree-days are the mean over a year's valid days times 365.25, so
    leap years and missing days do not bias the totals. Calendar years not
    fully covered by the field are dropped.
    """
    hdd = hdd_series(daily, cfg)
    times = daily.times()
    years = times.astype("datetime64[Y]").astype(np.int64) + 1970
    days = times.astype("datetime64[D]")
    kept, out = [], []
    for y in np.unique(years):
        sel = years == y
        n_expected = int((np.datetime64(f"{y + 1}-01-01", "D") - np.datetime64(f"{y}-01-01", "D")).astype(np.int64))
        if np.unique(days[sel]).size < n_expected:
            log.warning("dropping incomplete year %d", y)
            continue
        with np.errstate(invalid="ignore"), warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out.append(np.nanmean(hdd[sel], axis=0) * DAYS_PER_YEAR)
        kept.append(int(y))
    if not kept:
        raise EmptySeries("field covers no complete calendar year")
    return np.array(kept), np.stack(out)


@dataclass(eq=False)
class NationalHDD:
    years: np.ndarray
    countries: list[str]
    values: np.ndarray       # [n_country, n_year]
    population: np.ndarray   # [n_country]
    n_cells: np.ndarray      # [n_country]

    def europe(self) -> np.ndarray:
        """Population-weighted combination of the countries, per year.

        Equals the population-weighted mean over all masked cells times their
        count, whichever way the cells are partitioned into countries.
        """
        means = self.values / self.n_cells[:, None]
        pop = self.population[:, None]
        return (pop * means).sum(axis=0) / self.population.sum() * self.n_cells.sum()

    def rows(self):
        yield ("country", "year", "hdd")
        for c, iso in enumerate(self.countries):
            for y, year in enumerate(self.years):
                yield (iso, int(year), repr(float(self.values[c, y])))


def weighted_country_value(cell_values: np.ndarray, pop: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Population-weighted mean over ``cells`` times the cell count.

    ``cell_values`` is [..., n_lat, n_lon]; the result has the leading shape.
    """
    w = pop[cells]
    total = w.sum()
    if total <= 0:
        raise ZeroPopulation("country has no population")
    return (cell_values[..., cells] * w).sum(axis=-1) / total * cells.sum()


def national_hdd(daily: TemperatureField, pop: PopulationRaster, mask: CountryMask,
                 cfg: DemandConfig = DemandConfig()) -> NationalHDD:
    check_compatible(daily.grid, pop.grid, mask.grid)
    years, sums = yearly_hdd(daily, cfg)
    return aggregate_countries(years, sums, pop, mask)


def aggregate_countries(years, cell_yearly: np.ndarray, pop: PopulationRaster,
                        mask: CountryMask) -> NationalHDD:
    check_compatible(pop.grid, mask.grid)
    countries = mask.countries()
    values, pops, counts = [], [], []
    for iso in countries:
        cells = mask.cells_of(iso)
        try:
            values.append(weighted_country_value(cell_yearly, pop.values, cells))
        except ZeroPopulation:
            raise ZeroPopulation(f"country {iso} has zero population") from None
        pops.append(pop.values[cells].sum())
        counts.append(cells.sum())
    if not countries:
        raise ZeroPopulation("mask assigns no cell to any country")
    return NationalHDD(np.asarray(years), countries, np.array(values),
                       np.array(pops, dtype=np.float64), np.array(counts, dtype=np.float64))


def europe_direct(cell_yearly: np.ndarray, pop: PopulationRaster, mask: CountryMask) -> np.ndarray:
    """European aggregate straight from the cells, bypassing countries."""
    return weighted_country_value(cell_yearly, pop.values, mask.codes != 0)


@dataclass(eq=False)
class TrendSeries:
    years: np.ndarray
    values: np.ndarray
    baseline_year: int | None = None

    def __post_init__(self):
        self.years = np.asarray(self.years, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.years.size == 0:
            raise EmptySeries("trend series has no years")
        if self.years.shape != self.values.shape:
            raise ValueError("years and values must align")
        if np.any(np.diff(self.years) <= 0):
            raise ValueError("years must be strictly increasing")
        if self.baseline_year is None:
            self.baseline_year = int(self.years[0])
        elif self.baseline_year not in self.years:
            raise ValueError(f"baseline year {self.baseline_year} not in series")

    @property
    def baseline(self) -> float:
        return float(self.values[self.years == self.baseline_year][0])

    @property
    def normalized(self) -> np.ndarray:
        """Values in percent of the baseline year."""
        return self.values / self.baseline * 100.0


def moving_average(series: TrendSeries, window: int = 10) -> TrendSeries:
    """Trailing mean over ``window`` years; the first years use what is available."""
    if window < 1:
        raise ValueError("window must be >= 1")
    v = series.values
    if v.size == 0:
        raise EmptySeries("cannot smooth an empty series")
    c = np.concatenate([[0.0], np.cumsum(v)])
    idx = np.arange(1, v.size + 1)
    lo = np.maximum(0, idx - window)
    return TrendSeries(series.years, (c[idx] - c[lo]) / (idx - lo), series.baseline_year)


@dataclass(eq=False)
class EnsembleStat:
    mean: np.ndarray
    sigma: np.ndarray
    q25: np.ndarray
    q75: np.ndarray


def ensemble_stats(member_values) -> EnsembleStat:
    """Statistics across members along axis 0.

    Sample standard deviation (n - 1), defined as 0 for a single member;
    quartiles by linear interpolation between order statistics.
    """
    v = np.asarray(member_values, dtype=np.float64)
    if v.ndim == 0 or v.shape[0] < 1:
        raise EmptySeries("ensemble needs at least one member")
    sigma = v.std(axis=0, ddof=1) if v.shape[0] > 1 else np.zeros(v.shape[1:])
    q25, q75 = np.percentile(v, [25, 75], axis=0, method="linear")
    return EnsembleStat(v.mean(axis=0), sigma, q25, q75)


def co2_change(hdd_relative_change, k: float = CO2_HEAT_FACTOR):
    """Relative change in total CO2 emissions for a relative change in degree-days."""
    return k * hdd_relative_change


def fit_co2_factor(hdd_changes, co2_changes) -> float:
    """Least-squares slope through the origin."""
    x = np.asarray(hdd_changes, dtype=np.float64)
    y = np.asarray(co2_changes, dtype=np.float64)
    return float((x * y).sum() / (x * x).sum())


def national_tech_shares(tmap: TechnologyMap, pop: PopulationRaster,
                         mask: CountryMask) -> dict[str, ShareVector]:
    """Population-weighted winner shares per country, over cells with demand."""
    if not (tmap.grid == pop.grid == mask.grid):
        raise GridMismatch("technology map, population and mask grids differ")
    out = {}
    for iso in mask.countries():
        cells = mask.cells_of(iso) & tmap.demand_cells
        w = np.where(cells, pop.values, 0.0)
        total = w.sum()
        if total <= 0:
            raise ZeroPopulation(f"country {iso} has no population in cells with demand")
        out[iso] = ShareVector(np.array([w[tmap.winner == t].sum() for t in TECHS]) / total)
    return out
