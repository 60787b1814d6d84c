"""Monte Carlo pricing schemes and balanced-scheme selection.

Trial 0 is always the unperturbed scheme. In every other trial the capital
and maintenance costs are drawn uniformly from their ranges and fuel prices
from a normal distribution with a 20 % spread, truncated to positive values.
All electricity-fuelled technologies share a single electricity draw.

Each trial owns an independent PCG64 stream keyed by ``(seed, trial)``, so a
trial's prices do not depend on how many trials are drawn or in which order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .catalog import (
    DEFAULT_CATALOG,
    ELECTRIC,
    FUEL_SPREAD,
    PRICE_FIELDS,
    TECHS,
    Prices,
    PricingScheme,
    Tech,
    TechnologySpec,
    unperturbed_scheme,
)
from .errors import ConfigError, GridMismatch, IoFailure, ZeroPopulation
from .gridio import GridSpec, PopulationRaster, atomic_write_bytes
from .supply import GridLines, TechnologyMap, grid_lines, select_grid

log = logging.getLogger(__name__)

RNG_ALGORITHM = "numpy PCG64, SeedSequence(seed, spawn_key=(trial,))"


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def draw_fuel(rng: np.random.Generator, mean: float, spread: float = FUEL_SPREAD) -> float:
    """Normal(mean, spread*mean) draw, resampled until positive."""
    while True:
        x = rng.normal(mean, spread * mean)
        if x > 0:
            return float(x)


def perturbed_prices(catalog: dict[Tech, TechnologySpec], rng: np.random.Generator) -> dict[Tech, Prices]:
    capex = {}
    for t in TECHS:
        s = catalog[t]
        capex[t] = tuple(float(rng.uniform(r.lo, r.hi)) if r.hi > r.lo else float(r.nominal)
                         for r in (s.install, s.equip, s.maint))
    fuel = {t: draw_fuel(rng, catalog[t].fuel) for t in TECHS if t not in ELECTRIC}
    elec_mean = catalog[ELECTRIC[0]].fuel
    if any(catalog[t].fuel != elec_mean for t in ELECTRIC):
        raise ConfigError("electricity-fuelled technologies must share one nominal electricity price")
    elec = draw_fuel(rng, elec_mean)
    fuel.update({t: elec for t in ELECTRIC})
    return {t: Prices(*capex[t], fuel[t]) for t in TECHS}


def perturb(catalog: dict[Tech, TechnologySpec] = DEFAULT_CATALOG, n_trials: int = 100,
            seed: int = 0) -> list[PricingScheme]:
    """Trial 0 unperturbed, trials 1..n_trials-1 randomly perturbed."""
    if n_trials < 1:
        raise ConfigError("n_trials must be at least 1")
    base = unperturbed_scheme(catalog)
    schemes = [PricingScheme(base.prices, "Unperturbed", seed, 0)]
    for k in range(1, n_trials):
        schemes.append(PricingScheme(perturbed_prices(catalog, trial_rng(seed, k)), "Perturbed", seed, k))
    return schemes


@dataclass(frozen=True)
class ShareVector:
    """Fraction of cells (or population) won by each technology, indexed by Tech."""

    values: np.ndarray
    trial: int | None = None

    def __getitem__(self, tech: Tech) -> float:
        return float(self.values[tech])

    def as_dict(self) -> dict[Tech, float]:
        return {t: float(self.values[t]) for t in TECHS}


def share_vector(tmap: TechnologyMap, weights: PopulationRaster | None = None,
                 trial: int | None = None) -> ShareVector:
    demand = tmap.demand_cells
    if weights is None:
        w = demand.astype(np.float64)
    else:
        if weights.grid != tmap.grid:
            raise GridMismatch(f"population grid {weights.grid} does not match map grid {tmap.grid}")
        w = np.where(demand, weights.values, 0.0)
    total = w.sum()
    if total <= 0:
        raise ZeroPopulation("no weight on any cell with heat demand")
    shares = np.array([w[tmap.winner == t].sum() for t in TECHS]) / total
    return ShareVector(shares, trial)


def balance_score(shares) -> float:
    """Sum over all technologies of (share - largest share)^2."""
    v = np.asarray(getattr(shares, "values", shares), dtype=np.float64)
    return float(((v - v.max()) ** 2).sum())


def balanced_select(schemes: list[PricingScheme], shares: list[ShareVector]) -> PricingScheme:
    """Scheme with the lowest balance score; ties go to the earlier trial."""
    if not schemes or len(schemes) != len(shares):
        raise ValueError("schemes and shares must be non-empty and aligned")
    scores = [balance_score(s) for s in shares]
    best = min(range(len(scores)), key=lambda k: (scores[k], k))
    return schemes[best]


@dataclass(frozen=True)
class TrialResult:
    scheme: PricingScheme
    shares: ShareVector
    score: float


def evaluate_schemes(efficiencies: dict[Tech, np.ndarray], mu: np.ndarray, no_demand: np.ndarray,
                     grid: GridSpec, schemes: list[PricingScheme],
                     catalog: dict[Tech, TechnologySpec] = DEFAULT_CATALOG,
                     weights: PopulationRaster | None = None, jobs: int = 1) -> list[TrialResult]:
    """Screen the grid under every scheme; results come back in scheme order."""
    base = grid_lines(efficiencies, schemes[0], catalog)
    no_demand = no_demand | np.any(np.isnan(base.slope), axis=0)

    def run(k: int) -> TrialResult:
        lines: GridLines = grid_lines(efficiencies, schemes[k], catalog)
        tmap = select_grid(lines, mu, no_demand, grid)
        sv = share_vector(tmap, weights, trial=schemes[k].trial)
        return TrialResult(schemes[k], sv, balance_score(sv))

    if jobs <= 1:
        return [run(k) for k in range(len(schemes))]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run, range(len(schemes))))


def trial_rows(results: list[TrialResult]):
    yield ("trial", "score") + tuple(f"share_{t.key}" for t in TECHS)
    for r in results:
        yield (r.scheme.trial, repr(r.score)) + tuple(repr(float(x)) for x in r.shares.values)


# -- scheme files -----------------------------------------------------------


def format_scheme(scheme: PricingScheme) -> str:
    lines = [f"meta.provenance = {scheme.provenance}"]
    if scheme.seed is not None:
        lines.append(f"meta.seed = {scheme.seed}")
    if scheme.trial is not None:
        lines.append(f"meta.trial = {scheme.trial}")
    for t in TECHS:
        p = scheme[t]
        for f in PRICE_FIELDS:
            lines.append(f"{t.key}.{f} = {getattr(p, f)!r}")
    return "\n".join(lines) + "\n"


def parse_kv(text: str, source: str = "<text>") -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{n}: empty key")
        out[key] = value
    return out


def parse_scheme(text: str, source: str = "<text>") -> PricingScheme:
    kv = parse_kv(text, source)
    fields: dict[Tech, dict[str, float]] = {t: {} for t in TECHS}
    meta = {}
    for key, value in kv.items():
        head, _, name = key.partition(".")
        if head == "meta":
            meta[name] = value
            continue
        if name not in PRICE_FIELDS:
            raise ConfigError(f"{source}: unknown price field in {key!r}")
        try:
            fields[Tech.from_key(head)][name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"{source}: non-numeric value for {key!r}") from exc
    for t, f in fields.items():
        missing = [x for x in PRICE_FIELDS if x not in f]
        if missing:
            raise ConfigError(f"{source}: {t.key} lacks {missing}")
    seed = int(meta["seed"]) if "seed" in meta else None
    trial = int(meta["trial"]) if "trial" in meta else None
    return PricingScheme({t: Prices(**f) for t, f in fields.items()},
                         meta.get("provenance", "File"), seed, trial)


def read_scheme(path) -> PricingScheme:
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_scheme(text, str(path))


def write_scheme(scheme: PricingScheme, path) -> None:
    atomic_write_bytes(path, format_scheme(scheme).encode("utf-8"))
