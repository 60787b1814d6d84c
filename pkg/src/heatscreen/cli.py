"""Command-line front end.

Every subcommand reads GTSF inputs, runs one pipeline and writes CSV files plus
``run_manifest.json`` into the output directory. Settings come from built-in
defaults, then an optional flat ``key = value`` config file, then flags.

Exit codes: 0 ok, 2 I/O, 3 validation, 4 numeric.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    CO2_HEAT_FACTOR,
    TrendSeries,
    co2_change,
    ensemble_stats,
    europe_direct,
    moving_average,
    national_hdd,
    national_tech_shares,
    yearly_hdd,
)
from .catalog import DEFAULT_CATALOG, TECHS, PricingScheme, balanced_scheme, unperturbed_scheme, with_overrides
from .demand import DemandConfig, daily_mean, heat_load_factor
from .errors import ConfigError, HeatScreenError, IoFailure
from .gridio import (
    STEP_3H,
    CountryMask,
    PopulationRaster,
    TemperatureField,
    atomic_write_bytes,
    check_compatible,
    read_gtsf,
    read_header,
    read_mask,
    read_population,
    select_years,
    write_gtsf,
    write_mask,
    write_population,
)
from .pricing import (
    RNG_ALGORITHM,
    balanced_select,
    evaluate_schemes,
    parse_kv,
    perturb,
    read_scheme,
    trial_rows,
    write_scheme,
)
from .supply import COP_COEFFS, grid_efficiencies, grid_lines, screening_curve, select_grid

log = logging.getLogger("heatscreen")

LIST_KEYS = ("temp", "member", "period", "hdd_change", "inputs")


# -- configuration ----------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    temp: list[str] = field(default_factory=list)
    member: list[str] = field(default_factory=list)
    population: str | None = None
    mask: str | None = None
    legend: str | None = None
    period: list[str] = field(default_factory=list)
    t_threshold: float = 17.0
    dhw_dd_per_day: float = 3.0
    scheme: str = "balanced"
    trials: int = 100
    seed: int = 0
    jobs: int = 1
    out: str = "."
    window: int = 10
    baseline_year: int | None = None
    baseline_scenario: str = "historical"
    k: float = CO2_HEAT_FACTOR
    curve_cell: str | None = None
    hdd_change: list[str] = field(default_factory=list)
    trend: str | None = None
    catalog: dict[str, str] = field(default_factory=dict)
    cop: dict[str, str] = field(default_factory=dict)
    inputs: list[str] = field(default_factory=list)

    @property
    def demand(self) -> DemandConfig:
        return DemandConfig(self.t_threshold, self.dhw_dd_per_day)

    def periods(self) -> dict[str | None, tuple[int, int]]:
        """Period windows keyed by scenario; key None applies to all."""
        out: dict[str | None, tuple[int, int]] = {}
        for item in self.period:
            scen, _, span = item.rpartition("=")
            out[scen or None] = parse_period(span)
        return out

    def period_for(self, scenario: str | None = None) -> tuple[int, int] | None:
        p = self.periods()
        return p.get(scenario, p.get(None))

    def cop_coeffs(self):
        coeffs = dict(COP_COEFFS)
        for kind, text in self.cop.items():
            if kind not in coeffs:
                raise ConfigError(f"unknown COP source kind {kind!r}")
            try:
                vals = tuple(float(x) for x in text.split(","))
            except ValueError as exc:
                raise ConfigError(f"bad COP coefficients for {kind}: {text}") from exc
            if len(vals) != 3:
                raise ConfigError(f"COP coefficients for {kind} need 3 values")
            coeffs[kind] = vals
        return coeffs

    def tech_catalog(self):
        return with_overrides(DEFAULT_CATALOG, self.catalog)


def parse_period(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.strip().split("-"))
    except ValueError as exc:
        raise ConfigError(f"period must look like 1970-1990, got {text!r}") from exc
    if b <= a:
        raise ConfigError(f"period end must follow its start: {text!r}")
    return a, b


_TYPES = {f: t for f, t in (("t_threshold", float), ("dhw_dd_per_day", float), ("trials", int),
                             ("seed", int), ("jobs", int), ("window", int), ("baseline_year", int),
                             ("k", float))}


def build_config(args: argparse.Namespace) -> RunConfig:
    values: dict = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
        values.update(parse_kv(text, args.config))
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value.strip()
    for key, value in vars(args).items():
        if key in ("config", "set", "func", "verbose") or value is None:
            continue
        values[key] = value

    cfg = RunConfig(command=args.command)
    for key, value in values.items():
        key = key.replace("-", "_")
        if key.startswith("catalog."):
            cfg.catalog[key[len("catalog."):]] = str(value)
        elif key.startswith("cop."):
            cfg.cop[key[len("cop."):]] = str(value)
        elif key in LIST_KEYS:
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            setattr(cfg, key, list(value))
        elif key == "command":
            continue
        elif hasattr(cfg, key):
            try:
                setattr(cfg, key, _TYPES.get(key, str)(value))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    if "jobs" not in values:
        cfg.jobs = os.cpu_count() or 1
    if cfg.jobs < 1:
        raise ConfigError("jobs must be >= 1")
    return cfg


# -- helpers ----------------------------------------------------------------


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def require_file(path: str | None, what: str) -> str:
    if not path:
        raise ConfigError(f"missing required input: {what}")
    if not Path(path).is_file():
        raise IoFailure(f"input file not found: {path}")
    return path


class Run:
    """Bookkeeping for one command: inputs, stage counts, outputs, manifest."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.inputs: dict[str, str] = {}
        self.stages: dict[str, dict] = {}
        self.outputs: dict[str, int] = {}
        self.started = time.time()

    def input(self, path: str, what: str) -> str:
        require_file(path, what)
        self.inputs[str(path)] = sha256(path)
        return path

    def stage(self, name: str, **counts) -> None:
        self.stages[name] = {k: int(v) for k, v in counts.items()}

    def write_csv(self, name: str, rows) -> Path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = -1
        for n, row in enumerate(rows):
            w.writerow(row)
        path = self.out / name
        atomic_write_bytes(path, buf.getvalue().encode("utf-8"))
        self.outputs[name] = max(n, 0)
        return path

    def finish(self) -> None:
        manifest = {
            "tool": "heatscreen",
            "version": __version__,
            "command": self.cfg.command,
            "config": asdict(self.cfg),
            "rng": {"algorithm": RNG_ALGORITHM, "seed": self.cfg.seed},
            "inputs": self.inputs,
            "stages": self.stages,
            "outputs": self.outputs,
            "wall_clock_s": round(time.time() - self.started, 3),
        }
        text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        atomic_write_bytes(self.out / "run_manifest.json", text.encode("utf-8"))


def load_daily(run: Run, path: str, period: tuple[int, int] | None, label: str = "temp") -> TemperatureField:
    field_ = read_gtsf(run.input(path, label))
    raw_nan = int(np.isnan(field_.values).sum())
    if field_.dt == STEP_3H:
        field_ = daily_mean(field_)
    if period is not None:
        years = field_.years()
        a, b = period
        if a < years[0] or b - 1 > years[-1]:
            raise ConfigError(f"period {a}-{b} is not within the data span {years[0]}-{years[-1]} of {path}")
        field_ = select_years(field_, a, b)
    run.stage(f"read:{path}", cells=field_.grid.n_cells, samples_nan=raw_nan,
              days=field_.n_t, days_nan=np.isnan(field_.values).sum())
    return field_


def load_pop_mask(run: Run, cfg: RunConfig) -> tuple[PopulationRaster, CountryMask]:
    pop = read_population(run.input(cfg.population, "population"))
    mask = read_mask(run.input(cfg.mask, "mask"), run.input(cfg.legend, "legend"))
    check_compatible(pop.grid, mask.grid)
    return pop, mask


def resolve_scheme(run: Run, cfg: RunConfig, daily: TemperatureField | None = None,
                   summary=None, catalog=None) -> PricingScheme:
    src = cfg.scheme.strip()
    if src == "balanced":
        return balanced_scheme()
    if src == "unperturbed":
        return unperturbed_scheme(catalog or DEFAULT_CATALOG)
    if src.startswith("file:"):
        return read_scheme(run.input(src[5:], "scheme"))
    if src.startswith("mc:"):
        if daily is None:
            raise ConfigError("a Monte Carlo scheme source needs a temperature field")
        n = int(src[3:])
        eff = grid_efficiencies(daily, cfg.demand, catalog, cfg.cop_coeffs())
        schemes = perturb(catalog, n, cfg.seed)
        results = evaluate_schemes(eff, summary.mu, summary.no_demand, daily.grid, schemes,
                                   catalog, jobs=cfg.jobs)
        return balanced_select(schemes, [r.shares for r in results])
    raise ConfigError(f"scheme must be balanced, unperturbed, file:PATH or mc:N; got {src!r}")


def fmt(x) -> str:
    return repr(float(x))


# -- commands ---------------------------------------------------------------


def cmd_inspect(cfg: RunConfig, run: Run) -> None:
    headers = {}
    for path in cfg.inputs:
        require_file(path, "GTSF file")
        headers[path] = read_header(path).as_dict()
    sys.stdout.write(json.dumps(headers, indent=2, sort_keys=True) + "\n")


def cmd_hdd(cfg: RunConfig, run: Run) -> None:
    if not cfg.temp:
        raise ConfigError("hdd needs at least one --temp input")
    pop, mask = load_pop_mask(run, cfg)
    period = cfg.period_for()
    nats = []
    for path in sorted(cfg.temp):
        daily = load_daily(run, path, period)
        nats.append(national_hdd(daily, pop, mask, cfg.demand))
    years = nats[0].years
    for n in nats[1:]:
        if not np.array_equal(n.years, years):
            raise ConfigError("ensemble members cover different years")
    values = np.mean([n.values for n in nats], axis=0)
    countries = nats[0].countries
    run.write_csv("hdd_by_country_year.csv",
                  [("country", "year", "hdd")] +
                  [(iso, int(y), fmt(values[c, k])) for c, iso in enumerate(countries)
                   for k, y in enumerate(years)])

    europe = np.array([n.europe() for n in nats])
    base = cfg.baseline_year if cfg.baseline_year is not None else int(years[0])
    raw = TrendSeries(years, europe.mean(axis=0), base)
    smooth = moving_average(raw, cfg.window)
    pct = np.array([moving_average(TrendSeries(years, e, base), cfg.window).values
                    for e in [TrendSeries(years, m, base).normalized for m in europe]])
    stats = ensemble_stats(pct)
    run.write_csv("trend_europe.csv",
                  [("year", "raw", "smoothed", "pct_of_baseline", "pct_sigma")] +
                  [(int(y), fmt(raw.values[k]), fmt(smooth.values[k]), fmt(stats.mean[k]),
                    fmt(stats.sigma[k])) for k, y in enumerate(years)])
    run.stage("hdd", members=len(nats), countries=len(countries), years=len(years))


def cmd_hlf(cfg: RunConfig, run: Run) -> None:
    daily = load_daily(run, _single_temp(cfg), cfg.period_for())
    s = heat_load_factor(daily, cfg.demand)
    g = daily.grid
    lats, lons = g.lats(), g.lons()
    rows = [("cell_i", "cell_j", "lat", "lon", "mu", "t_design", "hdd_total", "share_sh", "share_dhw")]
    for i in range(g.n_lat):
        for j in range(g.n_lon):
            if s.no_demand[i, j]:
                rows.append((i, j, fmt(lats[i]), fmt(lons[j]), "", fmt(s.t_design[i, j]),
                             fmt(s.hdd_total[i, j]), "", ""))
            else:
                rows.append((i, j, fmt(lats[i]), fmt(lons[j]), fmt(s.mu[i, j]), fmt(s.t_design[i, j]),
                             fmt(s.hdd_total[i, j]), fmt(s.share_space_heat[i, j]),
                             fmt(s.share_hot_water[i, j])))
    run.write_csv("heat_load_factors.csv", rows)
    run.stage("hlf", cells=g.n_cells, no_demand=s.n_flagged)


def _single_temp(cfg: RunConfig) -> str:
    if len(cfg.temp) != 1:
        raise ConfigError(f"{cfg.command} needs exactly one --temp input, got {len(cfg.temp)}")
    return cfg.temp[0]


def cmd_screen(cfg: RunConfig, run: Run) -> None:
    catalog = cfg.tech_catalog()
    daily = load_daily(run, _single_temp(cfg), cfg.period_for())
    summary = heat_load_factor(daily, cfg.demand)
    scheme = resolve_scheme(run, cfg, daily, summary, catalog)
    eff = grid_efficiencies(daily, cfg.demand, catalog, cfg.cop_coeffs())
    lines = grid_lines(eff, scheme, catalog)
    no_demand = summary.no_demand | np.any(np.isnan(lines.slope), axis=0)
    tmap = select_grid(lines, summary.mu, no_demand, daily.grid)
    run.write_csv("technology_map.csv", tmap.csv_rows())
    write_scheme(scheme, run.out / "scheme_used.txt")
    if cfg.curve_cell:
        try:
            i, j = (int(x) for x in cfg.curve_cell.split(","))
        except ValueError as exc:
            raise ConfigError(f"curve_cell must be 'i,j', got {cfg.curve_cell!r}") from exc
        if not (0 <= i < daily.grid.n_lat and 0 <= j < daily.grid.n_lon):
            raise ConfigError(f"curve cell ({i}, {j}) is outside the grid")
        cap = next(iter(catalog.values())).capacity
        run.write_csv("screening_curve.csv", screening_curve(lines.cell_lines(i, j), cap))
    counts = tmap.counts()
    run.stage("screen", cells=daily.grid.n_cells, no_demand=int(no_demand.sum()),
              ties=int(tmap.tie.sum()), **{f"won_{t.key}": counts[t] for t in TECHS})


def cmd_mc(cfg: RunConfig, run: Run) -> None:
    catalog = cfg.tech_catalog()
    daily = load_daily(run, _single_temp(cfg), cfg.period_for())
    summary = heat_load_factor(daily, cfg.demand)
    eff = grid_efficiencies(daily, cfg.demand, catalog, cfg.cop_coeffs())
    schemes = perturb(catalog, cfg.trials, cfg.seed)
    results = evaluate_schemes(eff, summary.mu, summary.no_demand, daily.grid, schemes, catalog,
                               jobs=cfg.jobs)
    best = balanced_select(schemes, [r.shares for r in results])
    run.write_csv("mc_trials.csv", trial_rows(results))
    write_scheme(best, run.out / "balanced_scheme.txt")
    run.stage("mc", trials=len(schemes), cells=daily.grid.n_cells, no_demand=summary.n_flagged,
              balanced_trial=best.trial)


def parse_member(text: str) -> tuple[str, str, str]:
    """'scenario:model=path' -> (scenario, model, path)."""
    head, sep, path = text.partition("=")
    scen, sep2, model = head.partition(":")
    if not sep or not sep2 or not scen or not model or not path:
        raise ConfigError(f"member must look like SCENARIO:MODEL=PATH, got {text!r}")
    return scen.strip(), model.strip(), path.strip()


def cmd_report(cfg: RunConfig, run: Run) -> None:
    members = sorted(parse_member(m) for m in cfg.member)
    if not members:
        raise ConfigError("report needs at least one --member SCENARIO:MODEL=PATH")
    keys = [(s, m) for s, m, _ in members]
    if len(set(keys)) != len(keys):
        raise ConfigError("duplicate scenario:model member")
    catalog = cfg.tech_catalog()
    pop, mask = load_pop_mask(run, cfg)
    scheme = resolve_scheme(run, cfg, catalog=catalog) if not cfg.scheme.startswith("mc:") else None
    if scheme is None:
        raise ConfigError("report needs a fixed scheme (balanced, unperturbed or file:PATH)")
    coeffs = cfg.cop_coeffs()
    for _, _, path in members:
        require_file(path, "member")

    def evaluate(member):
        scen, model, path = member
        daily = load_daily(run, path, cfg.period_for(scen))
        check_compatible(daily.grid, pop.grid)
        summary = heat_load_factor(daily, cfg.demand)
        eff = grid_efficiencies(daily, cfg.demand, catalog, coeffs)
        lines = grid_lines(eff, scheme, catalog)
        no_demand = summary.no_demand | np.any(np.isnan(lines.slope), axis=0)
        tmap = select_grid(lines, summary.mu, no_demand, daily.grid)
        shares = national_tech_shares(tmap, pop, mask)
        _, cell_yearly = yearly_hdd(daily, cfg.demand)
        hdd = float(europe_direct(cell_yearly, pop, mask).mean())
        return shares, hdd

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(evaluate, members))
    else:
        results = [evaluate(m) for m in members]

    countries = mask.countries()
    scenarios = sorted({s for s, _ in keys})
    rows = [("scenario", "country", "tech", "mean", "sigma", "q25", "q75")]
    for scen in scenarios:
        idx = [k for k, (s, _) in enumerate(keys) if s == scen]
        for iso in countries:
            stats = ensemble_stats([results[k][0][iso].values for k in idx])
            for t in TECHS:
                rows.append((scen, iso, t.name, fmt(stats.mean[t]), fmt(stats.sigma[t]),
                             fmt(stats.q25[t]), fmt(stats.q75[t])))
    run.write_csv("ensemble_tech_shares.csv", rows)

    hdd = {keys[k]: results[k][1] for k in range(len(keys))}
    co2_rows = [("label", "hdd_change", "hdd_change_sigma", "co2_change")]
    if cfg.baseline_scenario in scenarios:
        for scen in scenarios:
            if scen == cfg.baseline_scenario:
                continue
            changes = []
            for s, model in keys:
                if s != scen:
                    continue
                if (cfg.baseline_scenario, model) not in hdd:
                    raise ConfigError(f"model {model} has no {cfg.baseline_scenario} member")
                changes.append(hdd[(scen, model)] / hdd[(cfg.baseline_scenario, model)] - 1.0)
            st = ensemble_stats(changes)
            co2_rows.append((scen, fmt(st.mean), fmt(st.sigma), fmt(co2_change(float(st.mean), cfg.k))))
    run.write_csv("co2.csv", co2_rows)
    run.stage("report", members=len(members), scenarios=len(scenarios), countries=len(countries))


def cmd_co2(cfg: RunConfig, run: Run) -> None:
    items: list[tuple[str, float]] = []
    for text in cfg.hdd_change:
        try:
            items.append((text, float(text)))
        except ValueError as exc:
            raise ConfigError(f"hdd_change must be a number, got {text!r}") from exc
    if cfg.trend:
        with open(run.input(cfg.trend, "trend"), newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        if not rows or "pct_of_baseline" not in rows[0]:
            raise ConfigError(f"{cfg.trend} is not a trend_europe.csv file")
        items.append((f"trend:{rows[-1]['year']}", float(rows[-1]["pct_of_baseline"]) / 100.0 - 1.0))
    if not items:
        raise ConfigError("co2 needs --hdd-change values or a --trend file")
    for label, x in items:
        if not -1.0 <= x <= 1.0:
            raise ConfigError(f"hdd change {label} outside [-1, 1]")
    run.write_csv("co2.csv", [("label", "hdd_change", "hdd_change_sigma", "co2_change")] +
                  [(label, fmt(x), fmt(0.0), fmt(co2_change(x, cfg.k))) for label, x in items])


def cmd_synth(cfg: RunConfig, run: Run) -> None:
    """Write a small synthetic dataset for trying the other commands."""
    from .synthetic import europe_like

    n, years = 12, 21
    run.out.mkdir(parents=True, exist_ok=True)
    for scen, start, offset in (("historical", "1970-01-01T00:00:00", 0.0),
                                ("warm", "2080-01-01T00:00:00", 4.0)):
        f = europe_like(n, years, offset=offset, seed=cfg.seed)
        f = TemperatureField(f.grid, start, f.dt, f.values)
        write_gtsf(f, run.out / f"temp_{scen}.gtsf")
    grid = f.grid
    rng = np.random.default_rng(cfg.seed)
    write_population(PopulationRaster(grid, rng.uniform(0, 1000, grid.shape)), run.out / "population.gtsf")
    codes = np.where(np.arange(n)[:, None] < n // 2, 1, 2) * np.ones((1, n), dtype=int)
    write_mask(CountryMask(grid, codes, {1: "NOR", 2: "DEU"}), run.out / "mask.gtsf", run.out / "legend.csv")


COMMANDS = {
    "inspect": cmd_inspect,
    "hdd": cmd_hdd,
    "hlf": cmd_hlf,
    "screen": cmd_screen,
    "mc": cmd_mc,
    "report": cmd_report,
    "co2": cmd_co2,
    "synth": cmd_synth,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help="flat key = value configuration file")
    g.add_argument("--seed", type=int)
    g.add_argument("--jobs", type=int, help="worker threads (default: available cores)")
    g.add_argument("--out", help="output directory")
    g.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override any configuration key, e.g. catalog.gshp.lifetime=25")
    g.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="heatscreen", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def demand_opts(sp):
        sp.add_argument("--t-threshold", type=float)
        sp.add_argument("--dhw-dd-per-day", type=float)

    def inputs(sp):
        sp.add_argument("--temp", action="append", help="temperature GTSF (3-hourly or daily)")
        sp.add_argument("--period", action="append", help="year window START-END, END exclusive")

    def geo(sp):
        sp.add_argument("--population")
        sp.add_argument("--mask")
        sp.add_argument("--legend")

    sp = sub.add_parser("inspect", parents=[common], help="dump GTSF headers as JSON")
    sp.add_argument("inputs", nargs="+")

    sp = sub.add_parser("hdd", parents=[common], help="national degree-days and European trend")
    inputs(sp)
    geo(sp)
    demand_opts(sp)
    sp.add_argument("--window", type=int)
    sp.add_argument("--baseline-year", type=int)

    sp = sub.add_parser("hlf", parents=[common], help="per-cell heat load factors")
    inputs(sp)
    demand_opts(sp)

    sp = sub.add_parser("screen", parents=[common], help="cost-optimal technology map")
    inputs(sp)
    demand_opts(sp)
    sp.add_argument("--scheme", help="balanced | unperturbed | file:PATH | mc:N")
    sp.add_argument("--curve-cell", help="export the screening curve of cell I,J")

    sp = sub.add_parser("mc", parents=[common], help="Monte Carlo search for a balanced scheme")
    inputs(sp)
    demand_opts(sp)
    sp.add_argument("--trials", type=int)

    sp = sub.add_parser("report", parents=[common], help="ensemble technology shares and CO2")
    sp.add_argument("--member", action="append", help="SCENARIO:MODEL=PATH")
    sp.add_argument("--period", action="append", help="[SCENARIO=]START-END")
    sp.add_argument("--baseline-scenario")
    sp.add_argument("--scheme")
    sp.add_argument("--k", type=float, help="CO2 emissions per unit degree-day change")
    geo(sp)
    demand_opts(sp)

    sp = sub.add_parser("co2", parents=[common], help="CO2 change from degree-day change")
    sp.add_argument("--hdd-change", action="append", help="relative change, e.g. -0.42")
    sp.add_argument("--trend", help="trend_europe.csv; uses its last year")
    sp.add_argument("--k", type=float)

    sub.add_parser("synth", parents=[common], help="write a small synthetic dataset")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        cfg = build_config(args)
        run = Run(cfg)
        if args.command != "inspect":
            run.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, run)
        if args.command != "inspect":
            run.finish()
    except HeatScreenError as exc:
        print(f"heatscreen: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
