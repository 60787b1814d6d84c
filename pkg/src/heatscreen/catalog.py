"""Heating technologies, their cost ranges, and pricing schemes.

Costs are per kW of installed capacity (install, equip in EUR/kW, maint in
EUR/kW/yr) and fuel in EUR/MWh of final energy.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .errors import ConfigError


class Tech(enum.IntEnum):
    # order is the tie-break order
    GasBoiler = 0
    OilBoiler = 1
    ElectricBoiler = 2
    A2A_EB = 3
    ASHP = 4
    GSHP = 5
    BiomassBoiler = 6

    @property
    def key(self) -> str:
        return TECH_KEYS[self]

    @classmethod
    def from_key(cls, key: str) -> "Tech":
        k = key.strip().lower()
        for t, name in TECH_KEYS.items():
            if name == k or t.name.lower() == k:
                return t
        raise ConfigError(f"unknown technology {key!r}")


TECH_KEYS = {
    Tech.GasBoiler: "gas",
    Tech.OilBoiler: "oil",
    Tech.ElectricBoiler: "electric",
    Tech.A2A_EB: "a2a_eb",
    Tech.ASHP: "ashp",
    Tech.GSHP: "gshp",
    Tech.BiomassBoiler: "biomass",
}
TECHS = tuple(Tech)
ELECTRIC = (Tech.ElectricBoiler, Tech.A2A_EB, Tech.ASHP, Tech.GSHP)
PRICE_FIELDS = ("install", "equip", "maint", "fuel")


@dataclass(frozen=True)
class Range:
    nominal: float
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.nominal <= self.hi:
            raise ConfigError(f"range violates lo <= nominal <= hi: {self}")


@dataclass(frozen=True)
class Efficiency:
    """How a technology converts final energy to heat.

    ``fixed``: constant efficiency ``eta``. ``heatpump``: COP at ``sink`` degC
    drawing from ``source`` ("air" or "ground") for both services. ``hybrid``:
    air heat pump at ``sink`` for space heat plus a fixed-efficiency boiler
    (``eta``) for hot water.
    """

    kind: str
    eta: float | None = None
    sink: float | None = None
    source: str | None = None


@dataclass(frozen=True)
class TechnologySpec:
    tech: Tech
    install: Range
    equip: Range
    maint: Range
    fuel: float
    lifetime: float
    discount_rate: float
    efficiency: Efficiency
    capacity: float = 10.0

    def __post_init__(self):
        if self.lifetime <= 0:
            raise ConfigError(f"{self.tech.name}: lifetime must be positive")
        if not 0 < self.discount_rate < 1:
            raise ConfigError(f"{self.tech.name}: discount rate must lie in (0, 1)")
        if self.capacity <= 0:
            raise ConfigError(f"{self.tech.name}: capacity must be positive")
        if self.fuel <= 0:
            raise ConfigError(f"{self.tech.name}: fuel price must be positive")
        e = self.efficiency
        if e.kind in ("fixed", "hybrid") and not (e.eta is not None and 0 < e.eta <= 1):
            raise ConfigError(f"{self.tech.name}: fixed efficiency must lie in (0, 1]")
        if e.kind in ("heatpump", "hybrid") and e.source not in ("air", "ground"):
            raise ConfigError(f"{self.tech.name}: heat pump source must be 'air' or 'ground'")
        if e.kind not in ("fixed", "heatpump", "hybrid"):
            raise ConfigError(f"{self.tech.name}: unknown efficiency model {e.kind!r}")


def _spec(tech, install, equip, maint, fuel, lifetime, efficiency):
    return TechnologySpec(tech, Range(*install), Range(*equip), Range(*maint), fuel,
                          lifetime, 0.04, efficiency)


# Energinet/Eurostat-derived nominal costs with uniform uncertainty ranges
DEFAULT_CATALOG: dict[Tech, TechnologySpec] = {
    s.tech: s for s in (
        _spec(Tech.GasBoiler, (100, 93, 148), (170, 157, 252), (17, 14, 22), 45, 20,
              Efficiency("fixed", eta=0.97)),
        _spec(Tech.OilBoiler, (100, 80, 140), (230, 187, 326), (14, 13, 18), 64, 20,
              Efficiency("fixed", eta=0.95)),
        _spec(Tech.ElectricBoiler, (50, 30, 70), (50, 30, 70), (7, 5, 10), 127, 20,
              Efficiency("fixed", eta=1.0)),
        _spec(Tech.A2A_EB, (75, 50, 83), (225, 150, 250), (22, 17, 25), 127, 12,
              Efficiency("hybrid", eta=1.0, sink=30.0, source="air")),
        _spec(Tech.ASHP, (304, 240, 480), (456, 360, 720), (24, 19, 30), 127, 18,
              Efficiency("heatpump", sink=55.0, source="air")),
        _spec(Tech.GSHP, (420, 350, 560), (780, 650, 1040), (24, 19, 30), 127, 20,
              Efficiency("heatpump", sink=55.0, source="ground")),
        _spec(Tech.BiomassBoiler, (118, 40, 200), (472, 160, 800), (25, 16, 27), 51, 20,
              Efficiency("fixed", eta=0.88)),
    )
}

FUEL_SPREAD = 0.20


@dataclass(frozen=True)
class Prices:
    install: float
    equip: float
    maint: float
    fuel: float


@dataclass(frozen=True)
class PricingScheme:
    prices: dict[Tech, Prices]
    provenance: str = "Unperturbed"
    seed: int | None = None
    trial: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        missing = [t.name for t in TECHS if t not in self.prices]
        if missing:
            raise ConfigError(f"pricing scheme lacks technologies: {missing}")
        for t, p in self.prices.items():
            for f in PRICE_FIELDS:
                if not getattr(p, f) > 0:
                    raise ConfigError(f"{t.name}.{f} must be positive, got {getattr(p, f)}")

    def __getitem__(self, tech: Tech) -> Prices:
        return self.prices[tech]


def unperturbed_scheme(catalog: dict[Tech, TechnologySpec] = DEFAULT_CATALOG) -> PricingScheme:
    return PricingScheme(
        {t: Prices(s.install.nominal, s.equip.nominal, s.maint.nominal, s.fuel)
         for t, s in catalog.items()},
        provenance="Unperturbed",
    )


_BALANCED_ROWS = {
    # install, equip, maint, fuel
    Tech.GasBoiler: (117, 200, 18, 65),
    Tech.OilBoiler: (99, 293, 17, 80),
    Tech.ElectricBoiler: (64, 48, 7, 144),
    Tech.A2A_EB: (65, 194, 21, 144),
    Tech.ASHP: (347, 520, 24, 144),
    Tech.GSHP: (443, 824, 24, 144),
    Tech.BiomassBoiler: (84, 336, 23, 59),
}


def balanced_scheme() -> PricingScheme:
    """The published balanced scheme, shipped as a built-in preset."""
    return PricingScheme({t: Prices(*map(float, row)) for t, row in _BALANCED_ROWS.items()},
                         provenance="Balanced")


def with_overrides(catalog: dict[Tech, TechnologySpec], overrides: dict[str, str]) -> dict[Tech, TechnologySpec]:
    """Apply ``<tech>.<field>`` overrides (lifetime, discount_rate, capacity, fuel, eta)."""
    out = dict(catalog)
    for key, value in overrides.items():
        try:
            tkey, fname = key.split(".", 1)
            v = float(value)
        except ValueError as exc:
            raise ConfigError(f"bad catalog override {key} = {value}") from exc
        tech = Tech.from_key(tkey)
        spec = out[tech]
        if fname in ("lifetime", "discount_rate", "capacity", "fuel"):
            spec = replace(spec, **{fname: v})
        elif fname == "eta":
            spec = replace(spec, efficiency=replace(spec.efficiency, eta=v))
        elif fname == "sink":
            spec = replace(spec, efficiency=replace(spec.efficiency, sink=v))
        else:
            raise ConfigError(f"unknown catalog field in override {key!r}")
        out[tech] = spec
    caps = {s.capacity for s in out.values()}
    if len(caps) != 1:
        raise ConfigError("all technologies must share one installed capacity")
    return out
