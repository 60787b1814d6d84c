"""Gridded rasters and the GTSF binary format.

GTSF layout (all little-endian)::

    magic "GTSF" | version u16 | payload_kind u8 | reserved u8
    n_lat u32 | n_lon u32 | lat0 f64 | lon0 f64 | d_lat f64 | d_lon f64
    t_start: u16 byte length + UTF-8 ISO-8601 string
    dt_seconds u32 | n_t u32
    payload: n_t * n_lat * n_lon elements, row-major (t, lat, lon)

payload_kind 0 is float32 (temperatures, population), 1 is uint16 (country
codes). Value (t, i, j) sits at flat offset ``t*n_lat*n_lon + i*n_lon + j``.
"""

from __future__ import annotations

import csv
import logging
import os
import struct
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    GridMismatch,
    InvalidField,
    IoFailure,
    LegendMissingCode,
    NegativePopulation,
    OutOfRangeValue,
    TruncatedPayload,
    UnsupportedVersion,
)

log = logging.getLogger(__name__)

MAGIC = b"GTSF"
VERSION = 1
KIND_FLOAT32 = 0
KIND_UINT16 = 1

STEP_3H = 10800
STEP_DAY = 86400
VALID_STEPS = (STEP_3H, STEP_DAY)

T_MIN, T_MAX = -90.0, 60.0

_HEAD = struct.Struct("<4sHBBIIdddd")
_LEN = struct.Struct("<H")
_TAIL = struct.Struct("<II")
_DTYPES = {KIND_FLOAT32: np.dtype("<f4"), KIND_UINT16: np.dtype("<u2")}

# static rasters (population, mask) carry a nominal time header
STATIC_T_START = "1970-01-01T00:00:00+00:00"


@dataclass(frozen=True)
class GridSpec:
    n_lat: int
    n_lon: int
    lat0: float
    lon0: float
    d_lat: float
    d_lon: float

    def __post_init__(self):
        if self.n_lat < 1 or self.n_lon < 1:
            raise InvalidField(f"grid must have at least one cell, got {self.n_lat}x{self.n_lon}")
        if self.d_lat == 0 or self.d_lon == 0:
            raise InvalidField("grid steps d_lat and d_lon must be non-zero")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_lat, self.n_lon)

    @property
    def n_cells(self) -> int:
        return self.n_lat * self.n_lon

    def lats(self) -> np.ndarray:
        return self.lat0 + self.d_lat * np.arange(self.n_lat)

    def lons(self) -> np.ndarray:
        return self.lon0 + self.d_lon * np.arange(self.n_lon)

    def compatible(self, other: "GridSpec") -> bool:
        return self == other


def check_compatible(*grids: GridSpec) -> None:
    """Raise GridMismatch unless every grid equals the first."""
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise GridMismatch(f"incompatible grids: {first} vs {g}")


def parse_time(text: str) -> datetime:
    """Parse an ISO-8601 timestamp into a naive UTC datetime."""
    s = text.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    try:
        t = datetime.fromisoformat(s)
    except ValueError as exc:
        raise InvalidField(f"bad ISO-8601 timestamp {text!r}") from exc
    if t.tzinfo is not None:
        t = t.astimezone(timezone.utc).replace(tzinfo=None)
    return t


@dataclass(eq=False)
class TemperatureField:
    """Temperature series on a grid, values[t, lat, lon] in degC, NaN = missing."""

    grid: GridSpec
    t_start: str
    dt: int
    values: np.ndarray

    def __post_init__(self):
        parse_time(self.t_start)
        if self.dt not in VALID_STEPS:
            raise InvalidField(f"dt must be one of {VALID_STEPS}, got {self.dt}")
        v = np.asarray(self.values)
        if v.ndim != 3 or v.shape[1:] != self.grid.shape:
            raise InvalidField(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if v.shape[0] < 1:
            raise InvalidField("field needs at least one time step")
        if not np.issubdtype(v.dtype, np.floating):
            v = v.astype(np.float64)
        self.values = v
        ok = v[~np.isnan(v)]
        if ok.size and (not np.all(np.isfinite(ok)) or ok.min() < T_MIN or ok.max() > T_MAX):
            raise OutOfRangeValue(
                f"temperatures must lie in [{T_MIN}, {T_MAX}] degC, got [{ok.min()}, {ok.max()}]")

    @property
    def n_t(self) -> int:
        return self.values.shape[0]

    def times(self) -> np.ndarray:
        start = np.datetime64(parse_time(self.t_start), "s")
        return start + np.arange(self.n_t, dtype=np.int64) * np.timedelta64(self.dt, "s")

    def years(self) -> np.ndarray:
        return self.times().astype("datetime64[Y]").astype(np.int64) + 1970

    def equals(self, other: "TemperatureField") -> bool:
        """Structural equality, NaN positions included."""
        return (
            self.grid == other.grid
            and self.t_start == other.t_start
            and self.dt == other.dt
            and self.values.shape == other.values.shape
            and np.array_equal(self.values, other.values, equal_nan=True)
        )


def select_years(field: TemperatureField, start: int, end: int) -> TemperatureField:
    """Samples with start <= year < end; ``(1970, 1990)`` is a 20-year window."""
    years = field.years()
    idx = np.nonzero((years >= start) & (years < end))[0]
    if idx.size == 0:
        raise InvalidField(
            f"period {start}-{end} lies outside the data span {years[0]}-{years[-1]}")
    first = field.times()[idx[0]].astype(datetime)
    return TemperatureField(field.grid, first.isoformat(), field.dt, field.values[idx[0]:idx[-1] + 1])


@dataclass(eq=False)
class PopulationRaster:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != self.grid.shape:
            raise InvalidField(f"population shape {v.shape} does not match grid {self.grid.shape}")
        v = np.where(np.isnan(v), 0.0, v)
        if np.any(v < 0):
            raise NegativePopulation("population raster contains negative values")
        self.values = v


@dataclass(eq=False)
class CountryMask:
    grid: GridSpec
    codes: np.ndarray
    legend: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.codes)
        if c.shape != self.grid.shape:
            raise InvalidField(f"mask shape {c.shape} does not match grid {self.grid.shape}")
        self.codes = c.astype(np.uint16)
        for code, iso in self.legend.items():
            if not (1 <= code <= 0xFFFF):
                raise InvalidField(f"legend code {code} outside 1..65535")
            if len(iso) != 3 or not iso.isascii() or not iso.isalpha() or not iso.isupper():
                raise InvalidField(f"ISO3 code must be 3 uppercase letters, got {iso!r}")
        isos = list(self.legend.values())
        if len(set(isos)) != len(isos):
            raise InvalidField("legend maps several codes to one ISO3 string")
        present = set(np.unique(self.codes).tolist()) - {0}
        missing = sorted(present - set(self.legend))
        if missing:
            raise LegendMissingCode(f"mask codes without legend entry: {missing}")

    def countries(self) -> list[str]:
        """ISO3 strings of the countries present in the raster, sorted."""
        present = set(np.unique(self.codes).tolist()) - {0}
        return sorted(self.legend[c] for c in present)

    def cells_of(self, iso3: str) -> np.ndarray:
        """Boolean [n_lat, n_lon] membership of one country."""
        codes = [c for c, s in self.legend.items() if s == iso3]
        if not codes:
            return np.zeros(self.grid.shape, dtype=bool)
        return self.codes == codes[0]


# -- low-level format -----------------------------------------------------


@dataclass
class GtsfHeader:
    version: int
    payload_kind: int
    grid: GridSpec
    t_start: str
    dt: int
    n_t: int

    def as_dict(self) -> dict:
        g = self.grid
        return {
            "version": self.version,
            "payload_kind": self.payload_kind,
            "n_lat": g.n_lat, "n_lon": g.n_lon,
            "lat0": g.lat0, "lon0": g.lon0, "d_lat": g.d_lat, "d_lon": g.d_lon,
            "t_start": self.t_start, "dt": self.dt, "n_t": self.n_t,
        }


def encode_gtsf(grid: GridSpec, t_start: str, dt: int, payload: np.ndarray, kind: int) -> bytes:
    dtype = _DTYPES[kind]
    arr = np.ascontiguousarray(payload, dtype=dtype)
    if arr.ndim != 3 or arr.shape[1:] != grid.shape:
        raise InvalidField(f"payload shape {arr.shape} does not match grid {grid.shape}")
    ts = t_start.encode("utf-8")
    if len(ts) > 0xFFFF:
        raise InvalidField("t_start string too long")
    parts = [
        _HEAD.pack(MAGIC, VERSION, kind, 0, grid.n_lat, grid.n_lon,
                   grid.lat0, grid.lon0, grid.d_lat, grid.d_lon),
        _LEN.pack(len(ts)), ts,
        _TAIL.pack(dt, arr.shape[0]),
        arr.tobytes(order="C"),
    ]
    return b"".join(parts)


def decode_gtsf(data: bytes, source: str = "<bytes>") -> tuple[GtsfHeader, np.ndarray]:
    if data[:4] != MAGIC:
        raise BadMagic(f"{source}: not a GTSF file (magic {data[:4]!r})")
    if len(data) < _HEAD.size + _LEN.size:
        raise TruncatedPayload(f"{source}: header truncated")
    magic, version, kind, _reserved, n_lat, n_lon, lat0, lon0, d_lat, d_lon = _HEAD.unpack_from(data, 0)
    if version != VERSION:
        raise UnsupportedVersion(f"{source}: GTSF version {version} (supported: {VERSION})")
    if kind not in _DTYPES:
        raise UnsupportedVersion(f"{source}: unknown payload kind {kind}")
    off = _HEAD.size
    (n,) = _LEN.unpack_from(data, off)
    off += _LEN.size
    if len(data) < off + n + _TAIL.size:
        raise TruncatedPayload(f"{source}: header truncated")
    try:
        t_start = data[off:off + n].decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidField(f"{source}: t_start is not UTF-8") from exc
    off += n
    dt, n_t = _TAIL.unpack_from(data, off)
    off += _TAIL.size
    grid = GridSpec(n_lat, n_lon, lat0, lon0, d_lat, d_lon)
    dtype = _DTYPES[kind]
    expected = n_t * n_lat * n_lon * dtype.itemsize
    remaining = len(data) - off
    if remaining < expected:
        raise TruncatedPayload(
            f"{source}: header declares {expected} payload bytes, only {remaining} present")
    if remaining > expected:
        raise IoFailure(f"{source}: {remaining - expected} trailing bytes after payload")
    arr = np.frombuffer(data, dtype=dtype, count=n_t * n_lat * n_lon, offset=off)
    arr = arr.reshape(n_t, n_lat, n_lon).copy()
    return GtsfHeader(version, kind, grid, t_start, dt, n_t), arr


def _read_bytes(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc


def atomic_write_bytes(path, data: bytes) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_header(path) -> GtsfHeader:
    header, _ = decode_gtsf(_read_bytes(path), str(path))
    return header


def read_gtsf(path) -> TemperatureField:
    header, arr = decode_gtsf(_read_bytes(path), str(path))
    if header.payload_kind != KIND_FLOAT32:
        raise InvalidField(f"{path}: temperature file must carry a float32 payload")
    return TemperatureField(header.grid, header.t_start, header.dt, arr)


def write_gtsf(field: TemperatureField, path) -> None:
    atomic_write_bytes(path, gtsf_bytes(field))


def gtsf_bytes(field: TemperatureField) -> bytes:
    return encode_gtsf(field.grid, field.t_start, field.dt, field.values, KIND_FLOAT32)


def read_population(path) -> PopulationRaster:
    header, arr = decode_gtsf(_read_bytes(path), str(path))
    if header.payload_kind != KIND_FLOAT32 or header.n_t != 1:
        raise InvalidField(f"{path}: population raster must be float32 with n_t = 1")
    return PopulationRaster(header.grid, arr[0].astype(np.float64))


def write_population(pop: PopulationRaster, path) -> None:
    data = encode_gtsf(pop.grid, STATIC_T_START, STEP_DAY, pop.values[None], KIND_FLOAT32)
    atomic_write_bytes(path, data)


def read_legend(path) -> dict[int, str]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["code", "iso3"]:
        raise InvalidField(f"{path}: legend must start with header 'code,iso3'")
    legend: dict[int, str] = {}
    for row in rows[1:]:
        if not row:
            continue
        try:
            code = int(row[0])
            iso = row[1].strip()
        except (ValueError, IndexError) as exc:
            raise InvalidField(f"{path}: bad legend row {row}") from exc
        if code in legend:
            raise InvalidField(f"{path}: code {code} listed twice")
        legend[code] = iso
    return legend


def write_legend(legend: dict[int, str], path) -> None:
    lines = ["code,iso3"] + [f"{c},{legend[c]}" for c in sorted(legend)]
    atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("utf-8"))


def read_mask(path, legend_path) -> CountryMask:
    header, arr = decode_gtsf(_read_bytes(path), str(path))
    if header.payload_kind != KIND_UINT16 or header.n_t != 1:
        raise InvalidField(f"{path}: country mask must be uint16 with n_t = 1")
    return CountryMask(header.grid, arr[0], read_legend(legend_path))


def write_mask(mask: CountryMask, path, legend_path=None) -> None:
    data = encode_gtsf(mask.grid, STATIC_T_START, STEP_DAY, mask.codes[None], KIND_UINT16)
    atomic_write_bytes(path, data)
    if legend_path is not None:
        write_legend(mask.legend, legend_path)
