import numpy as np

from heatscreen.gridio import STEP_DAY, GridSpec, TemperatureField


def make_daily(values, start="2000-01-01T00:00:00", grid=None):
    """Daily field from an array [n_days] or [n_days, n_lat, n_lon]."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == 1:
        v = v[:, None, None]
    if grid is None:
        grid = GridSpec(v.shape[1], v.shape[2], 60.0, 10.0, -0.11, 0.11)
    return TemperatureField(grid, start, STEP_DAY, v)
