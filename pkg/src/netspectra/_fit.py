import numpy as np

from .errors import DataError


def loglog_fit(x, y):
    """Ordinary least squares of ln y on ln x.

    Returns (slope, intercept, stderr of slope).  With exactly two points
    the line is exact and the standard error is 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise DataError("x and y differ in length")
    if x.size < 2:
        raise DataError(f"need at least 2 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DataError("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    xm, ym = lx.mean(), ly.mean()
    dx = lx - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DataError("all x values coincide")
    slope = float(dx @ (ly - ym)) / sxx
    intercept = ym - slope * xm
    if x.size == 2:
        return slope, intercept, 0.0
    resid = ly - (intercept + slope * lx)
    stderr = float(np.sqrt((resid @ resid) / (x.size - 2) / sxx))
    return slope, intercept, stderr
