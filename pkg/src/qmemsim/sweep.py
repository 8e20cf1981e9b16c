"""Parameter sweeps of the two statistical complexities."""
import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._accel import USE_NUMBA
from .errors import ValidationError

COLUMNS = ("p", "q", "c_mu", "c_q", "gap")
DEFAULT_RANGE = (1e-4, 1.0 - 1e-4)


@dataclass(frozen=True)
class SweepRows:
    p: np.ndarray
    q: np.ndarray
    c_mu: np.ndarray
    c_q: np.ndarray

    @property
    def gap(self):
        """Points where the quantum memory fits in one qubit of entropy but the classical does not."""
        return (self.c_q < 1.0) & (self.c_mu > 1.0)

    @property
    def saving(self):
        return self.c_mu - self.c_q

    def __len__(self):
        return self.p.size


def backend():
    return "numba" if USE_NUMBA else "numpy"


def check_range(lo, hi):
    if not (0.0 < lo < 1.0 and 0.0 < hi < 1.0 and lo <= hi):
        raise ValidationError(f"sweep range must lie inside (0, 1), got [{lo}, {hi}]")
    return lo, hi


def axis(n, lo=DEFAULT_RANGE[0], hi=DEFAULT_RANGE[1]):
    if n < 2:
        raise ValidationError(f"grid resolution must be >= 2, got {n}")
    check_range(lo, hi)
    return np.linspace(lo, hi, n)


def _chunk(args):
    p, q = args
    return kernels.complexity_batch(p, q)


def evaluate(p, q, jobs=1):
    """Complexities at the given points, in the given order.

    ``jobs > 1`` splits the points over worker processes; each point is
    computed by the same kernel either way, so the result does not depend
    on ``jobs``.
    """
    p = np.ascontiguousarray(p, dtype=np.float64)
    q = np.ascontiguousarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise ValidationError("p and q must be 1-D arrays of equal length")
    if p.size and (np.any((p <= 0) | (p >= 1)) or np.any((q <= 0) | (q >= 1))):
        raise ValidationError("complexity sweeps need 0 < p, q < 1 at every point")
    if jobs <= 1 or p.size < 2 * jobs:
        c_mu, c_q = kernels.complexity_batch(p, q)
    else:
        parts = list(zip(np.array_split(p, jobs), np.array_split(q, jobs)))
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_chunk, parts))
        c_mu = np.concatenate([r[0] for r in results])
        c_q = np.concatenate([r[1] for r in results])
    return SweepRows(p, q, np.asarray(c_mu), np.asarray(c_q))


def surface(n, lo=DEFAULT_RANGE[0], hi=DEFAULT_RANGE[1], jobs=1):
    """``n x n`` grid, p-major (q varies fastest)."""
    ax = axis(n, lo, hi)
    P, Q = np.meshgrid(ax, ax, indexing="ij")
    return evaluate(P.ravel(), Q.ravel(), jobs)


def cross_section(fixed, value, n, lo=DEFAULT_RANGE[0], hi=DEFAULT_RANGE[1], jobs=1):
    """Sweep one parameter with the other held at ``value``."""
    if fixed not in ("p", "q"):
        raise ValidationError(f"fixed parameter must be 'p' or 'q', got {fixed!r}")
    if not 0.0 < value < 1.0:
        raise ValidationError(f"fixed value must lie in (0, 1), got {value}")
    ax = axis(n, lo, hi)
    other = np.full_like(ax, value)
    return evaluate(other, ax, jobs) if fixed == "p" else evaluate(ax, other, jobs)


def _fmt(x):
    return repr(float(x))


def to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for p, q, cm, cq, g in zip(rows.p, rows.q, rows.c_mu, rows.c_q, rows.gap):
        w.writerow((_fmt(p), _fmt(q), _fmt(cm), _fmt(cq), int(g)))
    return buf.getvalue()


def to_json(rows):
    records = [
        {"p": float(p), "q": float(q), "c_mu": float(cm), "c_q": float(cq), "gap": bool(g)}
        for p, q, cm, cq, g in zip(rows.p, rows.q, rows.c_mu, rows.c_q, rows.gap)
    ]
    return json.dumps({"columns": list(COLUMNS), "rows": records}, indent=1) + "\n"
