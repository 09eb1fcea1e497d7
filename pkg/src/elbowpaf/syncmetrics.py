"""Timestamp matching of two angle streams, RMSE and error histograms."""
from __future__ import annotations

import bisect
import math
import statistics
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .core import ParameterError
from .kinematics import AngleStream


class SyncRow(NamedTuple):
    t_ms: int
    angle_a_deg: float
    angle_b_deg: float


@dataclass(frozen=True)
class ErrorReport:
    n_rows: int
    rmse_deg: float
    histogram: tuple[tuple[float, float, int], ...]
    error_min_deg: float
    error_max_deg: float

    def to_json(self) -> dict:
        return {
            "n_rows": self.n_rows,
            "rmse_deg": self.rmse_deg,
            "histogram": [[lo, hi, n] for lo, hi, n in self.histogram],
            "error_min_deg": self.error_min_deg,
            "error_max_deg": self.error_max_deg,
        }


def _check_ordered(stream: AngleStream, name: str):
    ts = [s.t_ms for s in stream.samples]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise ParameterError(f"stream {name} is not in non-decreasing time order")
    return ts


def synchronize(a: AngleStream, b: AngleStream, tolerance_ms: int = 0) -> list[SyncRow]:
    """Pair every sample of ``a`` with every sample of ``b`` within ``tolerance_ms``.

    Rows come out in (a, then b) order with duplicate multiplicities kept,
    exactly as a nested loop over both streams would produce them; the
    stream-a timestamp labels each row. Because ``b`` is sorted, the matches
    for one ``a`` sample are a contiguous run found by bisection.
    """
    if tolerance_ms < 0 or int(tolerance_ms) != tolerance_ms:
        raise ParameterError(f"tolerance_ms must be a non-negative integer, got {tolerance_ms}")
    _check_ordered(a, "a")
    tb = _check_ordered(b, "b")
    rows = []
    for sa in a.samples:
        lo = bisect.bisect_left(tb, sa.t_ms - tolerance_ms)
        hi = bisect.bisect_right(tb, sa.t_ms + tolerance_ms)
        for sb in b.samples[lo:hi]:
            rows.append(SyncRow(sa.t_ms, sa.angle_deg, sb.angle_deg))
    return rows


def rmse(rows: Sequence[SyncRow]) -> float:
    if not rows:
        raise ParameterError("rmse of zero rows is undefined")
    return math.sqrt(math.fsum((r[1] - r[2]) ** 2 for r in rows) / len(rows))


def median_rmse(per_subject: Sequence[float]) -> float:
    if not per_subject:
        raise ParameterError("median of an empty list is undefined")
    return float(statistics.median(per_subject))


def _bin_index(e: float, w: float) -> int:
    k = math.floor(e / w)
    # e / w can round across an edge; settle against the actual interval bounds
    while e < k * w:
        k -= 1
    while e >= (k + 1) * w:
        k += 1
    return k


def error_histogram(rows: Sequence[SyncRow], bin_width_deg: float = 1.0) -> ErrorReport:
    """Signed errors ``a - b`` in half-open bins ``[k*w, (k+1)*w)``.

    Bins run contiguously from the one holding the smallest error to the
    one holding the largest, empty bins included.
    """
    if not (bin_width_deg > 0 and math.isfinite(bin_width_deg)):
        raise ParameterError(f"bin width must be positive, got {bin_width_deg}")
    if not rows:
        raise ParameterError("histogram of zero rows is undefined")
    errors = [r[1] - r[2] for r in rows]
    w = float(bin_width_deg)
    ks = [_bin_index(e, w) for e in errors]
    k0, k1 = min(ks), max(ks)
    counts = [0] * (k1 - k0 + 1)
    for k in ks:
        counts[k - k0] += 1
    hist = tuple((k * w, (k + 1) * w, counts[k - k0]) for k in range(k0, k1 + 1))
    return ErrorReport(len(rows), rmse(rows), hist, min(errors), max(errors))


def rows_to_csv(rows: Sequence[SyncRow]) -> str:
    lines = ["t_ms,angle_a_deg,angle_b_deg"]
    lines += [f"{r[0]},{r[1]!r},{r[2]!r}" for r in rows]
    return "\n".join(lines) + "\n"
