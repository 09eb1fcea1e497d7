"""Acceptance suite: one test per criterion, each under its runtime budget.

Each test records a ``[PASS]`` or ``[FAIL]`` line that is printed in the
terminal summary (and immediately, when run with ``-s``).
"""
import functools
import json
import math
import random
import statistics
import time

import mpmath
import numpy as np
import pytest

from conftest import ACCEPTANCE, bilinear_oracle
from elbowpaf import (
    ARM,
    DegenerateJointError,
    MaskGrid,
    ScalarGrid,
    Skeleton,
    SyncRow,
    VectorGrid,
    association_score,
    confidence_loss,
    decode_frame,
    elbow_angle,
    error_histogram,
    kernels,
    median_rmse,
    paf_loss,
    render_confidence_map,
    render_paf,
    render_skeleton,
    rmse,
    synchronize,
    total_loss,
)
from elbowpaf.cli import main as cli_main
from elbowpaf.kinematics import AngleStream
from elbowpaf.mapgen import RenderParams
from elbowpaf.simulate import frame_stamps


def criterion(number, title, budget_s):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            detail, ok = "", False
            try:
                detail = fn(*args, **kwargs) or ""
                elapsed = time.perf_counter() - start
                assert elapsed < budget_s, f"took {elapsed:.2f} s, budget {budget_s} s"
                ok = True
            except Exception as exc:
                detail = f"{type(exc).__name__}: {exc}".splitlines()[0]
                raise
            finally:
                elapsed = time.perf_counter() - start
                line = (f"[{'PASS' if ok else 'FAIL'}] AC{number} {title} "
                        f"({elapsed:.2f} s, budget {budget_s} s) {detail}").rstrip()
                ACCEPTANCE.append(line)
                print(line)
        return run
    return wrap


@criterion(1, "confidence-map formula", 1.0)
def test_ac1_confidence_map_formula():
    worst = 0.0
    # (joint, cell at distance sigma, sigma)
    cases = [((10.5, 20.0), (12, 20), 1.5), ((7.0, 7.0), (7, 9), 2.0),
             ((15.0, 12.0), (18, 16), 5.0), ((3.25, 4.0), (3, 4), 0.25),
             ((0.0, 0.0), (1, 0), 1.0)]
    for joint, (cx, cy), sigma in cases:
        g = render_confidence_map(joint, 32, 32, sigma)
        worst = max(worst, abs(g.values[cy, cx] - math.exp(-1.0)))
    assert worst <= 1e-12, worst
    for x, y in [(0, 0), (31, 31), (13, 5), (20, 27)]:
        for sigma in (0.5, 1.5, 3.0):
            assert render_confidence_map((float(x), float(y)), 32, 32, sigma).values[y, x] == 1.0
    return f"max |G - e^-1| = {worst:.1e}"


def paf_membership(x1, y1, x2, y2, sigma_r, h, w):
    """Both inequality conditions evaluated cell by cell in plain Python."""
    dx, dy = x2 - x1, y2 - y1
    r = math.sqrt(dx * dx + dy * dy)
    vx, vy = dx / r, dy / r
    cells = set()
    for row in range(h):
        for col in range(w):
            qx, qy = col - x1, row - y1
            along = qx * vx + qy * vy
            across = qx * -vy + qy * vx
            if 0.0 <= along <= r and abs(across) <= sigma_r:
                cells.add((row, col))
    return cells, (vx, vy)


@criterion(2, "PAF formula and membership", 10.0)
def test_ac2_paf_membership():
    rng = np.random.default_rng(2)
    n = mismatches = 0
    total_cells = 0
    while n < 1000:
        x1, y1, x2, y2 = rng.uniform(0, 31, 4)
        if x1 == x2 and y1 == y2:
            continue
        sigma_r = rng.uniform(0.3, 4.0)
        field = render_paf((x1, y1), (x2, y2), 32, 32, sigma_r).values
        want, v = paf_membership(x1, y1, x2, y2, sigma_r, 32, 32)
        nz = np.argwhere(np.any(field != 0.0, axis=2))
        got = {(int(r), int(c)) for r, c in nz}
        mismatches += len(got ^ want)
        total_cells += len(got)
        if got:
            vecs = field[nz[:, 0], nz[:, 1]]
            assert np.all(np.abs(np.hypot(vecs[:, 0], vecs[:, 1]) - 1.0) <= 1e-12)
            assert np.all(vecs == np.array(v))
        n += 1
    assert mismatches == 0, f"{mismatches} cells disagree with the membership oracle"
    return f"1000 limbs, {total_cells} support cells, 0 mismatches"


def dense_score(values, s1, s2, n=10_000):
    dx, dy = s2[0] - s1[0], s2[1] - s1[1]
    norm = math.hypot(dx, dy)
    total = 0.0
    for k in range(n):
        a = (k + 0.5) / n
        x, y = s1[0] + a * dx, s1[1] + a * dy
        total += (bilinear_oracle(values[:, :, 0], x, y) * dx
                  + bilinear_oracle(values[:, :, 1], x, y) * dy) / norm
    return total / n


@criterion(3, "association score calibration", 5.0)
def test_ac3_association_calibration():
    rng = np.random.default_rng(3)
    worst_true = worst_perp = 0.0
    limbs = 0
    while limbs < 20:
        p1, p2 = rng.uniform(2, 61, (2, 2))
        r = math.dist(p1, p2)
        if r < 12:
            continue
        v = (p2 - p1) / r
        s1, s2 = p1 + 4 * v, p2 - 4 * v
        field = render_paf(tuple(p1), tuple(p2), 64, 64, 2.0)
        z = association_score(field, tuple(s1), tuple(s2))
        oracle = dense_score(field.values, s1, s2)
        worst_true = max(worst_true, abs(z - oracle), abs(z - 1.0))

        perp = np.broadcast_to(np.array([-v[1], v[0]]), (64, 64, 2))
        zp = association_score(VectorGrid(perp), tuple(s1), tuple(s2))
        worst_perp = max(worst_perp, abs(zp))
        limbs += 1
    assert worst_true <= 1e-6, worst_true
    assert worst_perp <= 1e-9, worst_perp
    return f"|Z - 1| <= {worst_true:.1e}, |Z_perp| <= {worst_perp:.1e}"


@criterion(4, "loss identities", 5.0)
def test_ac4_loss_identities():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(200):
        h, w = rng.integers(1, 20, 2)
        s = ScalarGrid(rng.uniform(0, 1, (h, w)))
        v = VectorGrid(rng.uniform(-1, 1, (h, w, 2)))
        m = MaskGrid(rng.integers(0, 2, (h, w)).astype(float))
        assert confidence_loss(s, s, m) == 0.0 and paf_loss(v, v, m) == 0.0
        other_s = ScalarGrid(rng.uniform(0, 1, (h, w)))
        other_v = VectorGrid(rng.uniform(-1, 1, (h, w, 2)))
        zero = MaskGrid.zeros(w, h)
        assert confidence_loss(other_s, s, zero) == 0.0 and paf_loss(other_v, v, zero) == 0.0

        r, c = rng.integers(0, h), rng.integers(0, w)
        delta = rng.uniform(-1, 1)
        bumped = s.values.copy()
        bumped[r, c] += delta
        worst = max(worst, abs(confidence_loss(ScalarGrid(bumped), s) - delta ** 2))
        bumped_v = v.values.copy()
        bumped_v[r, c, rng.integers(0, 2)] += delta
        worst = max(worst, abs(paf_loss(VectorGrid(bumped_v), v) - delta ** 2))
    assert worst <= 1e-12, worst

    for _ in range(100):
        stages = []
        for _ in range(rng.integers(1, 7)):
            a, b = rng.uniform(0, 1, (2, 6, 6))
            fa, fb = rng.uniform(-1, 1, (2, 6, 6, 2))
            stages.append((confidence_loss(ScalarGrid(a), ScalarGrid(b)),
                           paf_loss(VectorGrid(fa), VectorGrid(fb))))
        expect = math.fsum(x for pair in stages for x in pair)
        assert abs(total_loss(stages) - expect) <= 1e-12 * max(1.0, expect)
    return f"single-cell |L - delta^2| <= {worst:.1e}; 100 stage lists summed"


def random_arm(rng, size=64, sigma=1.5):
    lo, hi = 3 * sigma, size - 1 - 3 * sigma
    while True:
        pts = rng.uniform(lo, hi, (3, 2))
        if all(math.dist(pts[i], pts[j]) >= 6 * sigma for i, j in ((0, 1), (0, 2), (1, 2))):
            return Skeleton.from_points(dict(zip(ARM.parts, map(tuple, pts))))


@criterion(5, "round-trip decoding", 60.0)
def test_ac5_round_trip():
    rng = np.random.default_rng(5)
    params = RenderParams(1.5, 2.0)
    worst_px = worst_deg = 0.0
    for _ in range(500):
        sk = random_arm(rng)
        maps, fields = render_skeleton(sk, ARM, 64, 64, params)
        got = decode_frame(maps, fields, ARM)
        for part in ARM.parts:
            assert part in got, f"{part} not recovered"
            worst_px = max(worst_px, math.dist(got[part], sk[part]))
        truth = elbow_angle(*(sk[p] for p in ARM.parts))
        worst_deg = max(worst_deg, abs(elbow_angle(*(got[p] for p in ARM.parts)) - truth))
    assert worst_px < 0.5, worst_px
    assert worst_deg < 1.0, worst_deg
    return f"max joint error {worst_px:.3f} px, max angle error {worst_deg:.3f} deg"


def cosine_law_deg(s, e, w):
    s, e, w = ([mpmath.mpf(float(c)) for c in p] for p in (s, e, w))
    a2 = (s[0] - e[0]) ** 2 + (s[1] - e[1]) ** 2
    b2 = (w[0] - e[0]) ** 2 + (w[1] - e[1]) ** 2
    c2 = (s[0] - w[0]) ** 2 + (s[1] - w[1]) ** 2
    return float(mpmath.degrees(mpmath.acos((a2 + b2 - c2) / (2 * mpmath.sqrt(a2 * b2)))))


@criterion(6, "elbow angle formula", 5.0)
def test_ac6_angle_formula():
    rng = np.random.default_rng(6)
    worst = worst_inv = 0.0
    with mpmath.workdps(40):
        for s, e, w in rng.uniform(-100, 100, (10_000, 3, 2)):
            a = elbow_angle(s, e, w)
            worst = max(worst, abs(a - cosine_law_deg(s, e, w)))
            th = rng.uniform(0, 2 * math.pi)
            c, sn = math.cos(th), math.sin(th)
            k = rng.uniform(0.1, 10)
            tx, ty = rng.uniform(-1000, 1000, 2)

            def move(p):
                return (k * (c * p[0] - sn * p[1]) + tx, k * (sn * p[0] + c * p[1]) + ty)

            worst_inv = max(worst_inv, abs(elbow_angle(move(s), move(e), move(w)) - a))
    assert worst <= 1e-9, worst
    assert worst_inv <= 1e-9, worst_inv
    raised = 0
    for s, e, w in [((1, 2), (1, 2), (3, 4)), ((0, 0), (5, 5), (5, 5)),
                    ((2, 2), (2, 2), (2, 2)), ((-0.0, 0.0), (0.0, -0.0), (1, 1))]:
        with pytest.raises(DegenerateJointError):
            elbow_angle(s, e, w)
        raised += 1
    return f"oracle gap {worst:.1e} deg, invariance gap {worst_inv:.1e} deg, {raised} degenerate raised"


def nested_loop_sync(kinect, rgb, tol):
    syn = []
    for kinect_time, kinect_angle in kinect:
        for rgb_time, rgb_angle in rgb:
            if abs(kinect_time - rgb_time) <= tol:
                syn.append((kinect_time, kinect_angle, rgb_angle))
    return syn


@criterion(7, "synchronization oracle equivalence", 30.0)
def test_ac7_sync_oracle():
    r = random.Random(7)
    rows = 0
    for _ in range(1000):
        streams = []
        for _ in range(2):
            n = r.randint(0, 200)
            ts = sorted(r.randint(0, 2 * n + 5) for _ in range(n))  # dense enough for duplicates
            streams.append([(t, r.uniform(0, 180)) for t in ts])
        tol = r.randint(0, 10)
        got = synchronize(AngleStream.from_pairs(streams[0]), AngleStream.from_pairs(streams[1]), tol)
        want = nested_loop_sync(streams[0], streams[1], tol)
        assert [tuple(row) for row in got] == want
        rows += len(want)
    return f"1000 pairs identical, {rows} rows"


@criterion(8, "metrics", 10.0)
def test_ac8_metrics():
    r = random.Random(8)
    for _ in range(200):
        offset = r.randint(-160, 160) / 16  # dyadic, so a - b is exact
        n = r.randint(1, 300)
        base = [r.randint(0, 160 * 64) / 64 for _ in range(n)]
        rows = [SyncRow(t, a + max(offset, 0), a + max(-offset, 0)) for t, a in enumerate(base)]
        assert rmse(rows) == abs(offset)
    assert median_rmse([1.5, 4, 2, 2.5, 3.5]) == 2.5
    assert median_rmse([1, 2, 0.5, 0.5, 1]) == 1.0
    for _ in range(1000):
        n = r.randint(1, 100)
        rows = [SyncRow(t, r.uniform(0, 180), r.uniform(0, 180)) for t in range(n)]
        rep = error_histogram(rows, r.choice([0.1, 0.5, 1.0, 2.0, 5.0, 30.0]))
        assert sum(count for *_, count in rep.histogram) == n == rep.n_rows
    return "offset rmse exact; medians 2.5 / 1.0; 1000 histograms sum to row count"


@criterion(9, "end-to-end simulate", 60.0)
def test_ac9_simulate(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = cli_main(["simulate", "--seed", "0", "--noise", "0", "--fps-a", "30", "--fps-b", "15",
                     "--tolerance-ms", "0", "-o", str(out)])
    capsys.readouterr()
    assert code == 0
    report = json.loads(out.read_text())
    expected = len(frame_stamps(15, 4.0))
    assert report["n_rows"] == expected, (report["n_rows"], expected)
    assert report["rmse_deg"] < 0.5, report["rmse_deg"]
    return f"rows {report['n_rows']} == {expected}, rmse {report['rmse_deg']:.3f} deg"


@criterion(10, "decode throughput", 30.0)
def test_ac10_throughput():
    rng = np.random.default_rng(10)
    maps, fields = render_skeleton(random_arm(rng), ARM, 64, 64, RenderParams())
    timings = {}
    for name in sorted(kernels.available_backends()):
        with kernels.use(name):
            decode_frame(maps, fields, ARM)
            runs = []
            for _ in range(200):
                t0 = time.perf_counter()
                decode_frame(maps, fields, ARM)
                runs.append(time.perf_counter() - t0)
        timings[name] = statistics.median(runs) * 1e3
    for name, ms in timings.items():
        assert ms < 66.0, f"{name} backend {ms:.2f} ms per frame"
    best = min(timings.values())
    parts = ", ".join(f"{k} {v:.2f} ms" for k, v in sorted(timings.items()))
    return f"median per frame: {parts}; 5 ms target {'met' if best < 5 else 'missed'}"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
