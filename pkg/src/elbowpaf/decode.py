"""Peak extraction, limb scoring and single-person skeleton assembly."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import kernels
from .core import (
    DegenerateLimbError,
    DomainError,
    Joint,
    LimbTopology,
    ParameterError,
    Point2,
    ScalarGrid,
    Skeleton,
    VectorGrid,
    is_degenerate_segment,
)

DEFAULT_THRESHOLD = 0.1
DEFAULT_SAMPLES = 10


@dataclass(frozen=True)
class PartCandidate:
    part: str
    position: Point2
    score: float
    cell: tuple[int, int] = (0, 0)  # (row, col) of the integer peak


@dataclass(frozen=True)
class LimbScore:
    limb: int
    candidate_a: PartCandidate
    candidate_b: PartCandidate
    z: float


def refine_subpixel(grid: ScalarGrid, peak: tuple[int, int]) -> Point2:
    """Quadratic sub-pixel refinement of an integer peak at ``(row, col)``.

    Each axis is fitted independently through the peak and its two axis
    neighbours; the offset is clamped to [-0.5, 0.5]. Border peaks come back
    unrefined.
    """
    r, c = peak
    v = grid.values
    h, w = v.shape
    if not (0 < r < h - 1 and 0 < c < w - 1):
        return Point2(float(c), float(r))

    def offset(fm, f0, fp):
        curv = fm - 2.0 * f0 + fp
        if curv == 0.0:
            return 0.0
        return min(0.5, max(-0.5, (fm - fp) / (2.0 * curv)))

    dx = offset(v[r, c - 1], v[r, c], v[r, c + 1])
    dy = offset(v[r - 1, c], v[r, c], v[r + 1, c])
    return Point2(c + dx, r + dy)


def _plateau_leaders(rows, cols, has_smaller):
    """Pick the top-left cell of each 8-connected group of candidate cells.

    Adjacent candidates are necessarily equal-valued (each is >= the other),
    so a connected group is a plateau. Groups with no strictly smaller
    neighbour anywhere (a flat grid) yield nothing.
    """
    cells = list(zip(rows.tolist(), cols.tolist()))
    index = {cell: k for k, cell in enumerate(cells)}
    seen = [False] * len(cells)
    keep = []
    for k, cell in enumerate(cells):  # raster order, so the first hit is top-left
        if seen[k]:
            continue
        seen[k] = True
        stack, group = [k], [k]
        while stack:
            r, c = cells[stack.pop()]
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    j = index.get((r + dr, c + dc))
                    if j is not None and not seen[j]:
                        seen[j] = True
                        stack.append(j)
                        group.append(j)
        if any(has_smaller[j] for j in group):
            keep.append(cell)
    return keep


def find_peaks(grid: ScalarGrid, threshold: float = DEFAULT_THRESHOLD,
               part: str = "") -> list[PartCandidate]:
    """Local maxima above ``threshold``, refined to sub-pixel.

    Ordered by descending score, ties by (row, col).
    """
    if not 0.0 < threshold < 1.0:
        raise ParameterError(f"threshold must lie in (0, 1), got {threshold}")
    rows, cols, flags = kernels.peak_scan(grid.values, float(threshold))
    if len(rows) == 0:
        return []
    if grid.values.size == 1:
        flags = [True]  # a lone cell has no neighbours to be flat against
    cells = _plateau_leaders(rows, cols, flags)
    v = grid.values
    cells.sort(key=lambda rc: (-v[rc], rc[0], rc[1]))
    return [PartCandidate(part, refine_subpixel(grid, rc), min(1.0, float(v[rc])), rc)
            for rc in cells]


def association_score(field: VectorGrid, s_g1: Point2, s_g2: Point2,
                      n_samples: int = DEFAULT_SAMPLES) -> float:
    """Trapezoidal line integral of the field along ``s_g1 -> s_g2``.

    The field is sampled bilinearly at ``n_samples`` evenly spaced points,
    endpoints included with half weight, and dotted with the unit direction.
    """
    if n_samples < 2:
        raise ParameterError(f"n_samples must be >= 2, got {n_samples}")
    if is_degenerate_segment(s_g1, s_g2):
        raise DegenerateLimbError(f"candidate endpoints coincide at ({s_g1[0]}, {s_g1[1]})")
    for p in (s_g1, s_g2):
        if not field.contains(p):
            raise DomainError(f"point ({p[0]}, {p[1]}) outside {field.width}x{field.height} grid")
    return kernels.line_integral(field.values, float(s_g1[0]), float(s_g1[1]),
                                 float(s_g2[0]), float(s_g2[1]), int(n_samples))


def _centroid(candidates):
    xs = [c.position.x for c in candidates]
    ys = [c.position.y for c in candidates]
    return math.fsum(xs) / len(xs), math.fsum(ys) / len(ys)


def _by_centroid(centroid):
    cx, cy = centroid

    def key(c: PartCandidate):
        return (math.hypot(c.position.x - cx, c.position.y - cy), -c.score,
                c.position.y, c.position.x)
    return key


def select_person_candidates(candidates: Sequence[PartCandidate],
                             topo: LimbTopology) -> list[PartCandidate]:
    """Keep, per part, the candidate nearest the centroid of all candidates.

    Output follows the topology's part order.
    """
    if not candidates:
        return []
    key = _by_centroid(_centroid(candidates))
    out = []
    for part in topo.parts:
        mine = [c for c in candidates if c.part == part]
        if mine:
            out.append(min(mine, key=key))
    return out


def assemble_person(candidates: Sequence[PartCandidate], fields: Sequence[VectorGrid],
                    topo: LimbTopology, n_samples: int = DEFAULT_SAMPLES) -> Skeleton:
    """Greedy single-person assembly.

    Limbs are visited in topology order. A limb with a single hypothesis on
    each side takes it; otherwise the pair with the highest association
    score wins, ties going to the pair nearer the candidates' centroid.
    Parts fixed by an earlier limb stay fixed. Parts no limb decided fall
    back to the centroid-nearest candidate.
    """
    if len(fields) != len(topo.limbs):
        raise ParameterError(f"expected {len(topo.limbs)} fields, got {len(fields)}")
    if not candidates:
        return Skeleton()
    key = _by_centroid(_centroid(candidates))
    pool = {part: sorted((c for c in candidates if c.part == part), key=key)
            for part in topo.parts}
    chosen: dict[str, PartCandidate] = {}

    for h, (a, b) in enumerate(topo.limbs):
        pa, pb = topo.parts[a], topo.parts[b]
        side_a = [chosen[pa]] if pa in chosen else pool[pa]
        side_b = [chosen[pb]] if pb in chosen else pool[pb]
        if not side_a or not side_b:
            continue
        if len(side_a) == 1 and len(side_b) == 1:
            best = (side_a[0], side_b[0])
        else:
            best, best_z = None, -math.inf
            # both sides are pre-sorted by centroid distance, so strict > keeps the nearer pair on ties
            for ca in side_a:
                for cb in side_b:
                    if is_degenerate_segment(ca.position, cb.position):
                        continue
                    z = association_score(fields[h], ca.position, cb.position, n_samples)
                    if z > best_z:
                        best, best_z = (ca, cb), z
            if best is None:
                continue
        chosen[pa], chosen[pb] = best

    for part in topo.parts:
        if part not in chosen and pool[part]:
            chosen[part] = pool[part][0]
    return Skeleton({p: Joint(chosen[p].position, chosen[p].score)
                     for p in topo.parts if p in chosen})


def score_limbs(candidates: Sequence[PartCandidate], fields: Sequence[VectorGrid],
                topo: LimbTopology, n_samples: int = DEFAULT_SAMPLES) -> list[LimbScore]:
    """Every candidate pair's association score, per limb."""
    out = []
    for h, (a, b) in enumerate(topo.limbs):
        for ca in (c for c in candidates if c.part == topo.parts[a]):
            for cb in (c for c in candidates if c.part == topo.parts[b]):
                if not is_degenerate_segment(ca.position, cb.position):
                    out.append(LimbScore(h, ca, cb,
                                         association_score(fields[h], ca.position,
                                                           cb.position, n_samples)))
    return out


def decode_frame(maps: Sequence[ScalarGrid], fields: Sequence[VectorGrid], topo: LimbTopology,
                 threshold: float = DEFAULT_THRESHOLD,
                 n_samples: int = DEFAULT_SAMPLES) -> Skeleton:
    if len(maps) != len(topo.parts):
        raise ParameterError(f"expected {len(topo.parts)} maps, got {len(maps)}")
    candidates = []
    for part, grid in zip(topo.parts, maps):
        candidates.extend(find_peaks(grid, threshold, part))
    return assemble_person(candidates, fields, topo, n_samples)

