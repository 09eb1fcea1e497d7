"""Ground-truth confidence maps, part affinity fields and map-space losses.

The Gaussian uses ``exp(-d**2 / sigma**2)`` with no factor of two, so the
effective standard deviation is ``sigma / sqrt(2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .core import (
    DegenerateLimbError,
    DomainError,
    LimbTopology,
    MaskGrid,
    ParameterError,
    Point2,
    ScalarGrid,
    Skeleton,
    VectorGrid,
    is_degenerate_segment,
)

DEFAULT_SIGMA = 1.5
DEFAULT_SIGMA_R = 2.0


@dataclass(frozen=True)
class RenderParams:
    sigma: float = DEFAULT_SIGMA
    sigma_r: float = DEFAULT_SIGMA_R

    def __post_init__(self):
        for name in ("sigma", "sigma_r"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite, got {v}")


def _check_dims(width, height):
    if int(width) != width or int(height) != height or width < 1 or height < 1:
        raise ParameterError(f"grid size must be positive integers, got {width}x{height}")


def _check_inside(p: Point2, width, height, what="point"):
    Point2(*p).check()
    if not (0.0 <= p[0] <= width - 1 and 0.0 <= p[1] <= height - 1):
        raise DomainError(f"{what} ({p[0]}, {p[1]}) outside {width}x{height} grid")


def render_confidence_map(i_g: Point2, width: int, height: int,
                          sigma: float = DEFAULT_SIGMA) -> ScalarGrid:
    if not (math.isfinite(sigma) and sigma > 0):
        raise ParameterError(f"sigma must be positive, got {sigma}")
    _check_dims(width, height)
    _check_inside(i_g, width, height, "joint")
    xs = np.arange(width, dtype=np.float64) - i_g[0]
    ys = np.arange(height, dtype=np.float64) - i_g[1]
    d2 = ys[:, None] ** 2 + xs[None, :] ** 2
    return ScalarGrid(np.exp(-d2 / sigma ** 2))


def render_paf(i_g1: Point2, i_g2: Point2, width: int, height: int,
               sigma_r: float = DEFAULT_SIGMA_R) -> VectorGrid:
    """Unit limb direction on the limb rectangle, zero elsewhere.

    A cell ``p`` is on the limb when ``0 <= (p - i_g1).v <= r`` and
    ``|(p - i_g1).v_perp| <= sigma_r``; both bounds are inclusive.
    """
    if not (math.isfinite(sigma_r) and sigma_r > 0):
        raise ParameterError(f"sigma_r must be positive, got {sigma_r}")
    _check_dims(width, height)
    Point2(*i_g1).check()
    Point2(*i_g2).check()
    if is_degenerate_segment(i_g1, i_g2):
        raise DegenerateLimbError(f"limb endpoints coincide at ({i_g1[0]}, {i_g1[1]})")
    return VectorGrid(kernels.paf_render(int(height), int(width), float(i_g1[0]), float(i_g1[1]),
                                         float(i_g2[0]), float(i_g2[1]), float(sigma_r)))


def render_skeleton(sk: Skeleton, topo: LimbTopology, width: int, height: int,
                    params: RenderParams = RenderParams()):
    """Render one confidence map per part and one field per limb.

    Absent parts give an all-zero map; limbs missing either endpoint give an
    all-zero field.
    """
    _check_dims(width, height)
    maps = []
    for part in topo.parts:
        p = sk.get(part)
        if p is None:
            maps.append(ScalarGrid.zeros(width, height))
            continue
        try:
            maps.append(render_confidence_map(p, width, height, params.sigma))
        except DomainError as exc:
            raise DomainError(f"part {part!r}: {exc}") from exc
    fields = []
    for a, b in topo.limbs:
        pa, pb = sk.get(topo.parts[a]), sk.get(topo.parts[b])
        fields.append(VectorGrid.zeros(width, height) if pa is None or pb is None
                      else render_paf(pa, pb, width, height, params.sigma_r))
    return maps, fields


def _check_same(*grids):
    shapes = {g.shape for g in grids}
    if len(shapes) != 1:
        raise ParameterError(f"grid dimensions differ: {sorted(shapes)}")


def confidence_loss(pred: ScalarGrid, truth: ScalarGrid, mask: MaskGrid | None = None) -> float:
    """Masked sum of squared differences for one part's confidence map."""
    if mask is None:
        mask = MaskGrid.ones(truth.width, truth.height)
    _check_same(pred, truth, mask)
    diff = pred.values - truth.values
    return float(np.sum(mask.values * diff * diff))


def paf_loss(pred: VectorGrid, truth: VectorGrid, mask: MaskGrid | None = None) -> float:
    if mask is None:
        mask = MaskGrid.ones(truth.width, truth.height)
    _check_same(pred, truth, mask)
    diff = pred.values - truth.values
    return float(np.sum(mask.values * np.sum(diff * diff, axis=2)))


def total_loss(per_stage: Sequence[tuple[float, float]]) -> float:
    """Sum of per-stage (confidence, field) loss pairs."""
    if len(per_stage) == 0:
        raise ParameterError("total_loss needs at least one stage")
    total = 0.0
    for lp, lq in per_stage:
        if not (lp >= 0 and lq >= 0):
            raise ParameterError(f"stage losses must be non-negative, got ({lp}, {lq})")
        total += lp + lq
    return total
