"""Grid, geometry and skeleton types shared by the whole pipeline.

Coordinate convention: ``x`` indexes columns, ``y`` indexes rows, and the
origin is the top-left cell. Grid values are stored as numpy arrays of shape
``(height, width)`` for scalar/mask grids and ``(height, width, 2)`` for
vector grids, with the last axis holding ``(vx, vy)``.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import kernels


class ElbowPafError(ValueError):
    """Base class for all errors raised by this package."""


class ParameterError(ElbowPafError):
    pass


class DomainError(ElbowPafError):
    pass


class DegenerateLimbError(ElbowPafError):
    pass


class DegenerateJointError(ElbowPafError):
    pass


class Point2(NamedTuple):
    x: float
    y: float

    def check(self) -> "Point2":
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"non-finite point {tuple(self)}")
        return self


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


class _Grid:
    values: np.ndarray

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    def contains(self, p: Point2) -> bool:
        return 0.0 <= p[0] <= self.width - 1 and 0.0 <= p[1] <= self.height - 1

    def __eq__(self, other):
        return type(self) is type(other) and np.array_equal(self.values, other.values)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ScalarGrid(_Grid):
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ParameterError(f"scalar grid needs a non-empty 2-D array, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise DomainError("scalar grid contains non-finite values")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_flat(cls, width: int, height: int, values: Sequence[float]) -> "ScalarGrid":
        flat = np.asarray(values, dtype=np.float64).ravel()
        if width < 1 or height < 1 or flat.size != width * height:
            raise ParameterError(
                f"expected {width}x{height}={width * height} values, got {flat.size}")
        return cls(flat.reshape(height, width))

    @classmethod
    def zeros(cls, width: int, height: int) -> "ScalarGrid":
        return cls(np.zeros((height, width)))

    def __add__(self, other: "ScalarGrid") -> "ScalarGrid":
        return ScalarGrid(self.values + other.values)


@dataclass(frozen=True, eq=False)
class VectorGrid(_Grid):
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 3 or v.shape[2] != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ParameterError(f"vector grid needs shape (h, w, 2), got {v.shape}")
        if not np.isfinite(v).all():
            raise DomainError("vector grid contains non-finite values")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_flat(cls, width: int, height: int, values: Sequence) -> "VectorGrid":
        flat = np.asarray(values, dtype=np.float64).ravel()
        if width < 1 or height < 1 or flat.size != width * height * 2:
            raise ParameterError(
                f"expected {width}x{height} 2-vectors ({width * height * 2} numbers), got {flat.size}")
        return cls(flat.reshape(height, width, 2))

    @classmethod
    def zeros(cls, width: int, height: int) -> "VectorGrid":
        return cls(np.zeros((height, width, 2)))

    def __add__(self, other: "VectorGrid") -> "VectorGrid":
        return VectorGrid(self.values + other.values)


@dataclass(frozen=True, eq=False)
class MaskGrid(_Grid):
    """Binary mask; stored as 0.0/1.0 so it can multiply loss terms directly."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ParameterError(f"mask needs a non-empty 2-D array, got shape {v.shape}")
        if not np.isin(v, (0, 1)).all():
            raise ParameterError("mask values must be 0 or 1")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def ones(cls, width: int, height: int) -> "MaskGrid":
        return cls(np.ones((height, width)))

    @classmethod
    def zeros(cls, width: int, height: int) -> "MaskGrid":
        return cls(np.zeros((height, width)))


@dataclass(frozen=True)
class LimbTopology:
    parts: tuple[str, ...]
    limbs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        limbs = tuple((int(a), int(b)) for a, b in self.limbs)
        if len(set(parts)) != len(parts):
            raise ParameterError(f"duplicate part names in {parts}")
        missing = {"shoulder", "elbow", "wrist"} - set(parts)
        if missing:
            raise ParameterError(f"topology lacks required parts {sorted(missing)}")
        for a, b in limbs:
            if not (0 <= a < len(parts) and 0 <= b < len(parts)):
                raise ParameterError(f"limb ({a}, {b}) references unknown part index")
            if a == b:
                raise ParameterError(f"limb ({a}, {b}) is a self-loop")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "limbs", limbs)

    def index(self, part: str) -> int:
        return self.parts.index(part)

    def to_json(self) -> dict:
        return {"parts": list(self.parts), "limbs": [list(l) for l in self.limbs]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "LimbTopology":
        return cls(tuple(obj["parts"]), tuple(tuple(l) for l in obj["limbs"]))


ARM = LimbTopology(("shoulder", "elbow", "wrist"), ((0, 1), (1, 2)))


class Joint(NamedTuple):
    point: Point2
    confidence: float = 1.0


@dataclass(frozen=True)
class Skeleton:
    """Single-person pose: part name -> joint. Absent parts are simply missing."""

    joints: Mapping[str, Joint] = field(default_factory=dict)

    def __post_init__(self):
        joints = {}
        for name, j in dict(self.joints).items():
            if not isinstance(j, Joint):
                j = Joint(Point2(*j))
            Point2(*j.point).check()
            if not 0.0 <= j.confidence <= 1.0:
                raise DomainError(f"confidence of {name!r} outside [0, 1]: {j.confidence}")
            joints[name] = Joint(Point2(float(j.point[0]), float(j.point[1])), float(j.confidence))
        object.__setattr__(self, "joints", joints)

    @classmethod
    def from_points(cls, points: Mapping[str, Iterable[float]]) -> "Skeleton":
        return cls({k: Joint(Point2(*map(float, v))) for k, v in points.items()})

    def __contains__(self, part: str) -> bool:
        return part in self.joints

    def __getitem__(self, part: str) -> Point2:
        return self.joints[part].point

    def get(self, part: str) -> Point2 | None:
        j = self.joints.get(part)
        return None if j is None else j.point

    def points(self) -> dict[str, list[float]]:
        return {k: [j.point.x, j.point.y] for k, j in self.joints.items()}


def is_degenerate_segment(p, q) -> bool:
    """True when ``p -> q`` has no usable direction.

    Covers coincident points and points so close that the squared length
    underflows, which would leave the unit direction undefined.
    """
    dx, dy = q[0] - p[0], q[1] - p[1]
    return dx * dx + dy * dy < sys.float_info.min


def sample_bilinear(grid: ScalarGrid | VectorGrid, p: Point2):
    """Bilinear interpolation of ``grid`` at the continuous point ``p``.

    Integer coordinates return the stored cell exactly. Points outside
    ``[0, width-1] x [0, height-1]`` raise :class:`DomainError`.
    """
    x, y = float(p[0]), float(p[1])
    if not grid.contains((x, y)):
        raise DomainError(f"point ({x}, {y}) outside {grid.width}x{grid.height} grid")
    if isinstance(grid, VectorGrid):
        return kernels.bilinear_vec(grid.values, x, y)
    return kernels.bilinear_scalar(grid.values, x, y)
