"""Elbow angle from shoulder/elbow/wrist coordinates, and timed angle streams."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import DegenerateJointError, DomainError, ParameterError, Point2, Skeleton

log = logging.getLogger(__name__)

ARM_PARTS = ("shoulder", "elbow", "wrist")


@dataclass(frozen=True)
class TimedSample:
    t_ms: int
    angle_deg: float

    def __post_init__(self):
        if int(self.t_ms) != self.t_ms or self.t_ms < 0:
            raise DomainError(f"t_ms must be a non-negative integer, got {self.t_ms}")
        if not (math.isfinite(self.angle_deg) and 0.0 <= self.angle_deg <= 180.0):
            raise DomainError(f"angle {self.angle_deg} outside [0, 180]")
        object.__setattr__(self, "t_ms", int(self.t_ms))
        object.__setattr__(self, "angle_deg", float(self.angle_deg))


@dataclass(frozen=True)
class AngleStream:
    source: str = ""
    samples: tuple[TimedSample, ...] = field(default_factory=tuple)

    def __post_init__(self):
        samples = tuple(self.samples)
        for prev, cur in zip(samples, samples[1:]):
            if cur.t_ms < prev.t_ms:
                raise ParameterError(
                    f"stream {self.source!r} not time-ordered: {cur.t_ms} after {prev.t_ms}")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]], source: str = "") -> "AngleStream":
        return cls(source, tuple(TimedSample(t, a) for t, a in pairs))

    def to_jsonl(self) -> str:
        return "".join(json.dumps({"t_ms": s.t_ms, "angle_deg": s.angle_deg}) + "\n"
                       for s in self.samples)

    @classmethod
    def from_jsonl(cls, text: str, source: str = "") -> "AngleStream":
        samples = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                samples.append(TimedSample(obj["t_ms"], obj["angle_deg"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise ParameterError(f"{source or 'stream'} line {lineno}: {exc}") from exc
        return cls(source, tuple(samples))


def elbow_angle(x_s: Point2, x_e: Point2, x_w: Point2) -> float:
    """Unsigned angle at the elbow between the upper arm and forearm, in degrees."""
    ux, uy = x_s[0] - x_e[0], x_s[1] - x_e[1]
    vx, vy = x_w[0] - x_e[0], x_w[1] - x_e[1]
    nu, nv = math.hypot(ux, uy), math.hypot(vx, vy)
    if nu == 0.0 or nv == 0.0:
        raise DegenerateJointError("elbow coincides with shoulder or wrist")
    if not (math.isfinite(nu) and math.isfinite(nv)):
        raise DomainError("non-finite joint coordinates")
    cos = (ux * vx + uy * vy) / (nu * nv)
    return math.degrees(math.acos(max(-1.0, min(1.0, cos))))


def angles_from_skeletons(frames: Sequence[tuple[int, Skeleton]],
                          parts: Sequence[str] = ARM_PARTS,
                          source: str = "") -> AngleStream:
    """One sample per frame with all three joints present and non-degenerate.

    Other frames are skipped with a warning; nothing is zero-filled.
    """
    shoulder, elbow, wrist = parts
    samples = []
    for t_ms, sk in frames:
        missing = [p for p in parts if p not in sk]
        if missing:
            log.warning("frame t=%s ms skipped: missing %s", t_ms, ", ".join(missing))
            continue
        try:
            theta = elbow_angle(sk[shoulder], sk[elbow], sk[wrist])
        except DegenerateJointError as exc:
            log.warning("frame t=%s ms skipped: %s", t_ms, exc)
            continue
        samples.append(TimedSample(t_ms, theta))
    return AngleStream(source, tuple(samples))


def skeleton_line(t_ms: int, sk: Skeleton) -> str:
    return json.dumps({"t_ms": int(t_ms), "joints": sk.points()}) + "\n"


def parse_skeleton_frames(text: str, source: str = "skeletons") -> list[tuple[int, Skeleton]]:
    """Parse skeleton frames from JSON-lines, or from one JSON object/array.

    Each frame is ``{"t_ms": int, "joints": {name: [x, y]}}``; a missing
    ``t_ms`` defaults to the frame index.
    """
    stripped = text.strip()
    if not stripped:
        return []
    try:
        whole = json.loads(stripped)
    except ValueError:
        whole = None
    if isinstance(whole, dict):
        objs = [(1, whole)]
    elif isinstance(whole, list):
        objs = list(enumerate(whole, 1))
    else:
        objs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if line.strip():
                try:
                    objs.append((lineno, json.loads(line)))
                except ValueError as exc:
                    raise ParameterError(f"{source} line {lineno}: {exc}") from exc
    frames = []
    for k, (lineno, obj) in enumerate(objs):
        try:
            joints = obj["joints"]
            for name, xy in joints.items():
                if len(xy) != 2:
                    raise ValueError(f"joint {name!r} needs [x, y], got {xy}")
            sk = Skeleton.from_points(joints)
            t_ms = obj.get("t_ms", k)
            if int(t_ms) != t_ms or t_ms < 0:
                raise ValueError(f"bad t_ms {t_ms!r}")
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParameterError(f"{source} frame {lineno}: {exc}") from exc
        frames.append((int(t_ms), sk))
    return frames
