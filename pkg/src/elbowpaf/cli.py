"""Command-line entry point: ``elbowpaf {synth,decode,angle,sync-eval,simulate}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, tensorio
from .core import ARM, ElbowPafError, LimbTopology
from .decode import DEFAULT_SAMPLES, DEFAULT_THRESHOLD, decode_frame
from .kinematics import (
    AngleStream,
    angles_from_skeletons,
    parse_skeleton_frames,
    skeleton_line,
)
from .mapgen import DEFAULT_SIGMA, DEFAULT_SIGMA_R, RenderParams, render_skeleton
from .simulate import simulate
from .syncmetrics import error_histogram, rows_to_csv, synchronize

log = logging.getLogger("elbowpaf")

MANIFEST_NAME = "manifest.json"


class CliError(Exception):
    pass


def _write_text(path, text):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text)


def _read_text(path):
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc


def _load_topology(path):
    if path is None:
        return ARM
    try:
        return LimbTopology.from_json(json.loads(_read_text(path)))
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{path}: bad topology: {exc}") from exc


def _json_dump(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# -- synth -------------------------------------------------------------------

def write_frames(out_dir, topo, frames, width, height, params, pack=False):
    """Write ``(t_ms, maps, fields)`` frames as PAFT files plus a manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": "PAFT", "version": tensorio.VERSION,
        "width": width, "height": height,
        "sigma": params.sigma, "sigma_r": params.sigma_r,
        **topo.to_json(),
        "frames": [],
    }
    for k, (t_ms, maps, fields) in enumerate(frames):
        entry = {"t_ms": t_ms}
        if pack:
            stacked = np.concatenate([m.values[:, :, None] for m in maps]
                                     + [f.values for f in fields], axis=2)
            name = f"frame{k:05d}.paft"
            tensorio.write(out_dir / name, stacked)
            entry["tensor"] = name
        else:
            entry["maps"], entry["fields"] = [], []
            for g, m in enumerate(maps):
                name = f"frame{k:05d}_map{g}_{topo.parts[g]}.paft"
                tensorio.write(out_dir / name, m)
                entry["maps"].append(name)
            for h, f in enumerate(fields):
                a, b = topo.limbs[h]
                name = f"frame{k:05d}_field{h}_{topo.parts[a]}-{topo.parts[b]}.paft"
                tensorio.write(out_dir / name, f)
                entry["fields"].append(name)
        manifest["frames"].append(entry)
    (out_dir / MANIFEST_NAME).write_text(_json_dump(manifest))
    return manifest


def synth_files(frames, topo, out_dir, width, height, params, pack=False):
    rendered = ((t_ms, *render_skeleton(sk, topo, width, height, params)) for t_ms, sk in frames)
    return write_frames(out_dir, topo, rendered, width, height, params, pack)


def cmd_synth(args):
    frames = parse_skeleton_frames(_read_text(args.skeleton), str(args.skeleton))
    topo = _load_topology(args.topology)
    params = RenderParams(args.sigma, args.sigma_r)
    for t_ms, sk in frames:
        for name, j in sk.joints.items():
            x, y = j.point
            if not (0 <= x <= args.width - 1 and 0 <= y <= args.height - 1):
                raise CliError(f"frame t={t_ms}: joint {name!r} at ({x}, {y}) lies outside "
                               f"the {args.width}x{args.height} grid")
    manifest = synth_files(frames, topo, args.out_dir, args.width, args.height, params, args.pack)
    log.info("wrote %d frame(s) to %s", len(manifest["frames"]), args.out_dir)
    return 0


# -- decode ------------------------------------------------------------------

def load_frames(manifest_path):
    """Read a manifest; returns the topology and a list of ``(t_ms, maps, fields)``."""
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text())
        topo = LimbTopology.from_json(manifest)
    except OSError as exc:
        raise CliError(f"cannot read {manifest_path}: {exc.strerror}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(f"{manifest_path}: bad manifest: {exc}") from exc
    base = manifest_path.parent
    frames = manifest.get("frames")
    if frames is None:
        frames = [{"t_ms": manifest.get("t_ms", 0), "tensor": manifest["tensor"]}]
    out = []
    for k, entry in enumerate(frames):
        t_ms = entry.get("t_ms", k)
        if "tensor" in entry:
            path = base / entry["tensor"]
            maps, fields = tensorio.split_channels(tensorio.read(path), len(topo.parts),
                                                   len(topo.limbs), source=str(path))
        else:
            maps = [tensorio.read_scalar(base / p) for p in entry["maps"]]
            fields = [tensorio.read_vector(base / p) for p in entry["fields"]]
            if len(maps) != len(topo.parts) or len(fields) != len(topo.limbs):
                raise CliError(f"{manifest_path}: frame {k} lists {len(maps)} maps/"
                               f"{len(fields)} fields for {len(topo.parts)} parts/"
                               f"{len(topo.limbs)} limbs")
        out.append((t_ms, maps, fields))
    return topo, out


def decode_frames(topo, frames, threshold, n_samples, jobs=1):
    def work(frame):
        t_ms, maps, fields = frame
        return t_ms, decode_frame(maps, fields, topo, threshold, n_samples)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(work, frames))  # map keeps input order
    return [work(f) for f in frames]


def cmd_decode(args):
    if args.tensor is not None:
        sidecar = args.sidecar or f"{args.tensor}.json"
        try:
            meta = json.loads(_read_text(sidecar))
            topo = LimbTopology.from_json(meta)
        except (ValueError, KeyError, TypeError) as exc:
            raise CliError(f"{sidecar}: bad channel manifest: {exc}") from exc
        maps, fields = tensorio.split_channels(tensorio.read(args.tensor), len(topo.parts),
                                               len(topo.limbs), source=args.tensor)
        frames = [(meta.get("t_ms", 0), maps, fields)]
    else:
        topo, frames = load_frames(args.manifest)
    decoded = decode_frames(topo, frames, args.threshold, args.samples, args.jobs)
    _write_text(args.output, "".join(skeleton_line(t, sk) for t, sk in decoded))
    return 0


# -- angle -------------------------------------------------------------------

def cmd_angle(args):
    frames = parse_skeleton_frames(_read_text(args.skeletons), str(args.skeletons))
    stream = angles_from_skeletons(frames, tuple(args.parts), source=args.source)
    _write_text(args.output, stream.to_jsonl())
    return 0


# -- sync-eval ---------------------------------------------------------------

def _load_stream(path, label):
    try:
        return AngleStream.from_jsonl(_read_text(path), source=str(path))
    except ElbowPafError as exc:
        raise CliError(f"stream {label} ({path}): {exc}") from exc


def cmd_sync_eval(args):
    a = _load_stream(args.stream_a, "a")
    b = _load_stream(args.stream_b, "b")
    rows = synchronize(a, b, args.tolerance_ms)
    if not rows:
        raise CliError("no synchronized rows")
    report = error_histogram(rows, args.bin_width)
    if args.csv:
        Path(args.csv).write_text(rows_to_csv(rows))
    if args.report:
        Path(args.report).write_text(_json_dump(report.to_json()))
    print(f"rmse={report.rmse_deg} n={report.n_rows}")
    return 0


# -- simulate ----------------------------------------------------------------

def cmd_simulate(args):
    params = RenderParams(args.sigma, args.sigma_r)
    result = simulate(args.seed, noise=args.noise, fps_a=args.fps_a, fps_b=args.fps_b,
                      duration_s=args.duration, width=args.width, height=args.height,
                      params=params, threshold=args.threshold, n_samples=args.samples,
                      tolerance_ms=args.tolerance_ms, bin_width=args.bin_width, jobs=args.jobs)
    report = result.to_json()
    if args.keep_intermediate:
        root = Path(args.keep_intermediate)
        for s in (result.a, result.b):
            d = root / f"stream_{s.label}"
            d.mkdir(parents=True, exist_ok=True)
            write_frames(d, ARM, zip(s.stamps, s.maps, s.fields), args.width, args.height,
                         params)
            (d / "skeletons.jsonl").write_text(
                "".join(skeleton_line(t, sk) for t, sk in zip(s.stamps, s.skeletons)))
            (d / "angles.jsonl").write_text(s.angles.to_jsonl())
            (d / "truth.jsonl").write_text("".join(
                json.dumps({"t_ms": t, "angle_deg": a}) + "\n" for t, a in zip(s.stamps, s.truth)))
        (root / "sync.csv").write_text(rows_to_csv(result.rows))
        (root / "report.json").write_text(_json_dump(report))
    _write_text(args.output, _json_dump(report))
    print(f"rmse={report['rmse_deg']} n={report['n_rows']}", file=sys.stderr)
    return 0


# -- parser ------------------------------------------------------------------

def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def _unit_interval(s):
    v = float(s)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {s}")
    return v


def _samples(s):
    v = int(s)
    if v < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 samples, got {s}")
    return v


def _non_negative_int(s):
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s}")
    return v


def _add_grid(p):
    p.add_argument("--width", type=_positive_int, default=64)
    p.add_argument("--height", type=_positive_int, default=64)
    p.add_argument("--sigma", type=_positive_float, default=DEFAULT_SIGMA,
                   help="confidence-map spread in pixels")
    p.add_argument("--sigma-r", type=_positive_float, default=DEFAULT_SIGMA_R,
                   help="limb half-width in pixels")


def _add_decode(p):
    p.add_argument("--threshold", type=_unit_interval, default=DEFAULT_THRESHOLD)
    p.add_argument("--samples", type=_samples, default=DEFAULT_SAMPLES,
                   help="line-integral sample count")
    p.add_argument("--jobs", type=_positive_int, default=1)


def _add_sync(p):
    p.add_argument("--tolerance-ms", type=_non_negative_int, default=0)
    p.add_argument("--bin-width", type=_positive_float, default=1.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="elbowpaf", description=__doc__)
    parser.add_argument("--version", action="version",
                        version=f"elbowpaf {__version__} (PAFT format v{tensorio.VERSION})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render confidence maps and fields from skeleton JSON")
    p.add_argument("skeleton", help="skeleton JSON or JSON-lines file ('-' for stdin)")
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--topology", help="JSON file with parts and limbs (default: arm)")
    p.add_argument("--pack", action="store_true",
                   help="write one multi-channel tensor per frame instead of one file per grid")
    _add_grid(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("decode", help="decode tensors into skeleton JSON-lines")
    p.add_argument("manifest", nargs="?", help="manifest.json written by synth")
    p.add_argument("--tensor", help="single multi-channel PAFT file")
    p.add_argument("--sidecar", help="channel manifest for --tensor (default: <tensor>.json)")
    p.add_argument("-o", "--output", default="-")
    _add_decode(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("angle", help="elbow angles from skeleton JSON-lines")
    p.add_argument("skeletons")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--parts", nargs=3, default=["shoulder", "elbow", "wrist"],
                   metavar=("SHOULDER", "ELBOW", "WRIST"))
    p.add_argument("--source", default="rgb")
    p.set_defaults(func=cmd_angle)

    p = sub.add_parser("sync-eval", help="synchronize two angle streams and report RMSE")
    p.add_argument("stream_a")
    p.add_argument("stream_b")
    p.add_argument("--csv", help="write synchronized rows here")
    p.add_argument("--report", help="write the error report JSON here")
    _add_sync(p)
    p.set_defaults(func=cmd_sync_eval)

    p = sub.add_parser("simulate", help="end-to-end synthetic two-camera trial")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--noise", type=float, default=0.0,
                   help="uniform noise amplitude added to confidence maps")
    p.add_argument("--fps-a", type=_positive_float, default=30.0)
    p.add_argument("--fps-b", type=_positive_float, default=15.0)
    p.add_argument("--duration", type=_positive_float, default=4.0, help="seconds")
    p.add_argument("--keep-intermediate", metavar="DIR")
    p.add_argument("-o", "--output", default="-")
    _add_grid(p)
    _add_decode(p)
    _add_sync(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.command == "decode" and (args.manifest is None) == (args.tensor is None):
        parser.error("decode needs exactly one of MANIFEST or --tensor")
    if args.command == "simulate" and args.noise < 0:
        parser.error("--noise must be non-negative")
    try:
        return args.func(args)
    except (CliError, ElbowPafError) as exc:
        print(f"elbowpaf {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"elbowpaf {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
