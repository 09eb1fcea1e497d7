"""Backend selection for the hot kernels.

The compiled extension is preferred; setting ``ELBOWPAF_PURE_PYTHON=1``
forces the numpy fallback (the benchmark and the backend-parity tests use
both explicitly).
"""
import contextlib
import os

from . import _pykernels

if os.environ.get("ELBOWPAF_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

_NAMES = ("bilinear_scalar", "bilinear_vec", "line_integral", "peak_scan", "paf_render")


def _bind(impl):
    g = globals()
    for name in _NAMES:
        g[name] = getattr(impl, name)


_bind(_impl)


def available_backends():
    backends = {"python": _pykernels}
    try:
        from . import _ckernels
        backends["cython"] = _ckernels
    except ImportError:
        pass
    return backends


@contextlib.contextmanager
def use(name):
    """Temporarily route every kernel call through backend ``name``.

    Not thread-safe; meant for benchmarks and tests.
    """
    backends = available_backends()
    if name not in backends:
        raise KeyError(f"backend {name!r} not available (have {sorted(backends)})")
    global BACKEND
    saved = BACKEND, {n: globals()[n] for n in _NAMES}
    _bind(backends[name])
    BACKEND = name
    try:
        yield backends[name]
    finally:
        BACKEND = saved[0]
        globals().update(saved[1])
