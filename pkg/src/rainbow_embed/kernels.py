"""Backend selection for the hot kernels.

Imports the compiled extension when available, otherwise falls back to
the numpy implementation.  Set RAINBOW_EMBED_BACKEND=pure to force the
fallback (useful for benchmarking and for debugging suspected backend
divergence; the two are required to produce identical outputs).
"""

from __future__ import annotations

import os

from . import _purecore

if os.environ.get("RAINBOW_EMBED_BACKEND", "").lower() == "pure":
    _impl = _purecore
else:
    try:
        from . import _fastcore as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _purecore

BACKEND = _impl.BACKEND

colour_block = _impl.colour_block
greedy_matching = _impl.greedy_matching
star_fill = _impl.star_fill

# always importable by name, whatever the default backend is
pure = _purecore


def get_backend(name=None):
    """Return the kernel module for `name` ('fast', 'pure' or None=default)."""
    if name in (None, BACKEND):
        return _impl
    if name == "pure":
        return _purecore
    if name == "fast":
        from . import _fastcore

        return _fastcore
    raise ValueError(f"unknown backend {name!r}")
