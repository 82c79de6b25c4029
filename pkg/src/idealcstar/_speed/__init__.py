"""Backend selection for the word kernels.

The compiled extension is preferred; the NumPy fallback is used when the
extension is missing or when IDEALCSTAR_PURE=1 is set in the environment
(the benchmark and the backend-parity tests rely on the override).
"""

import os

from . import fallback

if os.environ.get("IDEALCSTAR_PURE") == "1":
    _impl = fallback
    BACKEND = "fallback"
else:
    try:
        from . import _freewords as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = fallback
        BACKEND = "fallback"

free_ball = _impl.free_ball
left_mult_index = _impl.left_mult_index
pair_dist = _impl.pair_dist

__all__ = ["BACKEND", "fallback", "free_ball", "left_mult_index", "pair_dist"]
