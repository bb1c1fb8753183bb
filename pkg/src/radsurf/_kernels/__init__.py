"""Monte Carlo counting kernels with a compiled fast path.

The Cython extension is optional: when it is missing (no compiler at
install time) or when RADSURF_FORCE_FALLBACK is set to a non-empty value
other than "0", the vectorized numpy fallback is used.  Both backends
return exact integer counts; within a backend, results are deterministic
for a fixed seed.
"""

import os

from . import _fallback

BACKEND = "fallback"
_impl = _fallback

if os.environ.get("RADSURF_FORCE_FALLBACK", "0") in ("", "0"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        pass

facet_accept_count = _impl.facet_accept_count
polytope_shell_counts = _impl.polytope_shell_counts

__all__ = ["facet_accept_count", "polytope_shell_counts", "BACKEND"]
