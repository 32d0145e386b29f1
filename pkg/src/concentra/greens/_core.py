"""Backend selection: compiled kernels when available, pure Python otherwise.

Set CONCENTRA_PURE_PYTHON=1 to force the fallback (used by the benchmark and
the backend cross-check tests).
"""

import os

if os.environ.get("CONCENTRA_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on build environment
        from . import _kernels_py as _impl
        BACKEND = "python"

OK = _impl.OK
NEED_MORE_TERMS = _impl.NEED_MORE_TERMS
htilde_series = _impl.htilde_series
sph_log_jy = _impl.sph_log_jy
convergence_ratio = _impl.convergence_ratio
