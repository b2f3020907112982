"""Numeric kernel backend selection.

The compiled extension is used when available; set ``CPGAME_PURE_PYTHON=1``
to force the numpy reference implementation. ``BACKEND`` reports which one
is active.
"""

import os

if os.environ.get("CPGAME_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
greedy_fill = _impl.greedy_fill
total_costs_batch = _impl.total_costs_batch
expected_total_costs_batch = _impl.expected_total_costs_batch
continuous_search = _impl.continuous_search
