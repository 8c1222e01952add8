"""Window-accumulation kernel with compiled and pure-Python backends.

Both backends implement the same contract:

    accumulate_windows(ts_us, flow_ids, nbytes, t0, delta, n_windows)
        -> (volumes, flow_maps)

where the inputs are C-contiguous int64 arrays sorted by ``ts_us`` with every
timestamp inside ``[t0, t0 + n_windows * delta)``; ``volumes`` is a list of
per-window byte totals and ``flow_maps`` a list of ``{flow_id: bytes}`` dicts
(``None`` marks an empty window). Validation is the caller's job: the kernel
trusts its inputs.

The compiled Cython backend is picked when the extension built; setting
FLOWSENTRY_PURE_PYTHON=1 forces the fallback, which is how the benchmark
compares the two.
"""

import os

from . import agg_py

if os.environ.get("FLOWSENTRY_PURE_PYTHON"):
    accumulate_windows = agg_py.accumulate_windows
    BACKEND = "python"
else:
    try:
        from ._windowcore import accumulate_windows

        BACKEND = "compiled"
    except ImportError:  # extension was not built on this install
        accumulate_windows = agg_py.accumulate_windows
        BACKEND = "python"
