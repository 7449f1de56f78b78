"""Hot numeric kernels.

Each kernel is written once as plain Python over scalars and compiled with
``numba.njit`` unless ``NCSIM_DISABLE_NUMBA`` is set to a truthy value (or
numba cannot be imported). Both paths run the same arithmetic in the same
order, so results agree to the last few ulps.
"""

import math
import os

_FLAG = os.environ.get("NCSIM_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if NUMBA_DISABLED:
        raise ImportError
    from numba import njit as _njit

    USING_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag in CI
    _njit = None
    USING_NUMBA = False

# Servo gain of G(s) = GAIN / (s (1 + s)).
GAIN = 1000.0


def _rk4_advance(x1, x2, u, dt, max_step):
    """Advance the servo states by ``dt`` seconds under constant input ``u``."""
    if dt <= 0.0:
        return x1, x2
    n = int(math.ceil(dt / max_step - 1e-9))
    if n < 1:
        n = 1
    h = dt / n
    half = 0.5 * h
    f = GAIN * u
    for _ in range(n):
        k1a = x2
        k1b = f - x2
        v = x2 + half * k1b
        k2a = v
        k2b = f - v
        v = x2 + half * k2b
        k3a = v
        k3b = f - v
        v = x2 + h * k3b
        k4a = v
        k4b = f - v
        x1 = x1 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        x2 = x2 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    return x1, x2


def _make_step_response_grid(advance):
    def step_response_grid(times, max_step, out):
        """Open-loop unit-step output on an increasing time grid."""
        x1 = 0.0
        x2 = 0.0
        t = 0.0
        for i in range(times.shape[0]):
            x1, x2 = advance(x1, x2, 1.0, times[i] - t, max_step)
            t = times[i]
            out[i] = x1
        return out

    return step_response_grid


rk4_advance_py = _rk4_advance
step_response_grid_py = _make_step_response_grid(_rk4_advance)

if USING_NUMBA:
    rk4_advance = _njit(cache=True, nogil=True)(_rk4_advance)
    step_response_grid = _njit(nogil=True)(_make_step_response_grid(rk4_advance))
else:
    rk4_advance = rk4_advance_py
    step_response_grid = step_response_grid_py
