"""Hot-loop kernels: trajectory advancement and snapshot Monte-Carlo tallies.

Two interchangeable backends implement the same draw-for-draw RNG contract,
so results are bit-identical whichever one is active:

* ``_fast`` — Cython extension consuming uniforms straight from numpy's
  BitGenerator C interface,
* ``_ref`` — pure Python/numpy fallback.

The compiled backend is preferred when importable; set the environment
variable ``EDGE_EPIRISK_PURE_PYTHON=1`` to force the fallback.
"""

import os

# State-row columns (one row of 7 floats per individual).
X, Y, HX, HY, LEG, PAUSE, SPEED = range(7)
STATE_WIDTH = 7

# Model-parameter vector layout.
(
    MP_MODEL,
    MP_D,
    MP_SPEED,
    MP_SPEED_MAX,
    MP_STEP,
    MP_PAUSE_MIN,
    MP_PAUSE_MAX,
    MP_BOUNDARY,
) = range(8)
PARAMS_WIDTH = 8

MODEL_STATIC, MODEL_RD, MODEL_RWK, MODEL_RWP = 0, 1, 2, 3

# Boundary rules: rejection redraws the heading until the leg endpoint stays
# inside (falling back to reflection), reflect bounces off the rim directly.
# Reflection is the measure-preserving rule and keeps the random-direction
# stationary law uniform; rejection matches the fixed-step endpoint law.
BOUNDARY_REJECT, BOUNDARY_REFLECT = 0, 1

# Distances below this are clamped before computing r**-eta in the tally
# kernels; clamp events are counted and reported.
DISTANCE_FLOOR = 1e-6

from . import _ref as _python_backend  # noqa: E402

if os.environ.get("EDGE_EPIRISK_PURE_PYTHON"):
    _impl = _python_backend
    BACKEND = "python"
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _python_backend
        BACKEND = "python"

init_state = _impl.init_state
advance = _impl.advance
advance_record = _impl.advance_record
snapshot_tally = _impl.snapshot_tally


def get_backend(name=None):
    """Return a backend module by name ("compiled"/"python"), default active."""
    if name is None:
        return _impl
    if name == "python":
        return _python_backend
    if name == "compiled":
        if BACKEND != "compiled":
            raise RuntimeError("compiled kernels are not available")
        return _impl
    raise ValueError(f"unknown backend {name!r}")
