"""Backend selection for the per-sample QP kernel.

The compiled extension is preferred; the pure-numpy twin is used when the
extension is unavailable or when EXOPARETO_PURE_PYTHON=1 is set. Both
implement the same algorithm with the same tie-breaking, so results agree
to floating-point noise and each backend is deterministic on its own.
"""

from __future__ import annotations

import os

from . import _qp_py

STATUS_OPTIMAL = _qp_py.STATUS_OPTIMAL
STATUS_MAXITER = _qp_py.STATUS_MAXITER
STATUS_SINGULAR = _qp_py.STATUS_SINGULAR

if os.environ.get("EXOPARETO_PURE_PYTHON") == "1":
    _impl = _qp_py
    BACKEND = "python"
else:
    try:
        from . import _qp_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _qp_py
        BACKEND = "python"

solve_box_eq_qp = _impl.solve_box_eq_qp


def available_backends():
    """Names mapped to kernel callables, for benchmarks and tests."""
    backends = {"python": _qp_py.solve_box_eq_qp}
    try:
        from . import _qp_cy

        backends["cython"] = _qp_cy.solve_box_eq_qp
    except ImportError:
        pass
    return backends
