"""Global numerical tolerance configuration.

A matrix is accepted as positive semidefinite when its minimum eigenvalue
satisfies ``lmin >= -tol * max(1, |m|_inf)``. The tolerance is fixed once at
startup (the CLI sets it from ``--tol``); library users may call
:func:`set_tolerance` before doing any work. It is not meant to be flipped
mid-computation.
"""

DEFAULT_TOL = 1e-9

_tol = DEFAULT_TOL


def tolerance() -> float:
    """Current global tolerance."""
    return _tol


def set_tolerance(tol: float) -> None:
    """Fix the global tolerance. Must be positive."""
    global _tol
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    _tol = tol


def psd_threshold(max_abs_entry: float, tol: float | None = None) -> float:
    """Acceptance threshold for the minimum eigenvalue of a PSD candidate."""
    t = _tol if tol is None else tol
    return -t * max(1.0, max_abs_entry)
