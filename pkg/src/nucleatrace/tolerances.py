"""Shared numeric tolerances.

Inequality checks use an absolute floor plus a relative term sized for
double precision accumulation over a few thousand summands.
"""
from __future__ import annotations

ABS_TOL = 1e-12
REL_TOL = 1e-9


def slack(scale: float) -> float:
    """Allowed defect when comparing quantities of the given magnitude."""
    return ABS_TOL + REL_TOL * abs(scale)
