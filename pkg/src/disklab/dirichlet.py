"""Weighted Dirichlet energy of truncated series and its dilation behavior.

The energy of f against a weight w is the integral of |f'|^2 w over the
disk in normalized area measure. For harmonic weights the energy of the
dilation f_r(z) = f(rz) is nondecreasing in r; ``dilation_report``
measures that monotonicity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .quadrature import DiskGrid, integrate
from .series import TaylorSeries
from .weights import Weight


def energy(f: TaylorSeries, w: Weight, grid: DiskGrid) -> float:
    """Dirichlet integral of |f'|^2 against the weight."""
    fp = f.derivative()

    def integrand(z: np.ndarray) -> np.ndarray:
        return np.abs(fp.evaluate_many(z)) ** 2 * w.eval_many(z)

    return float(integrate(grid, integrand))


@dataclass(frozen=True)
class DilationReport:
    entries: tuple[tuple[float, float], ...]  # (r, energy of f_r)
    nondecreasing: bool
    max_violation: float
    tolerance: float


def dilation_report(
    f: TaylorSeries,
    w: Weight,
    radii: Sequence[float],
    grid: DiskGrid,
    tol: float = 1e-8,
) -> DilationReport:
    """Energies of the dilations f_r for strictly increasing radii.

    The monotonicity flag records whether consecutive energies are
    nondecreasing up to ``tol``; no assertion is made here since the
    inequality is only guaranteed for harmonic weights.
    """
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly increasing")
    if any(not 0.0 < r < 1.0 for r in radii):
        raise DomainError("dilation radii must lie in (0, 1)")
    entries = tuple((r, energy(f.dilate(r), w, grid)) for r in radii)
    violation = 0.0
    for (_, e1), (_, e2) in zip(entries, entries[1:]):
        violation = max(violation, e1 - e2)
    return DilationReport(
        entries=entries,
        nondecreasing=violation <= tol,
        max_violation=violation,
        tolerance=tol,
    )
