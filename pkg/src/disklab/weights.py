"""Weight catalog on the unit disk.

Two parametric families are built in:

* ``HarmonicBoundary(zeta)``: (1 - |z|^2) / |z - zeta|^2 for a boundary
  point zeta. Harmonic in the disk, unit mass against dA, singular at the
  boundary point itself.
* ``LogGreen(zeta)``: log |(1 - conj(zeta) z) / (z - zeta)| for an interior
  point zeta. Superharmonic, mass (1 - |zeta|^2)/2, logarithmic pole at
  zeta.

``Scaled`` multiplies any weight by a positive constant and ``Custom``
wraps an arbitrary pointwise function together with its singular points.
``synthesize`` assembles a weight from a finite positive combination of
scaled logarithmic kernels (interior atoms) and boundary kernels
(boundary atoms); one interior atom of mass (1-|zeta|^2)/2 reproduces
``LogGreen(zeta)`` exactly, and one boundary atom of unit mass reproduces
``HarmonicBoundary(zeta)``.

Superharmonicity is tested directly through the defining circle-mean
inequality on a caller-supplied lattice of centers and radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateWeightError,
    DomainError,
    SingularPointError,
    WeightSpecError,
)
from .quadrature import CircleGrid, DiskGrid, integrate, make_disk_grid

_UNIMODULAR_TOL = 1e-12
_SINGULAR_TOL = 1e-14


class Weight:
    """A nonnegative integrable function on the unit disk.

    Subclasses provide ``_value_many`` on complex arrays. ``singularities``
    lists the points where the weight blows up; evaluation there raises
    SingularPointError, and grids for this weight should guard the
    corresponding radii (see ``singular_radii``).
    """

    label: str = "weight"
    is_harmonic: bool = False
    singularities: tuple[complex, ...] = ()
    analytic_mass: Optional[float] = None  # closed-form L1 norm, when known

    def _value_many(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eval_many(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        for s in self.singularities:
            hit = np.abs(z - s) <= _SINGULAR_TOL
            if hit.any():
                raise SingularPointError(
                    f"{self.label} evaluated at singular point {s!r}"
                )
        return self._value_many(z)

    def __call__(self, z: complex) -> float:
        return float(self.eval_many(np.asarray([z]))[0])

    @property
    def singular_radii(self) -> tuple[float, ...]:
        """Moduli of interior singular points, for grid construction."""
        out = sorted({abs(s) for s in self.singularities if abs(s) < 1.0})
        return tuple(out)


class HarmonicBoundary(Weight):
    """Boundary-pole harmonic weight (1 - |z|^2) / |z - zeta|^2, |zeta| = 1."""

    is_harmonic = True
    analytic_mass = 1.0

    def __init__(self, zeta: complex):
        zeta = complex(zeta)
        if abs(abs(zeta) - 1.0) > _UNIMODULAR_TOL:
            raise DomainError(
                f"HarmonicBoundary needs |zeta| = 1 within {_UNIMODULAR_TOL}, "
                f"got |{zeta}| = {abs(zeta)}"
            )
        self.zeta = zeta
        self.singularities = (zeta,)
        self.label = f"harm:{zeta.real:g},{zeta.imag:g}"

    def _value_many(self, z: np.ndarray) -> np.ndarray:
        return (1.0 - np.abs(z) ** 2) / np.abs(z - self.zeta) ** 2


class LogGreen(Weight):
    """Logarithmic interior-pole weight log |(1 - conj(zeta) z)/(z - zeta)|."""

    is_harmonic = False

    def __init__(self, zeta: complex):
        zeta = complex(zeta)
        if abs(zeta) >= 1.0:
            raise DomainError(f"LogGreen needs |zeta| < 1, got |{zeta}| = {abs(zeta)}")
        self.zeta = zeta
        self.singularities = (zeta,)
        self.label = f"log:{zeta.real:g},{zeta.imag:g}"
        self.analytic_mass = (1.0 - abs(zeta) ** 2) / 2.0

    def _value_many(self, z: np.ndarray) -> np.ndarray:
        return np.log(
            np.abs((1.0 - np.conj(self.zeta) * z) / (z - self.zeta))
        )


class Scaled(Weight):
    """A positive multiple c * inner."""

    def __init__(self, c: float, inner: Weight):
        c = float(c)
        if not (c > 0.0 and math.isfinite(c)):
            raise DomainError(f"scale factor must be positive and finite, got {c}")
        self.c = c
        self.inner = inner
        self.is_harmonic = inner.is_harmonic
        self.singularities = inner.singularities
        self.label = f"scaled:{c:g}:{inner.label}"
        if inner.analytic_mass is not None:
            self.analytic_mass = c * inner.analytic_mass

    def _value_many(self, z: np.ndarray) -> np.ndarray:
        return self.c * self.inner._value_many(z)


class Custom(Weight):
    """User-supplied pointwise weight with explicit singular points."""

    def __init__(
        self,
        fn: Callable,
        singularities: Sequence[complex] = (),
        label: str = "custom",
        is_harmonic: bool = False,
        analytic_mass: Optional[float] = None,
        decomposition: Optional["GreenDecomposition"] = None,
    ):
        self._fn = fn
        self.singularities = tuple(complex(s) for s in singularities)
        self.label = label
        self.is_harmonic = is_harmonic
        self.analytic_mass = analytic_mass
        self.decomposition = decomposition

    def _value_many(self, z: np.ndarray) -> np.ndarray:
        try:
            vals = np.asarray(self._fn(z), dtype=float)
            if vals.shape != z.shape:
                raise TypeError
        except (TypeError, ValueError):
            vals = np.array([float(self._fn(p)) for p in z])
        return vals


def uniform_weight() -> Custom:
    """The constant weight 1 (normalized area measure itself)."""
    return Custom(
        fn=lambda z: np.ones(np.shape(z)),
        label="uniform",
        is_harmonic=True,
        analytic_mass=1.0,
    )


@dataclass(frozen=True)
class GreenDecomposition:
    """Finite atomic data (interior atoms, boundary atoms) for synthesis.

    Interior atoms live strictly inside the disk and boundary atoms on the
    circle; every mass is strictly positive.
    """

    interior: tuple[tuple[complex, float], ...] = ()
    boundary: tuple[tuple[complex, float], ...] = ()

    def __post_init__(self):
        for p, m in self.interior:
            if abs(p) >= 1.0:
                raise DomainError(f"interior atom {p!r} is not inside the disk")
            if m <= 0.0:
                raise DomainError("atom masses must be positive")
        for p, m in self.boundary:
            if abs(abs(p) - 1.0) > _UNIMODULAR_TOL:
                raise DomainError(f"boundary atom {p!r} is not on the circle")
            if m <= 0.0:
                raise DomainError("atom masses must be positive")

    @property
    def total_mass(self) -> float:
        return math.fsum(m for _, m in self.interior) + math.fsum(
            m for _, m in self.boundary
        )


def synthesize(d: GreenDecomposition) -> Custom:
    """Weight built from the atomic decomposition.

    Each interior atom (zeta, m) contributes
    m * 2/(1-|zeta|^2) * log|(1 - conj(zeta) z)/(zeta - z)| and each
    boundary atom (zeta, m) contributes m * (1-|z|^2)/|zeta - z|^2.
    An empty decomposition synthesizes the zero weight. The synthesized
    mass against dA equals the total atom mass.
    """
    interior = tuple((complex(p), float(m)) for p, m in d.interior)
    boundary = tuple((complex(p), float(m)) for p, m in d.boundary)

    def fn(z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        acc = np.zeros(z.shape, dtype=float)
        for p, m in interior:
            kernel = np.log(np.abs((1.0 - np.conj(p) * z) / (p - z)))
            acc = acc + m * (2.0 / (1.0 - abs(p) ** 2)) * kernel
        for p, m in boundary:
            acc = acc + m * (1.0 - np.abs(z) ** 2) / np.abs(p - z) ** 2
        return acc

    return Custom(
        fn=fn,
        singularities=[p for p, _ in interior] + [p for p, _ in boundary],
        label="synthesized",
        is_harmonic=not interior,
        analytic_mass=d.total_mass,
        decomposition=d,
    )


def l1_norm(w: Weight, grid: DiskGrid) -> float:
    """Mass of the weight against normalized area measure, by quadrature."""
    return float(integrate(grid, w.eval_many))


def normalize(w: Weight, grid: DiskGrid) -> Scaled:
    """Rescale to unit mass; degenerate (zero) weights are rejected."""
    mass = l1_norm(w, grid)
    if mass <= 0.0:
        raise DegenerateWeightError(f"weight {w.label} has nonpositive mass {mass}")
    return Scaled(1.0 / mass, w)


@dataclass(frozen=True)
class SuperharmonicReport:
    passes: bool
    worst_violation: float  # largest positive excess of circle mean over center
    worst_margin: float  # most negative of center - mean
    worst_case: tuple[complex, float]
    tolerance: float


def superharmonic_test(
    w: Weight,
    centers: Sequence[complex],
    radii: Sequence[float],
    circle_grid: CircleGrid,
    tol: float = 1e-8,
) -> SuperharmonicReport:
    """Check the circle sub-mean-value inequality on a lattice.

    For every center z0 and radius r the circle {z0 + r e^{i t}} must lie
    inside the open disk; the test requires w(z0) >= (circle mean) - tol
    and reports the worst margin found.
    """
    worst_margin = math.inf
    worst_case = (0j, 0.0)
    for z0 in centers:
        z0 = complex(z0)
        for r in radii:
            r = float(r)
            if r <= 0.0:
                raise DomainError(f"circle radius must be positive, got {r}")
            if abs(z0) + r >= 1.0:
                raise DomainError(
                    f"circle at center {z0!r} radius {r} leaves the disk"
                )

            def on_circle(zeta, _c=z0, _r=r):
                return w.eval_many(_c + _r * zeta)

            mean = float(np.real(integrate(circle_grid, on_circle)))
            margin = w(z0) - mean
            if margin < worst_margin:
                worst_margin = margin
                worst_case = (z0, r)
    violation = max(0.0, -worst_margin)
    return SuperharmonicReport(
        passes=violation <= tol,
        worst_violation=violation,
        worst_margin=worst_margin,
        worst_case=worst_case,
        tolerance=tol,
    )


def grid_for_weight(
    weight: Weight, radial_order: int, angular_order: int
) -> DiskGrid:
    """Disk grid whose angular grading guards the weight's singular radii."""
    return make_disk_grid(
        radial_order, angular_order, singular_radii=weight.singular_radii
    )


def parse_weight_spec(spec: str) -> Weight:
    """Parse the CLI mini-language for weights.

    Grammar: ``harm:<re>,<im>`` (boundary point, normalized to the circle),
    ``log:<re>,<im>`` (interior point), ``scaled:<c>:<spec>``, ``uniform``.
    """
    spec = spec.strip()
    if spec == "uniform":
        return uniform_weight()
    head, _, rest = spec.partition(":")
    if head == "harm":
        z = _parse_point(rest, spec)
        if abs(z) == 0.0:
            raise WeightSpecError(f"cannot normalize zero point in {spec!r}")
        return HarmonicBoundary(z / abs(z))
    if head == "log":
        z = _parse_point(rest, spec)
        if abs(z) >= 1.0:
            raise WeightSpecError(
                f"log weight point must satisfy |zeta| < 1 in {spec!r}"
            )
        return LogGreen(z)
    if head == "scaled":
        c_str, sep, inner = rest.partition(":")
        if not sep:
            raise WeightSpecError(f"scaled spec needs scaled:<c>:<spec>, got {spec!r}")
        try:
            c = float(c_str)
        except ValueError:
            raise WeightSpecError(f"bad scale factor {c_str!r} in {spec!r}") from None
        if c <= 0.0:
            raise WeightSpecError(f"scale factor must be positive in {spec!r}")
        return Scaled(c, parse_weight_spec(inner))
    raise WeightSpecError(f"unknown weight kind {head!r} in {spec!r}")


def _parse_point(token: str, spec: str) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise WeightSpecError(f"expected <re>,<im> after kind in {spec!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise WeightSpecError(f"bad coordinate {token!r} in {spec!r}") from None
