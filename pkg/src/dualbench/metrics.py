"""Entanglement and coherence figures of merit.

Conventions:

* fidelity is the overlap ``<target| rho |target>`` with a pure target ket;
* concurrence is the Wootters two-qubit monotone, computed through the
  Hermitian similarity form ``sqrt(rho) rho_tilde sqrt(rho)`` whenever rho is
  PSD (numerically stabler), falling back to the non-symmetric product for
  slightly indefinite linear-inversion outputs;
* fringe visibility is a least-squares fit of the scan to
  ``a + b cos(4 theta + phi0)``: the projection angle doubles the analyzer
  dial, so the coincidence fringe has period 90 degrees in the dial.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DensityMatrix
from .errors import NumericalError, ValidationError
from .validation import check_density_matrix, check_ket

_Y = np.array([[0.0, -1j], [1j, 0.0]])
_YY = np.kron(_Y, _Y)


def _as_matrix(rho):
    if isinstance(rho, DensityMatrix):
        if rho.psd is False:
            return np.asarray(rho.matrix, dtype=complex), False
        return np.asarray(rho.matrix, dtype=complex), True
    rho = check_density_matrix(rho)
    return rho, bool(np.linalg.eigvalsh(rho).min() >= -1e-12)


def fidelity(rho, target) -> float:
    """Overlap ``<target| rho |target>`` with a normalized pure target ket."""
    matrix, _ = _as_matrix(rho)
    herm = np.max(np.abs(matrix - matrix.conj().T))
    if herm > 1e-10:
        raise ValidationError(f"density matrix not Hermitian: {herm:.3e}")
    target = check_ket(target, dim=4, name="target ket")
    value = target.conj() @ matrix @ target
    if abs(value.imag) > 1e-12:
        raise NumericalError(f"fidelity has imaginary residue {value.imag:.3e}")
    return float(value.real)


def concurrence(rho) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the decreasingly sorted square roots of the eigenvalues
    of ``rho (Y x Y) rho* (Y x Y)``.
    """
    matrix, psd = _as_matrix(rho)
    rho_tilde = _YY @ matrix.conj() @ _YY
    if psd:
        evals, evecs = np.linalg.eigh((matrix + matrix.conj().T) / 2)
        sqrt_rho = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
        lam2 = np.linalg.eigvalsh(sqrt_rho @ rho_tilde @ sqrt_rho)
    else:
        lam2 = np.linalg.eigvals(matrix @ rho_tilde).real
    if lam2.min() < -1e-9:
        raise NumericalError(
            f"spin-flipped product has eigenvalue {lam2.min():.3e} below -1e-9")
    lam = np.sqrt(np.clip(lam2, 0.0, None))
    lam = np.sort(lam, kind="stable")[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class VisibilityFit:
    """Result of the fringe fit ``a + b cos(4 theta + phi0)``."""

    visibility: float
    offset: float
    amplitude: float
    phase_rad: float
    residual_rms: float


def visibility(theta_deg, values) -> VisibilityFit:
    """Fit a scan to ``a + b cos(4 theta + phi0)`` and return V = |b| / a.

    Needs at least 8 points spanning at least one fringe period (90 degrees
    in the analyzer dial). V is clipped to [0, 1]; a non-positive fitted
    offset means there is no fringe to normalize against and raises.
    """
    theta = np.asarray(theta_deg, dtype=float)
    values = np.asarray(values, dtype=float)
    if theta.shape != values.shape or theta.ndim != 1:
        raise ValidationError("theta_deg and values must be 1-D arrays of equal length")
    if theta.size < 8:
        raise ValidationError(f"need at least 8 scan points, got {theta.size}")
    if theta.max() - theta.min() < 90.0 - 1e-9:
        raise ValidationError("scan must span at least one fringe period (90 degrees)")

    phi = np.deg2rad(4.0 * theta)
    design = np.column_stack([np.ones_like(phi), np.cos(phi), np.sin(phi)])
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    a, c, d = coef
    if a <= 0:
        raise NumericalError(f"degenerate fringe fit: offset {a!r} <= 0")
    b = float(np.hypot(c, d))
    phase = float(np.arctan2(-d, c))
    resid = values - design @ coef
    v = min(1.0, b / a)
    return VisibilityFit(visibility=float(v), offset=float(a), amplitude=b,
                         phase_rad=phase, residual_rms=float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True)
class ErrorBar:
    mean: float
    std: float

    def to_dict(self):
        return {"mean": self.mean, "std": self.std}


@dataclass(frozen=True)
class MetricsReport:
    """Figures of merit for one labeling, with optional Monte-Carlo error bars."""

    fidelity: float
    concurrence: float
    visibility_z: float | None = None
    visibility_x: float | None = None
    errors: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("fidelity", "concurrence"):
            value = getattr(self, name)
            if not -1e-9 <= value <= 1.0 + 1e-9:
                raise ValidationError(f"{name} {value!r} outside [0, 1]")
        for name in ("visibility_z", "visibility_x"):
            value = getattr(self, name)
            if value is not None and not -1e-9 <= value <= 1.0 + 1e-9:
                raise ValidationError(f"{name} {value!r} outside [0, 1]")
        for key, err in self.errors.items():
            if err.std < 0:
                raise ValidationError(f"error bar for {key} has negative std")

    def to_dict(self):
        doc = {"fidelity": self.fidelity, "concurrence": self.concurrence,
               "visibility_z": self.visibility_z, "visibility_x": self.visibility_x}
        if self.errors:
            doc["errors"] = {k: v.to_dict() for k, v in self.errors.items()}
        return doc
