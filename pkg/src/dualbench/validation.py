"""Input validation helpers, in the spirit of sklearn's ``check_array``.

Every public entry point funnels array-like inputs through these so error
messages are uniform and tolerances live in one place.
"""

from __future__ import annotations

import numbers

import numpy as np

from .errors import ValidationError

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-9
UNITARITY_ATOL = 1e-10


def check_complex_matrix(m, shape=None, name="matrix"):
    """Coerce to a complex ndarray, optionally enforcing a shape."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got ndim={m.ndim}")
    if shape is not None and m.shape != shape:
        raise ValidationError(f"{name} must have shape {shape}, got {m.shape}")
    return m


def check_ket(ket, dim=2, name="ket", atol=1e-10):
    """Coerce to a normalized complex state vector of the given dimension."""
    ket = np.asarray(ket, dtype=complex).reshape(-1)
    if ket.shape != (dim,):
        raise ValidationError(f"{name} must be a length-{dim} vector, got shape {ket.shape}")
    norm = np.linalg.norm(ket)
    if abs(norm - 1.0) > atol:
        raise ValidationError(f"{name} must be normalized, |norm - 1| = {abs(norm - 1.0):.3e}")
    return ket


def check_density_matrix(rho, require_psd=False, name="density matrix"):
    """Validate Hermiticity, unit trace and spectrum of a 4x4 density matrix.

    Returns the matrix as a plain complex ndarray. ``require_psd`` tightens
    the eigenvalue floor from the reconstruction tolerance (-1e-9) to 0.
    """
    rho = check_complex_matrix(rho, shape=(4, 4), name=name)
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITICITY_ATOL:
        raise ValidationError(f"{name} is not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = rho.trace()
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValidationError(f"{name} must have unit trace, got {tr:.12g}")
    floor = 0.0 if require_psd else EIGENVALUE_FLOOR
    min_eig = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if min_eig < floor:
        raise ValidationError(f"{name} has eigenvalue {min_eig:.3e} below {floor}")
    return rho


def check_unitary(matrix, atol=UNITARITY_ATOL, name="matrix"):
    """Require U^dag U = I within ``atol``; returns the coerced matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {matrix.shape}")
    gram = matrix.conj().T @ matrix
    dev = np.max(np.abs(gram - np.eye(matrix.shape[0])))
    if dev > atol:
        raise ValidationError(f"{name} is not unitary: max |U^dag U - I| = {dev:.3e}")
    return matrix


def check_probability(p, name="probability"):
    p = float(p)
    if not (0.0 - 1e-12 <= p <= 1.0 + 1e-12):
        raise ValidationError(f"{name} must lie in [0, 1], got {p}")
    return min(max(p, 0.0), 1.0)


def check_positive(value, name="value", strict=True):
    value = float(value)
    if strict and value <= 0:
        raise ValidationError(f"{name} must be > 0, got {value}")
    if not strict and value < 0:
        raise ValidationError(f"{name} must be >= 0, got {value}")
    return value


def check_rng(seed_or_rng):
    """Accept an int seed, a SeedSequence or a Generator; return a Generator.

    The underlying bit generator is always PCG64 (128-bit state plus 128-bit
    stream increment), so seeded runs are reproducible across platforms.
    """
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    if isinstance(seed_or_rng, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed_or_rng))
    if isinstance(seed_or_rng, numbers.Integral):
        return np.random.Generator(np.random.PCG64(int(seed_or_rng)))
    raise ValidationError(f"expected an int seed, SeedSequence or Generator, got {type(seed_or_rng)!r}")
