"""Independent oracles used to freeze expected values in the test suite.

Everything here is deliberately naive (explicit loops, permutation sums,
numerical quadrature) and shares no code with the package internals it
checks.
"""

import itertools

import numpy as np
from scipy import integrate


def permanent(matrix):
    """Permanent by explicit permutation sum; fine for the small cases here."""
    matrix = np.asarray(matrix)
    n = matrix.shape[0]
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        prod = 1.0 + 0.0j
        for i, j in enumerate(perm):
            prod *= matrix[i, j]
        total += prod
    return total


def brute_force_reduce(members, labeling, partition, qubit_basis, d_int=2):
    """Reduced two-qubit density matrix via explicit six-deep loops.

    ``members`` is a list of (weight, terms) with terms mapping mode-pair
    tuples ((spatial, pol, internal), (spatial, pol, internal)) to complex
    amplitudes (normalized-ket coefficients, canonical order irrelevant
    here because lookups try both orders).
    """
    if labeling == "by_path":
        def mode_for(label, qubit, internal):
            return (label, qubit, internal)
    elif labeling == "by_polarization":
        def mode_for(label, qubit, internal):
            return (qubit, label, internal)
    else:
        raise ValueError(labeling)

    def lookup(terms, m1, m2):
        if (m1, m2) in terms:
            return terms[(m1, m2)]
        if (m2, m1) in terms:
            return terms[(m2, m1)]
        return 0.0

    rho = np.zeros((4, 4), dtype=complex)
    for weight, terms in members:
        for qa in range(2):
            for qb in range(2):
                for qc in range(2):
                    for qd in range(2):
                        acc = 0.0 + 0.0j
                        for ia in range(d_int):
                            for ib in range(d_int):
                                amp = lookup(terms,
                                             mode_for(partition[0], qubit_basis[qa], ia),
                                             mode_for(partition[1], qubit_basis[qb], ib))
                                ampc = lookup(terms,
                                              mode_for(partition[0], qubit_basis[qc], ia),
                                              mode_for(partition[1], qubit_basis[qd], ib))
                                acc += amp * np.conj(ampc)
                        rho[2 * qa + qb, 2 * qc + qd] += weight * acc
    return rho / np.trace(rho)


def overlap_quadrature(sigma_omega, delta_omega, tau, omega0=0.0):
    """Numerical quadrature of the wavepacket overlap integral.

    Integrates conj(phi_S(w)) * phi_I(w) * exp(i w tau) for unit-norm
    Gaussian amplitudes centered at omega0 and omega0 + delta_omega with
    intensity standard deviation sigma_omega.
    """
    def g(w, center):
        return (2 * np.pi * sigma_omega ** 2) ** (-0.25) * np.exp(
            -((w - center) ** 2) / (4 * sigma_omega ** 2))

    def integrand_re(w):
        return g(w, omega0) * g(w, omega0 + delta_omega) * np.cos(w * tau)

    def integrand_im(w):
        return g(w, omega0) * g(w, omega0 + delta_omega) * np.sin(w * tau)

    lo = omega0 + delta_omega / 2 - 60 * sigma_omega
    hi = omega0 + delta_omega / 2 + 60 * sigma_omega
    re, _ = integrate.quad(integrand_re, lo, hi, limit=400)
    im, _ = integrate.quad(integrand_im, lo, hi, limit=400)
    return re + 1j * im


def concurrence_eig(rho):
    """Wootters concurrence from the plain non-symmetric eigenvalue route."""
    y = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(y, y)
    m = rho @ yy @ rho.conj() @ yy
    ev = np.linalg.eigvals(m).real
    ev = np.sqrt(np.clip(ev, 0.0, None))
    ev = np.sort(ev)[::-1]
    return max(0.0, ev[0] - ev[1] - ev[2] - ev[3])


def fidelity_direct(rho, ket):
    return float(np.real(np.conj(ket) @ rho @ ket))
