"""Mode-indexed bosonic two-photon states and their linear-optics evolution.

A mode is a triple ``(spatial, pol, internal)``. A pure two-photon state is a
sparse map from canonically ordered mode pairs to complex amplitudes. The
stored amplitude is always the coefficient of the *normalized* symmetric
basis ket:

* distinct modes ``m != n``: the ket is ``a_m^dag a_n^dag |0>`` (already
  normalized), and the stored amplitude is its coefficient;
* double occupancy ``m == n``: the ket is ``|2_m> = (a_m^dag)^2 |0> / sqrt(2)``
  and the stored amplitude is the coefficient of ``|2_m>``.

With this convention the sum of ``|amplitude|^2`` over stored pairs is 1 for
a normalized state. Evolution uses the symmetric amplitude matrix
``A(m, n) = <0| a_n a_m |psi>`` (so ``A(m, m) = sqrt(2) * t_mm``), which
transforms as ``A -> U A U^T``; for two photons this is exactly the 2x2
permanent rule for output pair amplitudes.

Mixed states are weighted ensembles of pure `TwoPhotonState` members; all
detection probabilities are weight-averaged over members.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ConfigurationError, NotReducibleError, ValidationError
from .validation import check_unitary

NORM_ATOL = 1e-9
PRUNE_TOL = 1e-14

#: (|01> + |10>)/sqrt(2) in any 4-dim product basis; this is both the
#: polarization target (|HV> + |VH>)/sqrt(2) and the path target
#: (|SI> + |IS>)/sqrt(2) in their respective basis orderings.
PSI_PLUS = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2.0)


class Mode(NamedTuple):
    """One bosonic mode: spatial port, polarization and internal index.

    Tuples order lexicographically, which gives unordered pairs a canonical
    form. ``internal`` indexes the spectral/temporal wavepacket degree of
    freedom (dimension 2 is enough to host any two wavepackets).
    """

    spatial: str
    pol: str
    internal: int = 0


def canonical_pair(m1: Mode, m2: Mode) -> tuple[Mode, Mode]:
    return (m1, m2) if m1 <= m2 else (m2, m1)


@dataclass(frozen=True)
class TwoPhotonState:
    """A pure two-photon amplitude map plus its weight inside an ensemble.

    ``terms`` maps canonical unordered mode pairs to complex amplitudes
    (normalized-ket coefficients, see module docstring). ``weight`` is the
    ensemble probability of this member.
    """

    terms: Mapping[tuple[Mode, Mode], complex]
    weight: float = 1.0

    def __post_init__(self):
        cleaned: dict[tuple[Mode, Mode], complex] = {}
        for (m1, m2), amp in self.terms.items():
            amp = complex(amp)
            if abs(amp) <= PRUNE_TOL:
                continue
            key = canonical_pair(Mode(*m1), Mode(*m2))
            cleaned[key] = cleaned.get(key, 0.0) + amp
        if not cleaned:
            raise ValidationError("two-photon state has no terms")
        norm2 = sum(abs(a) ** 2 for a in cleaned.values())
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise ValidationError(f"state not normalized: sum |amp|^2 = {norm2!r}")
        if not (0.0 <= self.weight <= 1.0 + 1e-12):
            raise ValidationError(f"weight must lie in [0, 1], got {self.weight}")
        object.__setattr__(self, "terms", cleaned)

    def modes(self) -> set[Mode]:
        out: set[Mode] = set()
        for m1, m2 in self.terms:
            out.add(m1)
            out.add(m2)
        return out

    def amplitude(self, m1: Mode, m2: Mode) -> complex:
        return self.terms.get(canonical_pair(m1, m2), 0.0 + 0.0j)


Ensemble = tuple[TwoPhotonState, ...]


def as_ensemble(state) -> Ensemble:
    """Normalize a state-or-sequence argument to a weight-checked tuple."""
    members = (state,) if isinstance(state, TwoPhotonState) else tuple(state)
    if not members:
        raise ValidationError("empty ensemble")
    total = sum(m.weight for m in members)
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"ensemble weights must sum to 1, got {total!r}")
    return members


@dataclass(frozen=True)
class ModeUnitary:
    """A unitary (or loss-routing isometry) over an explicit mode basis.

    ``matrix[i, j]`` is the amplitude for input mode ``modes[j]`` to exit in
    ``modes[i]``; creation operators transform as
    ``a_m^dag -> sum_n U[n, m] a_n^dag``. Loss ports are ordinary modes here,
    so the matrix stays exactly unitary; ``loss_ports`` records which spatial
    ports detection must ignore. Bench elements never touch the internal
    index (``internal_blind``); only source-level physics does.
    """

    modes: tuple[Mode, ...]
    matrix: np.ndarray
    loss_ports: frozenset[str] = frozenset()
    internal_blind: bool = True

    def __post_init__(self):
        n = len(self.modes)
        if len(set(self.modes)) != n:
            raise ConfigurationError("duplicate modes in unitary basis")
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (n, n):
            raise ValidationError(f"matrix shape {matrix.shape} does not match {n} modes")
        check_unitary(matrix, name="mode matrix")
        if self.internal_blind:
            _check_internal_blind(self.modes, matrix)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "_index", {m: i for i, m in enumerate(self.modes)})

    @property
    def lossy(self) -> bool:
        return bool(self.loss_ports)

    def index_of(self, mode: Mode) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise ConfigurationError(f"mode {mode} not in unitary basis") from None

    @classmethod
    def identity(cls, modes: Iterable[Mode]) -> "ModeUnitary":
        modes = tuple(modes)
        return cls(modes, np.eye(len(modes)))

    def dagger(self) -> "ModeUnitary":
        return ModeUnitary(self.modes, self.matrix.conj().T,
                           loss_ports=self.loss_ports, internal_blind=self.internal_blind)


def _check_internal_blind(modes, matrix):
    # Internal-blind matrices may not carry cross-internal amplitude.
    internal = np.array([m.internal for m in modes])
    crossing = internal[:, None] != internal[None, :]
    worst = np.max(np.abs(matrix[crossing])) if crossing.any() else 0.0
    if worst > 1e-12:
        raise ValidationError(
            f"matrix couples internal indices (|amp| up to {worst:.3e}) but is declared internal-blind")


def apply_unitary(state, u: ModeUnitary):
    """Propagate a state (or ensemble) through a mode unitary.

    Amplitudes routed into loss ports are retained; they are excluded only at
    detection time, so coincidence totals come out un-renormalized.
    Returns the same shape as the input (single member in, single member out).
    """
    single = isinstance(state, TwoPhotonState)
    members = as_ensemble(state)
    out = tuple(_apply_to_member(m, u) for m in members)
    return out[0] if single else out


def _apply_to_member(member: TwoPhotonState, u: ModeUnitary) -> TwoPhotonState:
    n = len(u.modes)
    a = np.zeros((n, n), dtype=complex)
    sqrt2 = np.sqrt(2.0)
    for (m1, m2), amp in member.terms.items():
        i, j = u.index_of(m1), u.index_of(m2)
        if i == j:
            a[i, i] = sqrt2 * amp
        else:
            a[i, j] += amp
            a[j, i] += amp
    a_out = u.matrix @ a @ u.matrix.T
    terms: dict[tuple[Mode, Mode], complex] = {}
    rows, cols = np.nonzero(np.abs(a_out) > PRUNE_TOL)
    for i, j in zip(rows, cols):
        if i > j:
            continue
        amp = a_out[i, j] if i != j else a_out[i, i] / sqrt2
        terms[(u.modes[i], u.modes[j])] = amp
    return TwoPhotonState(terms, weight=member.weight)


def coincidence_amplitude(state: TwoPhotonState, out1: Mode, out2: Mode) -> complex:
    """Joint detection amplitude for one photon in each of two output modes.

    This is the stored canonical coefficient: the permanent-symmetrized
    amplitude for distinct modes, or the coefficient of the normalized
    double-occupancy ket ``|2>`` when ``out1 == out2``. Probabilities of a
    two-detector coincidence are ``|amplitude|^2`` summed over whatever the
    detectors do not resolve (internal indices, ensemble members).
    """
    if not isinstance(state, TwoPhotonState):
        raise ValidationError("coincidence_amplitude takes a pure member, not an ensemble")
    return state.amplitude(Mode(*out1), Mode(*out2))


_DEFAULT_PARTITIONS = {"by_path": ("S", "I"), "by_polarization": ("H", "V")}
_DEFAULT_QUBIT_BASIS = {"by_path": ("H", "V"), "by_polarization": ("S", "I")}


def reduce_to_qubits(state, labeling: str, partition=None, qubit_basis=None):
    """Partition the two photons by a label and trace out the internal index.

    ``labeling="by_path"`` labels photons by their spatial port and keeps
    polarization as the qubit; ``"by_polarization"`` does the converse. The
    result is a normalized 4x4 `DensityMatrix` whose first qubit belongs to
    the photon carrying ``partition[0]`` and whose single-qubit basis order
    is ``qubit_basis``. A term in which both photons share the label value
    makes the labeling invalid and raises `NotReducibleError`.
    """
    if labeling not in _DEFAULT_PARTITIONS:
        raise ConfigurationError(f"unknown labeling {labeling!r}")
    label_attr = "spatial" if labeling == "by_path" else "pol"
    qubit_attr = "pol" if labeling == "by_path" else "spatial"
    members = as_ensemble(state)

    if partition is None:
        partition = _infer_order(members, label_attr, _DEFAULT_PARTITIONS[labeling])
    if qubit_basis is None:
        qubit_basis = _infer_order(members, qubit_attr, _DEFAULT_QUBIT_BASIS[labeling])
    partition = tuple(partition)
    qubit_basis = tuple(qubit_basis)
    if len(partition) != 2 or len(qubit_basis) != 2:
        raise ConfigurationError("partition and qubit_basis must each list two values")

    d_int = 1 + max(max(m1.internal, m2.internal)
                    for member in members for (m1, m2) in member.terms)
    rho = np.zeros((4, 4), dtype=complex)
    for member in members:
        psi = np.zeros((2, d_int, 2, d_int), dtype=complex)
        for (m1, m2), amp in member.terms.items():
            l1, l2 = getattr(m1, label_attr), getattr(m2, label_attr)
            if l1 == l2:
                raise NotReducibleError(
                    f"both photons carry {label_attr}={l1!r}; {labeling} labeling is invalid here")
            if {l1, l2} != set(partition):
                raise NotReducibleError(
                    f"term carries {label_attr} values {{{l1!r}, {l2!r}}}, expected {set(partition)}")
            first, second = (m1, m2) if l1 == partition[0] else (m2, m1)
            try:
                qa = qubit_basis.index(getattr(first, qubit_attr))
                qb = qubit_basis.index(getattr(second, qubit_attr))
            except ValueError as exc:
                raise NotReducibleError(f"qubit value outside basis {qubit_basis}: {exc}") from None
            psi[qa, first.internal, qb, second.internal] += amp
        rho += member.weight * np.einsum("aibj,cidj->abcd", psi, psi.conj()).reshape(4, 4)

    tr = rho.trace().real
    if tr <= 1e-12:
        raise NotReducibleError("state has no support on the requested labeling")
    rho /= tr
    labels = tuple(f"{a}{b}" for a in qubit_basis for b in qubit_basis)
    return DensityMatrix(rho, labels)


def _infer_order(members, attr, preferred):
    values = {getattr(m, attr) for member in members for pair in member.terms for m in pair}
    if set(preferred) == values:
        return preferred
    if len(values) != 2:
        raise NotReducibleError(f"need exactly two distinct {attr} values, got {sorted(values)}")
    return tuple(sorted(values))


@dataclass(frozen=True)
class DensityMatrix:
    """A 4x4 two-qubit density matrix with its basis labels.

    ``psd`` records whether the producer guarantees positive semidefiniteness
    (linear inversion may not); ``log_likelihood`` is attached by the MLE
    reconstructor.
    """

    matrix: np.ndarray
    basis_labels: tuple[str, str, str, str]
    psd: bool | None = None
    log_likelihood: float | None = None

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValidationError(f"density matrix must be 4x4, got {matrix.shape}")
        herm = np.max(np.abs(matrix - matrix.conj().T))
        if herm > 1e-10:
            raise ValidationError(f"density matrix not Hermitian: {herm:.3e}")
        if abs(matrix.trace() - 1.0) > 1e-10:
            raise ValidationError(f"density matrix trace {matrix.trace():.12g} != 1")
        if np.linalg.eigvalsh((matrix + matrix.conj().T) / 2).min() < -1e-9 and self.psd is not False:
            raise ValidationError("density matrix has an eigenvalue below -1e-9")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)

    def permuted(self, order: Sequence[int]) -> "DensityMatrix":
        order = list(order)
        m = self.matrix[np.ix_(order, order)]
        labels = tuple(self.basis_labels[i] for i in order)
        return DensityMatrix(m, labels, psd=self.psd, log_likelihood=self.log_likelihood)
