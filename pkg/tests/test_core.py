import numpy as np
import pytest

from dualbench.core import (
    PSI_PLUS,
    DensityMatrix,
    Mode,
    ModeUnitary,
    TwoPhotonState,
    apply_unitary,
    coincidence_amplitude,
    reduce_to_qubits,
)
from dualbench.errors import ConfigurationError, NotReducibleError, ValidationError

from conftest import entangled_pair_terms, gamma_pair
from oracles import brute_force_reduce, permanent

INV_SQRT2 = 1 / np.sqrt(2)


def pair_modes(port_a="a", port_b="b"):
    return (Mode(port_a, "H", 0), Mode(port_b, "H", 0))


def mixer_unitary():
    # balanced two-port mixer, single polarization, single internal index
    modes = pair_modes()
    matrix = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    return ModeUnitary(modes, matrix)


class TestTwoPhotonState:
    def test_canonicalizes_and_validates_norm(self):
        m1, m2 = Mode("S", "H", 0), Mode("I", "V", 0)
        state = TwoPhotonState({(m2, m1): 1.0})
        assert list(state.terms) == [(m2, m1) if m2 <= m1 else (m1, m2)]
        with pytest.raises(ValidationError):
            TwoPhotonState({(m1, m2): 0.5})

    def test_exchange_of_photon_assignment_is_identity(self):
        # unordered storage means swapping the two photons changes nothing
        a = TwoPhotonState(entangled_pair_terms(0.7))
        swapped = {(m2, m1): amp for (m1, m2), amp in a.terms.items()}
        b = TwoPhotonState(swapped)
        assert a.terms.keys() == b.terms.keys()
        for key in a.terms:
            assert a.terms[key] == pytest.approx(b.terms[key])

    def test_weight_bounds(self):
        m1, m2 = pair_modes()
        with pytest.raises(ValidationError):
            TwoPhotonState({(m1, m2): 1.0}, weight=1.5)


class TestApplyUnitary:
    def test_identity_leaves_state_unchanged(self, bell_pair):
        modes = sorted(bell_pair.modes())
        out = apply_unitary(bell_pair, ModeUnitary.identity(modes))
        assert out.terms.keys() == bell_pair.terms.keys()
        for key, amp in bell_pair.terms.items():
            assert out.terms[key] == pytest.approx(amp)

    def test_spatial_swap_is_a_symmetry_of_the_pair(self, bell_pair):
        modes = sorted(bell_pair.modes())
        swap = {"S": "I", "I": "S"}
        matrix = np.zeros((len(modes), len(modes)))
        index = {m: i for i, m in enumerate(modes)}
        for j, m in enumerate(modes):
            matrix[index[Mode(swap[m.spatial], m.pol, m.internal)], j] = 1.0
        out = apply_unitary(bell_pair, ModeUnitary(modes, matrix))
        for key, amp in bell_pair.terms.items():
            assert out.terms[key] == pytest.approx(amp)

    def test_two_photon_bunching_on_balanced_mixer(self):
        # one photon in each input of a 50/50 mixer: the coincidence term is
        # the 2x2 permanent and vanishes; all weight bunches
        u = mixer_unitary()
        ma, mb = u.modes
        state = TwoPhotonState({(ma, mb): 1.0})
        out = apply_unitary(state, u)

        expected_coinc = permanent(u.matrix)
        assert expected_coinc == pytest.approx(0.0, abs=1e-12)
        assert coincidence_amplitude(out, ma, mb) == pytest.approx(expected_coinc, abs=1e-12)

        # double occupancy coefficient of the normalized |2> ket:
        # sqrt(2) * U[p, a] * U[p, b] for each output port p (hand oracle)
        for p in (ma, mb):
            i = u.modes.index(p)
            expected = np.sqrt(2) * u.matrix[i, 0] * u.matrix[i, 1]
            assert out.amplitude(p, p) == pytest.approx(expected)
            assert abs(out.amplitude(p, p)) ** 2 == pytest.approx(0.5)

    def test_unknown_mode_is_a_configuration_error(self, bell_pair):
        u = mixer_unitary()
        with pytest.raises(ConfigurationError):
            apply_unitary(bell_pair, u)

    def test_non_unitary_matrix_rejected(self):
        modes = pair_modes()
        with pytest.raises(ValidationError):
            ModeUnitary(modes, np.array([[1.0, 0.0], [0.0, 0.5]]))

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_random_unitary_preserves_norm_and_inverts(self, seed):
        rng = np.random.default_rng(seed)
        ports = ["S", "I", "X"]
        modes = tuple(Mode(p, pol, k) for p in ports for pol in "HV" for k in range(2))
        n = len(modes)
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q, r = np.linalg.qr(z)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        u = ModeUnitary(modes, q, internal_blind=False)

        state = gamma_pair(0.6)
        out = apply_unitary(state, u)
        norm2 = sum(abs(a) ** 2 for a in out.terms.values())
        assert norm2 == pytest.approx(1.0, abs=1e-10)

        back = apply_unitary(out, u.dagger())
        for key, amp in state.terms.items():
            assert back.amplitude(*key) == pytest.approx(amp, abs=1e-10)
        extra = set(back.terms) - set(state.terms)
        assert all(abs(back.terms[k]) < 1e-10 for k in extra)


class TestCoincidenceAmplitude:
    def test_reads_off_the_pair_terms(self, bell_pair):
        assert coincidence_amplitude(
            bell_pair, Mode("S", "H", 0), Mode("I", "V", 0)) == pytest.approx(INV_SQRT2)
        assert coincidence_amplitude(
            bell_pair, Mode("S", "H", 0), Mode("I", "H", 0)) == 0.0

    def test_rejects_ensembles(self, bell_pair):
        with pytest.raises(ValidationError):
            coincidence_amplitude([bell_pair], Mode("S", "H", 0), Mode("I", "V", 0))


class TestReduceToQubits:
    def test_by_path_recovers_the_bell_projector(self, bell_pair):
        dm = reduce_to_qubits(bell_pair, "by_path")
        expected = np.outer(PSI_PLUS, PSI_PLUS)
        np.testing.assert_allclose(dm.matrix, expected, atol=1e-12)
        assert dm.basis_labels == ("HH", "HV", "VH", "VV")

    @pytest.mark.parametrize("gamma", [0.0, 0.3, 0.6, 1.0])
    def test_by_path_is_independent_of_overlap(self, gamma):
        dm = reduce_to_qubits(gamma_pair(gamma), "by_path")
        np.testing.assert_allclose(dm.matrix, np.outer(PSI_PLUS, PSI_PLUS), atol=1e-12)

    @pytest.mark.parametrize("gamma", [0.0, 0.25, 0.5, np.sqrt(0.5), 0.9, 1.0])
    def test_by_polarization_matches_brute_force_oracle(self, gamma):
        terms = entangled_pair_terms(gamma)
        dm = reduce_to_qubits(TwoPhotonState(terms), "by_polarization")
        oracle = brute_force_reduce(
            [(1.0, {tuple(map(tuple, k)): v for k, v in terms.items()})],
            "by_polarization", partition=("H", "V"), qubit_basis=("S", "I"))
        np.testing.assert_allclose(dm.matrix, oracle, atol=1e-12)

        # analytic form: half on |SI> and |IS| with gamma^2/2 coherence
        expected = np.zeros((4, 4), dtype=complex)
        expected[1, 1] = expected[2, 2] = 0.5
        expected[1, 2] = expected[2, 1] = gamma ** 2 / 2
        np.testing.assert_allclose(dm.matrix, expected, atol=1e-12)
        assert dm.basis_labels == ("SS", "SI", "IS", "II")

    def test_fully_distinguishable_pair_has_no_coherence(self):
        dm = reduce_to_qubits(gamma_pair(0.0), "by_polarization")
        off_diag = dm.matrix - np.diag(np.diag(dm.matrix))
        assert np.max(np.abs(off_diag)) < 1e-14
        np.testing.assert_allclose(np.diag(dm.matrix).real, [0, 0.5, 0.5, 0], atol=1e-12)

    def test_label_collision_raises(self):
        m1, m2 = Mode("S", "H", 0), Mode("I", "H", 0)
        state = TwoPhotonState({(m1, m2): 1.0})
        with pytest.raises(NotReducibleError):
            reduce_to_qubits(state, "by_polarization")

    def test_unknown_labeling_rejected(self, bell_pair):
        with pytest.raises(ConfigurationError):
            reduce_to_qubits(bell_pair, "by_magic")

    def test_mixture_reduction_weights_members(self):
        hv = TwoPhotonState({(Mode("S", "H", 0), Mode("I", "V", 0)): 1.0}, weight=0.5)
        vh = TwoPhotonState({(Mode("S", "V", 0), Mode("I", "H", 0)): 1.0}, weight=0.5)
        dm = reduce_to_qubits((hv, vh), "by_path")
        np.testing.assert_allclose(np.diag(dm.matrix).real, [0, 0.5, 0.5, 0], atol=1e-14)
        assert np.max(np.abs(dm.matrix - np.diag(np.diag(dm.matrix)))) < 1e-14


class TestDensityMatrix:
    def test_invariants_enforced(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.eye(4) / 2, ("HH", "HV", "VH", "VV"))
        bad = np.diag([0.6, 0.5, 0.0, -0.1])
        with pytest.raises(ValidationError):
            DensityMatrix(bad, ("HH", "HV", "VH", "VV"))
        # the same spectrum is storable when explicitly flagged non-PSD
        DensityMatrix(bad, ("HH", "HV", "VH", "VV"), psd=False)

    def test_permuted_relabels_consistently(self, bell_pair):
        dm = reduce_to_qubits(bell_pair, "by_path")
        perm = dm.permuted([0, 2, 1, 3])
        assert perm.basis_labels == ("HH", "VH", "HV", "VV")
        np.testing.assert_allclose(perm.matrix[1, 2], dm.matrix[2, 1])
