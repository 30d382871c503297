"""Entangled-pair source with a tunable internal-mode distinguishability knob.

The source emits the polarization-entangled pair on spatial ports S and I.
Each photon carries a Gaussian spectral/temporal wavepacket; the signal
wavepacket is internal basis vector e0 and the idler wavepacket is
``gamma * e0 + sqrt(1 - |gamma|^2) * e1`` where ``gamma`` is the complex
overlap of the two wavepackets. Any two wavepackets span a 2-dim internal
subspace, so this representation is exact. The internal label always rides
on the path (S carries the signal wavepacket, I the idler one), never on
polarization.

Distinguishability is driven either by a center-wavelength mismatch (tuned
directly or through a linear crystal-temperature map) or by an arrival-time
delay. Frequency and time widths are deliberately independent: the spectral
FWHM sets the frequency-mode width, the quoted coherence time sets the
time-mode width, because the two are measured separately and need not form
an exact transform pair.

Overlap formula for unit-norm Gaussian amplitudes (intensity std ``s``,
center mismatch ``dw``, delay ``tau``)::

    gamma = exp(-dw^2 / (8 s^2) - s^2 tau^2 / 2 + i (w0 + dw/2) tau)

which is the closed form of ``integral conj(phi_S(w)) phi_I(w) e^{i w tau} dw``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import Mode, TwoPhotonState, reduce_to_qubits
from .errors import ConfigurationError, NumericalError, ValidationError

SPEED_OF_LIGHT_NM_PER_PS = 299792.458

#: 2 sqrt(2 ln 2): ratio between a Gaussian intensity FWHM and its std.
FWHM_TO_SIGMA = 2.0 * np.sqrt(2.0 * np.log(2.0))

KNOB_MODES = ("none", "frequency", "arrival_time")

TEMPERATURE_ANCHOR_C = 53.7
DEFAULT_TEMPERATURE_SLOPE_NM_PER_C = -1.3
DEFAULT_TEMPERATURE_RANGE_C = (20.0, 90.0)


@dataclass(frozen=True)
class SpectralModel:
    """Gaussian spectral description of the down-converted photons."""

    center_wavelength_nm: float = 808.0
    fwhm_wavelength_nm: float = 0.78
    coherence_time_ps: float = 2.8

    def __post_init__(self):
        if self.center_wavelength_nm <= 0 or self.fwhm_wavelength_nm <= 0 or self.coherence_time_ps <= 0:
            raise ValidationError("spectral model parameters must be positive")
        expected = self.transform_limited_coherence_time_ps()
        if abs(self.coherence_time_ps - expected) > 0.20 * expected:
            warnings.warn(
                f"coherence time {self.coherence_time_ps} ps deviates more than 20% from the "
                f"Gaussian transform-pair value {expected:.3g} ps for FWHM "
                f"{self.fwhm_wavelength_nm} nm", stacklevel=2)

    def center_angular_frequency(self) -> float:
        """Carrier frequency in rad/ps."""
        return 2.0 * np.pi * SPEED_OF_LIGHT_NM_PER_PS / self.center_wavelength_nm

    def sigma_omega(self) -> float:
        """Intensity std of the spectral wavepacket in rad/ps, from the FWHM."""
        dw_fwhm = self.angular_detuning(self.fwhm_wavelength_nm)
        return abs(dw_fwhm) / FWHM_TO_SIGMA

    def sigma_omega_time_mode(self) -> float:
        """Width (rad/ps) of the equivalent wavepacket defined by the coherence time.

        Convention: the coherence time is 1/(frequency FWHM), i.e.
        ``tau_c = pi / (sqrt(2 ln 2) * s)``.
        """
        return np.pi / (np.sqrt(2.0 * np.log(2.0)) * self.coherence_time_ps)

    def transform_limited_coherence_time_ps(self) -> float:
        return np.pi / (np.sqrt(2.0 * np.log(2.0)) * self.sigma_omega())

    def angular_detuning(self, delta_lambda_nm: float) -> float:
        """Convert a wavelength mismatch (nm) to rad/ps around the carrier."""
        lam = self.center_wavelength_nm
        return -2.0 * np.pi * SPEED_OF_LIGHT_NM_PER_PS * delta_lambda_nm / lam**2


@dataclass(frozen=True)
class DistinguishabilityKnob:
    """How (if at all) the signal and idler wavepackets are made distinct."""

    mode: str = "none"
    delta_lambda_nm: float | None = None
    delay_ps: float | None = None
    crystal_temperature_c: float | None = None

    def __post_init__(self):
        if self.mode not in KNOB_MODES:
            raise ConfigurationError(f"knob mode must be one of {KNOB_MODES}, got {self.mode!r}")
        if self.mode == "frequency":
            given = [x is not None for x in (self.delta_lambda_nm, self.crystal_temperature_c)]
            if sum(given) != 1:
                raise ConfigurationError(
                    "frequency mode needs exactly one of delta_lambda_nm or crystal_temperature_c")
        if self.mode == "arrival_time":
            if self.delay_ps is None:
                raise ConfigurationError("arrival_time mode needs delay_ps")
            if self.delay_ps < 0:
                raise ConfigurationError("delay_ps must be >= 0")


@dataclass(frozen=True)
class NoiseModel:
    """Source imperfections used to emulate non-ideal fidelity and concurrence.

    ``amplitude_imbalance`` tilts the two pair terms to
    (cos(pi/4 + e), sin(pi/4 + e)); ``dephasing`` flips the relative sign
    with probability q/2 (off-diagonals scale by 1 - q); ``white_noise``
    admixes the four polarization product terms with total weight w.
    """

    amplitude_imbalance: float = 0.0
    dephasing: float = 0.0
    white_noise: float = 0.0

    def __post_init__(self):
        if not -1.0 <= self.amplitude_imbalance <= 1.0:
            raise ValidationError("amplitude_imbalance must lie in [-1, 1]")
        if not 0.0 <= self.dephasing <= 1.0:
            raise ValidationError("dephasing must lie in [0, 1]")
        if not 0.0 <= self.white_noise <= 1.0:
            raise ValidationError("white_noise must lie in [0, 1]")


def temperature_to_detuning(temperature_c: float,
                            anchor_c: float = TEMPERATURE_ANCHOR_C,
                            slope_nm_per_c: float = DEFAULT_TEMPERATURE_SLOPE_NM_PER_C,
                            valid_range_c: tuple[float, float] = DEFAULT_TEMPERATURE_RANGE_C) -> float:
    """Linear crystal-temperature to wavelength-mismatch map (nm).

    Zero detuning is anchored at 53.7 C (the degenerate operating point); the
    slope magnitude is configuration, not physics, chosen so the nondegenerate
    point at 50.0 C is far outside the photon bandwidth.
    """
    lo, hi = valid_range_c
    if not lo <= temperature_c <= hi:
        raise ConfigurationError(
            f"temperature {temperature_c} C outside validity range [{lo}, {hi}] C")
    return slope_nm_per_c * (temperature_c - anchor_c)


def overlap(model: SpectralModel, knob: DistinguishabilityKnob) -> complex:
    """Complex overlap of the signal and idler wavepackets.

    |overlap| is 1 iff there is no mismatch, decreases monotonically in both
    the wavelength mismatch and the delay, and carries the carrier phase
    ``exp(i mean_frequency tau)`` for a pure delay.
    """
    if knob.mode == "none":
        return 1.0 + 0.0j
    if knob.mode == "frequency":
        delta_lambda = knob.delta_lambda_nm
        if delta_lambda is None:
            delta_lambda = temperature_to_detuning(knob.crystal_temperature_c)
        dw = model.angular_detuning(delta_lambda)
        s = model.sigma_omega()
        return complex(np.exp(-(dw**2) / (8.0 * s**2)))
    # arrival_time
    tau = knob.delay_ps
    s = model.sigma_omega_time_mode()
    w0 = model.center_angular_frequency()
    return np.exp(-(s**2) * tau**2 / 2.0) * np.exp(1j * w0 * tau)


def make_pair(model: SpectralModel | None = None,
              knob: DistinguishabilityKnob | None = None,
              noise: NoiseModel | None = None):
    """Build the source ensemble: entangled pair plus noise admixtures.

    Returns a tuple of weighted `TwoPhotonState` members. With no knob and no
    noise this is the single pure polarization-entangled pair.
    """
    model = model or SpectralModel()
    knob = knob or DistinguishabilityKnob()
    noise = noise or NoiseModel()

    gamma = overlap(model, knob)
    beta = np.sqrt(max(0.0, 1.0 - abs(gamma) ** 2))
    idler_internal = [(0, gamma), (1, beta)]

    def pair_term(s_pol, i_pol, coeff):
        terms = {}
        for idx, internal_amp in idler_internal:
            if abs(internal_amp) == 0.0:
                continue
            terms[(Mode("S", s_pol, 0), Mode("I", i_pol, idx))] = coeff * internal_amp
        return terms

    def merged(*term_dicts):
        out = {}
        for d in term_dicts:
            for k, v in d.items():
                out[k] = out.get(k, 0.0) + v
        return out

    eps = np.pi / 4 + noise.amplitude_imbalance
    c1, c2 = np.cos(eps), np.sin(eps)
    w = noise.white_noise
    q = noise.dephasing

    members = []
    w_plus = (1.0 - w) * (1.0 - q / 2.0)
    w_minus = (1.0 - w) * (q / 2.0)
    if w_plus > 0:
        members.append(TwoPhotonState(
            merged(pair_term("H", "V", c1), pair_term("V", "H", c2)), weight=w_plus))
    if w_minus > 0:
        members.append(TwoPhotonState(
            merged(pair_term("H", "V", c1), pair_term("V", "H", -c2)), weight=w_minus))
    if w > 0:
        for s_pol, i_pol in (("H", "H"), ("H", "V"), ("V", "H"), ("V", "V")):
            members.append(TwoPhotonState(pair_term(s_pol, i_pol, 1.0), weight=w / 4.0))
    ensemble = tuple(members)

    # the polarization state never depends on the knob, so its spectrum is the
    # cheap numerical PSD guard for the noise parameters
    rho = reduce_to_qubits(ensemble, "by_path").matrix
    if np.linalg.eigvalsh(rho).min() < -1e-9:
        raise NumericalError("noise model produced a non-PSD reduced state")
    return ensemble
