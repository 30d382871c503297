"""Coincidence probabilities, Poissonian count records and correlation scans.

Probabilities are computed by propagating the source ensemble through the
compiled bench and summing ``|coincidence amplitude|^2`` over everything the
detectors do not resolve: internal wavepacket indices, ensemble members and,
when a detector carries no polarizer, both polarizations. Amplitude routed
into loss ports or non-detector ports reduces the coincidence total; nothing
is renormalized.

Counts are Poisson samples of ``probability * pairs_emitted``. The random
number generator is numpy's PCG64 (128-bit state, 128-bit stream increment);
every record stores the integer seed that regenerates it, and independent
substreams for scan points or tomography settings are derived as
``SeedSequence([seed, stream, index])`` so parallel execution stays
deterministic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import TwoPhotonState, Mode, apply_unitary, as_ensemble
from .elements import Bench, compile_bench, polarizer_ket, waveplate_settings_for_ket
from .errors import ConfigurationError, ValidationError
from .validation import check_ket, check_probability, check_rng

DEFAULT_THETA_GRID_DEG = tuple(float(t) for t in range(0, 181, 10))

#: fixed-arm analyzer kets for the two scan bases; the scanned arm runs
#: (cos 2 theta, sin 2 theta)
SCAN_FIXED_KET = {
    "Z": np.array([1.0, 0.0], dtype=complex),
    "X": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
}


@dataclass(frozen=True)
class Analyzer:
    """Per-arm analyzer: an abstract projector ket in the arm's qubit plane,
    or explicit wave-plate angles (degrees) for the bench's analyzer slot."""

    ket: tuple | None = None
    qwp_deg: float | None = None
    hwp_deg: float | None = None

    def __post_init__(self):
        has_ket = self.ket is not None
        has_plates = self.qwp_deg is not None or self.hwp_deg is not None
        if has_ket == has_plates:
            raise ConfigurationError("analyzer needs either a ket or both plate angles")
        if has_plates and (self.qwp_deg is None or self.hwp_deg is None):
            raise ConfigurationError("analyzer plate description needs both qwp_deg and hwp_deg")
        if has_ket:
            ket = check_ket(np.asarray(self.ket, dtype=complex), name="analyzer ket")
            object.__setattr__(self, "ket", tuple(ket))

    def ket_array(self):
        return None if self.ket is None else np.asarray(self.ket, dtype=complex)


@dataclass(frozen=True)
class ProjectorSetting:
    """One coincidence measurement setting: an analyzer per detector."""

    analyzers: dict[str, Analyzer]
    name: str = ""


@dataclass(frozen=True)
class CountRecord:
    """One measured (or exactly expected) coincidence tally."""

    setting: str
    expected: float
    counts: float
    pairs_emitted: int
    seed: int | None = None
    setting_index: int | None = None

    def __post_init__(self):
        if self.counts < 0:
            raise ValidationError("counts must be >= 0")
        if self.expected < -1e-12 or self.expected > self.pairs_emitted * (1 + 1e-9):
            raise ValidationError("expected counts must lie in [0, pairs_emitted]")


def resolve_setting_angles(bench: Bench, setting: ProjectorSetting) -> dict[str, float]:
    """Map a setting onto wave-plate angles (radians) for the bench's slots."""
    angles: dict[str, float] = {}
    for det, analyzer in setting.analyzers.items():
        slot = bench.analyzers.get(det)
        if slot is None:
            raise ConfigurationError(f"bench has no analyzer slot for detector {det!r}")
        if analyzer.ket is not None:
            q, h = waveplate_settings_for_ket(analyzer.ket_array(), slot.select_deg)
        else:
            q, h = np.deg2rad(analyzer.qwp_deg), np.deg2rad(analyzer.hwp_deg)
        angles[slot.qwp] = float(q)
        angles[slot.hwp] = float(h)
    return angles


def _detector_pair(bench: Bench):
    if len(bench.detector_map) != 2:
        raise ConfigurationError(
            f"coincidence detection needs exactly two detectors, bench has {len(bench.detector_map)}")
    return tuple(sorted(bench.detector_map))


def _selection_kets(bench: Bench, det: str):
    d = bench.detector_map[det]
    if d.polarizer_deg is None:
        return [np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)]
    return [polarizer_ket(np.deg2rad(d.polarizer_deg))]


def coincidence_probability(state, bench: Bench, setting: ProjectorSetting | None = None,
                            internal_dim: int | None = None) -> float:
    """Probability of a D1-D2 coincidence for one measurement setting."""
    members = as_ensemble(state)
    if internal_dim is None:
        internal_dim = 1 + max((m.internal for member in members for pair in member.terms
                                for m in pair), default=0)
        internal_dim = max(internal_dim, 2)
    configured = bench if setting is None else bench.with_angles(
        resolve_setting_angles(bench, setting))
    u = compile_bench(configured, internal_dim=internal_dim)

    det1, det2 = _detector_pair(bench)
    port1 = bench.detector_map[det1].port
    port2 = bench.detector_map[det2].port
    sel1 = _selection_kets(bench, det1)
    sel2 = _selection_kets(bench, det2)

    total = 0.0
    for member in members:
        out = apply_unitary(member, u)
        for i in range(internal_dim):
            for j in range(internal_dim):
                for e1 in sel1:
                    for e2 in sel2:
                        amp = 0.0 + 0.0j
                        for a, ca in zip("HV", e1.conj()):
                            if abs(ca) < 1e-15:
                                continue
                            for b, cb in zip("HV", e2.conj()):
                                if abs(cb) < 1e-15:
                                    continue
                                amp += ca * cb * out.amplitude(Mode(port1, a, i),
                                                               Mode(port2, b, j))
                        total += member.weight * abs(amp) ** 2
    return check_probability(total, name="coincidence probability")


def sample_counts(prob: float, pairs_emitted: int, seed, setting: str = "",
                  setting_index: int | None = None) -> CountRecord:
    """Draw one Poissonian count record; deterministic under a fixed seed."""
    prob = check_probability(prob)
    if pairs_emitted <= 0:
        raise ValidationError("pairs_emitted must be > 0")
    rng = check_rng(seed)
    counts = int(rng.poisson(prob * pairs_emitted))
    return CountRecord(setting=setting, expected=prob * pairs_emitted, counts=counts,
                       pairs_emitted=int(pairs_emitted),
                       seed=seed if isinstance(seed, int) else None,
                       setting_index=setting_index)


def exact_counts(prob: float, pairs_emitted: int, setting: str = "",
                 setting_index: int | None = None) -> CountRecord:
    """Infinite-count-limit record: counts equal the expectation exactly."""
    prob = check_probability(prob)
    expected = prob * pairs_emitted
    return CountRecord(setting=setting, expected=expected, counts=expected,
                       pairs_emitted=int(pairs_emitted), seed=None,
                       setting_index=setting_index)


def derive_seed(base_seed: int, stream: int, index: int) -> int:
    """Stable integer substream seed for (stream, index) under a base seed."""
    ss = np.random.SeedSequence([int(base_seed), int(stream), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ScanPoint:
    basis: str
    theta_deg: float
    expected_prob: float
    counts: float
    pairs: int
    seed: int | None


def correlation_scan(state, bench: Bench, basis: str,
                     thetas_deg=DEFAULT_THETA_GRID_DEG,
                     pairs_per_point: int = 10_000, seed: int = 0,
                     exact: bool = False, seed_stream: int = 0) -> list[ScanPoint]:
    """Coincidence scan over the analyzer dial of the scanned arm.

    The scanned arm (the bench's first qubit detector, falling back to the
    alphabetically later one) projects onto ``cos(2 theta) |0> +
    sin(2 theta) |1>``; the fixed arm sits in the computational state (Z) or
    the balanced superposition (X). Each row also carries the analytic
    expected probability, so the exact curve is always available.
    """
    if basis not in SCAN_FIXED_KET:
        raise ConfigurationError(f"scan basis must be one of {tuple(SCAN_FIXED_KET)}, got {basis!r}")
    thetas = [float(t) for t in thetas_deg]
    if not thetas:
        raise ConfigurationError("scan grid is empty")
    qubit_detectors = bench.meta.get("qubit_detectors")
    if qubit_detectors:
        scan_det, fixed_det = qubit_detectors
    else:
        fixed_det, scan_det = _detector_pair(bench)

    rows = []
    for k, theta in enumerate(thetas):
        rad = np.deg2rad(theta)
        scan_ket = (np.cos(2 * rad), np.sin(2 * rad))
        setting = ProjectorSetting(
            analyzers={scan_det: Analyzer(ket=scan_ket),
                       fixed_det: Analyzer(ket=tuple(SCAN_FIXED_KET[basis]))},
            name=f"{basis}:{theta:g}")
        prob = coincidence_probability(state, bench, setting)
        if exact:
            rec = exact_counts(prob, pairs_per_point)
            child = None
        else:
            child = derive_seed(seed, seed_stream, k)
            rec = sample_counts(prob, pairs_per_point, child)
        rows.append(ScanPoint(basis=basis, theta_deg=theta, expected_prob=prob,
                              counts=rec.counts, pairs=pairs_per_point, seed=child))
    return rows


def write_scan_csv(rows, path):
    """Emit scan rows as CSV with the documented column contract."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["basis", "theta_deg", "expected_prob", "counts", "pairs", "seed"])
        for r in rows:
            counts = int(r.counts) if float(r.counts).is_integer() else repr(float(r.counts))
            writer.writerow([r.basis, repr(float(r.theta_deg)), repr(float(r.expected_prob)),
                             counts, r.pairs, "" if r.seed is None else r.seed])


def read_scan_csv(path):
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for raw in reader:
            rows.append(ScanPoint(basis=raw["basis"], theta_deg=float(raw["theta_deg"]),
                                  expected_prob=float(raw["expected_prob"]),
                                  counts=float(raw["counts"]), pairs=int(raw["pairs"]),
                                  seed=int(raw["seed"]) if raw["seed"] else None))
    return rows
