"""Jones-calculus element library and the bench compiler.

Conventions (fixed; tomography projectors must match them or data would be
mislabeled):

* ``hwp_matrix(t) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]]`` in the (H, V)
  basis; 45 deg flips H and V.
* ``qwp_matrix(t) = exp(i pi/4) * R(t) diag(1, i) R(-t)`` (fast axis at t).
* PBS: H transmits, V reflects and acquires phase i. A PBS element lists
  four ports ``(a, b, c, d)`` meaning H routes a->c, b->d and V routes
  a->i*d, b->i*c; the reverse direction is filled in symmetrically so the
  compiled matrix stays exactly unitary even though benches are
  feed-forward.
* POLARIZER at angle t transmits the linear component at t and routes the
  rejected component to a fresh loss port (isometry bookkeeping).
* PHASE multiplies both polarizations of one spatial port by exp(i phi).

Benches are ordered element lists over named spatial ports, compiled to one
`ModeUnitary` over (port, polarization, internal) modes. Elements never act
on the internal index. Angles are degrees in files and radians in memory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .core import Mode, ModeUnitary
from .errors import ConfigurationError, ValidationError

ELEMENT_KINDS = ("HWP", "QWP", "PBS", "PHASE", "POLARIZER", "MIRROR")
PRESET_NAMES = ("fig2_polarization", "fig2_path")


def hwp_matrix(angle: float) -> np.ndarray:
    """Half-wave plate Jones matrix, fast axis at ``angle`` radians."""
    c, s = np.cos(2 * angle), np.sin(2 * angle)
    return np.array([[c, s], [s, -c]], dtype=complex)


def qwp_matrix(angle: float) -> np.ndarray:
    """Quarter-wave plate Jones matrix, fast axis at ``angle`` radians."""
    c, s = np.cos(angle), np.sin(angle)
    m = np.array([[c * c + 1j * s * s, (1 - 1j) * s * c],
                  [(1 - 1j) * s * c, s * s + 1j * c * c]], dtype=complex)
    return np.exp(1j * np.pi / 4) * m


def polarizer_ket(angle: float) -> np.ndarray:
    return np.array([np.cos(angle), np.sin(angle)], dtype=complex)


@dataclass(frozen=True)
class Element:
    """One bench element; ``angle``/``phase`` are radians in memory."""

    kind: str
    ports: tuple[str, ...]
    angle: float | None = None
    phase: float | None = None
    label: str | None = None

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise ConfigurationError(f"unknown element kind {self.kind!r}")
        object.__setattr__(self, "ports", tuple(self.ports))
        n = len(self.ports)
        if self.kind in ("HWP", "QWP", "PHASE", "POLARIZER") and n != 1:
            raise ConfigurationError(f"{self.kind} acts on exactly one port, got {self.ports}")
        if self.kind == "MIRROR" and n != 2:
            raise ConfigurationError(f"MIRROR routes one port to another, got {self.ports}")
        if self.kind == "PBS" and n != 4:
            raise ConfigurationError(
                f"PBS connects two input and two output ports (a, b, c, d), got {self.ports}")
        if self.kind in ("HWP", "QWP", "POLARIZER") and self.angle is None:
            raise ConfigurationError(f"{self.kind} needs an angle")
        if self.kind == "PHASE" and self.phase is None:
            raise ConfigurationError("PHASE needs a phase")


@dataclass(frozen=True)
class Detector:
    port: str
    polarizer_deg: float | None = None


@dataclass(frozen=True)
class AnalyzerSlot:
    """Which wave plates realize a detector's projector, and the linear
    polarization angle (degrees) that survives from the plate plane to the
    detector through the fixed network."""

    qwp: str
    hwp: str
    select_deg: float = 0.0


@dataclass(frozen=True)
class Bench:
    """Ordered elements over declared spatial ports plus detector wiring."""

    ports: tuple[str, ...]
    elements: tuple[Element, ...]
    detector_map: dict[str, Detector] = field(default_factory=dict)
    analyzers: dict[str, AnalyzerSlot] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(self.ports))
        object.__setattr__(self, "elements", tuple(self.elements))
        declared = set(self.ports)
        if len(declared) != len(self.ports):
            raise ConfigurationError("duplicate port names")
        for el in self.elements:
            missing = set(el.ports) - declared
            if missing:
                raise ConfigurationError(f"element {el.label or el.kind} references undeclared ports {missing}")
        for det, d in self.detector_map.items():
            if d.port not in declared:
                raise ConfigurationError(f"detector {det} wired to undeclared port {d.port}")
        labels = [el.label for el in self.elements if el.label]
        if len(labels) != len(set(labels)):
            raise ConfigurationError("element labels must be unique")
        for det, slot in self.analyzers.items():
            for lab in (slot.qwp, slot.hwp):
                if lab not in labels:
                    raise ConfigurationError(f"analyzer slot for {det} references unknown element {lab!r}")

    def element(self, label: str) -> Element:
        for el in self.elements:
            if el.label == label:
                return el
        raise ConfigurationError(f"no element labeled {label!r}")

    def with_angles(self, angles: dict[str, float]) -> "Bench":
        """Copy of the bench with the labeled elements' angles replaced (radians)."""
        unknown = set(angles) - {el.label for el in self.elements if el.label}
        if unknown:
            raise ConfigurationError(f"unknown element labels {unknown}")
        new_elements = tuple(
            replace(el, angle=angles[el.label]) if el.label in angles else el
            for el in self.elements)
        return replace(self, elements=new_elements)

    def with_phase(self, label: str, phase: float) -> "Bench":
        new_elements = tuple(
            replace(el, phase=phase) if el.label == label else el for el in self.elements)
        if all(el.label != label for el in self.elements):
            raise ConfigurationError(f"no element labeled {label!r}")
        return replace(self, elements=new_elements)


def _embed_pol_block(modes, index, port, block, matrix, d_int):
    for k in range(d_int):
        rows = [index[Mode(port, "H", k)], index[Mode(port, "V", k)]]
        sub = np.eye(len(modes), dtype=complex)
        for i, ri in enumerate(rows):
            for j, rj in enumerate(rows):
                sub[ri, rj] = block[i, j]
        matrix[:] = sub @ matrix


def _element_matrix(el: Element, modes, index, d_int):
    n = len(modes)
    m = np.eye(n, dtype=complex)
    if el.kind == "HWP":
        _embed_pol_block(modes, index, el.ports[0], hwp_matrix(el.angle), m, d_int)
    elif el.kind == "QWP":
        _embed_pol_block(modes, index, el.ports[0], qwp_matrix(el.angle), m, d_int)
    elif el.kind == "PHASE":
        for pol in "HV":
            for k in range(d_int):
                i = index[Mode(el.ports[0], pol, k)]
                m[i, i] = np.exp(1j * el.phase)
    elif el.kind == "MIRROR":
        a, b = el.ports
        for pol in "HV":
            for k in range(d_int):
                ia, ib = index[Mode(a, pol, k)], index[Mode(b, pol, k)]
                m[ia, ia] = m[ib, ib] = 0.0
                m[ia, ib] = m[ib, ia] = 1.0
    elif el.kind == "PBS":
        a, b, c, d = el.ports
        for k in range(d_int):
            for p, q in ((a, c), (b, d)):  # H transmits
                ip, iq = index[Mode(p, "H", k)], index[Mode(q, "H", k)]
                m[ip, ip] = m[iq, iq] = 0.0
                m[iq, ip] = m[ip, iq] = 1.0
            for p, q in ((a, d), (b, c)):  # V reflects with phase i
                ip, iq = index[Mode(p, "V", k)], index[Mode(q, "V", k)]
                m[ip, ip] = m[iq, iq] = 0.0
                m[iq, ip] = m[ip, iq] = 1j
    else:
        raise ConfigurationError(f"cannot compile element kind {el.kind!r}")
    return m


def _polarizer_matrix(el: Element, loss_port, modes, index, d_int):
    n = len(modes)
    m = np.eye(n, dtype=complex)
    t = el.angle
    passing = np.array([np.cos(t), np.sin(t)], dtype=complex)
    blocked = np.array([-np.sin(t), np.cos(t)], dtype=complex)
    for k in range(d_int):
        rows = [index[Mode(el.ports[0], "H", k)], index[Mode(el.ports[0], "V", k)],
                index[Mode(loss_port, "H", k)], index[Mode(loss_port, "V", k)]]
        p_pass = np.concatenate([passing, [0, 0]])
        p_block = np.concatenate([blocked, [0, 0]])
        l_pass = np.concatenate([[0, 0], passing])
        l_block = np.concatenate([[0, 0], blocked])
        # permutation in the rotated basis: blocked component swaps with the
        # loss port, passing components stay put
        sub = (np.outer(p_pass, p_pass.conj()) + np.outer(l_block, p_block.conj())
               + np.outer(p_block, l_block.conj()) + np.outer(l_pass, l_pass.conj()))
        full = np.eye(n, dtype=complex)
        for i, ri in enumerate(rows):
            for j, rj in enumerate(rows):
                full[ri, rj] = sub[i, j]
        m = full @ m
    return m


def compile_bench(bench: Bench, internal_dim: int = 2) -> ModeUnitary:
    """Compile a bench to one mode unitary (isometry-with-loss if polarizers
    are present). The product runs in element order; elements are
    internal-blind by construction."""
    ports = list(bench.ports)
    loss_ports = []
    for i, el in enumerate(bench.elements):
        if el.kind == "POLARIZER":
            loss_ports.append(f"LOSS{len(loss_ports)}")
    all_ports = ports + loss_ports
    modes = tuple(Mode(p, pol, k) for p in all_ports for pol in "HV" for k in range(internal_dim))
    index = {m: i for i, m in enumerate(modes)}

    total = np.eye(len(modes), dtype=complex)
    loss_iter = iter(loss_ports)
    for el in bench.elements:
        if el.kind == "POLARIZER":
            m = _polarizer_matrix(el, next(loss_iter), modes, index, internal_dim)
        else:
            m = _element_matrix(el, modes, index, internal_dim)
        total = m @ total

    try:
        return ModeUnitary(modes, total, loss_ports=frozenset(loss_ports))
    except ValidationError as exc:
        raise ValidationError(f"compiled bench is not unitary (modeling bug): {exc}") from exc


def waveplate_settings_for_ket(ket, select_deg: float = 0.0):
    """Solve QWP and HWP angles (radians) so the analyzer projects onto ``ket``.

    The analyzer chain is QWP(q) then HWP(h) followed by selection of the
    linear polarization at ``select_deg``; the returned angles satisfy
    ``|<lin(select)| HWP(h) QWP(q) |ket>| = 1`` to 1e-9. Solved by finding q
    for which the QWP output is linear, then rotating it onto the selection
    axis with the HWP.
    """
    ket = np.asarray(ket, dtype=complex).reshape(2)
    norm = np.linalg.norm(ket)
    if norm < 1e-12:
        raise ValidationError("analyzer ket must be nonzero")
    ket = ket / norm

    def rotated(q):
        c, s = np.cos(q), np.sin(q)
        return np.array([c * ket[0] + s * ket[1], -s * ket[0] + c * ket[1]])

    def residual(q):
        v = rotated(q)
        return float(np.real(v[1] * np.conj(v[0])))

    qs = np.linspace(0.0, np.pi / 2, 9)
    vals = [residual(q) for q in qs]
    q_sol = None
    for q, v in zip(qs, vals):
        if abs(v) < 1e-13:
            q_sol = q
            break
    if q_sol is None:
        for i in range(len(qs) - 1):
            if vals[i] * vals[i + 1] < 0:
                q_sol = brentq(residual, qs[i], qs[i + 1], xtol=1e-14)
                break
    if q_sol is None:  # guaranteed sign change since residual(q + pi/2) = -residual(q)
        raise ValidationError("no QWP angle linearizes the analyzer ket")

    v = rotated(q_sol)
    # v is proportional to (cos u, -i sin u); extract u
    if abs(v[0]) < 1e-9:
        u = np.pi / 2
    else:
        u = np.arctan(np.real(1j * v[1] / v[0]))
    h = (u + q_sol + np.deg2rad(select_deg)) / 2.0

    check = polarizer_ket(np.deg2rad(select_deg)).conj() @ (hwp_matrix(h) @ (qwp_matrix(q_sol) @ ket))
    if abs(abs(check) - 1.0) > 1e-9:
        raise ValidationError(f"wave-plate solve failed for ket {ket}: |amp| = {abs(check)}")
    return float(q_sol), float(h)


# ---------------------------------------------------------------------------
# bench description files


def bench_from_dict(doc: dict) -> Bench:
    try:
        ports = doc["ports"]
        raw_elements = doc["elements"]
    except KeyError as exc:
        raise ConfigurationError(f"bench description missing key {exc}") from None
    elements = []
    for raw in raw_elements:
        angle = np.deg2rad(raw["angle_deg"]) if "angle_deg" in raw else None
        elements.append(Element(kind=raw["kind"], ports=tuple(raw["ports"]),
                                angle=angle, phase=raw.get("phase_rad"),
                                label=raw.get("label")))
    detector_map = {name: Detector(port=d["port"], polarizer_deg=d.get("polarizer_deg"))
                    for name, d in doc.get("detector_map", {}).items()}
    analyzers = {name: AnalyzerSlot(qwp=a["qwp"], hwp=a["hwp"],
                                    select_deg=a.get("select_deg", 0.0))
                 for name, a in doc.get("analyzers", {}).items()}
    return Bench(ports=tuple(ports), elements=tuple(elements),
                 detector_map=detector_map, analyzers=analyzers,
                 meta=dict(doc.get("meta", {})))


def bench_to_dict(bench: Bench) -> dict:
    elements = []
    for el in bench.elements:
        raw = {"kind": el.kind, "ports": list(el.ports)}
        if el.angle is not None:
            raw["angle_deg"] = float(np.rad2deg(el.angle))
        if el.phase is not None:
            raw["phase_rad"] = float(el.phase)
        if el.label:
            raw["label"] = el.label
        elements.append(raw)
    doc = {"ports": list(bench.ports), "elements": elements,
           "detector_map": {name: ({"port": d.port} if d.polarizer_deg is None
                                   else {"port": d.port, "polarizer_deg": d.polarizer_deg})
                            for name, d in bench.detector_map.items()},
           "analyzers": {name: {"qwp": a.qwp, "hwp": a.hwp, "select_deg": a.select_deg}
                         for name, a in bench.analyzers.items()}}
    if bench.meta:
        doc["meta"] = bench.meta
    return doc


def load_bench(path) -> Bench:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"malformed bench file {path}: {exc}") from exc
    return bench_from_dict(doc)


def load_preset(name: str) -> Bench:
    """Load one of the shipped bench presets by name."""
    if name not in PRESET_NAMES:
        raise ConfigurationError(f"unknown bench preset {name!r}; available: {PRESET_NAMES}")
    ref = resources.files("dualbench").joinpath(f"presets/{name}.json")
    return bench_from_dict(json.loads(ref.read_text(encoding="utf-8")))
