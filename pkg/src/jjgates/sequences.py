"""Pulse-sequence IR, the gate constructions, and the dense evaluator.

Steps are stored in application order: ``steps[0]`` acts first, so it is the
rightmost factor of the operator product. A rotation step with generator ``G``
and angle ``a`` is ``exp(-i a G)``; a free-evolution step is ``exp(-i H t)``
with ``H`` rebuilt from the sequence context on every evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Iterable, Sequence, Union

import numpy as np

from .diagonalizer import DiagonalizationSolution, angle_residuals
from .errors import NumericalDegradationError, PreconditionError, SequenceError
from .junction import SpinParams, build_h_evomq, build_h_rotated
from .operators import (
    DEFAULT_TOLERANCES,
    MAX_QUBITS,
    PauliProduct,
    SPIN_LABELS,
    Tolerances,
    aligned_distance,
    global_phase,
    herm_exp,
    pauli_embed,
    phase_fidelity,
    spin_op,
    unitarity_deviation,
)

FREE = "free_evolution"
ROTATION = "rotation"
DIAGONAL = "diagonal_gate"
HAMILTONIANS = {"H_rotated": build_h_rotated, "H_evomq": build_h_evomq}

_TWO_IKZ_ILZ = pauli_embed(PauliProduct(("z", "z"), 2.0))
_SPIN_MATS = {lab: spin_op(lab) for lab in SPIN_LABELS}

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True)
class SequenceStep:
    kind: str
    hamiltonian_tag: str | None = None
    duration: float = 0.0
    generator: str | None = None
    angle: float = 0.0

    def __post_init__(self):
        if self.kind == FREE:
            if self.hamiltonian_tag not in HAMILTONIANS:
                raise SequenceError(f"unknown Hamiltonian tag {self.hamiltonian_tag!r}")
            if not self.duration >= 0:
                raise SequenceError(f"duration must be >= 0, got {self.duration}")
        elif self.kind == ROTATION:
            # only single-spin or collective F_mu generators are single-qubit operations
            if self.generator not in _SPIN_MATS:
                raise SequenceError(
                    f"rotation generator {self.generator!r} is not a single-qubit operator; "
                    f"allowed: {SPIN_LABELS}"
                )
        elif self.kind != DIAGONAL:
            raise SequenceError(f"unknown step kind {self.kind!r}")

    def unitary(self, context: SpinParams) -> np.ndarray:
        if self.kind == FREE:
            return herm_exp(HAMILTONIANS[self.hamiltonian_tag](context), self.duration)
        if self.kind == ROTATION:
            return herm_exp(_SPIN_MATS[self.generator], self.angle)
        return herm_exp(_TWO_IKZ_ILZ, self.angle)

    def to_dict(self) -> dict:
        if self.kind == FREE:
            return {"kind": FREE, "hamiltonian_tag": self.hamiltonian_tag, "duration": self.duration}
        if self.kind == ROTATION:
            return {"kind": ROTATION, "generator": self.generator, "angle": self.angle}
        return {"kind": DIAGONAL, "angle": self.angle}

    @classmethod
    def from_dict(cls, data: dict) -> "SequenceStep":
        kind = data.get("kind")
        if kind == FREE:
            return free(data["hamiltonian_tag"], float(data["duration"]))
        if kind == ROTATION:
            return rotate(data["generator"], float(data["angle"]))
        if kind == DIAGONAL:
            return cls(DIAGONAL, angle=float(data["angle"]))
        raise SequenceError(f"unknown step kind {kind!r}")


def free(tag: str, duration: float) -> SequenceStep:
    return SequenceStep(FREE, hamiltonian_tag=tag, duration=duration)


def rotate(generator: str, angle: float) -> SequenceStep:
    return SequenceStep(ROTATION, generator=generator, angle=angle)


@dataclass(frozen=True)
class PulseSequence:
    steps: tuple[SequenceStep, ...]
    context: SpinParams

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def with_context(self, context: SpinParams) -> "PulseSequence":
        return PulseSequence(self.steps, context)

    def to_dict(self) -> dict:
        return {"context": self.context.to_dict(), "steps": [s.to_dict() for s in self.steps]}

    @classmethod
    def from_dict(cls, data: dict) -> "PulseSequence":
        return cls(
            tuple(SequenceStep.from_dict(s) for s in data["steps"]),
            SpinParams.from_dict(data["context"]),
        )


@dataclass
class GateReport:
    target_name: str
    fidelity: float
    realized_lambda: float | None
    global_phase: float
    step_count: int
    notes: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def passed(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        return self.fidelity >= 1.0 - tol.gate

    def to_dict(self) -> dict:
        return {
            "target_name": self.target_name,
            "fidelity": self.fidelity,
            "infidelity": 1.0 - self.fidelity,
            "realized_lambda": self.realized_lambda,
            "global_phase": self.global_phase,
            "step_count": self.step_count,
            "notes": list(self.notes),
            "details": dict(self.details),
        }


def evaluate(
    seq: PulseSequence,
    context: SpinParams | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Ordered product of the step unitaries; ``context`` overrides the stored one."""
    ctx = seq.context if context is None else context
    u = np.eye(4, dtype=complex)
    for step in seq.steps:
        u = step.unitary(ctx) @ u
    dev = unitarity_deviation(u)
    if dev > tol.sequence_unitary:
        raise NumericalDegradationError(f"sequence product drifted from unitarity by {dev:.3e}")
    return u


def verify(
    seq: PulseSequence,
    target: np.ndarray,
    target_name: str = "target",
    realized_lambda: float | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> GateReport:
    u = evaluate(seq, tol=tol)
    fid = phase_fidelity(target, u)
    report = GateReport(
        target_name=target_name,
        fidelity=fid,
        realized_lambda=realized_lambda,
        global_phase=global_phase(target, u),
        step_count=len(seq),
        details={"aligned_distance": aligned_distance(u, target)},
    )
    report.notes.append(
        f"{'matches' if report.passed(tol) else 'does NOT match'} {target_name} up to global phase"
    )
    return report


def diagonal_gate(lam: float, qubit_count: int = 2, k: int = 0, l: int = 1) -> np.ndarray:
    """``exp(-i lam 2 I_kz I_lz)``; on two qubits ``diag(e^{-i lam/2}, e^{i lam/2}, e^{i lam/2}, e^{-i lam/2})``."""
    if k == l:
        raise ValueError("a two-qubit gate needs two distinct qubits")
    zz = PauliProduct.on(qubit_count, {k: "z", l: "z"}, 2.0)
    diag = np.real(np.diag(pauli_embed(zz)))
    return np.diag(np.exp(-1j * lam * diag))


# --- approximate coupling gate -------------------------------------------------

def build_bch_sequence(s: SpinParams, t: float, refocus_axis: str = "x") -> PulseSequence:
    """Symmetric refocusing sequence approximating ``exp(-i 2 piJ t 2 I_kz I_lz)``.

    ``refocus_axis="x"`` flips both z fields during the middle evolution and is
    third-order accurate in ``t``. ``"z"`` reproduces the printed pulses, which
    commute with ``H`` and leave the z fields unrefocused (first order).
    """
    if t < 0:
        raise SequenceError("evolution time must be >= 0")
    if refocus_axis not in ("x", "y", "z"):
        raise SequenceError(f"refocus axis must be x, y or z, got {refocus_axis!r}")
    f = f"F_{refocus_axis}"
    steps = [
        rotate("F_x", -math.pi / 2),
        free("H_rotated", t / 2),
        rotate(f, -math.pi),
        free("H_rotated", t),
        rotate(f, math.pi),
        free("H_rotated", t / 2),
        rotate("F_x", math.pi / 2),
    ]
    return PulseSequence(tuple(steps), s)


def bch_target(s: SpinParams, t: float) -> np.ndarray:
    return diagonal_gate(2.0 * s.pi_j * t)


def bch_error(s: SpinParams, t: float, refocus_axis: str = "x") -> tuple[float, float]:
    """``(aligned operator distance, 1 - phase_fidelity)`` of the approximate gate."""
    u = evaluate(build_bch_sequence(s, t, refocus_axis))
    target = bch_target(s, t)
    return aligned_distance(u, target), 1.0 - phase_fidelity(target, u)


# --- exact echo gate -------------------------------------------------------------

def build_p1_sequence(s: SpinParams, t_p: float) -> PulseSequence:
    """``exp(-i H_e t_p) exp(-i pi I_kx) exp(-i H_e t_p)``."""
    return PulseSequence(
        (free("H_evomq", t_p), rotate("I_kx", math.pi), free("H_evomq", t_p)), s
    )


def p1_closed_form(alpha1: float) -> np.ndarray:
    """``exp(-i 8 alpha1 I_ky I_lx) exp(-i pi I_kx)``."""
    kylx = pauli_embed(PauliProduct(("y", "x")))
    return herm_exp(kylx, 8.0 * alpha1) @ herm_exp(spin_op("I_kx"), math.pi)


def echo_frame_steps(inverse: bool) -> list[SequenceStep]:
    """Quarter turns mapping ``I_ky -> I_kz`` and ``I_lx -> I_lz`` (or back)."""
    if inverse:
        return [rotate("I_kx", -math.pi / 2), rotate("I_ly", math.pi / 2)]
    return [rotate("I_ly", -math.pi / 2), rotate("I_kx", math.pi / 2)]


def build_echo_sequence(
    s: SpinParams, d: DiagonalizationSolution, t_p: float
) -> PulseSequence:
    """Exact echo realising ``G_kl(4 alpha1)`` up to global phase.

    Operator form ``T U exp(-i pi I_kx) U T^+ exp(i pi I_kx)`` with
    ``U = exp(-i H t_p)`` and ``T = exp(-i pi/2 I_kx) exp(i pi/2 I_ly)``.
    Requires the timing that puts one effective frequency at an odd and the
    other at an even multiple of pi.
    """
    if not t_p > 0:
        raise SequenceError("t_p must be positive")
    r = angle_residuals(s, d.alpha1, d.alpha2)
    if max(map(abs, r)) > 1e-8 * max(1.0, abs(s.omega_k), abs(s.omega_l), abs(s.pi_j)):
        raise PreconditionError(f"angles do not solve the diagonalisation for these parameters (residual {r})")
    steps = [rotate("I_kx", -math.pi)]
    steps += echo_frame_steps(inverse=True)
    steps += [free("H_rotated", t_p), rotate("I_kx", math.pi), free("H_rotated", t_p)]
    steps += echo_frame_steps(inverse=False)
    return PulseSequence(tuple(steps), s)


# --- XOR and networks ---------------------------------------------------------------

XOR_PHASE = -math.pi / 4


def build_xor_sequence(
    diag_gate: PulseSequence | np.ndarray,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> PulseSequence:
    """Controlled-NOT (control k, target l) around a ``G_kl(pi/2)`` realisation.

    ``CNOT = e^{-i pi/4} exp(-i pi/2 I_ly) exp(i pi/2 I_kz) exp(i pi/2 I_lz)
    G_kl(pi/2) exp(i pi/2 I_ly)``.
    """
    want = diagonal_gate(math.pi / 2)
    if isinstance(diag_gate, PulseSequence):
        inner, ctx = list(diag_gate.steps), diag_gate.context
        got = evaluate(diag_gate, tol=tol)
    else:
        got = np.asarray(diag_gate, dtype=complex)
        inner, ctx = [SequenceStep(DIAGONAL, angle=math.pi / 2)], SpinParams(0.0, 0.0, 0.0)
    fid = phase_fidelity(want, got)
    if fid < 1.0 - tol.gate:
        raise PreconditionError(f"diagonal gate has fidelity {fid:.12f} to G_kl(pi/2)")
    steps = [rotate("I_ly", -math.pi / 2), *inner]
    steps += [rotate("I_lz", -math.pi / 2), rotate("I_kz", -math.pi / 2), rotate("I_ly", math.pi / 2)]
    return PulseSequence(tuple(steps), ctx)


@dataclass(frozen=True)
class Rotation:
    qubit: int
    axis: str
    angle: float


@dataclass(frozen=True)
class DiagonalGate:
    k: int
    l: int
    lam: float


NetworkGate = Union[Rotation, DiagonalGate]


def compose_network(gates: Iterable[NetworkGate], qubit_count: int) -> np.ndarray:
    """Ordered product of elementary gates on ``qubit_count`` qubits; first gate acts first."""
    if not 1 <= qubit_count <= min(4, MAX_QUBITS):
        raise ValueError("networks are limited to 1..4 qubits")
    u = np.eye(2**qubit_count, dtype=complex)
    for g in gates:
        if isinstance(g, Rotation):
            if not 0 <= g.qubit < qubit_count:
                raise IndexError(f"qubit {g.qubit} out of range for {qubit_count} qubits")
            m = herm_exp(pauli_embed(PauliProduct.on(qubit_count, {g.qubit: g.axis})), g.angle)
        elif isinstance(g, DiagonalGate):
            for q in (g.k, g.l):
                if not 0 <= q < qubit_count:
                    raise IndexError(f"qubit {q} out of range for {qubit_count} qubits")
            m = diagonal_gate(g.lam, qubit_count, g.k, g.l)
        else:
            raise TypeError(f"unsupported network element {g!r}")
        u = m @ u
    return u


def xor_network(k: int = 0, l: int = 1, lam: float = math.pi / 2) -> list[NetworkGate]:
    return [
        Rotation(l, "y", -math.pi / 2),
        DiagonalGate(k, l, lam),
        Rotation(l, "z", -math.pi / 2),
        Rotation(k, "z", -math.pi / 2),
        Rotation(l, "y", math.pi / 2),
    ]


def bch_scan(s: SpinParams, t_points: Sequence[float], refocus_axis: str = "x") -> dict:
    """Error of the approximate coupling gate over ``t_points``.

    ``distance`` is the phase-aligned spectral-norm error, the quantity that is
    ``O(t^3)`` for a third-order sequence; ``infidelity`` (``1 - F``) is
    reported alongside and scales as the square of it.
    """
    ts = [float(t) for t in t_points]
    if len(ts) < 2 or any(t <= 0 for t in ts):
        raise ValueError("need at least two positive time points")
    rows = []
    for t in ts:
        dist, infid = bch_error(s, t, refocus_axis)
        rows.append({"t": t, "distance": dist, "infidelity": infid})

    def slope(key):
        y = np.array([r[key] for r in rows])
        if np.any(y <= 0):
            return None
        return float(np.polyfit(np.log(ts), np.log(y), 1)[0])

    ratios = [
        rows[i]["distance"] / rows[i + 1]["distance"] if rows[i + 1]["distance"] > 0 else None
        for i in range(len(rows) - 1)
    ]
    return {
        "refocus_axis": refocus_axis,
        "points": rows,
        "distance_ratios": ratios,
        "distance_slope": slope("distance"),
        "infidelity_slope": slope("infidelity"),
    }
