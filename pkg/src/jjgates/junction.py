"""Two coupled SQUID-controlled Josephson junctions in spin-1/2 language.

Energies are angular frequencies (hbar = 1). Three Hamiltonian forms are built:
the raw charge-basis form, the y-rotated frame with only z fields and a
``2 I_ky I_ly`` coupling, and the even-order multiple-quantum split of the
rotated form.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
import math

import numpy as np

from .errors import ParameterError
from .operators import PauliProduct, herm_exp, pauli_embed, spin_op

# The printed frame angle (tan phi = 2 E_ch / E_J) zeroes the I_z coefficient of
# U^+ H_T U instead of the I_x one; the frame that leaves pure z fields is
# rotated a further quarter turn. The Omega formula itself holds as printed.
FRAME_ANGLE_OFFSET = math.pi / 2
FRAME_CONVENTION_NOTE = (
    "rotation angles phi_i = arctan(2 E_ch/E_J) + pi/2; the printed arctan angle "
    "alone does not diagonalise the single-spin terms under U_y^+ H_T U_y"
)


def _from_mapping(cls, data):
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ParameterError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class JunctionParams:
    e_ch_k: float
    e_ch_l: float
    e_j_k: float
    e_j_l: float
    e_L: float

    def validate(self) -> None:
        if self.e_j_k == 0 or self.e_j_l == 0:
            raise ParameterError("Josephson energies must be nonzero (rotation angle undefined)")
        if self.e_L == 0:
            raise ParameterError("inductive energy e_L must be nonzero")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data) -> "JunctionParams":
        return _from_mapping(cls, data)


@dataclass(frozen=True)
class SpinParams:
    """Rotated-frame parameters; the coupling term is ``pi*j_kl * 2 I_ky I_ly``."""

    omega_k: float
    omega_l: float
    j_kl: float
    phi_k: float = 0.0
    phi_l: float = 0.0

    @property
    def pi_j(self) -> float:
        return math.pi * self.j_kl

    @classmethod
    def from_pi_j(cls, omega_k: float, omega_l: float, pi_j: float) -> "SpinParams":
        return cls(omega_k, omega_l, pi_j / math.pi)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data) -> "SpinParams":
        return _from_mapping(cls, data)


_SIGMA_Z_K = pauli_embed(PauliProduct(("z", "1"), 2.0))
_SIGMA_Z_L = pauli_embed(PauliProduct(("1", "z"), 2.0))
_SIGMA_X_K = pauli_embed(PauliProduct(("x", "1"), 2.0))
_SIGMA_X_L = pauli_embed(PauliProduct(("1", "x"), 2.0))
_SIGMA_YY = pauli_embed(PauliProduct(("y", "y"), 4.0))

I_KZ = spin_op("I_kz")
I_LZ = spin_op("I_lz")
TWO_IKY_ILY = pauli_embed(PauliProduct(("y", "y"), 2.0))
ZERO_QUANTUM = pauli_embed([PauliProduct(("x", "x")), PauliProduct(("y", "y"))])
DOUBLE_QUANTUM = pauli_embed([PauliProduct(("x", "x"), -1.0), PauliProduct(("y", "y"))])


def build_h_raw(p: JunctionParams) -> np.ndarray:
    p.validate()
    return (
        p.e_ch_k * _SIGMA_Z_K
        + p.e_ch_l * _SIGMA_Z_L
        - 0.5 * p.e_j_k * _SIGMA_X_K
        - 0.5 * p.e_j_l * _SIGMA_X_L
        - (p.e_j_k * p.e_j_l / p.e_L) * _SIGMA_YY
    )


def printed_rotation_angle(e_ch: float, e_j: float) -> float:
    """Angle with ``tan(phi) = 2 E_ch / E_J``, principal branch."""
    if e_j == 0:
        raise ParameterError("E_J = 0 leaves the rotation angle undefined")
    return math.atan(2.0 * e_ch / e_j)


def _omega(e_ch: float, e_j: float) -> float:
    phi = printed_rotation_angle(e_ch, e_j)
    return -2.0 * e_ch * math.sin(phi) - e_j * math.cos(phi)


def to_spin_params(p: JunctionParams) -> SpinParams:
    p.validate()
    return SpinParams(
        omega_k=_omega(p.e_ch_k, p.e_j_k),
        omega_l=_omega(p.e_ch_l, p.e_j_l),
        j_kl=-2.0 * p.e_j_k * p.e_j_l / p.e_L / math.pi,
        phi_k=printed_rotation_angle(p.e_ch_k, p.e_j_k) + FRAME_ANGLE_OFFSET,
        phi_l=printed_rotation_angle(p.e_ch_l, p.e_j_l) + FRAME_ANGLE_OFFSET,
    )


def frame_rotation(s: SpinParams) -> np.ndarray:
    """``U_y = exp(-i phi_k I_ky) exp(-i phi_l I_ly)``."""
    return herm_exp(spin_op("I_ky"), s.phi_k) @ herm_exp(spin_op("I_ly"), s.phi_l)


def build_h_rotated(s: SpinParams) -> np.ndarray:
    return s.omega_k * I_KZ + s.omega_l * I_LZ + s.pi_j * TWO_IKY_ILY


def evomq_terms(s: SpinParams) -> dict[str, np.ndarray]:
    """The three pieces of the EVOMQ form, keyed by coherence character."""
    return {
        "longitudinal": s.omega_k * I_KZ + s.omega_l * I_LZ,
        "zero_quantum": s.pi_j * ZERO_QUANTUM,
        "double_quantum": s.pi_j * DOUBLE_QUANTUM,
    }


def build_h_evomq(s: SpinParams) -> np.ndarray:
    # Identical to build_h_rotated as an operator: ZQ + DQ = 2 I_ky I_ly.
    return sum(evomq_terms(s).values())


def frame_mismatch(p: JunctionParams) -> float:
    """Max elementwise gap between ``U_y^+ H_T U_y`` and the rotated Hamiltonian."""
    s = to_spin_params(p)
    u = frame_rotation(s)
    return float(np.max(np.abs(u.conj().T @ build_h_raw(p) @ u - build_h_rotated(s))))


def evomq_conjugation_mismatch(s: SpinParams) -> float:
    """Gap between ``exp(i pi/2 F_y) H exp(-i pi/2 F_y)`` and the EVOMQ form.

    Nonzero for generic parameters: the quarter turn about y sends the z fields
    to x, so it is not the map from the rotated form to the EVOMQ form.
    """
    r = herm_exp(spin_op("F_y"), -math.pi / 2)
    return float(np.max(np.abs(r @ build_h_rotated(s) @ r.conj().T - build_h_evomq(s))))
