"""Analytic diagonalisation of the EVOMQ Hamiltonian.

``V = exp(-i alpha Q0) exp(-i beta Q2)`` with the zero-quantum generator
``Q0 = 2(I_kx I_ly - I_ky I_lx)`` and the double-quantum generator
``Q2 = 2(I_kx I_ly + I_ky I_lx)`` brings ``H_e`` to
``Omega'_k I_kz + Omega'_l I_lz``. The angles come from the tangent formulas
for ``alpha2 = alpha + beta`` and ``alpha1 = beta - alpha``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
import math
from typing import Literal, NamedTuple

import numpy as np

from .errors import DegenerateParametersError
from .junction import I_KZ, I_LZ, SpinParams, build_h_evomq
from .operators import (
    DEFAULT_TOLERANCES,
    PauliProduct,
    Tolerances,
    global_phase,
    herm_exp,
    pauli_embed,
    phase_fidelity,
)

Q0 = pauli_embed([PauliProduct(("x", "y"), 2.0), PauliProduct(("y", "x"), -2.0)])
Q2 = pauli_embed([PauliProduct(("x", "y"), 2.0), PauliProduct(("y", "x"), 2.0)])

Branch = Literal["plus", "minus"]
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class DiagonalizationSolution:
    alpha1: float
    alpha2: float
    alpha: float
    beta: float
    omega_k_prime: float
    omega_l_prime: float
    delta: float
    branch: str

    @property
    def gamma_prime(self) -> float:
        return self.omega_k_prime / self.omega_l_prime

    @property
    def realized_lambda(self) -> float:
        """Diagonal-gate angle ``4 alpha1`` produced by the echo construction."""
        return 4.0 * self.alpha1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data) -> "DiagonalizationSolution":
        return cls(**{k: (str(v) if k == "branch" else float(v)) for k, v in data.items()})


def build_v(alpha: float, beta: float) -> np.ndarray:
    return herm_exp(Q0, alpha) @ herm_exp(Q2, beta)


def angle_residuals(s: SpinParams, alpha1: float, alpha2: float) -> tuple[float, float]:
    """Left-hand sides of the two angle conditions; both vanish at a solution."""
    wk, wl, pj = s.omega_k, s.omega_l, s.pi_j
    s1, c1, s2, c2 = math.sin(alpha1), math.cos(alpha1), math.sin(alpha2), math.cos(alpha2)
    return (
        wk * s1 * c2 + wl * c1 * s2 - pj * s1 * s2,
        wk * c1 * s2 + wl * s1 * c2 + pj * c1 * c2,
    )


def effective_frequencies(wk, wl, pj, alpha1, alpha2):
    """``(Omega'_k, Omega'_l)``; accepts scalars or numpy arrays."""
    s1, c1, s2, c2 = np.sin(alpha1), np.cos(alpha1), np.sin(alpha2), np.cos(alpha2)
    return (
        wk * c1 * c2 - wl * s1 * s2 - pj * c1 * s2,
        wl * c1 * c2 - wk * s1 * s2 - pj * s1 * c2,
    )


def tangent_angles(wk, wl, pj, sign: float = 1.0):
    """Principal-branch ``(alpha1, alpha2, delta)``; accepts scalars or numpy arrays."""
    delta = (wl * wl - wk * wk + pj * pj) / (pj * wk)
    root = -delta + sign * np.sqrt(delta * delta + 4.0)
    alpha2 = np.arctan(0.5 * root)
    alpha1 = np.arctan(-pj / wl - 0.5 * (wk / wl) * root)
    return alpha1, alpha2, delta


def solve_angles(s: SpinParams, branch: Branch = "plus") -> DiagonalizationSolution:
    if branch not in ("plus", "minus"):
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    wk, wl, pj = s.omega_k, s.omega_l, s.pi_j
    if pj == 0 or wk == 0 or wl == 0:
        raise DegenerateParametersError(
            f"tangent formulas are singular for Omega_k={wk}, Omega_l={wl}, piJ={pj}; "
            "with piJ = 0 the Hamiltonian is already diagonal (alpha1 = alpha2 = 0)"
        )
    a1, a2, delta = tangent_angles(wk, wl, pj, 1.0 if branch == "plus" else -1.0)
    alpha1, alpha2, delta = float(a1), float(a2), float(delta)

    # arctan only fixes the angles mod pi; resolve by the residual if needed
    if max(map(abs, angle_residuals(s, alpha1, alpha2))) > RESIDUAL_TOL * max(1.0, abs(wk), abs(wl), abs(pj)):
        alt = alpha1 + math.pi
        if max(map(abs, angle_residuals(s, alt, alpha2))) < max(map(abs, angle_residuals(s, alpha1, alpha2))):
            alpha1 = alt

    okp, olp = (float(w) for w in effective_frequencies(wk, wl, pj, alpha1, alpha2))
    return DiagonalizationSolution(
        alpha1=alpha1,
        alpha2=alpha2,
        alpha=0.5 * (alpha2 - alpha1),
        beta=0.5 * (alpha1 + alpha2),
        omega_k_prime=okp,
        omega_l_prime=olp,
        delta=delta,
        branch=branch,
    )


class DiagonalizationResidual(NamedTuple):
    off_diagonal: float
    diagonal_mismatch: float

    def ok(self, tol: float = 1e-9) -> bool:
        return self.off_diagonal < tol and self.diagonal_mismatch < tol


def verify_diagonalization(s: SpinParams, d: DiagonalizationSolution) -> DiagonalizationResidual:
    v = build_v(d.alpha, d.beta)
    h_tilde = v.conj().T @ build_h_evomq(s) @ v
    off = h_tilde - np.diag(np.diag(h_tilde))
    expected = np.diag(d.omega_k_prime * I_KZ + d.omega_l_prime * I_LZ)
    return DiagonalizationResidual(
        off_diagonal=float(np.max(np.abs(off))),
        diagonal_mismatch=float(np.max(np.abs(np.diag(h_tilde) - expected))),
    )


def predicted_spectrum(d: DiagonalizationSolution) -> np.ndarray:
    """Sorted ``{(+-Omega'_k +- Omega'_l) / 2}``."""
    wk, wl = d.omega_k_prime, d.omega_l_prime
    return np.sort([0.5 * (a * wk + b * wl) for a in (1, -1) for b in (1, -1)])


class PropagatorForm(str, Enum):
    MINUS = "form_minus"
    PLUS = "form_plus"
    NEITHER = "neither"


def propagator_identity_form(
    s: SpinParams,
    d: DiagonalizationSolution,
    t_p: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> PropagatorForm:
    """Which of ``V^2 exp(-/+ i pi I_kz)`` the free propagator at ``t_p`` equals.

    The two candidate forms differ only by an overall sign, so after a
    phase-invariant match the sign is taken from the phase of the overlap.
    """
    u = herm_exp(build_h_evomq(s), t_p)
    v2 = build_v(d.alpha, d.beta) @ build_v(d.alpha, d.beta)
    minus = v2 @ herm_exp(I_KZ, math.pi)
    if phase_fidelity(minus, u) <= 1.0 - tol.gate:
        return PropagatorForm.NEITHER
    theta = global_phase(minus, u)
    # plus = -minus, so a phase near pi means the plus form
    return PropagatorForm.MINUS if abs(theta) < math.pi / 2 else PropagatorForm.PLUS
