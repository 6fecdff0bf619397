"""Dense spin-1/2 product operators and the matrix primitives built on them.

Basis convention: qubit 0 (spin ``k``) is the most significant bit and
``|0>`` is the +1/2 eigenstate of ``I_z``, so a two-spin ket is ``|q_k q_l>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import DimensionError, NonHermitianError

MAX_QUBITS = 10
SPIN_NAMES = ("k", "l")

_PAULI = {
    "1": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
# Factors of a product operator are I_mu = sigma_mu / 2; the identity is left unscaled.
_SPIN = {lab: (m if lab == "1" else 0.5 * m) for lab, m in _PAULI.items()}


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    unitary: float = 1e-10
    gate: float = 1e-9
    sequence_unitary: float = 1e-9


TOLERANCE_PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances(hermitian=1e-13, unitary=1e-11, gate=1e-11, sequence_unitary=1e-10),
}
DEFAULT_TOLERANCES = TOLERANCE_PROFILES["default"]


def get_tolerances(profile: str = "default") -> Tolerances:
    try:
        return TOLERANCE_PROFILES[profile]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {profile!r}") from None


@dataclass(frozen=True)
class PauliProduct:
    """``coefficient * prod_q I_{q, factors[q]}`` on ``len(factors)`` qubits.

    ``factors`` holds one label per qubit from ``{"1", "x", "y", "z"}``.
    ``PauliProduct(("z", "z"), 2.0)`` is ``2 I_kz I_lz``.
    """

    factors: tuple[str, ...]
    coefficient: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("a product operator needs at least one qubit")
        bad = [f for f in self.factors if f not in _SPIN]
        if bad:
            raise ValueError(f"invalid factor labels {bad}; expected 1, x, y or z")
        if not np.isfinite(self.coefficient) or np.iscomplexobj(self.coefficient):
            raise ValueError("coefficient must be a finite real number")

    @classmethod
    def on(cls, qubit_count: int, labels: Mapping[int, str], coefficient: float = 1.0) -> "PauliProduct":
        """Build from a sparse ``{qubit_index: label}`` map, identity elsewhere."""
        factors = ["1"] * qubit_count
        for q, lab in labels.items():
            if not 0 <= q < qubit_count:
                raise IndexError(f"qubit {q} out of range for {qubit_count} qubits")
            factors[q] = lab
        return cls(tuple(factors), coefficient)

    @property
    def qubit_count(self) -> int:
        return len(self.factors)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, f in enumerate(self.factors) if f != "1")

    def commutes_with(self, other: "PauliProduct") -> bool:
        """Label-only test; Pauli strings either commute or anticommute."""
        if self.qubit_count != other.qubit_count:
            raise DimensionError("products act on different qubit counts")
        clashes = sum(
            1 for a, b in zip(self.factors, other.factors) if a != "1" and b != "1" and a != b
        )
        return clashes % 2 == 0

    def scaled(self, c: float) -> "PauliProduct":
        return PauliProduct(self.factors, self.coefficient * c)


OperatorLike = Union[PauliProduct, Iterable[PauliProduct], np.ndarray]


def pauli_embed(product: PauliProduct | Iterable[PauliProduct]) -> np.ndarray:
    """Dense Hermitian matrix of a product operator, or of a sum of them."""
    if isinstance(product, PauliProduct):
        n = product.qubit_count
        if n > MAX_QUBITS:
            raise DimensionError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit limit")
        mats = [_SPIN[f] for f in product.factors]
        return product.coefficient * reduce(np.kron, mats)
    terms = list(product)
    if not terms:
        raise ValueError("empty operator sum")
    return sum(pauli_embed(t) for t in terms)


# Named single-spin and collective operators on the two-spin (k, l) register.
def _two_spin(label: str) -> tuple[PauliProduct, ...]:
    if label.startswith("F_"):
        mu = label[2:]
        return (PauliProduct((mu, "1")), PauliProduct(("1", mu)))
    if label.startswith("I_") and len(label) == 4 and label[2] in SPIN_NAMES:
        q = SPIN_NAMES.index(label[2])
        return (PauliProduct.on(2, {q: label[3]}),)
    raise ValueError(f"unknown spin operator label {label!r}")


SPIN_LABELS = tuple(f"I_{s}{mu}" for s in SPIN_NAMES for mu in "xyz") + ("F_x", "F_y", "F_z")


def spin_terms(label: str) -> tuple[PauliProduct, ...]:
    """Product-operator terms for labels like ``"I_kx"`` or ``"F_z"``."""
    if label not in SPIN_LABELS:
        raise ValueError(f"unknown spin operator label {label!r}; expected one of {SPIN_LABELS}")
    return _two_spin(label)


def spin_op(label: str) -> np.ndarray:
    return pauli_embed(spin_terms(label))


def hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def unitarity_deviation(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(len(u)))))


def _check_square(m: np.ndarray, name: str = "matrix") -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")


def herm_exp(generator: np.ndarray, scale: float, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Return ``exp(-i * scale * generator)`` for a Hermitian generator.

    Uses the spectral decomposition, so the result is unitary to eigensolver
    precision regardless of ``scale``.
    """
    generator = np.asarray(generator, dtype=complex)
    _check_square(generator, "generator")
    asym = hermitian_deviation(generator)
    if asym > tol.hermitian * max(1.0, float(np.max(np.abs(generator)))):
        raise NonHermitianError(f"generator is not Hermitian: max|M - M^+| = {asym:.3e}")
    if scale == 0:
        return np.eye(len(generator), dtype=complex)
    w, v = np.linalg.eigh(0.5 * (generator + generator.conj().T))
    return (v * np.exp(-1j * scale * w)) @ v.conj().T


def phase_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """Global-phase-invariant overlap ``|Tr(u^+ v)| / d``."""
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    _check_square(u)
    f = abs(np.vdot(u, v)) / len(u)
    return float(min(f, 1.0))


def gate_distance(u: np.ndarray, v: np.ndarray) -> float:
    return 1.0 - phase_fidelity(u, v)


def gates_equal(u: np.ndarray, v: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return gate_distance(u, v) < tol.gate


def global_phase(target: np.ndarray, u: np.ndarray) -> float:
    """``arg Tr(target^+ u)``: the phase theta with ``u ~ exp(i theta) target``."""
    return float(np.angle(np.vdot(target, u)))


def aligned_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral-norm distance ``||u - e^{i theta} v||_2`` after trace phase alignment."""
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    ov = np.vdot(v, u)
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(u - ph * v, 2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


_PHI_GRID = 2 * np.pi * np.arange(16) / 16


def mq_classify(op: OperatorLike, qubit_count: int | None = None, atol: float = 1e-10) -> set[int]:
    """Coherence orders present in an operator.

    The operator is rotated by ``exp(-i phi F_z)`` on a 16-point grid and the
    ``exp(-i p phi)`` components are read off with a discrete Fourier sum.
    Orders are bounded by the qubit count, well inside the grid's alias limit.
    """
    if isinstance(op, np.ndarray):
        a = np.asarray(op, dtype=complex)
        _check_square(a)
        n = qubit_count if qubit_count is not None else int(round(np.log2(len(a))))
        if 2**n != len(a):
            raise DimensionError(f"matrix dimension {len(a)} is not 2**{n}")
    else:
        terms = [op] if isinstance(op, PauliProduct) else list(op)
        n = terms[0].qubit_count
        a = pauli_embed(terms)
    fz = pauli_embed([PauliProduct.on(n, {q: "z"}) for q in range(n)])
    fz_diag = np.real(np.diag(fz))

    components = {p: np.zeros_like(a) for p in range(-n, n + 1)}
    for phi in _PHI_GRID:
        r = np.exp(-1j * phi * fz_diag)
        rotated = (r[:, None] * a) * r.conj()[None, :]
        for p in components:
            components[p] += np.exp(1j * p * phi) * rotated / len(_PHI_GRID)
    return {p for p, c in components.items() if np.max(np.abs(c)) > atol}
