"""Two-qubit diagonal gates in coupled SQUID Josephson-junction qubits.

Spin-1/2 operator algebra, the junction-to-spin mapping, analytic
diagonalisation of the coupled Hamiltonian, inverse gate design, exact pulse
sequences and a JSON-reporting command line.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateParametersError,
    DesignError,
    DimensionError,
    JJGatesError,
    NonHermitianError,
    NumericalDegradationError,
    ParameterError,
    PreconditionError,
    SequenceError,
)
from .operators import (
    DEFAULT_TOLERANCES,
    PauliProduct,
    Tolerances,
    aligned_distance,
    gates_equal,
    get_tolerances,
    herm_exp,
    mq_classify,
    pauli_embed,
    phase_fidelity,
    spin_op,
)
from .junction import (
    JunctionParams,
    SpinParams,
    build_h_evomq,
    build_h_raw,
    build_h_rotated,
    to_spin_params,
)
from .diagonalizer import (
    DiagonalizationSolution,
    PropagatorForm,
    build_v,
    predicted_spectrum,
    propagator_identity_form,
    solve_angles,
    verify_diagonalization,
)
from .sequences import (
    CNOT,
    GateReport,
    PulseSequence,
    SequenceStep,
    bch_scan,
    build_bch_sequence,
    build_echo_sequence,
    build_xor_sequence,
    diagonal_gate,
    evaluate,
    verify,
)
from .designer import (
    DesignSolution,
    design_closed_form,
    design_numeric,
    gamma_for,
    printed_xor_design,
    verify_design,
)

__all__ = [name for name in dir() if not name.startswith("_")]
