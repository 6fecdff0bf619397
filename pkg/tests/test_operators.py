import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest
from scipy.linalg import expm

from jjgates.errors import DimensionError, NonHermitianError
from jjgates.operators import (
    MAX_QUBITS,
    PauliProduct,
    aligned_distance,
    commutator,
    gates_equal,
    get_tolerances,
    global_phase,
    herm_exp,
    mq_classify,
    pauli_embed,
    phase_fidelity,
    spin_op,
)

from conftest import SY, kron_spin, random_hermitian, random_unitary

labels = st.sampled_from("1xyz")


def test_single_qubit_iz():
    assert np.allclose(pauli_embed(PauliProduct(("z",))), np.diag([0.5, -0.5]))


def test_two_ikz_ilz_diagonal():
    assert np.allclose(pauli_embed(PauliProduct(("z", "z"), 2.0)), np.diag([0.5, -0.5, -0.5, 0.5]))


def test_q0_matches_kronecker_expansion():
    q0 = pauli_embed([PauliProduct(("x", "y"), 2.0), PauliProduct(("y", "x"), -2.0)])
    oracle = 2 * (kron_spin("x", "y") - kron_spin("y", "x"))
    assert np.allclose(q0, oracle, atol=1e-15)
    # only the |01>,|10> block is populated
    mask = np.zeros((4, 4), bool)
    mask[1:3, 1:3] = True
    assert np.all(q0[~mask] == 0)
    assert np.any(q0[mask] != 0)


def test_spin_ops_named():
    assert np.allclose(spin_op("I_ly"), kron_spin("1", "y"))
    assert np.allclose(spin_op("F_x"), kron_spin("x", "1") + kron_spin("1", "x"))


def test_qubit_guard():
    with pytest.raises(DimensionError):
        pauli_embed(PauliProduct(("z",) * (MAX_QUBITS + 1)))


def test_bad_labels_rejected():
    with pytest.raises(ValueError):
        PauliProduct(("q", "z"))
    with pytest.raises(ValueError):
        PauliProduct(("z",), float("nan"))


@settings(max_examples=60, deadline=None)
@given(st.lists(labels, min_size=1, max_size=4), st.floats(-5, 5, allow_nan=False))
def test_embed_is_hermitian(factors, c):
    m = pauli_embed(PauliProduct(tuple(factors), c))
    assert np.max(np.abs(m - m.conj().T)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(labels, min_size=3, max_size=3), st.lists(labels, min_size=3, max_size=3))
def test_commutation_predicate_matches_matrices(a, b):
    pa, pb = PauliProduct(tuple(a)), PauliProduct(tuple(b))
    ma, mb = pauli_embed(pa), pauli_embed(pb)
    comm = np.max(np.abs(commutator(ma, mb)))
    anti = np.max(np.abs(ma @ mb + mb @ ma))
    if pa.commutes_with(pb):
        assert comm < 1e-14
    else:
        assert anti < 1e-14


def test_longitudinal_products_commute():
    zs = [PauliProduct(f) for f in [("z", "1", "1"), ("1", "z", "z"), ("z", "z", "1"), ("z", "1", "z")]]
    for a in zs:
        for b in zs:
            assert np.max(np.abs(commutator(pauli_embed(a), pauli_embed(b)))) < 1e-14


def test_herm_exp_zero_scale_identity():
    assert np.array_equal(herm_exp(spin_op("F_x"), 0.0), np.eye(4))


def test_herm_exp_zz_pi():
    u = herm_exp(pauli_embed(PauliProduct(("z", "z"), 2.0)), math.pi)
    assert np.allclose(u, np.diag([-1j, 1j, 1j, -1j]), atol=1e-15)


def test_herm_exp_iy_pi_closed_form():
    u = herm_exp(pauli_embed(PauliProduct(("y",))), math.pi)
    closed = math.cos(math.pi / 2) * np.eye(2) - 1j * math.sin(math.pi / 2) * SY
    assert np.allclose(u, closed, atol=1e-15)
    assert np.allclose(u, [[0, -1], [1, 0]], atol=1e-15)


def test_herm_exp_rejects_non_hermitian():
    with pytest.raises(NonHermitianError, match="max"):
        herm_exp(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)


def test_herm_exp_unitary_and_matches_expm(rng):
    worst_u, worst_e = 0.0, 0.0
    for _ in range(1000):
        d = int(rng.choice([2, 4, 8]))
        h = random_hermitian(rng, d, norm=rng.uniform(0, 50))
        s = rng.uniform(-1, 1)
        u = herm_exp(h, s)
        worst_u = max(worst_u, np.max(np.abs(u.conj().T @ u - np.eye(d))))
        worst_e = max(worst_e, np.max(np.abs(u - expm(-1j * s * h))))
    assert worst_u < 1e-10
    assert worst_e < 1e-9


def test_group_law(rng):
    for _ in range(50):
        h = random_hermitian(rng, 4, norm=10)
        s, t = rng.uniform(-2, 2, size=2)
        a = herm_exp(h, s) @ herm_exp(h, t)
        b = herm_exp(h, s + t)
        assert np.max(np.abs(a - b)) < 1e-10
        assert abs(phase_fidelity(a, b) - 1) < 1e-12


def test_phase_fidelity_examples(rng):
    u = random_unitary(rng, 4)
    assert phase_fidelity(u, u) == pytest.approx(1, abs=1e-15)
    assert phase_fidelity(u, np.exp(1j * math.pi / 4) * u) == pytest.approx(1, abs=1e-15)
    g = np.diag(np.exp(-1j * math.pi / 4 * np.array([1, -1, -1, 1])))
    assert phase_fidelity(np.eye(4), g) == pytest.approx(math.sqrt(2) / 2, abs=1e-15)


def test_phase_fidelity_symmetric_and_bounded(rng):
    for _ in range(100):
        u, v = random_unitary(rng, 4), random_unitary(rng, 4)
        assert phase_fidelity(u, v) == phase_fidelity(v, u)
        assert 0 <= phase_fidelity(u, v) <= 1


def test_phase_fidelity_dimension_mismatch():
    with pytest.raises(DimensionError):
        phase_fidelity(np.eye(2), np.eye(4))


def test_global_phase_and_aligned_distance(rng):
    u = random_unitary(rng, 4)
    v = np.exp(0.7j) * u
    assert global_phase(u, v) == pytest.approx(0.7, abs=1e-12)
    assert aligned_distance(v, u) < 1e-14
    assert gates_equal(u, v)
    assert not gates_equal(u, random_unitary(rng, 4))


def test_mq_classify_examples():
    assert mq_classify(PauliProduct(("z", "1"))) == {0}
    zq = [PauliProduct(("x", "x")), PauliProduct(("y", "y"))]
    dq = [PauliProduct(("x", "x"), -1.0), PauliProduct(("y", "y"))]
    assert mq_classify(zq) == {0}
    assert mq_classify(dq) == {2, -2}
    assert mq_classify(PauliProduct(("x", "1"))) == {1, -1}
    assert mq_classify(pauli_embed(dq)) == {2, -2}


def test_tolerance_profiles():
    assert get_tolerances().gate == 1e-9
    assert get_tolerances("strict").gate < 1e-9
    with pytest.raises(ValueError):
        get_tolerances("loose")
