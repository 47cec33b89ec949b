import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm
from scipy.optimize import linprog

from hybridbound import qcore
from hybridbound.errors import ContractViolation, ParameterError, ShapeError

angles15 = st.lists(st.floats(-10, 10, allow_nan=False), min_size=15, max_size=15).map(np.array)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def power_iteration_norm(a, iters=2000, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    ata = a.conj().T @ a
    for _ in range(iters):
        v = ata @ v
        v /= np.linalg.norm(v)
    return float(np.sqrt(np.real(v.conj() @ ata @ v)))


def hull_distance_oracle(points):
    """Distance from 0 to the convex hull of complex ``points`` via LP + segments."""
    pts = np.array(points)
    A_eq = np.vstack([pts.real, pts.imag, np.ones(len(pts))])
    res = linprog(np.zeros(len(pts)), A_eq=A_eq, b_eq=[0, 0, 1], bounds=(0, None))
    if res.status == 0:
        return 0.0
    best = np.min(np.abs(pts))
    for a, b in itertools.combinations(pts, 2):
        d = b - a
        t = np.clip(-np.real(np.conj(d) * a) / (abs(d) ** 2), 0, 1) if abs(d) > 0 else 0
        best = min(best, abs(a + t * d))
    return float(best)


def diamond_oracle(u, v):
    nu = hull_distance_oracle(np.linalg.eigvals(u.conj().T @ v))
    return 2 * np.sqrt(max(0.0, 1 - nu ** 2))


def kron_embed(u, a, b, q):
    """Dense embedding via an explicit permutation of the computational basis."""
    dim = 2 ** q
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (q - 1 - i)) & 1 for i in range(q)]
        sub = 2 * bits[a] + bits[b]
        for r in range(4):
            nb = list(bits)
            nb[a], nb[b] = r >> 1, r & 1
            row = int("".join(map(str, nb)), 2)
            out[row, col] += u[r, sub]
    return out


# ---------------------------------------------------------------------------
# build_unitary
# ---------------------------------------------------------------------------

def test_pauli_labels_order():
    assert qcore.PAULI_LABELS[0] == "IX"
    assert qcore.PAULI_LABELS[-1] == "ZZ"
    assert len(qcore.PAULI_LABELS) == 15
    assert qcore.pauli_index("XI") == 3


def test_zero_theta_is_identity():
    assert np.allclose(qcore.build_unitary(np.zeros(15)), np.eye(4), atol=1e-14)


@pytest.mark.parametrize("t", [0.3, -1.1, np.pi])
def test_single_generator_rotation(t):
    u = qcore.build_unitary(qcore.theta_for(XI=t))
    XI = np.kron(qcore.X, qcore.I2)
    assert np.allclose(u, np.cos(t) * np.eye(4) - 1j * np.sin(t) * XI, atol=1e-12)


def test_zz_half_pi_diagonal():
    u = qcore.build_unitary(qcore.theta_for(ZZ=np.pi / 2))
    expected = np.diag(np.exp(-1j * np.pi / 2 * np.array([1, -1, -1, 1])))
    assert np.allclose(u, expected, atol=1e-12)


def test_matches_scipy_expm():
    rng = np.random.default_rng(1)
    for _ in range(20):
        th = rng.uniform(-3, 3, 15)
        H = sum(t * P for t, P in zip(th, qcore.PAULI_PRODUCTS))
        assert np.allclose(qcore.build_unitary(th), expm(-1j * H), atol=1e-10)


def test_build_unitary_rejects_bad_input():
    with pytest.raises(ParameterError):
        qcore.build_unitary(np.full(15, np.nan))
    with pytest.raises(ShapeError):
        qcore.build_unitary(np.zeros(14))


@settings(max_examples=200, deadline=None)
@given(angles15)
def test_unitarity_property(th):
    assert qcore.unitarity_error(qcore.build_unitary(th)) <= qcore.UNITARY_TOL


def test_gate_rejects_equal_targets():
    with pytest.raises(ParameterError):
        qcore.TwoQubitGate(np.zeros(15), (1, 1))


# ---------------------------------------------------------------------------
# circuit description
# ---------------------------------------------------------------------------

def test_circuit_sharing_counts():
    c = qcore.CircuitSpec(3, [(0, 1), (1, 2), (0, 1)], np.zeros((2, 15)), slots=[0, 1, 0])
    assert c.T == 2 and c.M_rep == 2 and c.n == 3 and c.beta == 1.0
    assert len(c.gate_unitaries()) == 3


def test_circuit_validation():
    with pytest.raises(ParameterError):
        qcore.CircuitSpec(11, [], np.zeros((0, 15)))
    with pytest.raises(ShapeError):
        qcore.CircuitSpec(2, [(0, 2)], np.zeros((1, 15)))
    with pytest.raises(ShapeError):
        qcore.CircuitSpec(2, [(0, 1)], np.zeros((2, 15)))
    with pytest.raises(ParameterError):
        qcore.CircuitSpec(2, [(0, 1)], np.full((1, 15), np.inf))
    with pytest.raises(ContractViolation):
        qcore.CircuitSpec(2, [], np.zeros((0, 15)), measured=[0], observables=[np.array([[0, 1], [0, 0]])])


def test_theta_is_copied_and_frozen():
    th = np.zeros((1, 15))
    c = qcore.CircuitSpec(2, [(0, 1)], th)
    th[0, 0] = 5.0
    assert c.theta[0, 0] == 0.0
    with pytest.raises(ValueError):
        c.theta[0, 0] = 1.0


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def test_encode_zero_is_ground_state():
    rho = qcore.encode(np.zeros(3), 3).density
    expected = np.zeros((8, 8))
    expected[0, 0] = 1
    assert np.allclose(rho, expected)


def test_encode_pi_flips():
    assert np.allclose(qcore.encode([np.pi], 1).density, [[0, 0], [0, 1]], atol=1e-15)


def test_encode_half_pi():
    # explicit 2x2 outer product of (cos pi/4, sin pi/4)
    v = np.array([np.cos(np.pi / 4), np.sin(np.pi / 4)])
    rho = qcore.encode([np.pi / 2], 1).density
    assert np.allclose(rho, np.outer(v, v))
    assert np.allclose(np.diag(rho), [0.5, 0.5])


def test_encode_too_many_features():
    with pytest.raises(ShapeError):
        qcore.encode([0.1, 0.2, 0.3], 2)


def test_encode_pads_with_zero_state():
    rho = qcore.encode([np.pi], 2).density
    assert np.isclose(rho[2, 2].real, 1.0)  # |10>


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------

def test_identity_gates_leave_state():
    c = qcore.CircuitSpec(3, [(0, 1), (1, 2)], np.zeros((2, 15)))
    s = qcore.encode([0.3, -1.0, 2.0], 3)
    assert np.allclose(qcore.run_circuit(c, s).density, s.density, atol=1e-14)


def test_zz_phase_keeps_diagonal_state():
    c = qcore.CircuitSpec(2, [(0, 1)], qcore.theta_for(ZZ=np.pi / 2)[None])
    s = qcore.encode([0, 0], 2)
    assert np.allclose(qcore.run_circuit(c, s).density, s.density, atol=1e-14)


def test_x_rotation_transfers_population():
    # exp(-i pi XX) on |00>; oracle: direct 4x4 matrix-vector product
    c = qcore.CircuitSpec(2, [(0, 1)], qcore.theta_for(XX=np.pi / 2)[None])
    out = qcore.run_circuit(c, qcore.encode([0, 0], 2)).density
    u = expm(-1j * np.pi / 2 * np.kron(qcore.X, qcore.X))
    psi = u @ np.array([1, 0, 0, 0])
    assert np.allclose(out, np.outer(psi, psi.conj()), atol=1e-12)
    assert np.isclose(out[3, 3].real, 1.0)


def test_embed_gate_matches_permutation_oracle():
    rng = np.random.default_rng(2)
    u = qcore.build_unitary(rng.uniform(-2, 2, 15))
    for a, b in [(0, 1), (1, 0), (0, 2), (2, 1), (1, 3)]:
        assert np.allclose(qcore.embed_gate(u, (a, b), 4), kron_embed(u, a, b, 4), atol=1e-12)


def test_vector_and_density_paths_agree():
    rng = np.random.default_rng(3)
    c = qcore.random_circuit(4, 5, rng)
    X = rng.uniform(-np.pi, np.pi, size=(6, 4))
    batch = qcore.quantum_features(c, X)
    for x, z in zip(X, batch):
        z_rho = qcore.measure_vector(c, qcore.run_circuit(c, qcore.encode(x, 4)))
        assert np.allclose(z, z_rho, atol=1e-12)


def test_circuit_unitary_matches_product_of_embeddings():
    rng = np.random.default_rng(4)
    c = qcore.random_circuit(3, 3, rng)
    U = np.eye(8)
    for u, t in zip(c.gate_unitaries(), c.layout):
        U = kron_embed(u, *t, 3) @ U
    assert np.allclose(qcore.circuit_unitary(c), U, atol=1e-12)


def test_stacked_application_matches_loop():
    rng = np.random.default_rng(5)
    psi = qcore.encode_vectors(rng.uniform(-1, 1, size=(3, 3)), 3)
    us = qcore.build_unitaries(rng.uniform(-1, 1, size=(4, 15)))
    stacked = qcore.apply_gate_stacked(np.broadcast_to(psi, (4,) + psi.shape), us, (2, 0), 3)
    for p in range(4):
        assert np.allclose(stacked[p], qcore.apply_gate_vectors(psi, us[p], (2, 0), 3))


def test_run_circuit_shape_mismatch():
    c = qcore.CircuitSpec(3, [], np.zeros((0, 15)))
    with pytest.raises(ShapeError):
        qcore.run_circuit(c, qcore.encode([0.0], 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(1, 4), st.integers(0, 2**31))
def test_state_validity_preserved(q, T, seed):
    rng = np.random.default_rng(seed)
    c = qcore.random_circuit(q, T, rng)
    s = qcore.run_circuit(c, qcore.encode(rng.uniform(-np.pi, np.pi, q), q))
    s.validate()


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

def test_z_readout_basics():
    c = qcore.CircuitSpec(1, [], np.zeros((0, 15)))
    assert np.isclose(qcore.measure_vector(c, qcore.encode([0.0], 1))[0], 1.0)
    assert np.isclose(qcore.measure_vector(c, qcore.encode([np.pi], 1))[0], -1.0)
    rho = qcore.encode([np.pi / 2], 1).density
    assert np.isclose(np.trace(qcore.Z @ rho).real, 0.0, atol=1e-15)
    assert np.isclose(qcore.measure_vector(c, qcore.encode([np.pi / 2], 1))[0], 0.0, atol=1e-15)


def test_general_observables_batch_path():
    rng = np.random.default_rng(6)
    base = qcore.random_circuit(3, 2, rng)
    c = qcore.CircuitSpec(3, base.layout, base.theta, measured=[2, 0], observables=[qcore.X, qcore.Y])
    X = rng.uniform(-2, 2, size=(4, 3))
    for x, z in zip(X, qcore.quantum_features(c, X)):
        rho = qcore.run_circuit(c, qcore.encode(x, 3)).density
        ref = [np.trace(kron_embed_single(qcore.X, 2, 3) @ rho).real,
               np.trace(kron_embed_single(qcore.Y, 0, 3) @ rho).real]
        assert np.allclose(z, ref, atol=1e-12)


def kron_embed_single(o, qubit, q):
    ops = [np.eye(2)] * q
    ops[qubit] = o
    out = ops[0]
    for m in ops[1:]:
        out = np.kron(out, m)
    return out


def test_measurement_bounded_by_beta():
    rng = np.random.default_rng(7)
    for _ in range(1000 // 20):
        q = int(rng.integers(2, 6))
        c = qcore.random_circuit(q, int(rng.integers(1, 5)), rng)
        z = qcore.quantum_features(c, rng.uniform(-np.pi, np.pi, size=(20, q)))
        assert np.all(np.abs(z) <= c.beta)


# ---------------------------------------------------------------------------
# norms and distances
# ---------------------------------------------------------------------------

def test_spectral_norm_examples():
    assert np.isclose(qcore.spectral_norm(np.eye(4)), 1.0)
    assert np.isclose(qcore.spectral_norm(2 * np.eye(4)), 2.0)
    rng = np.random.default_rng(8)
    for _ in range(10):
        A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert abs(qcore.spectral_norm(A) - power_iteration_norm(A)) < 1e-8


def test_spectral_norm_rejects_nan():
    with pytest.raises(ParameterError):
        qcore.spectral_norm(np.full((2, 2), np.nan))


def test_telescope_examples():
    u = qcore.build_unitary(np.full(15, 0.2))
    assert qcore.telescope_bound([u], [u]) == 0.0
    d = np.diag([1.0, 1, 1, -1])
    assert np.isclose(qcore.telescope_bound([np.eye(4)], [d]), 4.0)
    A = 0.3 * np.diag([1.0, 0, 0, 0])
    assert np.isclose(qcore.telescope_bound([A], [np.zeros((4, 4))]), 0.6)
    with pytest.raises(ShapeError):
        qcore.telescope_bound([u], [u, u])


def test_diamond_examples():
    u = qcore.build_unitary(np.full(15, 0.2))
    assert qcore.diamond_distance_unitary_oracle(u, u) == pytest.approx(0.0, abs=1e-7)
    assert qcore.diamond_distance_unitary_oracle(np.eye(4), np.exp(0.7j) * np.eye(4)) == pytest.approx(0.0, abs=1e-7)
    d = np.diag([1.0, 1, 1, -1])
    assert qcore.diamond_distance_unitary_oracle(np.eye(4), d) == pytest.approx(2.0)
    assert qcore.diamond_distance_unitary_oracle(np.eye(4), d) <= qcore.telescope_bound([np.eye(4)], [d])


def test_diamond_rejects_non_unitary():
    with pytest.raises(ContractViolation):
        qcore.diamond_distance_unitary_oracle(np.eye(4), 2 * np.eye(4))


def test_diamond_matches_hull_oracle():
    rng = np.random.default_rng(9)
    for _ in range(100):
        th = rng.uniform(-np.pi, np.pi, 15)
        u = qcore.build_unitary(th)
        v = qcore.build_unitary(th + 10 ** rng.uniform(-2, 0.5) * rng.standard_normal(15))
        assert abs(qcore.diamond_distance_unitary_oracle(u, v) - diamond_oracle(u, v)) < 1e-6


@settings(max_examples=150, deadline=None)
@given(angles15, angles15)
def test_telescope_dominates_diamond(a, b):
    u, v = qcore.build_unitary(a), qcore.build_unitary(b)
    assert qcore.diamond_distance_unitary_oracle(u, v) <= qcore.telescope_bound([u], [v]) + 1e-9


def test_end_to_end_perturbation_chain():
    rng = np.random.default_rng(10)
    for _ in range(50):
        c = qcore.random_circuit(3, 3, rng)
        c2 = c.with_theta(c.theta + 0.05 * rng.standard_normal(c.theta.shape))
        x = rng.uniform(-np.pi, np.pi, 3)
        z = qcore.quantum_features(c, x[None])[0]
        z2 = qcore.quantum_features(c2, x[None])[0]
        dsum = sum(qcore.diamond_distance_unitary_oracle(u, v)
                   for u, v in zip(c.gate_unitaries(), c2.gate_unitaries()))
        tele = qcore.telescope_bound(c.gate_unitaries(), c2.gate_unitaries())
        assert np.linalg.norm(z - z2) <= np.sqrt(c.n) * dsum + 1e-9
        assert dsum <= tele + 1e-9
