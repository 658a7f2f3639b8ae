import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmeas import ValidationError, DimensionError
from qmeas.linalg import as_density, eigh, expectation, hkr_report, is_projector, pure_state
from qmeas.models import P_MINUS, P_PLUS, interference_projectors
from qmeas.rand import random_density, random_hermitian

from conftest import SX, SY, SZ


def test_eigh_diagonal():
    s = eigh(np.diag([1.0, -1.0]))
    np.testing.assert_array_equal(s.eigenvalues, [-1.0, 1.0])
    np.testing.assert_allclose(s.eigenvectors, [[0, 1], [1, 0]], atol=1e-15)


def test_eigh_interference_at_zero_phase():
    Q1, _ = interference_projectors(0.0)
    np.testing.assert_allclose(eigh(Q1).eigenvalues, [0.0, 1.0], atol=1e-15)


def test_eigh_path_projector():
    s = eigh(P_PLUS)
    np.testing.assert_allclose(s.eigenvalues, [0.0, 1.0], atol=1e-15)
    v = s.eigenvectors[:, 1]
    # by hand: P+ (1, i) = (1, i), so the eigenvector for 1 is (1, i)/sqrt(2) up to phase
    expected = np.array([1, 1j]) / np.sqrt(2)
    assert abs(abs(np.vdot(expected, v)) - 1) < 1e-12


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        eigh(np.array([[0, 1], [0, 0]]))


def test_eigh_deterministic(rng):
    H = random_hermitian(5, rng)
    a, b = eigh(H), eigh(H.copy())
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_eigh_reconstruction(d, seed):
    H = random_hermitian(d, np.random.default_rng(seed))
    s = eigh(H)
    assert np.all(np.diff(s.eigenvalues) >= 0)
    V = s.eigenvectors
    assert np.max(np.abs(V.conj().T @ V - np.eye(d))) < 1e-10
    assert np.max(np.abs(s.reconstruct() - H)) < 1e-9


@pytest.mark.parametrize("P", [P_PLUS, P_MINUS, *interference_projectors(1.1)])
def test_projector_eigenvalues(P):
    assert is_projector(P)
    w = eigh(P).eigenvalues
    assert np.all(np.minimum(np.abs(w), np.abs(w - 1)) < 1e-9)


def test_expectation_examples():
    assert expectation(np.diag([1.0, 0.0]), np.diag([1.0, -1.0])) == 1.0
    op = np.array([[2.0, 1 - 1j], [1 + 1j, -0.5]])
    assert expectation(np.eye(2) / 2, op) == pytest.approx(np.trace(op).real / 2)
    rho = pure_state([1, 1j])
    assert expectation(rho, P_PLUS) == pytest.approx(1.0, abs=1e-15)


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionError):
        expectation(np.eye(2) / 2, np.eye(3))


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_expectation_identity_is_one(rng, d):
    for _ in range(20):
        assert expectation(random_density(d, rng), np.eye(d)) == pytest.approx(1.0, abs=1e-12)


def test_density_validation():
    with pytest.raises(ValidationError, match="trace"):
        as_density(np.eye(2))
    with pytest.raises(ValidationError, match="semidefinite"):
        as_density(np.diag([1.5, -0.5]))


def test_hkr_self_commuting(rng):
    A = random_hermitian(3, rng)
    r = hkr_report(random_density(3, rng), A, A)
    assert r.bound == pytest.approx(0.0, abs=1e-12)
    assert r.satisfied


def test_hkr_saturated_spin_up():
    r = hkr_report(np.diag([1.0, 0.0]), SX, SY)
    assert r.deltaA == pytest.approx(1.0)
    assert r.deltaB == pytest.approx(1.0)
    assert r.bound == pytest.approx(1.0)
    assert r.satisfied


def test_hkr_maximally_mixed():
    r = hkr_report(np.eye(2) / 2, SX, SY)
    assert r.bound == pytest.approx(0.0, abs=1e-15)
    assert r.satisfied


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_hkr_always_satisfied(d, seed):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, d + 1))
    assert hkr_report(random_density(d, rng, rank), random_hermitian(d, rng), random_hermitian(d, rng)).satisfied
