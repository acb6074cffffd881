"""Tangent triples: the closed-form tail matrix and its exact identities."""
import math

import numpy as np
import pytest

from sglap.address import EventuallyConstantWord
from sglap.decimation import (
    EigenvalueSequence,
    SpectralEigenfunction,
    dirichlet_eigenfunction,
    sequence_from_limit,
    six_series_element,
)
from sglap.errors import DomainError
from sglap.harmonic import extend_harmonic, normal_derivative_limit
from sglap.special import tau
from sglap.tangent import (
    ALPHA,
    BETA,
    TangentTriple,
    basis_vectors,
    dirichlet_tangent_seed,
    gamma_vector,
    gradient_at,
    limit_action,
    m0_matrix,
    normal_derivative,
    tangent_at,
)

SEQUENCES = [
    EigenvalueSequence(0, 1.0),
    EigenvalueSequence(0, 4.3, {1}),
    EigenvalueSequence(0, 0.7, {2, 3}),
    EigenvalueSequence(1, 6.0, {2}),
    EigenvalueSequence(1, 2.0, {3}),
]


def test_basis_vectors():
    bv = basis_vectors(EigenvalueSequence(1, 6.0, {2}), 2)
    assert np.array_equal(bv.alpha, [0, 1, 1])
    assert np.array_equal(bv.beta, [0, 1, -1])
    assert np.array_equal(bv.gamma, [4.0, 1.0, 1.0])  # lambda_2 = 3


def test_tail_matrix_eigen_identities():
    # M0 alpha = 4 c tau alpha, M0 beta = 2 c beta, M0 gamma_k = (4,4,4)
    for seq in SEQUENCES:
        # k = m0 exercises singular head values (2 and 6), which M0 allows
        for k in (seq.m0, seq.m0 + 2):
            m = m0_matrix(seq, k).matrix
            lam, lam_k = seq.limit(), seq.value(k)
            c = lam / (3.0 * 5.0**k * lam_k)
            t = tau(k, seq)
            assert np.allclose(m @ ALPHA, 4.0 * c * t * ALPHA, atol=1e-12)
            assert np.allclose(m @ BETA, 2.0 * c * BETA, atol=1e-12)
            assert np.allclose(m @ gamma_vector(lam_k), [4.0, 4.0, 4.0], atol=1e-10)


def test_limit_action_matches_the_matrix_action():
    for seq in SEQUENCES:
        m0 = seq.m0
        lam, lam0 = seq.limit(), seq.value(m0)
        c = lam / (3.0 * 5.0**m0 * lam0)
        assert np.allclose(limit_action(seq, m0, "alpha"), 4.0 * c * tau(m0, seq) * ALPHA, atol=1e-12)
        assert np.allclose(limit_action(seq, m0, "beta"), 2.0 * c * BETA, atol=1e-12)
        assert np.allclose(limit_action(seq, m0, "gamma"), [4.0, 4.0, 4.0], atol=1e-12)


def test_limit_action_zero_sequence():
    seq = EigenvalueSequence(0, 0.0)
    assert np.array_equal(limit_action(seq, 0, "alpha"), ALPHA)
    assert np.array_equal(limit_action(seq, 0, "beta"), BETA)
    assert np.array_equal(limit_action(seq, 0, "gamma"), gamma_vector(0.0))
    with pytest.raises(DomainError):
        limit_action(seq, 0, "delta")


def test_tail_matrix_guards():
    with pytest.raises(DomainError):
        m0_matrix(EigenvalueSequence(1, 2.0), 0)  # cut below the sequence start
    assert np.array_equal(m0_matrix(EigenvalueSequence(0, 0.0), 3).matrix, np.eye(3))


def test_six_element_tangent_closed_form():
    u = six_series_element()
    lam = u.eigenvalue()
    t = tangent_at(u, ":0")
    assert isinstance(t, TangentTriple)
    assert np.allclose(t.as_array(), lam / 9.0 * np.array([0.0, 1.0, -1.0]), atol=1e-12)


def test_harmonic_tangent_is_the_function_itself():
    u = SpectralEigenfunction(EigenvalueSequence(0, 0.0), [0.3, -1.2, 2.0])
    for w in (":0", "21:0", "102:2", "0012:1"):
        assert np.allclose(tangent_at(u, w).as_array(), [0.3, -1.2, 2.0], atol=1e-12)


def test_cut_independence():
    u = dirichlet_eigenfunction("two", 1, plus_indices={2})
    w = EventuallyConstantWord((0, 1), 2)
    base = tangent_at(u, w).as_array()
    assert np.abs(base).max() > 1e-3  # in the support, so the check is not vacuous
    for cut in (3, 5, 8):
        assert np.allclose(tangent_at(u, w, cut=cut).as_array(), base, atol=1e-9)
    with pytest.raises(DomainError):
        tangent_at(u, w, cut=1)


def test_six_mirror_symmetry_at_the_center_junction():
    # the element is invariant under the q0 <-> q1 swap, which exchanges the
    # two one-sided tangents at the shared midpoint and permutes their triples
    u = six_series_element()
    a = tangent_at(u, "0:1").as_array()
    b = tangent_at(u, "1:0").as_array()
    assert np.allclose(a, b[[1, 0, 2]], atol=1e-10)


def test_junction_sides_differ_for_an_asymmetric_function():
    u = SpectralEigenfunction(sequence_from_limit(7.25), [1.0, -0.4, 0.7])
    a = tangent_at(u, "0:1").as_array()
    b = tangent_at(u, "1:0").as_array()
    assert np.abs(a - b[[1, 0, 2]]).max() > 1e-3


def test_gradient_is_mean_free():
    u = six_series_element()
    g = gradient_at(u, "010:2")
    assert g.sum() == pytest.approx(0.0, abs=1e-12)
    t = tangent_at(u, "010:2").as_array()
    assert np.array_equal(g, t - t.mean())


def test_tangent_osculates_the_function():
    # harmonically extending the tangent triple down the address reproduces
    # u's cell triples with an error that dies out at the point
    u = six_series_element()
    w = EventuallyConstantWord((0, 1), 2)
    t = tangent_at(u, w).as_array()
    gaps = []
    for m in (5, 10, 15, 20):
        down = extend_harmonic(t, w.truncation(m))
        gaps.append(float(np.abs(down - u.cell_triple(w.truncation(m))).max()))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-10


def test_normal_derivative_harmonic_case():
    u = SpectralEigenfunction(EigenvalueSequence(0, 0.0), [2.0, -1.0, 0.5])
    assert normal_derivative(u, 0) == 2 * 2.0 - (-1.0) - 0.5
    with pytest.raises(DomainError):
        normal_derivative(u, 3)


def test_normal_derivative_closed_vs_limit():
    u = SpectralEigenfunction(sequence_from_limit(9.5), [1.0, 0.3, -0.8])
    assert u.m0 == 0
    for i in range(3):
        est, _ = normal_derivative_limit(u.value_at, i, levels=20)
        assert normal_derivative(u, i) == pytest.approx(est, abs=1e-6)


def test_normal_derivative_dirichlet_uses_the_limit():
    u = dirichlet_eigenfunction("two", 1)
    nd = [normal_derivative(u, i) for i in range(3)]
    assert all(math.isfinite(x) for x in nd)
    # the two-series seed is symmetric under all corner swaps
    assert nd[0] == pytest.approx(nd[1], rel=1e-9)
    assert nd[1] == pytest.approx(nd[2], rel=1e-9)


def test_dirichlet_tangent_seed_roots():
    s = dirichlet_tangent_seed("Two", "+", lambda1=(5 + math.sqrt(17)) / 2)
    assert s.lambda1 == pytest.approx((5 + math.sqrt(17)) / 2, rel=1e-15)
    assert all(isinstance(t, TangentTriple) for t in s.corner_tangents())
    assert dirichlet_tangent_seed("FiveMinus", "-").lambda1 == pytest.approx((5 - math.sqrt(5)) / 2)
    assert dirichlet_tangent_seed("Six", "+").lambda1 == 6.0
    with pytest.raises(DomainError):
        dirichlet_tangent_seed("Two", "-", lambda1=(5 + math.sqrt(17)) / 2)
    with pytest.raises(DomainError):
        dirichlet_tangent_seed("Six", "-")
    with pytest.raises(DomainError):
        dirichlet_tangent_seed("Five", "+")
