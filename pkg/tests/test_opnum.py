import math

import numpy as np
import pytest

import frozen
import oracles
from kitaevlab import opnum
from kitaevlab.verify import whitehead_block


def rand_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def test_lu_det_examples():
    assert opnum.lu_det(np.eye(7)) == 1
    assert opnum.lu_det(np.diag([2.0, 3.0])) == 6
    assert opnum.lu_det(np.zeros((3, 3))) == 0
    assert opnum.lu_det([[0, 1], [1, 0]]) == -1


def test_lu_det_matches_cofactor_oracle():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3, 5):
        for _ in range(10):
            m = rand_complex(rng, n)
            ref = oracles.cofactor_det(m.tolist())
            assert abs(opnum.lu_det(m) - ref) <= 1e-10 * max(1, abs(ref))
    m = rand_complex(rng, 4)
    assert abs(oracles.permutation_det(m.tolist()) - oracles.cofactor_det(m.tolist())) < 1e-10


def test_mat_exp():
    np.testing.assert_allclose(opnum.mat_exp(np.zeros((3, 3))), np.eye(3))
    A = np.array([[1 + 2j, -0.5], [3, 0.25j]])
    nil = np.block([[np.zeros((2, 2)), A], [np.zeros((2, 2)), np.zeros((2, 2))]])
    np.testing.assert_allclose(opnum.mat_exp(nil), np.eye(4) + nil, atol=1e-14)
    np.testing.assert_allclose(opnum.mat_exp(np.diag([1j * np.pi, -1j * np.pi])), -np.eye(2), atol=1e-14)


def test_mat_exp_against_eigen_route():
    rng = np.random.default_rng(4)
    h = rand_complex(rng, 6)
    h = h + h.conj().T
    h *= 5 / np.linalg.norm(h, 2)
    evals, evecs = np.linalg.eigh(h)
    ref = (evecs * np.exp(1j * evals)) @ evecs.conj().T
    got = opnum.mat_exp(1j * h)
    assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref)) * 10


def test_spectral_projector():
    np.testing.assert_allclose(opnum.spectral_projector(np.diag([-1.0, 1.0]), 0.0), np.diag([1.0, 0.0]))
    rng = np.random.default_rng(5)
    h = rand_complex(rng, 3)
    h = h + h.conj().T
    P = opnum.spectral_projector(h, np.min(np.linalg.eigvalsh(h)) - 1)
    assert np.all(P == 0)
    fermi = float(np.sort(np.linalg.eigvalsh(h))[:2].mean())
    P = opnum.spectral_projector(h, fermi)
    assert np.linalg.norm(P @ P - P) < 1e-9
    assert np.linalg.norm(P - P.conj().T) < 1e-9
    assert round(np.trace(P).real) == 1
    assert np.linalg.norm(P @ h - h @ P, 2) < 1e-9


def test_projector_errors():
    with pytest.raises(opnum.FermiOnEigenvalue):
        opnum.spectral_projector(np.diag([0.0, 1.0]), 0.0)
    with pytest.raises(opnum.NonHermitian):
        opnum.spectral_projector(np.array([[0, 1], [0, 0]]), 0.5)


def test_trace_norm_partials():
    assert opnum.trace_norm_partials(np.zeros((8, 8)), [2, 4, 8]) == [0, 0, 0]
    P = np.zeros((9, 9))
    P[4, 4] = 1
    assert opnum.trace_norm_partials(P, [1, 3, 9]) == pytest.approx([1, 1, 1])
    v = np.zeros(9)
    v[3:6] = 1 / math.sqrt(3)
    assert opnum.trace_norm_partials(np.outer(v, v), [3, 5, 9]) == pytest.approx([1, 1, 1])


def test_trace_norm_of_diagonal_matches_direct_sum():
    # for diagonal U - 1 the partial sums are sums of |e^{2 pi i F(k)} - 1|
    k = np.arange(256) - 128
    F = 0.5 * (1 + np.tanh(k / 6)) * 0.5
    Ud = np.exp(2j * np.pi * F)
    partials = opnum.trace_norm_partials(np.diag(Ud - 1), [64, 128, 256])
    for n, p in zip((64, 128, 256), partials):
        sl = opnum.centered_window(256, n)
        assert p == pytest.approx(np.sum(np.abs(Ud[sl] - 1)), rel=1e-12)
    # half winding: new sites on the right add |e^{i pi} - 1| = 2, on the left nothing
    slopes = np.diff(partials) / np.diff([64, 128, 256])
    assert slopes[-1] == pytest.approx(1.0, rel=1e-3)


def test_lidskii_cyclicity():
    rng = np.random.default_rng(6)
    for _ in range(20):
        A, B = rand_complex(rng, 10), rand_complex(rng, 10)
        assert abs(np.trace(A @ B) - np.trace(B @ A)) < 1e-10


def test_finite_dimensional_triviality():
    rng = np.random.default_rng(7)
    for _ in range(50):
        U, V = rand_complex(rng, 8), rand_complex(rng, 8)
        comm = U @ V @ np.linalg.inv(U) @ np.linalg.inv(V)
        assert abs(opnum.lu_det(comm) - 1) <= 1e-8


def test_whitehead_identity_numerically():
    rng = np.random.default_rng(8)
    for _ in range(20):
        U = rand_complex(rng, 5) + 4 * np.eye(5)
        target = np.block([[U, np.zeros((5, 5))], [np.zeros((5, 5)), np.linalg.inv(U)]])
        assert np.max(np.abs(whitehead_block(U) - target)) <= 1e-9


def test_embedding_stability():
    rng = np.random.default_rng(9)
    U = rand_complex(rng, 6)
    emb = np.eye(9, dtype=complex)
    emb[:6, :6] = U
    assert abs(opnum.lu_det(emb) - opnum.lu_det(U)) <= 1e-10 * abs(opnum.lu_det(U))


def test_fredholm_det_examples():
    op = opnum.WindowedOperator((0, 15), np.eye(16), anchor="left")
    assert opnum.fredholm_det(op, [4, 8, 16]).value == 1
    b = np.eye(16)
    b[0, 0] = 2
    est = opnum.fredholm_det(opnum.WindowedOperator((0, 15), b, anchor="left"), [4, 8, 16])
    assert est.value == 2 and est.converged and est.cauchy_gap == 0


def test_fredholm_det_telescoping():
    d = lambda k: 1.5 + 0.5 * np.tanh(np.asarray(k, dtype=float) / 4)
    k = np.arange(-128, 128)
    op = opnum.WindowedOperator((-128, 127), np.diag(d(k - 1) / d(k)),
                                tail="diagonal-with-limit", limits=(1, 1))
    est = opnum.fredholm_det(op, [64, 128, 256])
    assert est.value.real == pytest.approx(oracles.telescoping_product(d, -128, 127), abs=1e-12)
    assert est.value.real == pytest.approx(frozen.TANH_TELESCOPE, abs=1e-10)
    # the window of 64 still feels the tanh tails at the 1e-7 level
    assert not est.converged and est.cauchy_gap < 1e-6
    assert opnum.fredholm_det(op, [128, 192, 256]).converged


def test_fredholm_det_errors():
    with pytest.raises(opnum.NotDeterminantClass):
        opnum.fredholm_det(opnum.WindowedOperator((0, 3), np.eye(4), tail="zero"), [4])
    with pytest.raises(opnum.NotDeterminantClass):
        opnum.fredholm_det(opnum.WindowedOperator((0, 3), np.eye(4), tail="diagonal-with-limit",
                                                  limits=(2, 1)), [4])
    slow = np.diag(1 + 1.0 / (1 + np.arange(64)))
    with pytest.raises(opnum.NoConvergence) as info:
        opnum.fredholm_det(opnum.WindowedOperator((0, 63), slow, anchor="left"), [16, 32, 64],
                           require_convergence=True)
    assert info.value.estimate.window_sequence[0][0] == 16
    with pytest.raises(ValueError):
        opnum.WindowedOperator((0, 3), np.eye(5))


def test_padded_product_identities():
    I = opnum.padded_product([opnum.identity_factor()], 16, 16)
    np.testing.assert_array_equal(I, np.eye(16))
    block = opnum.padded_product([opnum.exp_shift_factor(1.0), opnum.exp_shift_factor(-1.0)], 32, 96)
    assert np.max(np.abs(block - np.eye(32))) <= 1e-12
    with pytest.raises(ValueError):
        opnum.padded_product([opnum.identity_factor()], 16, 8)


def test_padded_product_group_commutator_is_trace_class():
    f = [opnum.exp_shift_factor(1.0), opnum.exp_shift_factor(1.0, adjoint=True),
         opnum.exp_shift_factor(-1.0), opnum.exp_shift_factor(-1.0, adjoint=True)]
    block, err = opnum.padded_product(f, 32, 96, return_error=True)
    assert err < 1e-12
    check = opnum.padded_product(f, 32, 192)
    assert np.max(np.abs(block - check)) < 1e-12
    partials = opnum.trace_norm_partials(block - np.eye(32), [8, 16, 32], anchor="left")
    assert opnum.is_bounded(partials, rel_tol=1e-9)


def test_naive_truncation_gives_trivial_determinant():
    # truncating each factor separately forces det = 1; the padded corner does not
    n = 32
    S = opnum.shift_section(n)
    A, B = opnum.mat_exp(S), opnum.mat_exp(S.T)
    naive = A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)
    assert abs(opnum.lu_det(naive) - 1) < 1e-8
