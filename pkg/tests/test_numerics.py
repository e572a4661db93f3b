import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from clobserver.numerics import (
    DiagonalGain, diag_exp, diag_exp_vec, loewner_gt, max_eigenvalue, min_eigenvalue, symmetrize,
)

hurwitz = arrays(np.float64, st.integers(1, 6), elements=st.floats(-5.0, -0.01))


def test_diag_exp_at_zero_is_identity():
    np.testing.assert_array_equal(diag_exp([-1.0, -2.0], 0.0), np.eye(2))


def test_diag_exp_scalar():
    np.testing.assert_allclose(diag_exp([-1.0], 0.1), [[0.904837]], atol=1e-6)


def test_diag_exp_negative_time_grows():
    np.testing.assert_allclose(diag_exp([-1.0, -2.0], -0.1), np.diag([math.exp(0.1), math.exp(0.2)]))


@given(hurwitz, st.floats(-2, 2), st.floats(-2, 2))
def test_diag_exp_composes(lam, s, t):
    np.testing.assert_allclose(diag_exp_vec(lam, s) * diag_exp_vec(lam, t), diag_exp_vec(lam, s + t),
                               rtol=1e-12)


def test_diagonal_gain_rejects_non_hurwitz():
    with pytest.raises(ValueError):
        DiagonalGain([-1.0, 0.0])
    with pytest.raises(ValueError):
        DiagonalGain([])
    with pytest.raises(ValueError):
        DiagonalGain([-1.0, np.nan])


def test_diagonal_gain_is_immutable_copy():
    src = np.array([-1.0, -2.0])
    g = DiagonalGain(src)
    src[0] = 5.0
    assert g.lam[0] == -1.0
    with pytest.raises(ValueError):
        g.lam[0] = 3.0
    assert DiagonalGain.uniform(-2.0, 3).p == 3
    np.testing.assert_array_equal(g.matrix(), np.diag([-1.0, -2.0]))


@pytest.mark.parametrize("M, expected", [
    ([[2, 1], [1, 2]], 1.0),
    (np.zeros((3, 3)), 0.0),
    ([[0, 0.25], [0.25, 0]], -0.25),
])
def test_min_eigenvalue_examples(M, expected):
    assert min_eigenvalue(M) == pytest.approx(expected, abs=1e-14)


def test_eigen_extremes_reject_non_finite():
    with pytest.raises(ValueError):
        min_eigenvalue([[np.inf, 0], [0, 1]])
    with pytest.raises(ValueError):
        max_eigenvalue([[np.nan]])


def test_symmetrize_requires_square():
    with pytest.raises(ValueError):
        symmetrize(np.zeros((2, 3)))


@given(arrays(np.float64, (4, 4), elements=st.floats(-10, 10)),
       arrays(np.float64, 4, elements=st.floats(-1, 1)))
def test_rayleigh_quotient_within_extremes(M, v):
    S = symmetrize(M)
    if np.linalg.norm(v) < 1e-3:
        return
    q = v @ S @ v / (v @ v)
    assert min_eigenvalue(S) - 1e-9 <= q <= max_eigenvalue(S) + 1e-9


@pytest.mark.parametrize("A, B, expected", [
    (2 * np.eye(2), np.eye(2), True),
    (np.eye(2), np.eye(2), False),
    ([[2, 1], [1, 2]], 0.5 * np.eye(2), True),
])
def test_loewner_examples(A, B, expected):
    assert loewner_gt(A, B) is expected


def test_loewner_margin_and_mismatch():
    assert loewner_gt(2 * np.eye(2), np.eye(2), tol=0.5)
    assert not loewner_gt(2 * np.eye(2), np.eye(2), tol=1.0)
    with pytest.raises(ValueError):
        loewner_gt(np.eye(2), np.eye(3))


@settings(max_examples=50)
@given(arrays(np.float64, (3, 3), elements=st.floats(-5, 5)),
       arrays(np.float64, (3, 3), elements=st.floats(-5, 5)))
def test_loewner_is_antisymmetric(A, B):
    A, B = symmetrize(A), symmetrize(B)
    assert not (loewner_gt(A, B) and loewner_gt(B, A))
