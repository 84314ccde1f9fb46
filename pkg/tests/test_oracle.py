"""Plaintext oracle: exact matmul, error metric, count predictors, fit."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hespmm.engine import MatmulMethod
from hespmm.errors import ParameterError
from hespmm.formats import generate_random_sparse
from hespmm.oracle import (complexity_fit, frobenius_error, plain_matmul,
                           predicted_op_counts)


def test_identity_matmul_exact():
    a = generate_random_sparse(5, 0.3, 1)
    assert np.array_equal(plain_matmul(np.eye(5), a), a)


def test_zero_matmul_exact():
    a = generate_random_sparse(4, 0.0, 2)
    assert np.array_equal(plain_matmul(np.zeros((4, 4)), a), np.zeros((4, 4)))


def test_hand_checked_product():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.array([[5.0, 6.0], [7.0, 8.0]])
    assert np.array_equal(plain_matmul(a, b),
                          np.array([[19.0, 22.0], [43.0, 50.0]]))


def test_matmul_dim_mismatch():
    with pytest.raises(ParameterError):
        plain_matmul(np.eye(2), np.eye(3))


def test_frobenius_zero_iff_equal():
    a = generate_random_sparse(4, 0.2, 3)
    assert frobenius_error(a, a) == 0.0


def test_frobenius_single_entry():
    a = np.zeros((3, 3))
    b = np.zeros((3, 3))
    b[1, 2] = 3.0
    assert frobenius_error(a, b) == 3.0


def test_frobenius_symmetric():
    a = generate_random_sparse(4, 0.1, 4)
    b = generate_random_sparse(4, 0.1, 5)
    assert frobenius_error(a, b) == frobenius_error(b, a)


# ----------------------------------------------------------- predictors

def test_dense_inputs_give_cubic_pairs():
    a = generate_random_sparse(4, 0.0, 1)
    b = generate_random_sparse(4, 0.0, 2)
    for m in MatmulMethod:
        assert predicted_op_counts(a, b, m).matching_pairs == 64


def test_empty_inputs_give_zero_counts():
    z = np.zeros((4, 4))
    for m in (MatmulMethod.CSR_C, MatmulMethod.VCSR_C, MatmulMethod.NAIVE_SPARSE):
        pred = predicted_op_counts(z, z, m)
        assert pred.matching_pairs == 0
        assert pred.alignment_rotations == 0
        assert pred.accumulation_rotations == 0
    assert predicted_op_counts(z, z, MatmulMethod.NAIVE_DENSE).matching_pairs == 64


def test_single_corner_nonzero_matches_once():
    a = np.zeros((3, 3))
    a[0, 0] = 1.0
    pred = predicted_op_counts(a, a.copy(), MatmulMethod.CSR_C)
    assert pred.matching_pairs == 1
    assert pred.k_a == pred.k_b == 1
    assert pred.alignment_rotations == 0
    assert pred.accumulation_rotations == 0


def test_naive_dense_counts_independent_of_sparsity():
    counts = set()
    for s in (0.0, 0.3, 0.7, 1.0):
        a = generate_random_sparse(4, s, 1)
        b = generate_random_sparse(4, s, 2)
        counts.add(predicted_op_counts(a, b, MatmulMethod.NAIVE_DENSE).matching_pairs)
    assert counts == {64}


def test_naive_sparse_skip_variants():
    a = np.zeros((2, 2))
    a[0, 0] = 1.0  # A has one nonzero, B is all zero
    b = np.zeros((2, 2))
    either = predicted_op_counts(a, b, MatmulMethod.NAIVE_SPARSE)
    both = predicted_op_counts(a, b, MatmulMethod.NAIVE_SPARSE,
                               skip_both_zero_only=True)
    assert either.matching_pairs == 0
    # the lone A entry participates in N output cells even though B is zero
    assert both.matching_pairs == 2


def test_csr_equals_vcsr_pair_count():
    a = generate_random_sparse(8, 0.4, 11)
    b = generate_random_sparse(8, 0.6, 12)
    pa = predicted_op_counts(a, b, MatmulMethod.CSR_C)
    pb = predicted_op_counts(a, b, MatmulMethod.VCSR_C)
    assert pa.matching_pairs == pb.matching_pairs


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 8), sa=st.floats(0, 1), sb=st.floats(0, 1),
       seed=st.integers(0, 500))
def test_matching_pairs_equal_intersection_sum(n, sa, sb, seed):
    a = generate_random_sparse(n, sa, (seed, 0))
    b = generate_random_sparse(n, sb, (seed, 1))
    # independent double-check: sum over l of colnnz(A, l) * rownnz(B, l)
    expect = sum(int(np.count_nonzero(a[:, l])) * int(np.count_nonzero(b[l, :]))
                 for l in range(n))
    pred = predicted_op_counts(a, b, MatmulMethod.CSR_C)
    assert pred.matching_pairs == expect
    assert pred.matching_pairs <= min(n * pred.k_a, n * pred.k_b, n ** 3)


# ------------------------------------------------------------------- fit

def test_fit_dense_sweep_recovers_half():
    records = []
    for n in (4, 8, 16):
        k = 2 * n * n
        records.append((n, k, n ** 3))  # dense: pairs = N^3 = N*k/2
    report = complexity_fit(records)
    assert report.bound_ok
    assert abs(report.fitted_c - 0.5) < 1e-12
    assert abs(report.max_ratio - 0.5) < 1e-12


def test_fit_fully_sparse_sweep_trivially_bounded():
    report = complexity_fit([(4, 0, 0), (8, 0, 0), (16, 0, 0)])
    assert report.bound_ok
    assert report.fitted_c == 0.0


def test_fit_random_sweep_within_bound():
    records = []
    for n in (4, 8, 16):
        for seed in range(3):
            a = generate_random_sparse(n, 0.5, (seed, 0))
            b = generate_random_sparse(n, 0.5, (seed, 1))
            pred = predicted_op_counts(a, b, MatmulMethod.CSR_C)
            records.append((n, pred.k, pred.matching_pairs))
    report = complexity_fit(records)
    assert report.bound_ok
    assert 0.0 < report.fitted_c <= 1.0
    assert any(line for line in report.lines())


def test_fit_needs_three_distinct_shapes():
    with pytest.raises(ParameterError, match="insufficient data"):
        complexity_fit([(4, 8, 10), (4, 8, 12)])
