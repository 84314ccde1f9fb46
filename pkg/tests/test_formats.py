"""Sparse layout conversions, random generation, and matrix file I/O."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hespmm import formats
from hespmm.errors import ParameterError


def test_csr_identity_example():
    sp = formats.dense_to_csr(np.eye(2))
    assert sp.row_offsets.tolist() == [0, 1, 2]
    assert sp.col_indices.tolist() == [0, 1]
    assert sp.values.tolist() == [1.0, 1.0]


def test_all_zero_matrix():
    sp = formats.dense_to_csr(np.zeros((3, 3)))
    assert sp.row_offsets.tolist() == [0, 0, 0, 0]
    assert sp.nnz == 0
    assert np.array_equal(formats.csr_to_dense(sp), np.zeros((3, 3)))


def test_roundtrip_random_8x8():
    m = formats.generate_random_sparse(8, 0.5, 42)
    assert np.array_equal(formats.csr_to_dense(formats.dense_to_csr(m)), m)
    assert np.array_equal(formats.csc_to_dense(formats.dense_to_csc(m)), m)
    assert np.array_equal(formats.vcsr_to_dense(formats.dense_to_vcsr(m)), m)
    assert np.array_equal(formats.vcsc_to_dense(formats.dense_to_vcsc(m)), m)


def test_vcsr_4x4_slice_2_roundtrip():
    m = np.arange(1.0, 17.0).reshape(4, 4)
    sp = formats.dense_to_vcsr(m, slice_height=2)
    assert sp.slice_offsets.tolist() == [0, 8, 16]
    assert np.array_equal(formats.vcsr_to_dense(sp), m)


def test_vcsr_slice_order_is_column_major_within_slice():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    sp = formats.dense_to_vcsr(m, slice_height=2)
    assert sp.entry_cols.tolist() == [0, 0, 1, 1]
    assert sp.entry_rows.tolist() == [0, 1, 0, 1]
    assert sp.values.tolist() == [1.0, 3.0, 2.0, 4.0]


def test_vcsc_slice_order_is_row_major_within_slice():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    sp = formats.dense_to_vcsc(m, slice_height=2)
    assert sp.entry_rows.tolist() == [0, 0, 1, 1]
    assert sp.values.tolist() == [1.0, 2.0, 3.0, 4.0]


def test_vcsr_rejects_nondividing_slice():
    with pytest.raises(ParameterError):
        formats.dense_to_vcsr(np.eye(4), slice_height=3)


def test_malformed_offsets_rejected():
    sp = formats.dense_to_csr(np.eye(3))
    bad = formats.CsrMatrix(dim=3,
                            row_offsets=np.array([0, 2, 1, 3]),
                            col_indices=sp.col_indices, values=sp.values)
    with pytest.raises(ValueError, match="non-decreasing"):
        formats.csr_to_dense(bad)


def test_stored_zero_rejected():
    bad = formats.CsrMatrix(dim=2, row_offsets=np.array([0, 1, 1]),
                            col_indices=np.array([0]),
                            values=np.array([0.0]))
    with pytest.raises(ValueError, match="nonzero"):
        formats.csr_to_dense(bad)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), sparsity=st.floats(0.0, 1.0), seed=st.integers(0, 999))
def test_format_equivalence_property(n, sparsity, seed):
    m = formats.generate_random_sparse(n, sparsity, seed)
    g = formats.default_slice_height(n)
    views = [
        formats.csr_to_dense(formats.dense_to_csr(m)),
        formats.csc_to_dense(formats.dense_to_csc(m)),
        formats.vcsr_to_dense(formats.dense_to_vcsr(m, g)),
        formats.vcsc_to_dense(formats.dense_to_vcsc(m, g)),
    ]
    for view in views:
        assert np.array_equal(view, m)
    ks = {formats.dense_to_csr(m).nnz, formats.dense_to_csc(m).nnz,
          formats.dense_to_vcsr(m, g).nnz, formats.dense_to_vcsc(m, g).nnz}
    assert ks == {int(np.count_nonzero(m))}


# ------------------------------------------------------------- random gen

def test_full_sparsity_is_all_zero():
    m = formats.generate_random_sparse(8, 1.0, 3)
    assert np.all(m == 0.0)


def test_zero_sparsity_has_no_zeros():
    m = formats.generate_random_sparse(8, 0.0, 3)
    assert np.all(m != 0.0)


def test_half_sparsity_exact_zero_count():
    m = formats.generate_random_sparse(8, 0.5, 3)
    assert int(np.sum(m == 0.0)) == 32


def test_round_half_up():
    assert formats.zero_count(3, 0.5) == 5  # 4.5 rounds up
    assert formats.zero_count(8, 0.5) == 32


def test_generation_deterministic():
    a = formats.generate_random_sparse(6, 0.3, 99)
    b = formats.generate_random_sparse(6, 0.3, 99)
    assert np.array_equal(a, b)


def test_sparsity_out_of_range():
    with pytest.raises(ParameterError):
        formats.generate_random_sparse(4, 1.5, 0)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 10), sparsity=st.floats(0.0, 1.0), seed=st.integers(0, 999))
def test_zero_count_property(n, sparsity, seed):
    m = formats.generate_random_sparse(n, sparsity, seed)
    assert int(np.sum(m == 0.0)) == formats.zero_count(n, sparsity)


# ---------------------------------------------------------------- file I/O

def test_matrix_market_roundtrip(tmp_path):
    m = formats.generate_random_sparse(6, 0.4, 17)
    path = tmp_path / "m.mtx"
    formats.write_matrix_market(path, m)
    header = path.read_text().splitlines()[0]
    assert header == "%%MatrixMarket matrix coordinate real general"
    assert np.array_equal(formats.read_matrix_market(path), m)


def test_matrix_market_empty_matrix(tmp_path):
    path = tmp_path / "z.mtx"
    formats.write_matrix_market(path, np.zeros((4, 4)))
    lines = path.read_text().splitlines()
    assert lines[1] == "4 4 0"
    assert len(lines) == 2
    assert np.array_equal(formats.read_matrix_market(path), np.zeros((4, 4)))


def test_dense_csv_reader(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1.0,2.0\n3.5,-4.0\n")
    got = formats.read_dense_csv(path)
    assert np.array_equal(got, np.array([[1.0, 2.0], [3.5, -4.0]]))


def test_dense_csv_rejects_nonsquare(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("1.0,2.0,3.0\n4.0,5.0,6.0\n")
    with pytest.raises(ParameterError):
        formats.read_dense_csv(path)
