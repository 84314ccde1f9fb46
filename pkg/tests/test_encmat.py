"""Packing into ciphertexts, metadata purity, and rotation-step prediction."""

import numpy as np
import pytest

from hespmm import formats
from hespmm.encmat import (EncryptedResult, Layout, decrypt_result,
                           encrypt_sparse, meta_and_values, pair_schedule,
                           required_rotation_steps)
from hespmm.errors import CapacityError, ParameterError


def test_all_zero_matrix_packs_zero_slots(tiny_ctx):
    ctx, keys = tiny_ctx
    enc = encrypt_sparse(np.zeros((3, 3)), Layout.CSR, ctx, keys)
    assert enc.meta.nnz == 0
    slots = ctx.decode(ctx.decrypt(enc.ctxt, keys))
    assert np.max(np.abs(slots)) < 1e-7


def test_identity_packs_ones_then_padding(tiny_ctx):
    ctx, keys = tiny_ctx
    enc = encrypt_sparse(np.eye(2), Layout.CSR, ctx, keys)
    slots = ctx.decode(ctx.decrypt(enc.ctxt, keys))
    assert np.max(np.abs(slots[:2] - 1.0)) < 1e-6
    assert np.max(np.abs(slots[2:])) < 1e-7


def test_packed_slots_match_format_values(tiny_ctx):
    ctx, keys = tiny_ctx
    m = formats.generate_random_sparse(4, 0.5, 42)
    for layout, conv in [
        (Layout.CSR, lambda x: formats.dense_to_csr(x).values),
        (Layout.CSC, lambda x: formats.dense_to_csc(x).values),
        (Layout.VCSR, lambda x: formats.dense_to_vcsr(x).values),
        (Layout.VCSC, lambda x: formats.dense_to_vcsc(x).values),
    ]:
        enc = encrypt_sparse(m, layout, ctx, keys)
        vals = conv(m)
        slots = ctx.decode(ctx.decrypt(enc.ctxt, keys))
        assert np.max(np.abs(slots[: len(vals)] - vals)) < 1e-8, layout


def test_dense_layouts_pack_every_entry(tiny_ctx):
    ctx, keys = tiny_ctx
    m = formats.generate_random_sparse(4, 0.5, 7)
    enc_r = encrypt_sparse(m, Layout.DENSE_ROW_MAJOR, ctx, keys)
    slots = ctx.decode(ctx.decrypt(enc_r.ctxt, keys))
    assert np.max(np.abs(slots[:16] - m.reshape(-1))) < 1e-8
    enc_c = encrypt_sparse(m, Layout.DENSE_COL_MAJOR, ctx, keys)
    slots = ctx.decode(ctx.decrypt(enc_c.ctxt, keys))
    assert np.max(np.abs(slots[:16] - m.T.reshape(-1))) < 1e-8
    assert enc_r.meta.nnz == int(np.count_nonzero(m))


def test_capacity_error(tiny_ctx):
    ctx, keys = tiny_ctx
    big = formats.generate_random_sparse(8, 0.0, 1)  # 64 > 32 slots
    with pytest.raises(CapacityError):
        encrypt_sparse(big, Layout.DENSE_ROW_MAJOR, ctx, keys)


def test_metadata_purity_matches_plaintext_conversion(tiny_ctx):
    ctx, keys = tiny_ctx
    m = formats.generate_random_sparse(4, 0.4, 9)
    for layout in (Layout.CSR, Layout.CSC, Layout.VCSR, Layout.VCSC,
                   Layout.DENSE_ROW_MAJOR, Layout.DENSE_COL_MAJOR):
        enc = encrypt_sparse(m, layout, ctx, keys)
        meta, _ = meta_and_values(m, layout)
        assert enc.meta == meta
        # byte-identical structural arrays
        for field in ("offsets", "indices", "entry_rows", "entry_cols"):
            a = getattr(enc.meta, field)
            b = getattr(meta, field)
            if a is not None:
                assert a.tobytes() == b.tobytes()


def test_decrypt_result_reads_row_major(tiny_ctx):
    ctx, keys = tiny_ctx
    want = np.arange(0.25, 4.25, 0.25).reshape(4, 4) / 4.0
    pt = ctx.encode(want.reshape(-1))
    res = EncryptedResult(ctxt=ctx.encrypt(pt, keys), dim=4)
    got = decrypt_result(res, ctx, keys)
    assert np.max(np.abs(got - want)) < 1e-7


def test_decrypt_result_empty_accumulator_is_exact_zero(tiny_ctx):
    ctx, keys = tiny_ctx
    out = decrypt_result(EncryptedResult(ctxt=None, dim=5), ctx, keys)
    assert out.shape == (5, 5)
    assert np.all(out == 0.0)


# --------------------------------------------------------- rotation steps

def _metas(a, b, la=Layout.CSR, lb=Layout.CSC):
    return meta_and_values(a, la)[0], meta_and_values(b, lb)[0]


def test_steps_empty_for_empty_matrices():
    ma, mb = _metas(np.zeros((3, 3)), np.zeros((3, 3)))
    assert required_rotation_steps(ma, mb) == set()


def test_steps_empty_for_single_corner_pair():
    a = np.zeros((3, 3))
    a[0, 0] = 1.0
    ma, mb = _metas(a, a.copy())
    # one pair at positions (0, 0) targeting slot 0: nothing rotates
    assert required_rotation_steps(ma, mb) == set()


def test_steps_cover_engine_dry_run():
    a = formats.generate_random_sparse(8, 0.5, 4)
    b = formats.generate_random_sparse(8, 0.5, 5)
    for la, lb, skip in [
        (Layout.CSR, Layout.CSC, None),
        (Layout.VCSR, Layout.VCSC, None),
        (Layout.DENSE_ROW_MAJOR, Layout.DENSE_COL_MAJOR, None),
        (Layout.DENSE_ROW_MAJOR, Layout.DENSE_COL_MAJOR, "either"),
    ]:
        ma, _ = meta_and_values(a, la)
        mb, _ = meta_and_values(b, lb)
        steps = required_rotation_steps(ma, mb, skip=skip)
        requested = set()
        n = 8
        for i, j, ap, bp in pair_schedule(ma, mb, skip=skip):
            if ap != bp:
                requested.add(abs(ap - bp))
            rot = min(ap, bp) - (i * n + j)
            if rot:
                requested.add(rot)
        assert requested == steps
        assert 0 not in steps


def test_pair_schedule_rejects_layout_mismatch(tiny_ctx):
    a = np.eye(2)
    ma, _ = meta_and_values(a, Layout.CSR)
    mb, _ = meta_and_values(a, Layout.CSR)
    with pytest.raises(ParameterError, match="unsupported layout pair"):
        list(pair_schedule(ma, mb))


def test_pair_schedule_rejects_dim_mismatch():
    ma, _ = meta_and_values(np.eye(2), Layout.CSR)
    mb, _ = meta_and_values(np.eye(3), Layout.CSC)
    with pytest.raises(ParameterError, match="dimensions"):
        list(pair_schedule(ma, mb))


def test_csr_schedule_matches_hand_trace():
    # A row 0 holds entries at cols {0, 2}; B col 0 holds rows {0, 2}.
    a = np.zeros((3, 3))
    a[0, 0], a[0, 2] = 1.0, 2.0
    b = np.zeros((3, 3))
    b[0, 0], b[2, 0] = 3.0, 4.0
    ma, mb = _metas(a, b)
    pairs = list(pair_schedule(ma, mb))
    assert pairs == [(0, 0, 0, 0), (0, 0, 1, 1)]
