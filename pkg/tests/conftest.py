import numpy as np
import pytest

from hespmm.ckks import CkksContext, build_params

TINY_SEED = 7


@pytest.fixture(scope="session")
def tiny_params():
    # 32 slots: enough for 4x4 matmuls and fast enough for property tests.
    return build_params(ring_degree=64, scale_bits=40, levels=2, seed=TINY_SEED)


@pytest.fixture(scope="session")
def tiny_ctx(tiny_params):
    ctx = CkksContext(tiny_params)
    return ctx, ctx.keygen()


@pytest.fixture(scope="session")
def deep_params():
    # One spare level beyond the two the multiply pipeline consumes.
    return build_params(ring_degree=64, scale_bits=40, levels=3, seed=TINY_SEED)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
