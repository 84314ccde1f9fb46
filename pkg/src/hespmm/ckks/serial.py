"""Binary container for parameters and key bundles.

Self-describing layout: magic bytes, a format version, then little-endian
integers and raw little-endian uint64 limb data. Roundtrips bit-exactly so
benchmark runs can reuse one key bundle across processes.
"""

import struct

import numpy as np

from .params import CkksParams
from .types import KeyBundle, KeySwitchKey

MAGIC = b"HESP"
VERSION = 1


def _write_arr(out: list, arr: np.ndarray) -> None:
    data = np.ascontiguousarray(arr, dtype="<u8").tobytes()
    out.append(struct.pack("<I", len(data)))
    out.append(data)


def _read_arr(buf: memoryview, off: int):
    (size,) = struct.unpack_from("<I", buf, off)
    off += 4
    arr = np.frombuffer(buf[off : off + size], dtype="<u8").astype(np.uint64)
    return arr, off + size


def _write_poly(out: list, limbs) -> None:
    out.append(struct.pack("<I", len(limbs)))
    for limb in limbs:
        _write_arr(out, limb)


def _read_poly(buf: memoryview, off: int):
    (count,) = struct.unpack_from("<I", buf, off)
    off += 4
    limbs = []
    for _ in range(count):
        limb, off = _read_arr(buf, off)
        limbs.append(limb)
    return tuple(limbs), off


def _write_ksk(out: list, ksk: KeySwitchKey) -> None:
    out.append(struct.pack("<I", len(ksk.b)))
    for digit_b, digit_a in zip(ksk.b, ksk.a):
        _write_poly(out, digit_b)
        _write_poly(out, digit_a)


def _read_ksk(buf: memoryview, off: int):
    (digits,) = struct.unpack_from("<I", buf, off)
    off += 4
    bs, as_ = [], []
    for _ in range(digits):
        b, off = _read_poly(buf, off)
        a, off = _read_poly(buf, off)
        bs.append(b)
        as_.append(a)
    return KeySwitchKey(b=tuple(bs), a=tuple(as_)), off


def dumps(params: CkksParams, keys: KeyBundle | None = None) -> bytes:
    out: list[bytes] = [MAGIC, struct.pack("<HH", VERSION, 1 if keys else 0)]
    out.append(struct.pack(
        "<QII", params.ring_degree, params.scale_bits, len(params.modulus_chain)))
    for q in params.modulus_chain:
        out.append(struct.pack("<Q", q))
    out.append(struct.pack("<Qq", params.aux_prime, params.seed))
    if keys is not None:
        out.append(keys.secret.astype("<i1").tobytes())
        _write_poly(out, keys.public[0])
        _write_poly(out, keys.public[1])
        _write_ksk(out, keys.relin)
        out.append(struct.pack("<I", len(keys.galois)))
        for step in sorted(keys.galois):
            out.append(struct.pack("<I", step))
            _write_ksk(out, keys.galois[step])
    return b"".join(out)


def loads(data: bytes):
    """Inverse of :func:`dumps`; returns ``(params, keys_or_None)``."""
    buf = memoryview(data)
    if bytes(buf[:4]) != MAGIC:
        raise ValueError("not a hespmm key container (bad magic)")
    version, has_keys = struct.unpack_from("<HH", buf, 4)
    if version != VERSION:
        raise ValueError(f"unsupported container version {version}")
    off = 8
    ring_degree, scale_bits, chain_len = struct.unpack_from("<QII", buf, off)
    off += 16
    chain = []
    for _ in range(chain_len):
        (q,) = struct.unpack_from("<Q", buf, off)
        chain.append(q)
        off += 8
    aux, seed = struct.unpack_from("<Qq", buf, off)
    off += 16
    params = CkksParams(ring_degree=int(ring_degree), modulus_chain=tuple(chain),
                        scale_bits=int(scale_bits), aux_prime=int(aux),
                        seed=int(seed))
    if not has_keys:
        return params, None
    n = params.ring_degree
    secret = np.frombuffer(buf[off : off + n], dtype="<i1").astype(np.int8)
    off += n
    pub_b, off = _read_poly(buf, off)
    pub_a, off = _read_poly(buf, off)
    relin, off = _read_ksk(buf, off)
    (n_galois,) = struct.unpack_from("<I", buf, off)
    off += 4
    galois = {}
    for _ in range(n_galois):
        (step,) = struct.unpack_from("<I", buf, off)
        off += 4
        galois[step], off = _read_ksk(buf, off)
    keys = KeyBundle(secret=secret, public=(pub_b, pub_a), relin=relin,
                     galois=galois)
    return params, keys


def save(path, params: CkksParams, keys: KeyBundle | None = None) -> None:
    with open(path, "wb") as fh:
        fh.write(dumps(params, keys))


def load(path):
    with open(path, "rb") as fh:
        return loads(fh.read())
