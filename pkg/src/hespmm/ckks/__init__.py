"""Desk-scale leveled CKKS: parameters, keys, and evaluation primitives."""

from .context import CkksContext, keygen
from .params import CkksParams, build_params, default_params
from .types import Ciphertext, KeyBundle, KeySwitchKey, Plaintext
from . import serial

__all__ = [
    "CkksContext",
    "CkksParams",
    "Ciphertext",
    "KeyBundle",
    "KeySwitchKey",
    "Plaintext",
    "build_params",
    "default_params",
    "keygen",
    "serial",
]
