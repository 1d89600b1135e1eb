"""Packed GF(2) bit-vector helpers shared by the tableau and detector code.

Vectors are numpy uint64 arrays of fixed word count; qubit/event k lives in
word k >> 6, bit k & 63.
"""

from __future__ import annotations

import numpy as np


def n_words(n_bits: int) -> int:
    return max(1, (n_bits + 63) >> 6)


def zeros(n_bits: int) -> np.ndarray:
    return np.zeros(n_words(n_bits), dtype=np.uint64)


def get_bit(vec: np.ndarray, k: int) -> int:
    return int(vec[k >> 6] >> np.uint64(k & 63)) & 1


def set_bit(vec: np.ndarray, k: int, value: int = 1) -> None:
    mask = np.uint64(1) << np.uint64(k & 63)
    if value:
        vec[k >> 6] |= mask
    else:
        vec[k >> 6] &= ~mask


def flip_bit(vec: np.ndarray, k: int) -> None:
    vec[k >> 6] ^= np.uint64(1) << np.uint64(k & 63)


def parity_and(a: np.ndarray, b: np.ndarray) -> int:
    """Parity of popcount(a & b)."""
    acc = np.bitwise_and(a, b)
    folded = np.bitwise_xor.reduce(acc)
    x = int(folded)
    x ^= x >> 32
    x ^= x >> 16
    x ^= x >> 8
    x ^= x >> 4
    x ^= x >> 2
    x ^= x >> 1
    return x & 1


def is_zero(a: np.ndarray) -> bool:
    return not a.any()


def first_set_bit(a: np.ndarray) -> int:
    """Index of the lowest set bit, or -1 if the vector is zero."""
    for w, word in enumerate(a):
        word = int(word)
        if word:
            return (w << 6) + (word & -word).bit_length() - 1
    return -1


def iter_set_bits(a: np.ndarray):
    for w, word in enumerate(a):
        word = int(word)
        base = w << 6
        while word:
            low = word & -word
            yield base + low.bit_length() - 1
            word ^= low
