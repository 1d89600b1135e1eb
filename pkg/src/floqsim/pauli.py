"""Sparse Pauli operators with sign tracking.

A :class:`PauliString` stores only its non-identity single-qubit letters and a
real sign.  Products of commuting Hermitian Paulis stay Hermitian, so a sign
in {+1, -1} is sufficient for all stabilizer bookkeeping here; multiplying
anticommuting strings raises instead of silently dropping an imaginary phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Tuple

# i-exponent of the product of two single-qubit letters: left * right = i^k * result
_LETTERS = ("I", "X", "Y", "Z")

# table[(a, b)] = (result_letter, i_exponent mod 4)
_PROD: Dict[Tuple[str, str], Tuple[str, int]] = {}
for _a in _LETTERS:
    _PROD[("I", _a)] = (_a, 0)
    _PROD[(_a, "I")] = (_a, 0)
    _PROD[(_a, _a)] = ("I", 0)
_PROD[("X", "Y")] = ("Z", 1)
_PROD[("Y", "X")] = ("Z", 3)
_PROD[("Y", "Z")] = ("X", 1)
_PROD[("Z", "Y")] = ("X", 3)
_PROD[("Z", "X")] = ("Y", 1)
_PROD[("X", "Z")] = ("Y", 3)


@dataclass
class PauliString:
    """A Hermitian Pauli operator: qubit -> letter map plus a +/-1 sign.

    Identity letters are never stored in ``support``.
    """

    support: Dict[int, str] = field(default_factory=dict)
    phase: int = 1

    def __post_init__(self) -> None:
        for q, letter in self.support.items():
            if letter not in ("X", "Y", "Z"):
                raise ValueError(f"invalid Pauli letter {letter!r} on qubit {q}")
        if self.phase not in (1, -1):
            raise ValueError("phase must be +1 or -1")

    @property
    def weight(self) -> int:
        return len(self.support)

    def commutes_with(self, other: "PauliString") -> bool:
        """True iff the number of anticommuting letter pairs is even."""
        clashes = 0
        small, big = self.support, other.support
        if len(big) < len(small):
            small, big = big, small
        for q, a in small.items():
            b = big.get(q)
            if b is not None and b != a:
                clashes ^= 1
        return clashes == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        support = dict(self.support)
        i_exp = 0
        for q, b in other.support.items():
            a = support.pop(q, "I")
            res, k = _PROD[(a, b)]
            i_exp = (i_exp + k) % 4
            if res != "I":
                support[q] = res
        if i_exp % 2:
            raise ValueError("product of anticommuting Paulis is not Hermitian")
        sign = self.phase * other.phase * (1 if i_exp == 0 else -1)
        return PauliString(support, sign)

    def restricted(self, qubits: Iterable[int]) -> "PauliString":
        keep = set(qubits)
        return PauliString({q: l for q, l in self.support.items() if q in keep}, self.phase)

    def key(self) -> Tuple[Tuple[int, str], ...]:
        """Phase-free canonical key (sorted support)."""
        return tuple(sorted(self.support.items()))

    def __str__(self) -> str:
        if not self.support:
            body = "I"
        else:
            body = " ".join(f"{l}{q}" for q, l in sorted(self.support.items()))
        return ("-" if self.phase < 0 else "") + body

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, str]], phase: int = 1) -> "PauliString":
        support = {}
        for q, letter in pairs:
            if letter != "I":
                support[q] = letter
        return cls(support, phase)


def two_qubit(q1: int, l1: str, q2: int, l2: str) -> PauliString:
    """Weight-<=2 Pauli used for check operators; 'I' letters are dropped."""
    return PauliString.from_pairs([(q1, l1), (q2, l2)])
