"""Stabilizer-group simulation for measurement-only circuits.

The tableau tracks a generating set of the instantaneous stabilizer group.
Every generator carries an *outcome-dependence* set: the measurement-event
ids whose recorded outcomes multiply to fix that generator's sign.  Ideal
outcomes are normalized to +1, so all noise bookkeeping happens later in
flip space and signs never need to be materialized here.

Measuring a check that is already in the group is deterministic; the event
together with the dependence of the group element forms a parity that is
even in the absence of faults.  Those parities are the decoding detectors.

Logical operators can be adjoined as *protected* generators.  They are never
used as elimination pivots and never dropped, but they absorb stabilizer
factors whenever a measured check anticommutes with them; their dependence
set at the end of a run is exactly the set of logical phase conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import _bits
from .pauli import PauliString


class LogicalMeasurementError(RuntimeError):
    """A measured check acts on the logical algebra (invalid schedule)."""


@dataclass
class MeasureResult:
    deterministic: bool
    #: {event} union dependence of the pre-existing group element (even parity
    #: in the absence of faults); None for nondeterministic outcomes.
    window: Optional[FrozenSet[int]] = None


@dataclass
class LogicalOperator:
    """An instantaneous logical representative with its phase conditions."""

    pauli: PauliString
    phase_conditions: Set[int] = field(default_factory=set)


class _Row:
    __slots__ = ("x", "z", "dep", "protected", "slot")

    def __init__(self, x: np.ndarray, z: np.ndarray, dep: Set[int], protected: bool, slot: int):
        self.x = x
        self.z = z
        self.dep = dep
        self.protected = protected
        self.slot = slot

    def vec(self, n: int) -> np.ndarray:
        out = np.concatenate([self.x, self.z])
        return out

    def weight(self) -> int:
        return int(np.bitwise_count(self.x | self.z).sum())


class _Echelon:
    """Column-echelon index over the current basis rows.

    Each entry is a (vector, mask) pair where the vector is a GF(2)
    combination of basis rows and the mask records which basis slots enter
    the combination.  Pivot columns are exclusive, so reduction of any
    candidate yields its unique decomposition over the basis.
    """

    def __init__(self, words: int):
        self.words = words
        self.pivots: Dict[int, Tuple[np.ndarray, int]] = {}

    def _reduce(self, vec: np.ndarray, mask: int) -> Tuple[np.ndarray, int]:
        while True:
            lead = _bits.first_set_bit(vec)
            if lead < 0:
                return vec, mask
            hit = self.pivots.get(lead)
            if hit is None:
                return vec, mask
            vec = vec ^ hit[0]
            mask ^= hit[1]

    def insert(self, vec: np.ndarray, slot: int) -> None:
        vec, mask = self._reduce(vec.copy(), 1 << slot)
        lead = _bits.first_set_bit(vec)
        if lead < 0:
            raise ValueError("dependent row inserted into tableau")
        # keep pivot columns exclusive
        for piv, (pvec, pmask) in list(self.pivots.items()):
            if _bits.get_bit(pvec, lead):
                self.pivots[piv] = (pvec ^ vec, pmask ^ mask)
        self.pivots[lead] = (vec, mask)

    def remove_slot(self, slot: int) -> None:
        bit = 1 << slot
        carriers = [piv for piv, (_, m) in self.pivots.items() if m & bit]
        if not carriers:
            return
        base_piv = carriers[0]
        base_vec, base_mask = self.pivots.pop(base_piv)
        fixed = []
        for piv in carriers[1:]:
            vec, mask = self.pivots.pop(piv)
            fixed.append((vec ^ base_vec, mask ^ base_mask))
        for vec, mask in fixed:
            self._reinsert(vec, mask)

    def _reinsert(self, vec: np.ndarray, mask: int) -> None:
        vec, mask = self._reduce(vec, mask)
        lead = _bits.first_set_bit(vec)
        if lead < 0:
            if mask:
                raise AssertionError("echelon lost independence")
            return
        for piv, (pvec, pmask) in list(self.pivots.items()):
            if _bits.get_bit(pvec, lead):
                self.pivots[piv] = (pvec ^ vec, pmask ^ mask)
        self.pivots[lead] = (vec, mask)

    def decompose(self, vec: np.ndarray) -> Tuple[np.ndarray, int]:
        """Residue and basis mask after reduction; zero residue means member."""
        return self._reduce(vec.copy(), 0)


class StabilizerTableau:
    """Instantaneous stabilizer group with outcome-dependence tracking."""

    def __init__(self, n_qubits: int):
        self.n = n_qubits
        self.words = _bits.n_words(n_qubits)
        self.rows: Dict[int, _Row] = {}
        self.order: List[int] = []
        self._next_slot = 0
        self._ech = _Echelon(self.words)
        self._mat_dirty = True
        self._mat_x: Optional[np.ndarray] = None
        self._mat_z: Optional[np.ndarray] = None
        self._mat_slots: List[int] = []

    # -- conversions ----------------------------------------------------

    def _pack(self, pauli: PauliString) -> Tuple[np.ndarray, np.ndarray]:
        x = _bits.zeros(self.n)
        z = _bits.zeros(self.n)
        for q, letter in pauli.support.items():
            if q < 0 or q >= self.n:
                raise ValueError(f"qubit {q} outside tableau")
            if letter in ("X", "Y"):
                _bits.set_bit(x, q)
            if letter in ("Z", "Y"):
                _bits.set_bit(z, q)
        return x, z

    def _unpack(self, x: np.ndarray, z: np.ndarray) -> PauliString:
        support = {}
        for q in _bits.iter_set_bits(x):
            support[q] = "X"
        for q in _bits.iter_set_bits(z):
            support[q] = "Y" if q in support else "Z"
        return PauliString(support)

    def _cat(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        return np.concatenate([x, z])

    # -- basic queries ---------------------------------------------------

    @property
    def n_generators(self) -> int:
        return len(self.order)

    def rank(self) -> int:
        return len(self._ech.pivots)

    def generators(self, include_protected: bool = False) -> List[PauliString]:
        out = []
        for slot in self.order:
            row = self.rows[slot]
            if row.protected and not include_protected:
                continue
            out.append(self._unpack(row.x, row.z))
        return out

    def dependence(self, slot: int) -> FrozenSet[int]:
        return frozenset(self.rows[slot].dep)

    def copy(self) -> "StabilizerTableau":
        dup = StabilizerTableau(self.n)
        for slot in self.order:
            row = self.rows[slot]
            dup._append_row(row.x.copy(), row.z.copy(), set(row.dep), row.protected)
        return dup

    # -- internal maintenance ---------------------------------------------

    def _matrix(self) -> Tuple[np.ndarray, np.ndarray, List[int]]:
        if self._mat_dirty:
            slots = list(self.order)
            if slots:
                self._mat_x = np.stack([self.rows[s].x for s in slots])
                self._mat_z = np.stack([self.rows[s].z for s in slots])
            else:
                self._mat_x = np.zeros((0, self.words), dtype=np.uint64)
                self._mat_z = np.zeros((0, self.words), dtype=np.uint64)
            self._mat_slots = slots
            self._mat_dirty = False
        return self._mat_x, self._mat_z, self._mat_slots

    def _append_row(self, x: np.ndarray, z: np.ndarray, dep: Set[int], protected: bool) -> int:
        slot = self._next_slot
        self._next_slot += 1
        row = _Row(x, z, dep, protected, slot)
        self.rows[slot] = row
        self.order.append(slot)
        self._ech.insert(self._cat(x, z), slot)
        self._mat_dirty = True
        return slot

    def _drop_row(self, slot: int) -> None:
        self._ech.remove_slot(slot)
        del self.rows[slot]
        self.order.remove(slot)
        self._mat_dirty = True

    def _anticommuting_slots(self, x: np.ndarray, z: np.ndarray) -> List[int]:
        mat_x, mat_z, slots = self._matrix()
        if not slots:
            return []
        par = np.bitwise_count(mat_x & z).sum(axis=1) + np.bitwise_count(mat_z & x).sum(axis=1)
        hits = np.nonzero(par & 1)[0]
        return [slots[i] for i in hits]

    # -- core operations ---------------------------------------------------

    def adjoin_logical(self, pauli: PauliString) -> int:
        """Add a protected generator (logical representative); returns slot.

        The operator must commute with every stabilizer generator; it may
        anticommute with previously adjoined logicals (symplectic partners).
        """
        x, z = self._pack(pauli)
        anti = self._anticommuting_slots(x, z)
        if any(not self.rows[s].protected for s in anti):
            raise ValueError("logical must commute with the current group")
        residue, _ = self._ech.decompose(self._cat(x, z))
        if _bits.is_zero(residue):
            raise ValueError("operator already in the group; not a logical")
        return self._append_row(x, z, set(), protected=True)

    def measure(self, check: PauliString, event_id: int) -> MeasureResult:
        """Project onto a check operator, tracking outcome dependence."""
        x, z = self._pack(check)
        anti = self._anticommuting_slots(x, z)
        if anti:
            candidates = [s for s in anti if not self.rows[s].protected]
            if not candidates:
                raise LogicalMeasurementError(
                    f"check {check} anticommutes only with protected logicals"
                )
            # eliminate with the freshest, smallest-dependence generator so
            # sign bookkeeping stays local (detector windows stay short)
            pivot_slot = min(
                candidates,
                key=lambda s: (len(self.rows[s].dep), -max(self.rows[s].dep, default=-1)),
            )
            pivot = self.rows[pivot_slot]
            for slot in anti:
                if slot == pivot_slot:
                    continue
                row = self.rows[slot]
                self._ech.remove_slot(slot)
                row.x = row.x ^ pivot.x
                row.z = row.z ^ pivot.z
                row.dep ^= pivot.dep
                self._ech.insert(self._cat(row.x, row.z), slot)
            self._drop_row(pivot_slot)
            self._append_row(x, z, {event_id}, protected=False)
            return MeasureResult(deterministic=False)

        residue, mask = self._ech.decompose(self._cat(x, z))
        if not _bits.is_zero(residue):
            # fresh commuting stabilizer (initialization transient), unless the
            # residue lies in the span including logicals
            self._append_row(x, z, {event_id}, protected=False)
            return MeasureResult(deterministic=False)

        used = [self.rows[s] for s in _iter_mask(mask)]
        if any(r.protected for r in used):
            raise LogicalMeasurementError(
                f"deterministic check {check} involves a protected logical"
            )
        window: Set[int] = {event_id}
        for r in used:
            window ^= r.dep
        # refresh: retire the stalest used generator in favor of the fresh check
        stalest = min(used, key=lambda r: (max(r.dep, default=-1), r.slot))
        self._drop_row(stalest.slot)
        self._append_row(x, z, {event_id}, protected=False)
        return MeasureResult(deterministic=True, window=frozenset(window))

    # -- analysis -----------------------------------------------------------

    def stabilizer_matrix(self) -> np.ndarray:
        """Dense GF(2) matrix of non-protected generators, shape (R, 2n)."""
        rows = []
        for slot in self.order:
            row = self.rows[slot]
            if row.protected:
                continue
            rows.append(_unpack_dense(row.x, row.z, self.n))
        if not rows:
            return np.zeros((0, 2 * self.n), dtype=np.uint8)
        return np.array(rows, dtype=np.uint8)

    def elements_supported_on(self, qubits: Sequence[int]) -> List[PauliString]:
        """Non-identity group elements supported entirely within ``qubits``.

        Exponential in the subgroup dimension; meant for small restrictions
        such as the three-qubit corner analysis.
        """
        qset = set(qubits)
        mat = self.stabilizer_matrix()
        if mat.shape[0] == 0:
            return []
        outside = [q for q in range(self.n) if q not in qset]
        cols = [q for q in outside] + [self.n + q for q in outside]
        sub = mat[:, cols]
        kernel = gf2_kernel_of_rows(sub.T)  # row combinations vanishing outside
        elements = []
        seen = set()
        for combo in _span(kernel):
            if not combo.any():
                continue
            vec = (combo @ mat) % 2
            p = _dense_to_pauli(vec, self.n)
            if p.support and p.key() not in seen:
                seen.add(p.key())
                elements.append(p)
        return elements

    def logical_representatives(self) -> List[PauliString]:
        """Normalizer of the group modulo the group, symplectically paired.

        Returns ``2k`` operators ordered as (X1, Z1, X2, Z2, ...) where pairs
        anticommute and operators of distinct pairs commute.  Representatives
        are greedily weight-reduced, then deterministic.
        """
        mat = self.stabilizer_matrix()
        n = self.n
        r = mat.shape[0]
        if gf2_rank(mat) != r:
            raise ValueError("dependent generators; rank check failed")
        # commutation: u commutes with v iff <u, Lambda v> = 0
        lam = np.concatenate([mat[:, n:], mat[:, :n]], axis=1)
        kernel = gf2_kernel_of_rows(lam)  # vectors u with lam @ u = 0
        # quotient by the stabilizer rows
        ech, _ = gf2_echelon(mat)
        reps = []
        basis = list(ech)
        for vec in kernel:
            red = gf2_reduce(vec, basis)
            if red.any():
                reps.append(red)
                basis.append(red)
        pairs = _symplectic_pairs(reps, n)
        out = []
        stab_rows = list(ech)
        for a, b in pairs:
            out.append(_dense_to_pauli(_greedy_reduce_weight(a, stab_rows), n))
            out.append(_dense_to_pauli(_greedy_reduce_weight(b, stab_rows), n))
        return out


def _iter_mask(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _unpack_dense(x: np.ndarray, z: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(2 * n, dtype=np.uint8)
    for q in _bits.iter_set_bits(x):
        out[q] = 1
    for q in _bits.iter_set_bits(z):
        out[n + q] = 1
    return out


def _dense_to_pauli(vec: np.ndarray, n: int) -> PauliString:
    support = {}
    for q in range(n):
        xb, zb = vec[q], vec[n + q]
        if xb and zb:
            support[q] = "Y"
        elif xb:
            support[q] = "X"
        elif zb:
            support[q] = "Z"
    return PauliString(support)


def gf2_echelon(mat: np.ndarray) -> Tuple[List[np.ndarray], List[int]]:
    """Row echelon basis (list of row vectors) and pivot columns."""
    rows: List[np.ndarray] = []
    pivots: List[int] = []
    for row in mat:
        red = gf2_reduce(row.copy(), rows, pivots)
        nz = np.nonzero(red)[0]
        if nz.size:
            rows.append(red)
            pivots.append(int(nz[0]))
    return rows, pivots


def gf2_reduce(vec: np.ndarray, rows: List[np.ndarray], pivots: Optional[List[int]] = None) -> np.ndarray:
    vec = vec.copy() % 2
    if pivots is None:
        pivots = [int(np.nonzero(r)[0][0]) for r in rows]
    changed = True
    while changed:
        changed = False
        for row, piv in zip(rows, pivots):
            if vec[piv]:
                vec ^= row
                changed = True
    return vec


def gf2_rank(mat: np.ndarray) -> int:
    rows, _ = gf2_echelon(mat)
    return len(rows)


def gf2_kernel_of_rows(mat: np.ndarray) -> List[np.ndarray]:
    """Basis of {u: mat @ u = 0 (mod 2)} for mat of shape (m, c)."""
    m, c = mat.shape
    aug = np.concatenate([mat.T % 2, np.eye(c, dtype=np.uint8)], axis=1)
    rows, _ = gf2_echelon(aug)
    kernel = []
    for row in rows:
        if not row[:m].any():
            kernel.append(row[m:].copy())
    # also columns never touched (zero rows of mat.T reduced away entirely)
    return kernel


def _span(basis: List[np.ndarray]):
    k = len(basis)
    if k == 0:
        return
    if k > 20:
        raise ValueError("subgroup too large to enumerate")
    arr = np.array(basis, dtype=np.uint8)
    for mask in range(1 << k):
        combo = np.zeros(arr.shape[1], dtype=np.uint8)
        mm = mask
        i = 0
        while mm:
            if mm & 1:
                combo ^= arr[i]
            mm >>= 1
            i += 1
        yield combo


def _symplectic_product_dense(a: np.ndarray, b: np.ndarray, n: int) -> int:
    return int((a[:n] @ b[n:] + a[n:] @ b[:n]) % 2)


def _symplectic_pairs(reps: List[np.ndarray], n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    reps = [r.copy() for r in reps]
    pairs = []
    while reps:
        a = reps.pop(0)
        partner = None
        for i, b in enumerate(reps):
            if _symplectic_product_dense(a, b, n):
                partner = reps.pop(i)
                break
        if partner is None:
            raise ValueError("unpaired logical representative; not symplectic")
        cleaned = []
        for u in reps:
            if _symplectic_product_dense(u, partner, n):
                u = (u + a) % 2
            if _symplectic_product_dense(u, a, n):
                u = (u + partner) % 2
            cleaned.append(u.astype(np.uint8))
        reps = cleaned
        pairs.append((a, partner))
    return pairs


def _greedy_reduce_weight(vec: np.ndarray, stab_rows: List[np.ndarray]) -> np.ndarray:
    def wt(v):
        n = v.shape[0] // 2
        return int(np.count_nonzero(v[:n] | v[n:]))

    best = vec.copy()
    improved = True
    while improved:
        improved = False
        for row in stab_rows:
            cand = best ^ row
            if wt(cand) < wt(best):
                best = cand
                improved = True
    return best


# -- spec-level convenience wrappers ------------------------------------------


def measure_check(tableau: StabilizerTableau, check: PauliString, event_id: int):
    """Project ``tableau`` onto ``check``; returns (tableau, deterministic)."""
    result = tableau.measure(check, event_id)
    return tableau, result.deterministic


def logical_operators(tableau: StabilizerTableau, n_qubits: int) -> List[LogicalOperator]:
    if n_qubits != tableau.n:
        raise ValueError("qubit count mismatch")
    reps = tableau.logical_representatives()
    return [LogicalOperator(p, set()) for p in reps]


def advance_logical(
    logical: LogicalOperator,
    tableau_before: StabilizerTableau,
    check: PauliString,
    event_id: int,
) -> LogicalOperator:
    """Multiply ``logical`` into commutation with ``check`` using a stabilizer.

    The stabilizer factor's outcome dependence is merged into the logical's
    phase conditions, mirroring the sign bookkeeping of the tableau run.
    """
    if check.commutes_with(logical.pauli):
        return logical
    x, z = tableau_before._pack(check)
    anti = tableau_before._anticommuting_slots(x, z)
    candidates = [s for s in anti if not tableau_before.rows[s].protected]
    if not candidates:
        raise LogicalMeasurementError(
            "no stabilizer anticommutes with the check; operator was not logical"
        )
    slot = candidates[0]
    row = tableau_before.rows[slot]
    factor = tableau_before._unpack(row.x, row.z)
    new_pauli = logical.pauli * factor
    return LogicalOperator(new_pauli, set(logical.phase_conditions) ^ set(row.dep))
