"""Space-time detector graphs compiled from a patch and experiment window.

The ideal schedule is simulated once with the stabilizer tableau.  Every
deterministic measurement yields a parity relation (its event plus the
outcome dependence of the projected group element); those relations are the
detectors.  Logical representatives are adjoined after the ideal prefix, so
their final outcome-dependence sets are exactly the logical phase
conditions.

Decoding edges are then derived by exhaustive enumeration of all elementary
EM3 faults: a fault's flipped outcomes follow from pure anticommutation (a
Pauli frame never changes under measurements; it only flips outcomes of
anticommuting checks), so each (event, outcome) maps to a set of flagged
detectors and a logical-flip bit per tracked logical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np

from .builder import CodePatch
from .pauli import PauliString
from .tableau import StabilizerTableau

BOUNDARY = -1

# EM3 outcome table: indices 0..30 for {P1 x P2 x F} minus {I x I x 0}
_PAULIS = ("I", "X", "Y", "Z")
EM3_OUTCOMES: Tuple[Tuple[str, str, int], ...] = tuple(
    (p1, p2, f)
    for p1 in _PAULIS
    for p2 in _PAULIS
    for f in (0, 1)
    if not (p1 == "I" and p2 == "I" and f == 0)
)
assert len(EM3_OUTCOMES) == 31


@dataclass(frozen=True)
class Event:
    index: int
    round: int
    step: int
    check: int  # index into patch.checks


@dataclass
class ExperimentWindow:
    """Measurement events: ideal prefix, noisy body, ideal suffix."""

    patch: CodePatch
    n_prefix: int
    n_noisy: int
    n_suffix: int
    events: List[Event] = field(default_factory=list)

    @property
    def n_rounds(self) -> int:
        return self.n_prefix + self.n_noisy + self.n_suffix

    @property
    def noisy_events(self) -> List[Event]:
        lo = self.n_prefix
        hi = self.n_prefix + self.n_noisy
        return [e for e in self.events if lo <= e.round < hi]


def experiment_window(patch: CodePatch, n_prefix: int = 2, n_suffix: int = 2,
                      n_noisy: Optional[int] = None) -> ExperimentWindow:
    """d/2 noisy rounds (rounded up) flanked by ideal rounds of the schedule."""
    if n_noisy is None:
        d = patch.effective_distance["EM3"]
        n_noisy = (d + 1) // 2
    win = ExperimentWindow(patch, n_prefix, n_noisy, n_suffix)
    idx = 0
    for rnd in range(win.n_rounds):
        for step_i, step in enumerate(patch.schedule.steps):
            for ei in step.edges:
                win.events.append(Event(idx, rnd, step_i, ei))
                idx += 1
    return win


@dataclass(frozen=True)
class Detector:
    id: int
    window: FrozenSet[int]  # measurement-event indices with even parity
    resolution: int  # the deterministic event closing the window


@dataclass
class TrackedLogical:
    pauli: PauliString  # representative at the end of the window
    phase_conditions: FrozenSet[int]


@dataclass
class IdealRun:
    window: ExperimentWindow
    detectors: List[Detector]
    logicals: List[TrackedLogical]
    #: per event, list of detector ids whose window contains it
    event_detectors: List[List[int]]


class _RelationSpace:
    """GF(2) span of event-parity relations, keyed by largest event."""

    def __init__(self):
        self.pivots: Dict[int, FrozenSet[int]] = {}

    def reduce(self, w: Set[int]) -> Set[int]:
        w = set(w)
        while w:
            lead = max(w)
            piv = self.pivots.get(lead)
            if piv is None:
                break
            w ^= piv
        return w

    def shrink(self, w: Set[int]) -> Set[int]:
        """Greedy size minimization within the same coset."""
        w = set(w)
        changed = True
        while changed and w:
            changed = False
            for piv in self.pivots.values():
                cand = w ^ piv
                if len(cand) < len(w):
                    w = cand
                    changed = True
        return w

    def insert(self, w: Set[int]) -> bool:
        w = self.reduce(w)
        if not w:
            return False
        self.pivots[max(w)] = frozenset(w)
        return True

    def contains(self, w: Set[int]) -> bool:
        return not self.reduce(w)


def _face_snapshot_windows(window: ExperimentWindow) -> List[List[FrozenSet[int]]]:
    """Per face: windows comparing latest-edge-outcome snapshots of
    consecutive rounds (12 events for a hexagon, 16/8/4 for octagon/square/2-gon)."""
    patch = window.patch
    events_of_edge_round: Dict[Tuple[int, int], List[int]] = {}
    for ev in window.events:
        events_of_edge_round.setdefault((ev.check, ev.round), []).append(ev.index)
    out = []
    for face in patch.faces:
        snapshots = []
        latest: Dict[int, int] = {}
        for rnd in range(window.n_rounds):
            for ei in face.edges:
                evs = events_of_edge_round.get((ei, rnd))
                if evs:
                    latest[ei] = max(evs)
            if len(latest) == len(face.edges):
                snapshots.append(frozenset(latest.values()))
        windows = []
        for a, b in zip(snapshots, snapshots[1:]):
            w = a ^ b
            if w:
                windows.append(frozenset(w))
        out.append(windows)
    return out


def run_ideal(window: ExperimentWindow, transient_cap: int = 4) -> IdealRun:
    """Simulate the noiseless experiment; extract detectors and logicals.

    Detectors are face comparisons between consecutive rounds plus small
    transient relations (re-measured boundary checks, the special corner)
    found by the tableau.  Deterministic relations wider than
    ``transient_cap`` events that are not face comparisons are dropped,
    matching the per-face inference windows used in the decoder.
    """
    patch = window.patch
    tableau = StabilizerTableau(patch.n_qubits)
    raw: List[Tuple[int, FrozenSet[int]]] = []
    logical_slots: List[int] = []
    events_per_round = sum(len(s.edges) for s in patch.schedule.steps)
    prefix_events = window.n_prefix * events_per_round
    for ev in window.events:
        if ev.index == prefix_events:
            # steady state reached: adjoin logical representatives so their
            # sign bookkeeping accumulates the phase conditions
            reps = tableau.logical_representatives()
            if patch.boundary == "torus" and len(reps) == 4:
                # keep the lowest-index anticommuting pair, ignore the other
                reps = reps[:2]
            for rep in reps:
                logical_slots.append(tableau.adjoin_logical(rep))
        res = tableau.measure(patch.checks[ev.check].pauli(), ev.index)
        if res.deterministic:
            raw.append((ev.index, res.window))
    logicals = [
        TrackedLogical(
            tableau._unpack(tableau.rows[slot].x, tableau.rows[slot].z),
            frozenset(tableau.rows[slot].dep),
        )
        for slot in logical_slots
    ]
    # deterministic-parity space spanned by the tableau relations
    full = _RelationSpace()
    for _, dwindow in raw:
        full.insert(set(dwindow))
    kept: List[Tuple[int, FrozenSet[int]]] = []
    space = _RelationSpace()
    for face_windows in _face_snapshot_windows(window):
        for w in face_windows:
            # transient boundary faces (e.g. the special-corner 2-gons) have
            # no perpetual stabilizer; their protection comes from the
            # transient relations below
            if not full.contains(set(w)):
                continue
            if space.insert(set(w)):
                kept.append((max(w), w))
    for res_event, dwindow in raw:
        residue = space.shrink(space.reduce(set(dwindow)))
        if not residue:
            continue
        if len(residue) <= transient_cap:
            space.insert(set(residue))
            kept.append((res_event, frozenset(residue)))
    # keep detectors that a noisy-window fault could flip
    noisy_start = window.noisy_events[0].index if window.n_noisy else len(window.events)
    detectors = []
    for res_event, dwindow in sorted(kept, key=lambda t: (t[0], sorted(t[1]))):
        if max(dwindow) >= noisy_start:
            detectors.append(Detector(len(detectors), dwindow, res_event))
    event_detectors: List[List[int]] = [[] for _ in window.events]
    for det in detectors:
        for e in det.window:
            event_detectors[e].append(det.id)
    return IdealRun(window, detectors, logicals, event_detectors)


# ---------------------------------------------------------------------------
# fault enumeration
# ---------------------------------------------------------------------------


def _events_on_qubits(window: ExperimentWindow) -> Dict[int, List[Tuple[int, str]]]:
    out: Dict[int, List[Tuple[int, str]]] = {q: [] for q in range(window.patch.n_qubits)}
    for ev in window.events:
        e = window.patch.checks[ev.check]
        out[e.qubits[0]].append((ev.index, e.letters[0]))
        out[e.qubits[1]].append((ev.index, e.letters[1]))
    return out


@dataclass
class FaultEffect:
    detectors: FrozenSet[int]
    logical_flips: int  # bitmask over tracked logicals
    flips: FrozenSet[int]
    residual: Tuple[Tuple[int, str], ...]


class FaultEnumerator:
    """Effects of every elementary (event, outcome) fault in the noisy window."""

    def __init__(self, run: IdealRun):
        self.run = run
        self.window = run.window
        self.patch = run.window.patch
        self._by_qubit = _events_on_qubits(run.window)
        self._logical_masks = []
        for L in run.logicals:
            self._logical_masks.append((L.pauli.support, L.phase_conditions))

    def _flips_of_pauli(self, qubit: int, letter: str, after: int) -> List[int]:
        if letter == "I":
            return []
        return [e for (e, l) in self._by_qubit[qubit] if e > after and l != letter]

    def effect(self, event_index: int, outcome: int) -> FaultEffect:
        ev = self.window.events[event_index]
        check = self.patch.checks[ev.check]
        p1, p2, f = EM3_OUTCOMES[outcome]
        flips: Set[int] = set()
        if f:
            flips.add(event_index)
        for qubit, letter in zip(check.qubits, (p1, p2)):
            for e in self._flips_of_pauli(qubit, letter, event_index):
                flips ^= {e}
        flagged: Set[int] = set()
        for e in flips:
            for det in self.run.event_detectors[e]:
                flagged ^= {det}
        residual = tuple(
            (q, l) for q, l in zip(check.qubits, (p1, p2)) if l != "I"
        )
        bits = 0
        for j, (support, conds) in enumerate(self._logical_masks):
            clash = 0
            for q, l in residual:
                o = support.get(q)
                if o is not None and o != l:
                    clash ^= 1
            parity = len(flips & conds) & 1
            if clash ^ parity:
                bits |= 1 << j
        return FaultEffect(frozenset(flagged), bits, frozenset(flips), residual)


# ---------------------------------------------------------------------------
# decoding graph
# ---------------------------------------------------------------------------


@dataclass
class DecodeEdge:
    u: int
    v: int  # detector id or BOUNDARY
    multiplicity: int  # number of elementary fault classes on this edge
    logical_flips: int
    fault_classes: List[Tuple[int, int]]  # (event index, outcome index)
    weight: float = 0.0
    boundary_side: Optional[str] = None


@dataclass
class DetectorGraph:
    run: IdealRun
    detectors: List[Detector]
    edges: List[DecodeEdge]
    weighting_p: Optional[float] = None
    #: per (event, outcome): (edge ids covering the fault)
    fault_to_edges: Dict[Tuple[int, int], Tuple[int, ...]] = field(default_factory=dict)
    fault_effects: Dict[Tuple[int, int], FaultEffect] = field(default_factory=dict)

    @property
    def n_detectors(self) -> int:
        return len(self.detectors)

    def adjacency(self) -> Dict[int, List[Tuple[int, float, int]]]:
        adj: Dict[int, List[Tuple[int, float, int]]] = {}
        for i, e in enumerate(self.edges):
            adj.setdefault(e.u, []).append((e.v, e.weight, i))
            if e.v != BOUNDARY:
                adj.setdefault(e.v, []).append((e.u, e.weight, i))
        return adj


class DecompositionError(RuntimeError):
    pass


def _boundary_side(patch: CodePatch, check) -> str:
    rows = [rc[0] for rc in patch.coords]
    cols = [rc[1] for rc in patch.coords]
    (r1, c1), (r2, c2) = check.grid
    r, c = (r1 + r2) / 2, (c1 + c2) / 2
    spans = {
        "top": r - min(rows),
        "bottom": max(rows) - r,
        "left": c - min(cols),
        "right": max(cols) - c,
    }
    return min(spans, key=spans.get)


def build_detector_graph(run: IdealRun) -> DetectorGraph:
    """Enumerate all elementary faults and compile the decoding graph."""
    enum = FaultEnumerator(run)
    patch = run.window.patch
    edges_by_key: Dict[Tuple[int, ...], DecodeEdge] = {}
    hyper: List[Tuple[Tuple[int, int], FaultEffect]] = []
    effects: Dict[Tuple[int, int], FaultEffect] = {}
    fault_to_edges: Dict[Tuple[int, int], Tuple[int, ...]] = {}

    noisy = run.window.noisy_events
    for ev in noisy:
        for o in range(31):
            eff = enum.effect(ev.index, o)
            effects[(ev.index, o)] = eff
            dets = tuple(sorted(eff.detectors))
            if len(dets) == 0:
                if eff.logical_flips:
                    raise DecompositionError(
                        f"undetectable logical fault at event {ev.index} outcome {o}")
                fault_to_edges[(ev.index, o)] = ()
                continue
            if len(dets) <= 2:
                edge = edges_by_key.get(dets)
                if edge is None:
                    if len(dets) == 1:
                        side = _boundary_side(patch, patch.checks[ev.check])
                        edge = DecodeEdge(dets[0], BOUNDARY, 0, eff.logical_flips,
                                          [], boundary_side=side)
                    else:
                        edge = DecodeEdge(dets[0], dets[1], 0, eff.logical_flips, [])
                    edges_by_key[dets] = edge
                if edge.logical_flips != eff.logical_flips:
                    raise DecompositionError(
                        f"inconsistent logical flip on edge {dets}")
                edge.multiplicity += 1
                edge.fault_classes.append((ev.index, o))
            else:
                hyper.append(((ev.index, o), eff))

    # decompose hyper-faults into existing edges (detector sets XOR to the
    # fault's set and logical flips agree)
    for key2, eff in hyper:
        dets = tuple(sorted(eff.detectors))
        combo = _decompose(dets, eff.logical_flips, edges_by_key)
        if combo is None:
            raise DecompositionError(
                f"fault {key2} flags {dets}; no edge decomposition found")
        for part in combo:
            edge = edges_by_key[part]
            edge.multiplicity += 1
            edge.fault_classes.append(key2)

    edges = sorted(edges_by_key.values(), key=lambda e: (e.u, e.v))
    edge_ids = {}
    for i, e in enumerate(edges):
        key = (e.u,) if e.v == BOUNDARY else tuple(sorted((e.u, e.v)))
        edge_ids[key] = i
    for key2, eff in effects.items():
        dets = tuple(sorted(eff.detectors))
        if len(dets) == 0:
            fault_to_edges[key2] = ()
        elif len(dets) <= 2:
            fault_to_edges[key2] = (edge_ids[dets],)
        else:
            combo = _decompose(dets, eff.logical_flips, edges_by_key)
            fault_to_edges[key2] = tuple(edge_ids[p] for p in combo)
    graph = DetectorGraph(run, run.detectors, edges,
                          fault_to_edges=fault_to_edges, fault_effects=effects)
    return graph


def _decompose(dets: Tuple[int, ...], logical_flips: int,
               edges_by_key: Dict[Tuple[int, ...], DecodeEdge]):
    """Partition of ``dets`` into existing edge keys, flips XOR-consistent."""
    best = None

    def rec(remaining: Tuple[int, ...], acc: List[Tuple[int, ...]], flips: int):
        nonlocal best
        if best is not None:
            return
        if not remaining:
            if flips == logical_flips:
                best = list(acc)
            return
        a = remaining[0]
        rest = remaining[1:]
        # pair with another flagged detector
        for j, b in enumerate(rest):
            key = (a, b) if a < b else (b, a)
            edge = edges_by_key.get(key)
            if edge is not None:
                rec(rest[:j] + rest[j + 1:], acc + [key],
                    flips ^ edge.logical_flips)
        # or send to the boundary
        edge = edges_by_key.get((a,))
        if edge is not None:
            rec(rest, acc + [(a,)], flips ^ edge.logical_flips)

    rec(dets, [], 0)
    return best


def assign_weights(graph: DetectorGraph, weighting_p: float) -> DetectorGraph:
    """Set edge weights to -log(q/(1-q)) at the given physical rate.

    ``q`` is the total probability of the edge's fault classes; reweighting
    never requires re-enumeration.
    """
    if not (0.0 < weighting_p < 0.5):
        raise ValueError("weighting-p must lie in (0, 0.5)")
    per_class = weighting_p / 31.0
    for e in graph.edges:
        q = e.multiplicity * per_class
        q = min(q, 0.5 - 1e-12)
        e.weight = -math.log(q / (1.0 - q))
    graph.weighting_p = weighting_p
    return graph


def graph_to_json(graph: DetectorGraph) -> str:
    doc = {
        "n_detectors": graph.n_detectors,
        "weighting_p": graph.weighting_p,
        "detectors": [
            {"id": d.id, "window": sorted(d.window), "resolution": d.resolution}
            for d in graph.detectors
        ],
        "edges": [
            {
                "u": e.u,
                "v": e.v,
                "multiplicity": e.multiplicity,
                "weight": e.weight,
                "logical_flips": e.logical_flips,
                "boundary_side": e.boundary_side,
            }
            for e in graph.edges
        ],
    }
    return json.dumps(doc, sort_keys=True)


# ---------------------------------------------------------------------------
# graph-distance checks (effective distance)
# ---------------------------------------------------------------------------


def min_crossing_path(graph: DetectorGraph, sides: Tuple[str, str],
                      edge_filter=None) -> int:
    """Minimum number of edges on a path joining two opposite boundary sides.

    Breadth-first search over hop count; boundary edges of the two sides act
    as sources/sinks.  Only edges accepted by ``edge_filter`` participate.
    """
    from collections import deque

    def ok(e):
        return edge_filter is None or edge_filter(e)

    sources = set()
    sinks = set()
    adj: Dict[int, List[int]] = {}
    for e in graph.edges:
        if not ok(e):
            continue
        if e.v == BOUNDARY:
            if e.boundary_side == sides[0]:
                sources.add(e.u)
            elif e.boundary_side == sides[1]:
                sinks.add(e.u)
        else:
            adj.setdefault(e.u, []).append(e.v)
            adj.setdefault(e.v, []).append(e.u)
    if not sources or not sinks:
        return -1
    dist = {u: 1 for u in sources}  # one edge from the source boundary
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        if u in sinks:
            return dist[u] + 1  # plus the sink boundary edge
        for v in adj.get(u, []):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    reachable = [dist[u] + 1 for u in sinks if u in dist]
    return min(reachable) if reachable else -1


def effective_graph_distance(graph: DetectorGraph, edge_filter=None) -> int:
    """Minimum boundary-to-boundary crossing over the two opposite side pairs."""
    out = []
    for sides in (("left", "right"), ("top", "bottom")):
        d = min_crossing_path(graph, sides, edge_filter)
        if d > 0:
            out.append(d)
    if not out:
        raise ValueError("no boundary-to-boundary path found")
    return min(out)
