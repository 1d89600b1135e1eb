"""Construction of honeycomb and 4.8.8 Floquet code patches.

Both lattices live on a square grid of qubits (one per grid vertex) using
vertical bricks: a face with 2n sides occupies two adjacent columns and n
consecutive row intervals.  Every check is then a horizontal or vertical
grid edge, which is also exactly its placement on the tetron array.

Honeycomb (hexagons = bricks spanning three rows):
    * vertical edges everywhere; XX when the upper row r has r = c (mod 2),
      YY otherwise; horizontal ZZ edges at (r, c)-(r, c+1) iff r = c (mod 2)
    * the hexagon with top row r in column gap c (r = c mod 2) has color
      index ((r - 3c)/2) mod 3; an edge takes the color complementary to
      its two faces' indices; 0 = yellow, 1 = blue, 2 = green

4.8.8 (squares and octagons = bricks of one and three row intervals):
    * vertical edges everywhere; XX on even upper rows, YY on odd
    * horizontal ZZ edges at rows r = 2c, 2c+1 (mod 4) in gap c
    * squares are yellow; octagons green in even gaps, blue in odd gaps

Planar boundaries keep the bulk rules on a finite vertex set.  Cut faces
that are short exactly one edge pair are closed into 2-gons by curved
edges whose Pauli letters are forced by the per-vertex anticommutation
rule; a single degree-four corner (two curved edges sharing one letter on
one qubit) closes the patch and is the only exemption to pairwise
anticommutation.  The perimeter shapes reproduce the qubit-count formulas
6l^2 + 4(l-1) and 4d^2 + 8(d-1) and one encoded qubit.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .pauli import PauliString

YELLOW, BLUE, GREEN = "yellow", "blue", "green"
_COLOR_OF_IDX = {0: YELLOW, 1: BLUE, 2: GREEN}

Coord = Tuple[int, int]


class BuildError(ValueError):
    pass


@dataclass(frozen=True)
class CheckEdge:
    """A weight-two check operator on a lattice edge."""

    qubits: Tuple[int, int]
    letters: Tuple[str, str]
    color: str
    orientation: str  # "h" or "v"
    curved: bool
    boundary_class: str  # bulk | striped-once | dashed-once | curved-boundary | corner
    grid: Tuple[Coord, Coord]

    def pauli(self) -> PauliString:
        return PauliString.from_pairs(zip(self.qubits, self.letters))

    def touches(self, qubit: int) -> bool:
        return qubit in self.qubits

    def letter_on(self, qubit: int) -> str:
        return self.letters[self.qubits.index(qubit)]


@dataclass(frozen=True)
class Face:
    kind: str  # hexagon | square | octagon | two-gon
    color: str
    edges: Tuple[int, ...]
    position: Tuple[int, int]  # (column gap, top row)


@dataclass(frozen=True)
class ScheduleStep:
    color: str
    edges: Tuple[int, ...]


@dataclass(frozen=True)
class Schedule:
    period: int  # 3 on the torus, 6 for planar patches
    steps: Tuple[ScheduleStep, ...]  # one six-step round

    @property
    def colors(self) -> Tuple[str, ...]:
        return tuple(s.color for s in self.steps)


@dataclass(frozen=True)
class CodePatch:
    family: str  # honeycomb | four88
    boundary: str  # torus | planar
    size: int  # linear size l (honeycomb) or distance d (4.8.8)
    coords: Tuple[Coord, ...]
    checks: Tuple[CheckEdge, ...]
    faces: Tuple[Face, ...]
    schedule: Schedule
    effective_distance: Dict[str, int]
    white_dots: FrozenSet[int] = frozenset()
    coord_index: Dict[Coord, int] = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_qubits(self) -> int:
        return len(self.coords)

    def edges_at(self, qubit: int) -> List[int]:
        return [i for i, e in enumerate(self.checks) if e.touches(qubit)]


# ---------------------------------------------------------------------------
# shared machinery
# ---------------------------------------------------------------------------


class _Geometry:
    """Family-specific lattice rules on the square grid."""

    def canon(self, rc: Coord) -> Coord:
        return rc

    # subclasses: v_letters, h_exists, v_faces, h_faces, face_kind/height,
    # face_color_name, face_vertices


class _HexRules(_Geometry):
    family = "honeycomb"

    def v_letters(self, r, c):
        return ("X", "X") if (r - c) % 2 == 0 else ("Y", "Y")

    def h_exists(self, r, c):
        return (r - c) % 2 == 0

    def v_faces(self, r, c):
        lt = r if (r - (c - 1)) % 2 == 0 else r - 1
        rt = r if (r - c) % 2 == 0 else r - 1
        return [(c - 1, lt), (c, rt)]

    def h_faces(self, r, c):
        return [(c, r - 2), (c, r)]

    def face_idx(self, gap, top):
        return ((top - 3 * gap) // 2) % 3

    def face_color(self, gap, top):
        return _COLOR_OF_IDX[self.face_idx(gap, top)]

    def face_kind(self, gap, top):
        return "hexagon"

    def face_vertices(self, gap, top):
        return [(top + dr, gap + dc) for dr in range(3) for dc in range(2)]

    def edge_color(self, faces):
        return _COLOR_OF_IDX[-(sum(self.face_idx(*f) for f in faces)) % 3]

    def face_positions(self, r, c):
        """Face positions having (r, c) as their top-left vertex."""
        if (r - c) % 2 == 0:
            return [(c, r)]
        return []

    def ring(self, gap, top):
        t = top
        return [
            ((t, gap), (t, gap + 1)),
            ((t, gap + 1), (t + 1, gap + 1)),
            ((t + 1, gap + 1), (t + 2, gap + 1)),
            ((t + 2, gap), (t + 2, gap + 1)),
            ((t + 1, gap), (t + 2, gap)),
            ((t, gap), (t + 1, gap)),
        ]


class _F88Rules(_Geometry):
    family = "four88"

    def v_letters(self, r, c):
        return ("X", "X") if r % 2 == 0 else ("Y", "Y")

    def h_exists(self, r, c):
        return (r - 2 * c) % 4 in (0, 1)

    def brick(self, gap, r):
        off = (r - 2 * gap) % 4
        if off == 0:
            return ("square", r)
        return ("octagon", r - (off - 1))

    def v_faces(self, r, c):
        return [self.brick(g, r) + (g,) for g in (c - 1, c)]

    def h_faces(self, r, c):
        off = (r - 2 * c) % 4
        if off == 0:
            return [("octagon", r - 3, c), ("square", r, c)]
        return [("square", r - 1, c), ("octagon", r, c)]

    def face_color_name(self, kind, gap):
        if kind == "square":
            return YELLOW
        return GREEN if gap % 2 == 0 else BLUE

    def face_kind_height(self, kind):
        return 2 if kind == "square" else 4

    def face_positions(self, r, c):
        off = (r - 2 * c) % 4
        if off == 0:
            return [("square", r, c)]
        if off == 1:
            return [("octagon", r, c)]
        return []

    def face_vertices(self, kind, top, gap):
        h = self.face_kind_height(kind)
        return [(top + dr, gap + dc) for dr in range(h) for dc in range(2)]

    def ring(self, kind, top, gap):
        h = self.face_kind_height(kind)
        keys = [((top, gap), (top, gap + 1))]
        for dr in range(h - 1):
            keys.append(((top + dr, gap + 1), (top + dr + 1, gap + 1)))
        keys.append(((top + h - 1, gap), (top + h - 1, gap + 1)))
        for dr in reversed(range(h - 1)):
            keys.append(((top + dr, gap), (top + dr + 1, gap)))
        return keys


def _third_color(a: str, b: str) -> str:
    rem = {YELLOW, BLUE, GREEN} - {a, b}
    if len(rem) != 1:
        raise BuildError(f"faces {a}, {b} do not determine an edge color")
    return rem.pop()


class _PatchBuilder:
    """Builds edges from a vertex set; curved edges complete the boundary."""

    def __init__(self, family: str, verts: Set[Coord], canon=None):
        self.family = family
        self.rules = _HexRules() if family == "honeycomb" else _F88Rules()
        self.verts = verts
        self.canon = canon or (lambda rc: rc)
        self.coords = sorted({self.canon(rc) for rc in verts})
        self.index = {rc: i for i, rc in enumerate(self.coords)}
        self.checks: List[dict] = []
        self._edge_keys: Set[Tuple[Coord, Coord]] = set()
        self._build_straight()

    def present(self, rc: Coord) -> bool:
        return self.canon(rc) in self.index if self.canon is not None else rc in self.verts

    def qid(self, rc: Coord) -> int:
        return self.index[self.canon(rc)]

    def _key(self, a: Coord, b: Coord):
        ca, cb = self.canon(a), self.canon(b)
        return (ca, cb) if ca <= cb else (cb, ca)

    def _face_color(self, f) -> str:
        if self.family == "honeycomb":
            return self.rules.face_color(*f)
        return self.rules.face_color_name(f[0], f[2])

    def face_real(self, f) -> bool:
        if self.family == "honeycomb":
            vs = self.rules.face_vertices(*f)
        else:
            vs = self.rules.face_vertices(*f)
        return all(self.present(v) for v in vs)

    def _build_straight(self):
        r_ = self.rules
        for rc in sorted({self.canon(v) for v in self.verts}):
            (r, c) = rc
            down = (r + 1, c)
            if self.present(down):
                key = self._key(rc, down)
                if key not in self._edge_keys:
                    self._edge_keys.add(key)
                    faces = r_.v_faces(r, c)
                    color = self._edge_color(faces)
                    self.checks.append(dict(
                        grid=(rc, down), letters=r_.v_letters(r, c), color=color,
                        orientation="v", curved=False, faces=faces))
            right = (r, c + 1)
            if r_.h_exists(r, c) and self.present(right):
                key = self._key(rc, right)
                if key not in self._edge_keys:
                    self._edge_keys.add(key)
                    faces = r_.h_faces(r, c)
                    color = self._edge_color(faces)
                    self.checks.append(dict(
                        grid=(rc, right), letters=("Z", "Z"), color=color,
                        orientation="h", curved=False, faces=faces))

    def _edge_color(self, faces) -> str:
        return _third_color(self._face_color(faces[0]), self._face_color(faces[1]))

    # -- curved completion ------------------------------------------------

    def _letters_at(self, q: int) -> List[str]:
        out = []
        for ch in self.checks:
            a, b = ch["grid"]
            if self.qid(a) == q:
                out.append(ch["letters"][0])
            if self.qid(b) == q:
                out.append(ch["letters"][1])
        return out

    def _degrees(self) -> Counter:
        deg = Counter()
        for ch in self.checks:
            deg[self.qid(ch["grid"][0])] += 1
            deg[self.qid(ch["grid"][1])] += 1
        return deg

    def _lens(self, ch) -> Optional[tuple]:
        ghosts = [f for f in ch["faces"] if not self.face_real(f)]
        return ghosts[0] if len(ghosts) == 1 else None

    def complete_boundary(self):
        """Close cut faces into 2-gons: pair adjacent degree-2 vertices with a
        curved edge carrying their free letters, then close a single exempt
        degree-four corner if one degree-2 vertex remains next to a full one.
        """
        changed = True
        while changed:
            changed = False
            deg = self._degrees()
            for ch in list(self.checks):
                if ch["curved"]:
                    continue
                a, b = ch["grid"]
                qa, qb = self.qid(a), self.qid(b)
                if deg[qa] != 2 or deg[qb] != 2:
                    continue
                la = {"X", "Y", "Z"} - set(self._letters_at(qa))
                lb = {"X", "Y", "Z"} - set(self._letters_at(qb))
                lens = self._lens(ch)
                if len(la) == 1 and len(lb) == 1 and lens is not None:
                    color = _third_color(self._face_color(lens), ch["color"])
                    self.checks.append(dict(
                        grid=(a, b), letters=(la.pop(), lb.pop()), color=color,
                        orientation=ch["orientation"], curved=True,
                        faces=ch["faces"], lens=lens))
                    changed = True
                    break
        # exempt corner: remaining degree-2 vertex adjacent to a full vertex;
        # the full end reuses its unique non-straight letter (the two curved
        # edges then share that letter and commute on the corner qubit)
        deg = self._degrees()
        for ch in list(self.checks):
            if ch["curved"]:
                continue
            a, b = ch["grid"]
            qa, qb = self.qid(a), self.qid(b)
            for (q2, qf, p2) in ((qa, qb, 0), (qb, qa, 1)):
                if deg[q2] != 2 or deg[qf] != 3:
                    continue
                free = {"X", "Y", "Z"} - set(self._letters_at(q2))
                lens = self._lens(ch)
                if len(free) != 1 or lens is None:
                    continue
                straight_letters = set()
                for other in self.checks:
                    if other["curved"]:
                        continue
                    oa, ob = other["grid"]
                    if self.qid(oa) == qf:
                        straight_letters.add(other["letters"][0])
                    if self.qid(ob) == qf:
                        straight_letters.add(other["letters"][1])
                lf = ({"X", "Y", "Z"} - straight_letters)
                if len(lf) != 1:
                    continue
                lf = lf.pop()
                l2 = free.pop()
                letters = (l2, lf) if p2 == 0 else (lf, l2)
                color = _third_color(self._face_color(lens), ch["color"])
                self.checks.append(dict(
                    grid=(a, b), letters=letters, color=color,
                    orientation=ch["orientation"], curved=True,
                    faces=ch["faces"], lens=lens))
                return

    def validate(self) -> List[Coord]:
        deg4 = []
        for q, rc in enumerate(self.coords):
            letters = self._letters_at(q)
            if len(letters) < 2:
                raise BuildError(f"under-constrained qubit {rc}: {letters}")
            cnt = Counter(letters)
            if len(letters) <= 3:
                if max(cnt.values()) > 1:
                    raise BuildError(f"anticommutation clash at {rc}: {letters}")
            elif len(letters) == 4:
                if sorted(cnt.values()) != [1, 1, 2]:
                    raise BuildError(f"invalid degree-4 vertex at {rc}: {letters}")
                deg4.append(rc)
            else:
                raise BuildError(f"degree > 4 at {rc}")
        if len(deg4) > 1:
            raise BuildError(f"more than one special corner: {deg4}")
        return deg4

    # -- assembly ----------------------------------------------------------

    def face_list(self) -> List[Face]:
        lookup = {}
        for i, ch in enumerate(self.checks):
            if not ch["curved"]:
                lookup[self._key(*ch["grid"])] = i
        faces: List[Face] = []
        seen: Set[tuple] = set()
        for rc in sorted({self.canon(v) for v in self.verts}):
            for f in self.rules.face_positions(*rc):
                if self.family == "honeycomb":
                    vs = self.rules.face_vertices(*f)
                    ring = self.rules.ring(*f)
                    kind, pos = "hexagon", f
                    color = self.rules.face_color(*f)
                else:
                    vs = self.rules.face_vertices(*f)
                    ring = self.rules.ring(*f)
                    kind, pos = f[0], (f[2], f[1])
                    color = self.rules.face_color_name(f[0], f[2])
                if not all(self.present(v) for v in vs):
                    continue
                key = tuple(sorted(self.canon(v) for v in vs))
                if key in seen:
                    continue
                try:
                    ring_idx = tuple(lookup[self._key(a, b)] for (a, b) in ring)
                except KeyError:
                    continue
                seen.add(key)
                faces.append(Face(kind, color, ring_idx, pos))
        for i, ch in enumerate(self.checks):
            if not ch["curved"]:
                continue
            partner = lookup[self._key(*ch["grid"])]
            lens = ch["lens"]
            color = self._face_color(lens)
            pos = lens if self.family == "honeycomb" else (lens[2], lens[1])
            faces.append(Face("two-gon", color, (partner, i), pos))
        return faces

    def check_edges(self) -> List[CheckEdge]:
        out = []
        for ch in self.checks:
            a, b = ch["grid"]
            out.append(CheckEdge(
                qubits=(self.qid(a), self.qid(b)),
                letters=tuple(ch["letters"]),
                color=ch["color"],
                orientation=ch["orientation"],
                curved=ch["curved"],
                boundary_class="bulk",
                grid=(self.canon(a), self.canon(b)),
            ))
        return out


# ---------------------------------------------------------------------------
# vertex sets per family and boundary
# ---------------------------------------------------------------------------


def _hc_planar_verts(l: int) -> Set[Coord]:
    verts = set()
    for r in range(3 * l):
        lo = -(r // 3)
        for c in range(lo, lo + 2 * l):
            verts.add((r, c))
    m = 2 * l - 1
    # right staircase steps: restore the cut hexagon at each step
    for k in range(1, l):
        verts |= {(3 * k, m - k + 1), (3 * k + 1, m - k + 1)}
    # bottom boundary: restore the cut hexagons below the last row
    for g in range(-l + 1, l):
        if (g - l) % 2 == 0:
            verts |= {(3 * l, g), (3 * l, g + 1)}
    return verts


def _f88_planar_verts(d: int) -> Set[Coord]:
    rows = range(1, 2 * d + 3)
    cols = range(0, 2 * d + 2)
    r_hi, c_hi = 2 * d + 2, 2 * d + 1
    corner = [(1, 0), (1, 1), (2, 0), (3, 0), (1, 2), (1, 3)]
    cut = set(corner) | {(r_hi + 1 - r, c_hi - c) for (r, c) in corner}
    return {(r, c) for r in rows for c in cols} - cut


class _HexTorus:
    def __init__(self, l: int):
        self.l = l

    def __call__(self, rc: Coord) -> Coord:
        r, c = rc
        l = self.l
        k = r // (3 * l)
        r -= 3 * l * k
        c -= l * k
        return (r, c % (2 * l))


class _F88Torus:
    def __init__(self, d: int):
        self.d = d

    def __call__(self, rc: Coord) -> Coord:
        return (rc[0] % (2 * self.d), rc[1] % (2 * self.d))


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------


def _once_yellow_step(builder: _PatchBuilder, ch) -> Tuple[int, ...]:
    """Yellow sub-steps for a planar yellow edge (0 = first, 3 = second)."""
    if ch["curved"]:
        governing = builder._face_color(ch["lens"])
        return (0,) if governing == GREEN else (3,)
    real = [f for f in ch["faces"] if builder.face_real(f)]
    if len(real) == 2:
        return (0, 3)
    if len(real) == 1:
        return (0,) if builder._face_color(real[0]) == GREEN else (3,)
    colors = {builder._face_color(f) for f in ch["faces"]}
    return (0,) if GREEN in colors else (3,)


def _make_schedule(builder: _PatchBuilder, boundary: str) -> Tuple[Schedule, List[str]]:
    """Schedule plus the per-check boundary class annotations."""
    n_checks = len(builder.checks)
    classes = ["bulk"] * n_checks
    if boundary == "torus":
        colors = (YELLOW, BLUE, GREEN, YELLOW, BLUE, GREEN)
        steps = []
        for col in colors:
            steps.append(ScheduleStep(col, tuple(
                i for i, ch in enumerate(builder.checks) if ch["color"] == col)))
        return Schedule(3, tuple(steps)), classes
    colors = (YELLOW, BLUE, GREEN, YELLOW, GREEN, BLUE)
    yellow_steps: Dict[int, Tuple[int, ...]] = {}
    for i, ch in enumerate(builder.checks):
        if ch["color"] == YELLOW:
            yellow_steps[i] = _once_yellow_step(builder, ch)
    deg4 = {builder.qid(rc) for rc in builder.validate()}
    for i, ch in enumerate(builder.checks):
        if ch["curved"]:
            qa, qb = (builder.qid(x) for x in ch["grid"])
            classes[i] = "corner" if (qa in deg4 or qb in deg4) else "curved-boundary"
        elif ch["color"] == YELLOW and yellow_steps[i] != (0, 3):
            # family captions disagree on the dashed/striped naming; per
            # figure: honeycomb striped = first yellow round, 4.8.8 dashed =
            # first yellow round
            first = yellow_steps[i] == (0,)
            if builder.family == "honeycomb":
                classes[i] = "striped-once" if first else "dashed-once"
            else:
                classes[i] = "dashed-once" if first else "striped-once"
    steps = []
    for step_idx, col in enumerate(colors):
        if col == YELLOW:
            edges = tuple(i for i, ch in enumerate(builder.checks)
                          if ch["color"] == YELLOW and step_idx in yellow_steps[i])
        else:
            edges = tuple(i for i, ch in enumerate(builder.checks) if ch["color"] == col)
        steps.append(ScheduleStep(col, edges))
    return Schedule(6, tuple(steps)), classes


def _assert_steps_commute(checks: Sequence[CheckEdge], schedule: Schedule) -> None:
    for step in schedule.steps:
        by_qubit: Dict[int, int] = {}
        for ei in step.edges:
            e = checks[ei]
            for q in e.qubits:
                other = by_qubit.get(q)
                if other is not None and not checks[other].pauli().commutes_with(e.pauli()):
                    raise BuildError("same-step checks anticommute")
                by_qubit[q] = ei


# ---------------------------------------------------------------------------
# public builders
# ---------------------------------------------------------------------------


def _assemble(family: str, boundary: str, size: int, builder: _PatchBuilder,
              eff_dist: Dict[str, int]) -> CodePatch:
    builder.complete_boundary()
    builder.validate()
    schedule, classes = _make_schedule(builder, boundary)
    checks = [replace(e, boundary_class=cls)
              for e, cls in zip(builder.check_edges(), classes)]
    _assert_steps_commute(checks, schedule)
    faces = builder.face_list()
    return CodePatch(
        family=family,
        boundary=boundary,
        size=size,
        coords=tuple(builder.coords),
        checks=tuple(checks),
        faces=tuple(faces),
        schedule=schedule,
        effective_distance=eff_dist,
        coord_index=builder.index,
    )


def build_honeycomb(l: int, boundary: str) -> CodePatch:
    """Honeycomb Floquet code patch of linear size ``l`` (l x l tiling units)."""
    if boundary not in ("torus", "planar"):
        raise BuildError("boundary must be 'torus' or 'planar'")
    if l < 2:
        raise BuildError("honeycomb linear size must be at least 2")
    if boundary == "torus":
        verts = {(r, c) for r in range(3 * l) for c in range(2 * l)}
        builder = _PatchBuilder("honeycomb", verts, canon=_HexTorus(l))
    else:
        builder = _PatchBuilder("honeycomb", _hc_planar_verts(l))
    return _assemble("honeycomb", boundary, l, builder,
                     {"independent": 2 * l, "EM3": l})


def build_488(d: int, boundary: str) -> CodePatch:
    """4.8.8 Floquet code patch of distance ``d``."""
    if boundary not in ("torus", "planar"):
        raise BuildError("boundary must be 'torus' or 'planar'")
    if d < 2:
        raise BuildError("4.8.8 distance must be at least 2")
    if boundary == "torus" and d % 2 != 0:
        raise BuildError(
            "4.8.8 torus distance must be even and rectangle distance must be odd")
    if boundary == "planar" and d % 2 != 1:
        raise BuildError(
            "4.8.8 rectangle distance must be odd and torus distance must be even")
    if boundary == "torus":
        verts = {(r, c) for r in range(2 * d) for c in range(2 * d)}
        builder = _PatchBuilder("four88", verts, canon=_F88Torus(d))
    else:
        builder = _PatchBuilder("four88", _f88_planar_verts(d))
    return _assemble("four88", boundary, d, builder,
                     {"independent": d, "EM3": d})


def build_patch(family: str, boundary: str, size: int) -> CodePatch:
    if family == "honeycomb":
        return build_honeycomb(size, boundary)
    if family in ("four88", "488", "4.8.8"):
        return build_488(size, boundary)
    raise BuildError(f"unknown family {family!r}")


def schedule_round(patch: CodePatch) -> Schedule:
    """One round = six time steps (two period-three sequences on the torus)."""
    return patch.schedule


_SWAP_XZ = {"X": "Z", "Z": "X", "Y": "Y"}


def apply_white_dot_rewrites(patch: CodePatch) -> CodePatch:
    """Swap X and Z on one qubit of every horizontal-boundary 2-gon.

    The rewrite is a single-qubit Clifford conjugation (the code is
    unitarily equivalent); applying it twice restores the original patch.
    """
    if patch.boundary != "planar":
        raise BuildError("white-dot rewrites apply to planar patches")
    if patch.white_dots:
        dots = patch.white_dots
        new_dots: FrozenSet[int] = frozenset()
    else:
        top_row = min(rc[0] for rc in patch.coords)
        dots_set: Set[int] = set()
        for f in patch.faces:
            if f.kind != "two-gon":
                continue
            curved = patch.checks[f.edges[1]]
            if curved.orientation != "h":
                continue
            (a, b) = curved.grid
            # dot the inner-facing qubit: right end on the top boundary, left
            # end on the bottom boundary
            dotted = curved.qubits[1] if a[0] == top_row else curved.qubits[0]
            # never dot a qubit whose edges carry X or Z on a vertical check
            letters_v = [
                e.letter_on(dotted)
                for e in patch.checks
                if e.touches(dotted) and e.orientation == "v"
            ]
            if any(l in ("X", "Z") for l in letters_v):
                dotted = (set(curved.qubits) - {dotted}).pop()
            dots_set.add(dotted)
        dots = frozenset(dots_set)
        new_dots = dots
    new_checks = []
    for e in patch.checks:
        letters = tuple(
            _SWAP_XZ[l] if q in dots else l for q, l in zip(e.qubits, e.letters)
        )
        new_checks.append(replace(e, letters=letters))
    return replace(patch, checks=tuple(new_checks), white_dots=new_dots,
                   coord_index=patch.coord_index)


def patch_to_json(patch: CodePatch) -> str:
    doc = {
        "family": patch.family,
        "boundary": patch.boundary,
        "size": patch.size,
        "qubits": [list(rc) for rc in patch.coords],
        "edges": [
            {
                "qubits": list(e.qubits),
                "letters": list(e.letters),
                "color": e.color,
                "orientation": e.orientation,
                "curved": e.curved,
                "class": e.boundary_class,
            }
            for e in patch.checks
        ],
        "faces": [
            {"kind": f.kind, "color": f.color, "edges": list(f.edges)}
            for f in patch.faces
        ],
        "schedule": {
            "period": patch.schedule.period,
            "steps": [
                {"color": s.color, "edges": list(s.edges)} for s in patch.schedule.steps
            ],
        },
        "effective_distance": patch.effective_distance,
        "white_dots": sorted(patch.white_dots),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def patch_hash(patch: CodePatch) -> str:
    return hashlib.sha256(patch_to_json(patch).encode()).hexdigest()
