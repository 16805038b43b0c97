"""Code layouts on the heavy hexagon and heavy square lattices.

Both families place the d x d grid of data qubits at lattice points
(2i-1, 2j-1), 1 <= i,j <= d, and put every ancilla on an edge midpoint
of the heavy lattice.

Heavy hexagon (a subsystem code):
  * weight-2 Z gauge generators on vertical data pairs (i,j),(i+1,j),
    each measured by the white ancilla W(i,j) at (2i, 2j-1);
  * weight-4 X gauge generators on plaquettes with rows {i,i+1} and
    columns {j,j+1} for i+j even, measured by a dark syndrome ancilla
    at (2i, 2j) with the two adjacent whites serving as flags;
  * weight-2 boundary X gauges on row 1, columns (2m, 2m+1), and on
    row d, columns (2m-1, 2m), each with its own ancilla;
  * Z stabilizers: plaquettes with i+j odd (products of two Z gauges)
    plus weight-2 boundary pairs on columns 1 and d;
  * X stabilizers: the d-1 two-column strips, products of the X gauges
    in columns (j, j+1).

Heavy square (the rotated surface code on a heavy lattice):
  * faces F(i,j) with rows {i,i+1}, cols {j,j+1}; X type for i+j even,
    Z type for i+j odd; a face syndrome ancilla sits at (2i, 2j) and the
    two flag qubits are the horizontal-edge ancillas H(i,j), H(i+1,j);
  * weight-2 X stabilizers on row 1, cols (2m, 2m+1) and row d, cols
    (2m-1, 2m), measured directly by the H ancilla between the pair;
  * weight-2 Z stabilizers on column 1, rows (2m-1, 2m) and column d,
    rows (2m, 2m+1), each with a dedicated boundary ancilla.

There is no gauge freedom in the heavy square code, so its gauge lists
equal its stabilizer lists.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

from .pauli import PauliOp, commutes, in_span, pauli_span, weight

ROLE_DATA = "Data"
ROLE_FLAG = "Flag"
ROLE_SYNDROME = "Syndrome"

FAMILY_HEX = "HeavyHexagon"
FAMILY_SQUARE = "HeavySquare"

LAYOUT_FORMAT = "heavylat-layout"
LAYOUT_VERSION = 1


@dataclass(frozen=True)
class QubitInfo:
    index: int
    role: str
    coordinate: Tuple[int, int]
    frequency_class: Optional[str] = None


@dataclass
class Plaquette:
    """A weight-4 X gauge of the heavy hexagon code and its ancillas."""

    i: int
    j: int
    dark: int
    white_left: int
    white_right: int
    data: Dict[str, int]  # corners TL, TR, BL, BR
    gauge_index: int


@dataclass
class BoundaryPair:
    """A weight-2 generator together with the ancilla measuring it."""

    ancilla: int
    data: Tuple[int, int]  # pair members in ascending (row, col) order
    gen_index: int
    side: str  # top / bottom / left / right


@dataclass
class Face:
    """A weight-4 face of the heavy square code."""

    i: int
    j: int
    basis: str  # "X" or "Z"
    syndrome: int
    flag_top: int
    flag_bottom: int
    data: Dict[str, int]
    stab_index: int


@dataclass
class HexGeometry:
    data_index: Dict[Tuple[int, int], int]
    white_index: Dict[Tuple[int, int], int]
    dark_index: Dict[Tuple[int, int], int]
    top_anc: Dict[int, int]
    bottom_anc: Dict[int, int]
    plaquettes: List[Plaquette]
    top_pairs: List[BoundaryPair]
    bottom_pairs: List[BoundaryPair]
    z_gauge_white: List[int]  # z_gauge index -> measuring white ancilla
    z_gauge_data: List[Tuple[int, int]]  # (top data, bottom data)


@dataclass
class SquareGeometry:
    data_index: Dict[Tuple[int, int], int]
    sf_index: Dict[Tuple[int, int], int]
    h_index: Dict[Tuple[int, int], int]
    v_left: Dict[int, int]
    v_right: Dict[int, int]
    faces: List[Face]
    top_pairs: List[BoundaryPair]
    bottom_pairs: List[BoundaryPair]
    left_pairs: List[BoundaryPair]
    right_pairs: List[BoundaryPair]


class CodeLayout:
    """A built code instance: qubits, generators, logicals, geometry.

    ``x_stab_gauges`` / ``z_stab_gauges`` list, per stabilizer, the
    gauge generator indices whose outcome product gives the stabilizer
    outcome.  ``flags`` maps weight-4 generator keys (kind, index) to
    their two flag qubits; kind is "x_gauge" for the heavy hexagon
    plaquettes and "x_stab"/"z_stab" for heavy square faces.
    """

    def __init__(self, family, distance, qubits, x_gauge, z_gauge,
                 x_stabilizers, z_stabilizers, logical_x, logical_z,
                 x_stab_gauges, z_stab_gauges, flags, adjacency, geometry):
        self.family = family
        self.distance = distance
        self.qubits = qubits
        self.x_gauge = x_gauge
        self.z_gauge = z_gauge
        self.x_stabilizers = x_stabilizers
        self.z_stabilizers = z_stabilizers
        self.logical_x = logical_x
        self.logical_z = logical_z
        self.x_stab_gauges = x_stab_gauges
        self.z_stab_gauges = z_stab_gauges
        self.flags = flags
        self.adjacency = adjacency
        self.geometry = geometry
        self.n_qubits = len(qubits)
        self.n_data = sum(1 for q in qubits if q.role == ROLE_DATA)

    @property
    def data_qubits(self):
        return [q.index for q in self.qubits if q.role == ROLE_DATA]

    def qubit_at(self, coordinate):
        for q in self.qubits:
            if q.coordinate == tuple(coordinate):
                return q
        raise KeyError(coordinate)

    def with_frequency_classes(self, assignment):
        """Return a copy whose QubitInfo entries carry frequency labels."""
        new_qubits = [replace(q, frequency_class=assignment.get(q.index))
                      for q in self.qubits]
        clone = CodeLayout(self.family, self.distance, new_qubits,
                           self.x_gauge, self.z_gauge, self.x_stabilizers,
                           self.z_stabilizers, self.logical_x, self.logical_z,
                           self.x_stab_gauges, self.z_stab_gauges, self.flags,
                           self.adjacency, self.geometry)
        return clone

    # -- serialization -------------------------------------------------

    def to_json_dict(self):
        return {
            "format": LAYOUT_FORMAT,
            "version": LAYOUT_VERSION,
            "family": self.family,
            "distance": self.distance,
            "qubits": [
                {"index": q.index, "role": q.role,
                 "coordinate": list(q.coordinate),
                 "frequency_class": q.frequency_class}
                for q in self.qubits
            ],
            "x_gauge": [g.to_text() for g in self.x_gauge],
            "z_gauge": [g.to_text() for g in self.z_gauge],
            "x_stabilizers": [s.to_text() for s in self.x_stabilizers],
            "z_stabilizers": [s.to_text() for s in self.z_stabilizers],
            "logical_x": self.logical_x.to_text(),
            "logical_z": self.logical_z.to_text(),
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def _check_distance(d):
    if d < 3 or d % 2 == 0:
        raise ValueError(f"distance must be odd and >= 3, got {d}")


def build(family: str, distance: int) -> CodeLayout:
    if family == FAMILY_HEX:
        return build_heavy_hexagon(distance)
    if family == FAMILY_SQUARE:
        return build_heavy_square(distance)
    raise ValueError(f"unknown family {family!r}")


def build_heavy_hexagon(d: int) -> CodeLayout:
    _check_distance(d)
    qubits = []
    data_index = {}
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            q = len(qubits)
            data_index[(i, j)] = q
            qubits.append(QubitInfo(q, ROLE_DATA, (2 * i - 1, 2 * j - 1)))

    white_index = {}
    for i in range(1, d):
        for j in range(1, d + 1):
            q = len(qubits)
            white_index[(i, j)] = q
            qubits.append(QubitInfo(q, ROLE_FLAG, (2 * i, 2 * j - 1)))

    dark_index = {}
    for i in range(1, d):
        for j in range(1, d):
            if (i + j) % 2 == 0:
                q = len(qubits)
                dark_index[(i, j)] = q
                qubits.append(QubitInfo(q, ROLE_SYNDROME, (2 * i, 2 * j)))

    top_anc, bottom_anc = {}, {}
    for m in range(1, (d - 1) // 2 + 1):
        q = len(qubits)
        top_anc[m] = q
        qubits.append(QubitInfo(q, ROLE_SYNDROME, (1, 4 * m)))
    for m in range(1, (d - 1) // 2 + 1):
        q = len(qubits)
        bottom_anc[m] = q
        qubits.append(QubitInfo(q, ROLE_SYNDROME, (2 * d - 1, 4 * m - 2)))

    n = len(qubits)

    def xop(points):
        return PauliOp.from_support(n, xs=[data_index[p] for p in points])

    def zop(points):
        return PauliOp.from_support(n, zs=[data_index[p] for p in points])

    # Z gauges ordered like the whites measuring them
    z_gauge, z_gauge_white, z_gauge_data = [], [], []
    z_gauge_at = {}
    for i in range(1, d):
        for j in range(1, d + 1):
            z_gauge_at[(i, j)] = len(z_gauge)
            z_gauge.append(zop([(i, j), (i + 1, j)]))
            z_gauge_white.append(white_index[(i, j)])
            z_gauge_data.append((data_index[(i, j)], data_index[(i + 1, j)]))

    x_gauge = []
    plaquettes = []
    for i in range(1, d):
        for j in range(1, d):
            if (i + j) % 2 != 0:
                continue
            gi = len(x_gauge)
            x_gauge.append(xop([(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)]))
            plaquettes.append(Plaquette(
                i=i, j=j, dark=dark_index[(i, j)],
                white_left=white_index[(i, j)],
                white_right=white_index[(i, j + 1)],
                data={"TL": data_index[(i, j)], "TR": data_index[(i, j + 1)],
                      "BL": data_index[(i + 1, j)], "BR": data_index[(i + 1, j + 1)]},
                gauge_index=gi))

    top_pairs, bottom_pairs = [], []
    for m in range(1, (d - 1) // 2 + 1):
        gi = len(x_gauge)
        x_gauge.append(xop([(1, 2 * m), (1, 2 * m + 1)]))
        top_pairs.append(BoundaryPair(
            ancilla=top_anc[m],
            data=(data_index[(1, 2 * m)], data_index[(1, 2 * m + 1)]),
            gen_index=gi, side="top"))
    for m in range(1, (d - 1) // 2 + 1):
        gi = len(x_gauge)
        x_gauge.append(xop([(d, 2 * m - 1), (d, 2 * m)]))
        bottom_pairs.append(BoundaryPair(
            ancilla=bottom_anc[m],
            data=(data_index[(d, 2 * m - 1)], data_index[(d, 2 * m)]),
            gen_index=gi, side="bottom"))

    # X stabilizers: the two-column strips
    x_stabilizers, x_stab_gauges = [], []
    for j in range(1, d):
        points = [(i, j) for i in range(1, d + 1)] + [(i, j + 1) for i in range(1, d + 1)]
        x_stabilizers.append(xop(points))
        members = [p.gauge_index for p in plaquettes if p.j == j]
        if j % 2 == 0:
            members.append(top_pairs[j // 2 - 1].gen_index)
        else:
            members.append(bottom_pairs[(j + 1) // 2 - 1].gen_index)
        x_stab_gauges.append(sorted(members))

    # Z stabilizers: odd plaquettes plus the boundary column pairs
    z_stabilizers, z_stab_gauges = [], []
    for i in range(1, d):
        for j in range(1, d):
            if (i + j) % 2 != 1:
                continue
            z_stabilizers.append(zop([(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)]))
            z_stab_gauges.append([z_gauge_at[(i, j)], z_gauge_at[(i, j + 1)]])
    for m in range(1, (d - 1) // 2 + 1):
        z_stabilizers.append(zop([(2 * m - 1, 1), (2 * m, 1)]))
        z_stab_gauges.append([z_gauge_at[(2 * m - 1, 1)]])
    for m in range(1, (d - 1) // 2 + 1):
        z_stabilizers.append(zop([(2 * m, d), (2 * m + 1, d)]))
        z_stab_gauges.append([z_gauge_at[(2 * m, d)]])

    logical_x = xop([(i, 1) for i in range(1, d + 1)])
    logical_z = zop([(1, j) for j in range(1, d + 1)])

    flags = {("x_gauge", p.gauge_index): {"Left": p.white_left, "Right": p.white_right}
             for p in plaquettes}

    adjacency = set()
    for (i, j), w in white_index.items():
        adjacency.add(frozenset((w, data_index[(i, j)])))
        adjacency.add(frozenset((w, data_index[(i + 1, j)])))
    for p in plaquettes:
        adjacency.add(frozenset((p.dark, p.white_left)))
        adjacency.add(frozenset((p.dark, p.white_right)))
    for pair in top_pairs + bottom_pairs:
        adjacency.add(frozenset((pair.ancilla, pair.data[0])))
        adjacency.add(frozenset((pair.ancilla, pair.data[1])))

    geometry = HexGeometry(data_index, white_index, dark_index, top_anc,
                           bottom_anc, plaquettes, top_pairs, bottom_pairs,
                           z_gauge_white, z_gauge_data)
    return CodeLayout(FAMILY_HEX, d, qubits, x_gauge, z_gauge, x_stabilizers,
                      z_stabilizers, logical_x, logical_z, x_stab_gauges,
                      z_stab_gauges, flags, adjacency, geometry)


def build_heavy_square(d: int) -> CodeLayout:
    _check_distance(d)
    qubits = []
    data_index = {}
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            q = len(qubits)
            data_index[(i, j)] = q
            qubits.append(QubitInfo(q, ROLE_DATA, (2 * i - 1, 2 * j - 1)))

    sf_index = {}
    for i in range(1, d):
        for j in range(1, d):
            q = len(qubits)
            sf_index[(i, j)] = q
            qubits.append(QubitInfo(q, ROLE_SYNDROME, (2 * i, 2 * j)))

    h_index = {}
    for i in range(1, d + 1):
        for j in range(1, d):
            q = len(qubits)
            h_index[(i, j)] = q
            qubits.append(QubitInfo(q, ROLE_FLAG, (2 * i - 1, 2 * j)))

    v_left, v_right = {}, {}
    for m in range(1, (d - 1) // 2 + 1):
        q = len(qubits)
        v_left[m] = q
        qubits.append(QubitInfo(q, ROLE_SYNDROME, (4 * m - 2, 0)))
    for m in range(1, (d - 1) // 2 + 1):
        q = len(qubits)
        v_right[m] = q
        qubits.append(QubitInfo(q, ROLE_SYNDROME, (4 * m, 2 * d)))

    n = len(qubits)

    def op(points, basis):
        idx = [data_index[p] for p in points]
        if basis == "X":
            return PauliOp.from_support(n, xs=idx)
        return PauliOp.from_support(n, zs=idx)

    x_stabilizers, z_stabilizers = [], []
    faces = []
    for i in range(1, d):
        for j in range(1, d):
            basis = "X" if (i + j) % 2 == 0 else "Z"
            corners = [(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)]
            stab = op(corners, basis)
            if basis == "X":
                si = len(x_stabilizers)
                x_stabilizers.append(stab)
            else:
                si = len(z_stabilizers)
                z_stabilizers.append(stab)
            faces.append(Face(
                i=i, j=j, basis=basis, syndrome=sf_index[(i, j)],
                flag_top=h_index[(i, j)], flag_bottom=h_index[(i + 1, j)],
                data={"TL": data_index[(i, j)], "TR": data_index[(i, j + 1)],
                      "BL": data_index[(i + 1, j)], "BR": data_index[(i + 1, j + 1)]},
                stab_index=si))

    top_pairs, bottom_pairs = [], []
    for m in range(1, (d - 1) // 2 + 1):
        si = len(x_stabilizers)
        x_stabilizers.append(op([(1, 2 * m), (1, 2 * m + 1)], "X"))
        top_pairs.append(BoundaryPair(
            ancilla=h_index[(1, 2 * m)],
            data=(data_index[(1, 2 * m)], data_index[(1, 2 * m + 1)]),
            gen_index=si, side="top"))
    for m in range(1, (d - 1) // 2 + 1):
        si = len(x_stabilizers)
        x_stabilizers.append(op([(d, 2 * m - 1), (d, 2 * m)], "X"))
        bottom_pairs.append(BoundaryPair(
            ancilla=h_index[(d, 2 * m - 1)],
            data=(data_index[(d, 2 * m - 1)], data_index[(d, 2 * m)]),
            gen_index=si, side="bottom"))

    left_pairs, right_pairs = [], []
    for m in range(1, (d - 1) // 2 + 1):
        si = len(z_stabilizers)
        z_stabilizers.append(op([(2 * m - 1, 1), (2 * m, 1)], "Z"))
        left_pairs.append(BoundaryPair(
            ancilla=v_left[m],
            data=(data_index[(2 * m - 1, 1)], data_index[(2 * m, 1)]),
            gen_index=si, side="left"))
    for m in range(1, (d - 1) // 2 + 1):
        si = len(z_stabilizers)
        z_stabilizers.append(op([(2 * m, d), (2 * m + 1, d)], "Z"))
        right_pairs.append(BoundaryPair(
            ancilla=v_right[m],
            data=(data_index[(2 * m, d)], data_index[(2 * m + 1, d)]),
            gen_index=si, side="right"))

    logical_x = op([(i, 1) for i in range(1, d + 1)], "X")
    logical_z = op([(1, j) for j in range(1, d + 1)], "Z")

    flags = {}
    for f in faces:
        kind = "x_stab" if f.basis == "X" else "z_stab"
        flags[(kind, f.stab_index)] = {"Left": f.flag_top, "Right": f.flag_bottom}

    adjacency = set()
    for (i, j), h in h_index.items():
        adjacency.add(frozenset((h, data_index[(i, j)])))
        adjacency.add(frozenset((h, data_index[(i, j + 1)])))
    for f in faces:
        adjacency.add(frozenset((f.syndrome, f.flag_top)))
        adjacency.add(frozenset((f.syndrome, f.flag_bottom)))
    for pair in left_pairs + right_pairs:
        adjacency.add(frozenset((pair.ancilla, pair.data[0])))
        adjacency.add(frozenset((pair.ancilla, pair.data[1])))

    geometry = SquareGeometry(data_index, sf_index, h_index, v_left, v_right,
                              faces, top_pairs, bottom_pairs, left_pairs,
                              right_pairs)
    # no gauge freedom: the gauge group is the stabilizer group
    return CodeLayout(FAMILY_SQUARE, d, qubits, list(x_stabilizers),
                      list(z_stabilizers), x_stabilizers, z_stabilizers,
                      logical_x, logical_z,
                      [[i] for i in range(len(x_stabilizers))],
                      [[i] for i in range(len(z_stabilizers))],
                      flags, adjacency, geometry)


def expected_counts(family: str, d: int):
    """Qubit totals per role for a distance-d member of the family."""
    if family == FAMILY_HEX:
        return {"data": d * d,
                "syndrome": (d + 1) * (d - 1) // 2,
                "flag": d * (d - 1),
                "total": (5 * d * d - 2 * d - 1) // 2}
    if family == FAMILY_SQUARE:
        return {"data": d * d,
                "syndrome": (d - 1) * (d - 1) + (d - 1),
                "flag": d * (d - 1),
                "total": 3 * d * d - 2 * d}
    raise ValueError(family)


def validate(layout: CodeLayout) -> List[str]:
    """Check every structural invariant; returns a list of violations."""
    v = []
    d = layout.distance
    counts = expected_counts(layout.family, d)
    by_role = {}
    for q in layout.qubits:
        by_role[q.role] = by_role.get(q.role, 0) + 1
    if layout.n_qubits != counts["total"]:
        v.append(f"total qubits {layout.n_qubits} != {counts['total']}")
    if by_role.get(ROLE_DATA, 0) != counts["data"]:
        v.append(f"data count {by_role.get(ROLE_DATA, 0)} != {counts['data']}")
    if by_role.get(ROLE_SYNDROME, 0) != counts["syndrome"]:
        v.append(f"syndrome count {by_role.get(ROLE_SYNDROME, 0)} != {counts['syndrome']}")
    if by_role.get(ROLE_FLAG, 0) != counts["flag"]:
        v.append(f"flag count {by_role.get(ROLE_FLAG, 0)} != {counts['flag']}")

    coords = [q.coordinate for q in layout.qubits]
    if len(set(coords)) != len(coords):
        v.append("duplicate qubit coordinates")
    data_coords = {q.coordinate for q in layout.qubits if q.role == ROLE_DATA}
    want = {(2 * i - 1, 2 * j - 1) for i in range(1, d + 1) for j in range(1, d + 1)}
    if data_coords != want:
        v.append("data qubits do not fill the d x d sub-lattice")

    gauges = layout.x_gauge + layout.z_gauge
    stabs = layout.x_stabilizers + layout.z_stabilizers
    for si, s in enumerate(stabs):
        for g in gauges:
            if not commutes(s, g):
                v.append(f"stabilizer {si} fails to commute with a gauge generator")
                break
    for a, b in itertools.combinations(range(len(stabs)), 2):
        if not commutes(stabs[a], stabs[b]):
            v.append(f"stabilizers {a} and {b} do not commute")

    gauge_span = pauli_span(gauges)
    for si, s in enumerate(stabs):
        if not in_span(s, gauge_span):
            v.append(f"stabilizer {si} is not a product of gauge generators")

    for s in stabs:
        if not commutes(layout.logical_x, s) or not commutes(layout.logical_z, s):
            v.append("a logical operator fails to commute with a stabilizer")
            break
    if commutes(layout.logical_x, layout.logical_z):
        v.append("logical operators do not anticommute")
    if layout.family == FAMILY_HEX:
        for g in gauges:
            if not commutes(layout.logical_x, g) or not commutes(layout.logical_z, g):
                v.append("bare logical fails to commute with a gauge generator")
                break

    for kind, gens in (("x", layout.x_gauge), ("z", layout.z_gauge)):
        for gi, g in enumerate(gens):
            key = (f"{kind}_gauge" if layout.family == FAMILY_HEX else f"{kind}_stab", gi)
            has = key in layout.flags
            if weight(g) == 4 and not has:
                v.append(f"weight-4 generator {key} lacks flag qubits")
            if weight(g) == 2 and has:
                v.append(f"weight-2 generator {key} should not carry flags")
            if has and len(layout.flags[key]) != 2:
                v.append(f"generator {key} does not have exactly two flags")

    degree = {}
    for edge in layout.adjacency:
        for q in edge:
            degree[q] = degree.get(q, 0) + 1
    max_deg = 3 if layout.family == FAMILY_HEX else 4
    for q, deg in degree.items():
        if deg > max_deg:
            v.append(f"qubit {q} has degree {deg} > {max_deg}")

    # per-stabilizer gauge composition must reproduce the stabilizer
    for si, members in enumerate(layout.x_stab_gauges):
        acc = PauliOp.identity(layout.n_qubits)
        for gi in members:
            acc = acc * layout.x_gauge[gi]
        if acc != layout.x_stabilizers[si]:
            v.append(f"x stabilizer {si} != product of its listed gauges")
    for si, members in enumerate(layout.z_stab_gauges):
        acc = PauliOp.identity(layout.n_qubits)
        for gi in members:
            acc = acc * layout.z_gauge[gi]
        if acc != layout.z_stabilizers[si]:
            v.append(f"z stabilizer {si} != product of its listed gauges")
    return v


def code_distance_bruteforce(layout: CodeLayout) -> int:
    """Minimum weight of a logical operator, by exhaustive search.

    For a CSS (subsystem) code the minimum-weight logical can be taken
    purely X type or purely Z type: the X part of any logical operator
    already commutes with every Z stabilizer and inherits the
    anticommutation with the bare Z logical, and symmetrically.  The
    search therefore scans X-type and Z-type supports separately,
    checking commutation with the opposite-type stabilizers and
    anticommutation with the opposite bare logical (which also rules
    out pure gauge operators, since those commute with bare logicals).
    """
    if layout.distance > 5:
        raise ValueError("brute-force distance search is limited to d <= 5")
    data = layout.data_qubits
    z_stab_masks = [s.z_mask for s in layout.z_stabilizers]
    x_stab_masks = [s.x_mask for s in layout.x_stabilizers]
    lz_mask = layout.logical_z.z_mask
    lx_mask = layout.logical_x.x_mask

    def search(stab_masks, logical_mask):
        for w in range(1, layout.distance + 1):
            for combo in itertools.combinations(data, w):
                mask = 0
                for q in combo:
                    mask |= 1 << q
                if (mask & logical_mask).bit_count() % 2 == 0:
                    continue
                if all((mask & sm).bit_count() % 2 == 0 for sm in stab_masks):
                    return w
        return None

    # X-type candidates must commute with Z stabilizers and anticommute
    # with the bare Z logical; Z-type candidates symmetrically.
    dx = search(z_stab_masks, lz_mask)
    dz = search(x_stab_masks, lx_mask)
    return min(x for x in (dx, dz) if x is not None)


def load_layout(path_or_dict) -> CodeLayout:
    """Rebuild a layout from its JSON document and verify consistency."""
    if isinstance(path_or_dict, dict):
        doc = path_or_dict
    else:
        with open(path_or_dict) as fh:
            doc = json.load(fh)
    if doc.get("format") != LAYOUT_FORMAT:
        raise ValueError("not a layout document")
    if doc.get("version") != LAYOUT_VERSION:
        raise ValueError(f"unsupported layout version {doc.get('version')}")
    layout = build(doc["family"], doc["distance"])
    mismatch = (
        [g.to_text() for g in layout.x_gauge] != doc["x_gauge"]
        or [g.to_text() for g in layout.z_gauge] != doc["z_gauge"]
        or [s.to_text() for s in layout.x_stabilizers] != doc["x_stabilizers"]
        or [s.to_text() for s in layout.z_stabilizers] != doc["z_stabilizers"]
        or layout.logical_x.to_text() != doc["logical_x"]
        or layout.logical_z.to_text() != doc["logical_z"]
    )
    if mismatch:
        raise ValueError("layout document does not match its family/distance rebuild")
    classes = {q["index"]: q["frequency_class"] for q in doc["qubits"]
               if q.get("frequency_class")}
    if classes:
        layout = layout.with_frequency_classes(classes)
    return layout
