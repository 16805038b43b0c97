"""Construction of the matching graphs used for decoding.

Each graph kind restricts one shot's detection events to one detector
basis.  For the heavy hexagon code the X-type stabilizers are column
strips, so their graph ("HexX-2D") is a strip-index-by-layer lattice;
the Z-type stabilizers give a plaquette-by-layer graph ("HexZ-3D").
The heavy square code yields two face graphs ("SquareX-3D" and
"SquareZ-3D").

Edges are derived by enumerating every single fault branch, restricting
its detection signature to the graph's basis, and asserting that at
most two events remain.  Two events make a regular edge, one event an
edge to the collapsed boundary vertex.  Branches that raise exactly one
flag are kept apart: their edges form the flag's boomerang set, and
event pairs that no unflagged fault can produce become cross edges,
deactivated unless the owning flag fired.

An edge's probability is the odd-parity combination of its per-location
contributions, P = (1 - prod_l (1 - 2 m_l u_l)) / 2, where location l
contributes m_l of its branches, each of elementary probability u_l
(p/15 for a two-qubit gate branch, 2p/3 for a preparation or
measurement flip, p/3 for an idle branch).  Weights are -log(P).

Closed-form expressions exist for several labeled edge families
(b1, bu, m, d1, d2, d1' on the strip graph; 2D-TLBR, 3D-TLBR and the
square vertical edge on the face graphs); they are implemented verbatim
in edge_probability_closed_form.  The published expressions book-keep
idling as a single location per data qubit and round, whereas the noise
model here places an idle fault at every live gateless step, and two of
them (m, square vertical) additionally disagree with enumeration at
leading order.  Each affected label therefore also carries a
"corrected" variant whose idle multiplicities are derived by static
schedule inspection.  The graphs themselves always use enumerated
probabilities.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import comb, log
from typing import Dict, List, Optional, Tuple

from .circuits import FlagRef, ScheduledCircuit, build_round, live_idle_steps
from .codes import FAMILY_HEX, FAMILY_SQUARE, ROLE_DATA, CodeLayout, build
from .frames import FastEngine
from .noise import KIND_GATE2, KIND_IDLE, NoiseParams
from .pauli import F2Basis, PauliOp

KIND_HEX_X = "HexX-2D"
KIND_HEX_Z = "HexZ-3D"
KIND_SQUARE_X = "SquareX-3D"
KIND_SQUARE_Z = "SquareZ-3D"
KINDS = (KIND_HEX_X, KIND_HEX_Z, KIND_SQUARE_X, KIND_SQUARE_Z)

_KIND_BASIS = {KIND_HEX_X: "x", KIND_HEX_Z: "z",
               KIND_SQUARE_X: "x", KIND_SQUARE_Z: "z"}
_KIND_FAMILY = {KIND_HEX_X: FAMILY_HEX, KIND_HEX_Z: FAMILY_HEX,
                KIND_SQUARE_X: FAMILY_SQUARE, KIND_SQUARE_Z: FAMILY_SQUARE}
# flag measurements relevant to each graph: a flag announces hook errors
# of the opposite Pauli type, caught by the opposite stabilizer basis
_KIND_FLAGS = {KIND_HEX_X: None, KIND_HEX_Z: "x_gauge",
               KIND_SQUARE_X: "z_stab", KIND_SQUARE_Z: "x_stab"}

UNIT_CNOT = "cnot"
UNIT_SPAM = "spam"
UNIT_IDLE = "idle"

CROSS_SENTINEL = 1e18


def unit_value(unit: str, p: float) -> float:
    if unit == UNIT_CNOT:
        return p / 15.0
    if unit == UNIT_SPAM:
        return 2.0 * p / 3.0
    if unit == UNIT_IDLE:
        return p / 3.0
    raise ValueError(unit)


@dataclass
class Edge:
    index: int
    u: int
    v: int  # v == graph.boundary for boundary edges
    label: str
    probability: float
    weight: float
    correction: PauliOp  # applied on data qubits when the edge is selected
    composition: Tuple[Tuple[str, int], ...]  # one (unit, m) per location
    cross: bool = False
    owners: Tuple[Tuple[int, int, str], ...] = ()  # boomerang keys (cross only)


class DecodingGraph:
    """Immutable matching graph for one (kind, distance, p)."""

    def __init__(self, kind, layout, rounds, params):
        self.kind = kind
        self.layout = layout
        self.rounds = rounds
        self.params = params
        self.basis = _KIND_BASIS[kind]
        stabs = layout.x_stabilizers if self.basis == "x" else layout.z_stabilizers
        self.n_space = len(stabs)
        self.n_layers = rounds + 1
        self.boundary = self.n_space * self.n_layers
        self.n_nodes = self.boundary + 1
        self.boundary_boundary_weight = 0.0
        self.edges: List[Edge] = []
        self.boomerangs: Dict[Tuple[int, int, str], Tuple[int, ...]] = {}

    def node(self, stab: int, layer: int) -> int:
        return (layer - 1) * self.n_space + stab

    def node_info(self, v: int) -> Optional[Tuple[int, int]]:
        """(stab index, layer) of a detector node, None for the boundary."""
        if v == self.boundary:
            return None
        layer, stab = divmod(v, self.n_space)
        return stab, layer + 1

    def edges_by_label(self, label: str) -> List[Edge]:
        return [e for e in self.edges if e.label == label]

    def edge_between(self, u: int, v: int, cross=False) -> Optional[Edge]:
        a, b = min(u, v), max(u, v)
        for e in self.edges:
            if (e.u, e.v, e.cross) == (a, b, cross):
                return e
        return None

    def structure_dict(self) -> dict:
        """Noise-independent description for regression freezing."""
        return {
            "kind": self.kind,
            "distance": self.layout.distance,
            "rounds": self.rounds,
            "n_space": self.n_space,
            "edges": [
                {"u": e.u, "v": e.v, "label": e.label, "cross": e.cross,
                 "composition": ["%s:%d" % c for c in e.composition],
                 "correction": e.correction.to_text()}
                for e in self.edges],
            "boomerangs": {
                "%d/%d/%s" % k: list(v)
                for k, v in sorted(self.boomerangs.items())},
        }

    def to_json_dict(self) -> dict:
        doc = self.structure_dict()
        doc["p"] = self.params.p
        for e, rec in zip(self.edges, doc["edges"]):
            rec["probability"] = e.probability
            rec["weight"] = e.weight
        return doc


def _detector_coords(layout: CodeLayout, basis: str) -> List[Tuple[float, float]]:
    """A representative (row, col) position for every detector."""
    geo = layout.geometry
    coords = [None] * (len(layout.x_stabilizers) if basis == "x"
                       else len(layout.z_stabilizers))
    if layout.family == FAMILY_HEX:
        if basis == "x":
            # strips: use the strip column midline
            for s in range(len(coords)):
                coords[s] = (float(layout.distance), 2.0 * (s + 1))
        else:
            for s, gauges in enumerate(layout.z_stab_gauges):
                pts = [layout.qubits[geo.z_gauge_white[g]].coordinate
                       for g in gauges]
                coords[s] = (sum(p[0] for p in pts) / len(pts),
                             sum(p[1] for p in pts) / len(pts))
    else:
        want = "X" if basis == "x" else "Z"
        for f in geo.faces:
            if f.basis == want:
                coords[f.stab_index] = tuple(
                    map(float, layout.qubits[f.syndrome].coordinate))
        pair_lists = ((geo.top_pairs + geo.bottom_pairs) if basis == "x"
                      else (geo.left_pairs + geo.right_pairs))
        for pair in pair_lists:
            coords[pair.gen_index] = tuple(
                map(float, layout.qubits[pair.ancilla].coordinate))
    if any(c is None for c in coords):
        raise AssertionError("detector without a position")
    return coords


def _strip_label(graph, events):
    """Labels of the strip-by-layer graph."""
    if len(events) == 1:
        return "b1"
    (s1, l1), (s2, l2) = sorted(events, key=lambda e: (e[1], e[0]))
    if s1 == s2:
        return "m"
    if l1 == l2:
        return "bu"
    shared_col = min(s1, s2) + 2  # strips j and j+1 share column j+1
    normal = s1 == min(s1, s2)  # earlier event on the lower-index strip
    if shared_col % 2 == 0:
        if not normal:
            raise AssertionError("reversed diagonal in an even column")
        return "d1"
    return "d2" if normal else "d1'"


def _face_label(graph, coords, events):
    """Labels of the face-by-layer graphs."""
    if len(events) == 1:
        return "Bnd"
    (s1, l1), (s2, l2) = sorted(events, key=lambda e: (e[1], coords[e[0]]))
    if l1 != l2 and s1 == s2:
        return "3DV"
    dr = coords[s2][0] - coords[s1][0]
    dc = coords[s2][1] - coords[s1][1]
    orient = "TLBR" if dr * dc >= 0 else "BLTR"
    return ("2D-" if l1 == l2 else "3D-") + orient


def build_graph(layout: CodeLayout, circuit: ScheduledCircuit, kind: str,
                params: NoiseParams, rounds: Optional[int] = None,
                engine: Optional[FastEngine] = None) -> DecodingGraph:
    """Enumerate single faults into the matching graph of the given kind."""
    if kind not in KINDS:
        raise ValueError(f"unknown graph kind {kind!r}")
    if _KIND_FAMILY[kind] != layout.family:
        raise ValueError(f"kind {kind} does not fit family {layout.family}")
    if rounds is None:
        rounds = layout.distance
    if engine is None:
        engine = FastEngine(circuit, rounds)
    elif engine.rounds != rounds:
        raise ValueError("engine round count mismatch")
    graph = DecodingGraph(kind, layout, rounds, params)
    basis = graph.basis
    n_x = engine.n_x

    def restrict(word):
        if basis == "x":
            return word & ((1 << n_x) - 1)
        return word >> n_x

    flag_kind = _KIND_FLAGS[kind]
    relevant_slots = {slot for ref, slot in engine.flag_slots.items()
                      if ref.kind == flag_kind}
    gauge_masks = (g.x_mask for g in layout.x_gauge) if basis == "z" \
        else (g.z_mask for g in layout.z_gauge)
    equiv_basis = F2Basis(gauge_masks)
    coords = _detector_coords(layout, basis)

    def bits(word):
        out = []
        while word:
            out.append((word & -word).bit_length() - 1)
            word &= word - 1
        return out

    # per-branch relative signatures in this basis
    branch_rows = []  # (loc_idx, unit, rel events, residual mask, flag ref)
    for loc_idx, spec in enumerate(engine.template):
        unit = {KIND_GATE2: UNIT_CNOT, KIND_IDLE: UNIT_IDLE}.get(
            spec.kind, UNIT_SPAM)
        for b, branch in enumerate(spec.branches):
            sig = engine._sigs[loc_idx][b]
            ev = [(s, 0) for s in bits(restrict(sig.T))]
            ev += [(s, 1) for s in bits(restrict(sig.T ^ sig.S))]
            if len(ev) > 2:
                raise AssertionError(
                    f"fault at {spec.step} {spec.gate} {branch} touches "
                    f"{len(ev)} detectors of {kind}")
            res = sig.res_x if basis == "z" else sig.res_z
            flags = [s for s in bits(sig.flags) if s in relevant_slots]
            if len(flags) > 1:
                # announced gauge element: no residual, nothing to decode
                if ev or res:
                    raise AssertionError("double flag with visible effect")
                continue
            slot_ref = None
            if flags:
                for ref, slot in engine.flag_slots.items():
                    if slot == flags[0]:
                        slot_ref = ref
                        break
            if not ev and not flags:
                continue
            branch_rows.append((loc_idx, unit, tuple(ev), res, slot_ref))

    # instantiate over rounds; plain edges first, then flagged branches
    plain: Dict[Tuple[int, int], dict] = {}
    flagged: Dict[Tuple[int, int], dict] = {}
    boomerang_sets: Dict[Tuple[int, int, str], set] = {}

    def edge_key(ev_abs):
        nodes = [graph.node(s, layer) for s, layer in ev_abs]
        if len(nodes) == 1:
            nodes.append(graph.boundary)
        return (min(nodes), max(nodes))

    for r in range(1, rounds + 1):
        for loc_idx, unit, ev, res, flag in branch_rows:
            ev_abs = [(s, r + off) for s, off in ev]
            bucket = None
            if flag is None:
                if ev_abs:
                    bucket = plain.setdefault(edge_key(ev_abs), {
                        "comp": {}, "res": None, "events": tuple(ev_abs)})
            else:
                key = (flag.gen_index, r, flag.side)
                boomerang_sets.setdefault(key, set())
                if ev_abs:
                    bucket = flagged.setdefault(edge_key(ev_abs), {
                        "comp": {}, "res": None, "events": tuple(ev_abs),
                        "owners": set()})
                    bucket["owners"].add(key)
            if bucket is None:
                continue
            comp_key = (r, loc_idx)
            bucket["comp"][comp_key] = (unit,
                                        bucket["comp"].get(comp_key,
                                                           (unit, 0))[1] + 1)
            if bucket["res"] is None:
                bucket["res"] = res
            elif not equiv_basis.contains(bucket["res"] ^ res):
                raise AssertionError(
                    f"inequivalent residuals merged on one {kind} edge")

    # A flagged event pair folds onto an existing plain edge only when
    # the residuals agree up to gauge; otherwise it needs its own cross
    # edge carrying the hook correction (this matters at the lattice
    # boundary, where a two-qubit hook and a single data error produce
    # the same lone detector event but differ by a logical).
    cross = {}
    for key, info in flagged.items():
        if key in plain and equiv_basis.contains(
                plain[key]["res"] ^ info["res"]):
            info["plain_alias"] = True
        else:
            cross[key] = info

    def make_edge(index, key, info, is_cross):
        comp = tuple(sorted(
            (unit, m) for unit, m in info["comp"].values()))
        p = params.p
        prod = 1.0
        for unit, m in comp:
            prod *= 1.0 - 2.0 * m * unit_value(unit, p)
        prob = 0.5 * (1.0 - prod)
        n = layout.n_qubits
        if basis == "z":
            correction = PauliOp.from_masks(n, info["res"], 0)
        else:
            correction = PauliOp.from_masks(n, 0, info["res"])
        if is_cross:
            label = "Cross"
        elif graph.layout.family == FAMILY_HEX and basis == "x":
            label = _strip_label(graph, [graph.node_info(v) for v in key
                                         if v != graph.boundary])
        else:
            label = _face_label(graph, coords,
                                [graph.node_info(v) for v in key
                                 if v != graph.boundary])
        weight = CROSS_SENTINEL if is_cross else -log(prob)
        owners = tuple(sorted(info.get("owners", ())))
        return Edge(index, key[0], key[1], label, prob, weight, correction,
                    comp, is_cross, owners)

    edge_ids = {}
    for key in sorted(plain):
        e = make_edge(len(graph.edges), key, plain[key], False)
        edge_ids[(key, False)] = e.index
        graph.edges.append(e)
    for key in sorted(cross):
        e = make_edge(len(graph.edges), key, cross[key], True)
        edge_ids[(key, True)] = e.index
        graph.edges.append(e)

    for key, info in flagged.items():
        eid = edge_ids[(key, key in cross)]
        for owner in info["owners"]:
            boomerang_sets[owner].add(eid)
    graph.boomerangs = {k: tuple(sorted(v))
                        for k, v in sorted(boomerang_sets.items())}
    return graph


def boomerang_table(circuit: ScheduledCircuit, graph: DecodingGraph):
    """Flag instance -> edge ids the flagged faults can corrupt."""
    if circuit.layout is not graph.layout and \
            circuit.layout.to_json_dict() != graph.layout.to_json_dict():
        raise ValueError("circuit does not match the graph's layout")
    return dict(graph.boomerangs)


def edge_probability_enumerated(graph: DecodingGraph, edge: Edge,
                                circuit=None, p: Optional[float] = None) -> float:
    """Leading-order probability: sum of the edge's branch probabilities."""
    if p is None:
        p = graph.params.p
    return sum(m * unit_value(unit, p) for unit, m in edge.composition)


# ---------------------------------------------------------------------------
# closed forms


def _odd_parity(groups) -> float:
    """P(odd total count) for independent groups of (count, prob) items."""
    prod = 1.0
    for count, prob in groups:
        prod *= (1.0 - 2.0 * prob) ** count
    return 0.5 * (1.0 - prod)


def _capture_windows(layout, circuit):
    """Static schedule facts feeding the corrected closed forms.

    For every qubit: its live idle steps; for every data qubit: the
    steps of its capture legs.  A leg where the data qubit is the CNOT
    target copies Z errors onto the measuring chain, a leg where it is
    the control copies X errors.  An error arising during idle step t
    acts from step t+1 on, so the leg at step s picks it up iff
    t + 1 <= s.
    """
    live = {q.index: live_idle_steps(circuit, q.index)
            for q in layout.qubits}
    as_target: Dict[int, List[int]] = {}
    as_control: Dict[int, List[int]] = {}
    data = set(layout.data_qubits)
    for t in range(1, circuit.depth + 1):
        for g in circuit.gates_at(t):
            if g.kind != "CNOT":
                continue
            c, tg = g.qubits
            if tg in data:
                as_target.setdefault(tg, []).append(t)
            if c in data:
                as_control.setdefault(c, []).append(t)
    return live, as_target, as_control


def _gap_slots(live_steps, legs):
    """Live idle steps whose error only the later of two legs captures."""
    if len(legs) != 2:
        return 0
    a, b = sorted(legs)
    return sum(1 for t in live_steps if a <= t < b)


def _modal(values):
    """Most frequent value; ties resolved toward the larger one."""
    counts = Counter(values)
    top = max(counts.values())
    return max(v for v, n in counts.items() if n == top)


@lru_cache(maxsize=None)
def _hex_idle_census(d: int):
    """Idle multiplicities of the corrected strip/face closed forms.

    Every count is obtained by sorting live idle steps into capture
    windows defined by the schedule alone; the fault enumeration that
    the closed forms are validated against plays no part.  Data errors
    on a lattice column land on b1 edges (boundary column: one strip
    sees them), or split between bu (both strips catch in the same
    round) and d1 (the window between a qubit's two strip legs, caught
    one round apart).  The m edge additionally absorbs idle errors on
    the measured ancillas of one strip, and the bulk spacelike face
    edge (2D-TLBR) collects a shared data qubit's off-window slots.
    """
    layout = build(FAMILY_HEX, d)
    circuit = build_round(layout)
    live, as_target, as_control = _capture_windows(layout, circuit)

    columns: Dict[int, List[int]] = {}
    for q in layout.qubits:
        if q.role == ROLE_DATA:
            columns.setdefault((q.coordinate[1] + 1) // 2, []).append(q.index)
    col_live = {c: sum(len(live[q]) for q in qs)
                for c, qs in columns.items()}
    col_gap = {c: sum(_gap_slots(live[q], as_target.get(q, ())) for q in qs)
               for c, qs in columns.items()}
    interior = range(2, d)

    geo = layout.geometry
    anc_of_gauge = {pl.gauge_index: pl.dark for pl in geo.plaquettes}
    for pair in geo.top_pairs + geo.bottom_pairs:
        anc_of_gauge[pair.gen_index] = pair.ancilla
    m_counts = [sum(len(live[anc_of_gauge[g]]) for g in gauges)
                for gauges in layout.x_stab_gauges]

    face_classes = []
    for q in layout.data_qubits:
        z_legs = as_control.get(q, ())
        if len(z_legs) == 2:
            gates = len(z_legs) + len(as_target.get(q, ()))
            face_classes.append(
                (gates, len(live[q]) - _gap_slots(live[q], z_legs)))

    return {"b1": col_live[1],
            "bu": _modal(col_live[c] - col_gap[c] for c in interior),
            "d1": _modal(col_gap[c] for c in interior),
            "m": _modal(m_counts),
            "2D-TLBR": _modal(face_classes)}


@lru_cache(maxsize=None)
def _square_3dv_idles(d: int) -> int:
    """Live idle steps of a bulk face's measured ancilla (heavy square)."""
    layout = build(FAMILY_SQUARE, d)
    circuit = build_round(layout)
    return _modal(len(live_idle_steps(circuit, f.syndrome))
                  for f in layout.geometry.faces)


def _b1_printed(d, p):
    a, b = 2 * p / 3, 8 * p / 15
    total = 0.0
    for n in range(1, (d + 1) // 2 + 1):
        for m in range(0, (3 * d - 3) // 2 + 1):
            total += (comb(d, 2 * n - 1) * a ** (2 * n - 1)
                      * (1 - a) ** (d - (2 * n - 1))
                      * comb(3 * d - 2, 2 * m) * b ** (2 * m)
                      * (1 - b) ** (3 * d - 2 - 2 * m))
    for n in range(0, (d - 1) // 2 + 1):
        for m in range(1, (3 * d - 1) // 2 + 1):
            total += (comb(d, 2 * n) * a ** (2 * n) * (1 - a) ** (d - 2 * n)
                      * comb(3 * d - 2, 2 * m - 1) * b ** (2 * m - 1)
                      * (1 - b) ** (3 * d - 2 - (2 * m - 1)))
    return total


def _bu_printed(d, p):
    a, b, c = 2 * p / 3, 8 * p / 15, 4 * p / 15
    na, nb, nc = d, 2 * (d - 1), 2 * d

    def term(par_a, par_b, par_c):
        out = 0.0
        for i in range(par_a, na + 1, 2):
            for j in range(par_b, nb + 1, 2):
                for k in range(par_c, nc + 1, 2):
                    out += (comb(na, i) * a ** i * (1 - a) ** (na - i)
                            * comb(nb, j) * b ** j * (1 - b) ** (nb - j)
                            * comb(nc, k) * c ** k * (1 - c) ** (nc - k))
        return out

    return (term(1, 0, 0) + term(0, 1, 0) + term(0, 0, 1) + term(1, 1, 1))


def _m_printed(d, p):
    """The m-edge expression with its printed irregularities kept.

    The last factor uses survival exponents d-2l and d-(2l-1) against
    binomials over d+1 items, and the all-odd term pairs the binomial
    C(d+1, 2l-1) with the power (2p/3)^{2l}.  The leading order works
    out to (22d+6)p/15, which disagrees with the fault enumeration;
    the graphs therefore never use this expression.
    """
    a, b, c = 4 * p / 15, 8 * p / 15, 2 * p / 3
    total = 0.0
    for n in range(1, (d + 1) // 2 + 1):
        for m in range(0, (d - 1) // 2 + 1):
            for l in range(0, (d - 1) // 2 + 1):
                total += (comb(d + 1, 2 * n - 1) * a ** (2 * n - 1)
                          * (1 - a) ** (d + 1 - (2 * n - 1))
                          * comb(d - 1, 2 * m) * b ** (2 * m)
                          * (1 - b) ** (d - 1 - 2 * m)
                          * comb(d + 1, 2 * l) * c ** (2 * l)
                          * (1 - c) ** (d - 2 * l))
    for n in range(0, (d + 1) // 2 + 1):
        for m in range(1, (d - 1) // 2 + 1):
            for l in range(0, (d - 1) // 2 + 1):
                total += (comb(d + 1, 2 * n) * a ** (2 * n)
                          * (1 - a) ** (d + 1 - 2 * n)
                          * comb(d - 1, 2 * m - 1) * b ** (2 * m - 1)
                          * (1 - b) ** (d - 1 - (2 * m - 1))
                          * comb(d + 1, 2 * l) * c ** (2 * l)
                          * (1 - c) ** (d - 2 * l))
    for n in range(0, (d + 1) // 2 + 1):
        for m in range(0, (d - 1) // 2 + 1):
            for l in range(1, (d + 1) // 2 + 1):
                total += (comb(d + 1, 2 * n) * a ** (2 * n)
                          * (1 - a) ** (d + 1 - 2 * n)
                          * comb(d - 1, 2 * m) * b ** (2 * m)
                          * (1 - b) ** (d - 1 - 2 * m)
                          * comb(d + 1, 2 * l - 1) * c ** (2 * l - 1)
                          * (1 - c) ** (d - (2 * l - 1)))
    for n in range(1, (d + 1) // 2 + 1):
        for m in range(1, (d - 1) // 2 + 1):
            for l in range(1, (d + 1) // 2 + 1):
                total += (comb(d + 1, 2 * n - 1) * a ** (2 * n - 1)
                          * (1 - a) ** (d + 1 - (2 * n - 1))
                          * comb(d - 1, 2 * m - 1) * b ** (2 * m - 1)
                          * (1 - b) ** (d - 1 - (2 * m - 1))
                          * comb(d + 1, 2 * l - 1) * c ** (2 * l)
                          * (1 - c) ** (d - (2 * l - 1)))
    return total


_ALIASES = {"d'1": "d1'", "2D-BLTR": "2D-TLBR", "3D-BLTR": "3D-TLBR",
            "3DV": "square-3DV"}


def edge_probability_closed_form(label: str, d: int, p: float,
                                 variant: str = "printed") -> float:
    """Evaluate the closed-form expression for a labeled edge.

    ``variant="printed"`` reproduces the published expressions verbatim.
    Those expressions book-keep a single idle location per data qubit
    and round, while the noise model here idles every live gateless
    step, and the m and square vertical expressions further disagree
    with enumeration at leading order.  ``variant="corrected"``
    replaces each affected expression by the odd-parity aggregate of
    the same gate-fault groups plus schedule-derived idle
    multiplicities; labels whose printed form already matches
    enumeration (d2, d1', 3D-TLBR) have no corrected variant.
    """
    label = _ALIASES.get(label, label)
    if variant not in ("printed", "corrected"):
        raise ValueError(variant)
    if label == "b1":
        if variant == "corrected":
            # one boundary column per round: its 2d strip legs, the
            # 2d-2 hook-carrying readout legs, and every live idle
            # step of the column's data qubits
            return _odd_parity([(2 * d, 4 * p / 15),
                                (2 * d - 2, 8 * p / 15),
                                (_hex_idle_census(d)["b1"], 2 * p / 3)])
        return _b1_printed(d, p)
    if label == "d2":
        return 0.5 - 0.5 * (8 * p / 15 - 1) ** (2 * d - 2)
    if label == "d1":
        if variant == "corrected":
            # an interior column's 2d strip legs plus the idle slots
            # sitting between a qubit's two legs (one strip catches a
            # round later than the other)
            return _odd_parity([(2 * d, 4 * p / 15),
                                (_hex_idle_census(d)["d1"], 2 * p / 3)])
        return 0.5 - 0.5 * (1 - 8 * p / 15) ** (2 * d)
    if label == "d1'":
        return (8 * p / 15) * (1 - 4 * p / 15)
    if label == "bu":
        if variant == "corrected":
            # as b1, but for an interior column caught by both strips;
            # the between-leg slots belong to d1 instead
            return _odd_parity([(2 * d, 4 * p / 15),
                                (2 * d - 2, 8 * p / 15),
                                (_hex_idle_census(d)["bu"], 2 * p / 3)])
        return _bu_printed(d, p)
    if label == "m":
        if variant == "corrected":
            # per strip and round: 2d four-branch and 2d-2 eight-branch
            # gate locations, preparation/readout flips of the strip's
            # d+1 measured ancillas, and those ancillas' live idle steps
            return _odd_parity([(2 * d, 4 * p / 15),
                                (2 * d - 2, 8 * p / 15),
                                (d + 1 + _hex_idle_census(d)["m"],
                                 2 * p / 3)])
        return _m_printed(d, p)
    if label == "2D-TLBR":
        if variant == "corrected":
            # the shared data qubit's gate locations plus its live idle
            # steps outside the between-leg window
            gates, idles = _hex_idle_census(d)["2D-TLBR"]
            return _odd_parity([(gates, 4 * p / 15), (idles, 2 * p / 3)])
        return (16 * p / 15 * (1 - 4 * p / 15) ** 3 * (1 - 2 * p / 3)
                + 2 * p / 3 * (1 - 4 * p / 15) ** 4)
    if label == "3D-TLBR":
        return 8 * p / 15 * (1 - 4 * p / 15)
    if label == "square-3DV":
        if variant == "corrected":
            # four four-branch and four eight-branch gate locations,
            # the measured ancilla's two flips and its live idle steps
            return _odd_parity([(4, 4 * p / 15), (4, 8 * p / 15),
                                (2 + _square_3dv_idles(d), 2 * p / 3)])
        return (32 * p / 15 * (1 - 8 * p / 15) ** 3 * (1 - 4 * p / 15) ** 4
                * (1 - 2 * p / 3)
                + 16 * p / 15 * (1 - 8 * p / 15) ** 4 * (1 - 4 * p / 15) ** 3
                * (1 - 2 * p / 3)
                + 2 * p / 3 * (1 - 8 * p / 15) ** 4 * (1 - 4 * p / 15) ** 4)
    raise ValueError(f"no closed form for label {label!r}")


# ---------------------------------------------------------------------------
# export


def export_json(graph: DecodingGraph) -> str:
    return json.dumps(graph.to_json_dict(), indent=1, sort_keys=True)


def export_dot(graph: DecodingGraph) -> str:
    lines = [f'graph "{graph.kind}" {{']
    for v in range(graph.n_nodes):
        info = graph.node_info(v)
        if info is None:
            lines.append(f'  n{v} [label="B", shape=square];')
        else:
            lines.append(f'  n{v} [label="s{info[0]}/t{info[1]}"];')
    for e in graph.edges:
        style = ', style=dashed' if e.cross else ''
        lines.append(f'  n{e.u} -- n{e.v} [label="{e.label}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
