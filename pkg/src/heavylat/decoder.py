"""Flag-aware minimum-weight matching on the decoding graphs.

The decoding protocol, per graph and shot:

1. Count the usable flags relevant to the graph (m).  A flag is usable
   unless its partner on the same generator fired in the same round, in
   which case the pair announces a gauge element and both are ignored.
2. Reweight: edges inside the boomerangs of the fired flags keep their
   weight, cross edges among them are activated at -log of their own
   probability, and every other edge is penalized by alpha * m * log(1/p).
3. Match the detection events pairwise or to the boundary at shortest
   reweighted path cost, minimizing the total.
4. Recover the shortest paths and project them onto the data qubits by
   multiplying the traversed edges' correction operators.

Matching uses an exact subset dynamic program per event component; for
oversized components an exact blossom matching from networkx takes
over.  With no flags fired the all-pairs distances of the base graph
are served from a cache, which covers the bulk of low-noise shots.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .codes import CodeLayout, FAMILY_HEX
from .circuits import FlagRef, ScheduledCircuit
from .frames import FastEngine, static_syndrome
from .graphs import (CROSS_SENTINEL, DecodingGraph, build_graph,
                     _KIND_FLAGS)
from .noise import NoiseParams
from .pauli import PauliOp

_DP_LIMIT = 9


@dataclass
class DecodeResult:
    correction: PauliOp
    m: int
    cost: float
    pairs: List[Tuple[int, Optional[int]]]  # event node -> partner or None
    edge_ids: List[int]


class GraphDecoder:
    """Matching machinery bound to one decoding graph."""

    def __init__(self, graph: DecodingGraph):
        self.graph = graph
        self.p = graph.params.p
        n_e = len(graph.edges)
        self.e_u = np.fromiter((e.u for e in graph.edges), dtype=np.int64,
                               count=n_e)
        self.e_v = np.fromiter((e.v for e in graph.edges), dtype=np.int64,
                               count=n_e)
        self.base_w = np.fromiter((e.weight for e in graph.edges),
                                  dtype=np.float64, count=n_e)
        self.is_cross = np.fromiter((e.cross for e in graph.edges),
                                    dtype=bool, count=n_e)
        self.active_w = np.where(
            self.is_cross,
            [-log(e.probability) for e in graph.edges],
            self.base_w)
        self.corr_x = [e.correction.x_mask for e in graph.edges]
        self.corr_z = [e.correction.z_mask for e in graph.edges]
        # a node pair can carry both a plain edge and a cross edge; paths
        # see the cheaper of the two under the current weights
        self.edge_of: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        pair_index: Dict[Tuple[int, int], int] = {}
        self._edge_pair = np.empty(n_e, dtype=np.int64)
        for e in graph.edges:
            k = (e.u, e.v)
            if k not in pair_index:
                pair_index[k] = len(pair_index)
            self._edge_pair[e.index] = pair_index[k]
            self.edge_of[k] = self.edge_of.get(k, ()) + (e.index,)
        self._n_pairs = len(pair_index)
        p_u = np.fromiter((u for u, _ in pair_index), dtype=np.int64,
                          count=self._n_pairs)
        p_v = np.fromiter((v for _, v in pair_index), dtype=np.int64,
                          count=self._n_pairs)
        self._rows = np.concatenate([p_u, p_v])
        self._cols = np.concatenate([p_v, p_u])
        self._shape = (graph.n_nodes, graph.n_nodes)
        # CSR sparsity pattern never changes; remember where each COO
        # entry lands so per-shot rebuilds are a gather, not a sort
        template = csr_matrix(
            (np.arange(2 * self._n_pairs, dtype=np.float64),
             (self._rows, self._cols)), shape=self._shape)
        self._csr_indices = template.indices
        self._csr_indptr = template.indptr
        self._csr_src = template.data.astype(np.int64) % self._n_pairs
        self._base_csr = self._csr(self.base_w)
        self._ap_dist, self._ap_pred = dijkstra(
            self._base_csr, directed=True, return_predecessors=True)

    def _csr(self, w):
        pw = np.full(self._n_pairs, np.inf)
        np.minimum.at(pw, self._edge_pair, w)
        return csr_matrix((pw[self._csr_src], self._csr_indices,
                           self._csr_indptr), shape=self._shape)

    # -- reweighting

    def reweight(self, m: int, highlighted: Sequence[Tuple[int, int, str]],
                 alpha: float = 1.0) -> np.ndarray:
        """Per-edge weights after applying the flag information."""
        if m > 0 and self.p <= 0.0:
            raise ValueError("flag penalty undefined at zero noise")
        w = self.base_w.copy()
        if m > 0:
            w += alpha * m * (-log(self.p))
        for key in highlighted:
            for eid in self.graph.boomerangs[key]:
                w[eid] = self.active_w[eid]
        return w

    # -- matching

    def match(self, nodes: Sequence[int], w: Optional[np.ndarray] = None):
        """Pair up event nodes (or send them to the boundary).

        Returns (pairs, cost, dist, pred, sources) where pairs is a list
        of (source position, partner position or None).
        """
        sources = sorted(set(nodes))
        if not sources:
            return [], 0.0, None, None, sources
        if w is None:
            dist = self._ap_dist[sources]
            pred = self._ap_pred[sources]
        else:
            dist, pred = dijkstra(self._csr(w), directed=True,
                                  indices=sources,
                                  return_predecessors=True)
        k = len(sources)
        d_b = dist[:, self.graph.boundary]
        d_ev = dist[:, sources]

        # split into components whose pairings could beat the boundary
        parent = list(range(k))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        useful = d_ev < (d_b[:, None] + d_b[None, :] - 1e-12)
        for i, j in np.argwhere(np.triu(useful, 1)):
            parent[find(i)] = find(j)

        comps: Dict[int, List[int]] = {}
        for i in range(k):
            comps.setdefault(find(i), []).append(i)

        pairs: List[Tuple[int, Optional[int]]] = []
        cost = 0.0
        for members in (comps[r] for r in sorted(comps)):
            if len(members) == 1:
                i = members[0]
                pairs.append((i, None))
                cost += d_b[i]
            elif len(members) <= _DP_LIMIT:
                sub, sub_cost = _match_subset(members, d_ev, d_b)
                pairs += sub
                cost += sub_cost
            else:
                sub, sub_cost = _match_blossom(members, d_ev, d_b)
                pairs += sub
                cost += sub_cost
        return pairs, cost, dist, pred, sources

    # -- path recovery

    def recover(self, pairs, dist, pred, sources,
                w: Optional[np.ndarray] = None):
        """Edges along the matched shortest paths, projected mod 2."""
        wt = self.base_w if w is None else w
        x_mask = z_mask = 0
        counts: Dict[int, int] = {}
        for i, j in pairs:
            target = self.graph.boundary if j is None else sources[j]
            row = pred[i]
            b = target
            while b != sources[i]:
                a = row[b]
                if a < 0:
                    raise RuntimeError("broken predecessor chain")
                cands = self.edge_of[(min(a, b), max(a, b))]
                eid = cands[0]
                if len(cands) > 1:
                    eid = min(cands, key=lambda e: (wt[e], e))
                counts[eid] = counts.get(eid, 0) + 1
                b = a
        edge_ids = sorted(e for e, c in counts.items() if c % 2)
        for eid in edge_ids:
            x_mask ^= self.corr_x[eid]
            z_mask ^= self.corr_z[eid]
        n = self.graph.layout.n_qubits
        return PauliOp.from_masks(n, x_mask, z_mask), edge_ids

    def decode(self, nodes: Sequence[int], m: int = 0,
               highlighted: Sequence[Tuple[int, int, str]] = (),
               alpha: float = 1.0) -> DecodeResult:
        n = self.graph.layout.n_qubits
        if not nodes:
            return DecodeResult(PauliOp.identity(n), m, 0.0, [], [])
        w = None if (m == 0 and not highlighted) else \
            self.reweight(m, highlighted, alpha)
        pairs, cost, dist, pred, sources = self.match(nodes, w)
        correction, edge_ids = self.recover(pairs, dist, pred, sources, w)
        resolved = [(sources[i], None if j is None else sources[j])
                    for i, j in pairs]
        return DecodeResult(correction, m, cost, resolved, edge_ids)


def _match_subset(members, d_ev, d_b):
    """Exact minimum-cost pairing by dynamic programming over subsets."""
    k = len(members)
    # plain lists: scalar indexing into numpy arrays dominates otherwise
    cost = [[float(d_ev[a, b]) for b in members] for a in members]
    bnd = [float(d_b[a]) for a in members]
    size = 1 << k
    INF = float("inf")
    best = [INF] * size
    choice = [-1] * size
    best[0] = 0.0
    for s in range(1, size):
        i = (s & -s).bit_length() - 1
        rest = s ^ (1 << i)
        c = bnd[i] + best[rest]
        ch = i  # boundary choice encoded as self-pairing
        row = cost[i]
        rem = rest
        while rem:
            j = (rem & -rem).bit_length() - 1
            rem &= rem - 1
            c2 = row[j] + best[rest ^ (1 << j)]
            if c2 < c:
                c, ch = c2, j
        best[s] = c
        choice[s] = ch
    pairs = []
    s = size - 1
    while s:
        i = (s & -s).bit_length() - 1
        ch = choice[s]
        if ch == i:
            pairs.append((members[i], None))
            s ^= 1 << i
        else:
            pairs.append((members[i], members[ch]))
            s ^= (1 << i) | (1 << ch)
    return pairs, best[size - 1]


def _match_blossom(members, d_ev, d_b):
    """Exact fallback for large components via blossom matching.

    Pairing two events is only ever worthwhile when it beats sending
    both to the boundary, so maximizing the total savings over a
    matching of the event nodes minimizes the total cost; unmatched
    events go to the boundary.
    """
    import networkx as nx

    G = nx.Graph()
    G.add_nodes_from(members)
    for ai in range(len(members)):
        for bi in range(ai + 1, len(members)):
            a, b = members[ai], members[bi]
            gain = float(d_b[a] + d_b[b] - d_ev[a, b])
            if gain > 0.0:
                G.add_edge(a, b, weight=gain)
    mate = nx.max_weight_matching(G)
    partner = {}
    for x, y in mate:
        partner[x] = y
        partner[y] = x
    pairs = []
    cost = 0.0
    for a in members:
        if a not in partner:
            pairs.append((a, None))
            cost += float(d_b[a])
        elif a < partner[a]:
            pairs.append((a, partner[a]))
            cost += float(d_ev[a, partner[a]])
    pairs.sort(key=lambda ab: ab[0])
    return pairs, cost


# ---------------------------------------------------------------------------
# whole-shot decoding


def adjudicate(correction: PauliOp, residual: PauliOp,
               layout: CodeLayout) -> Optional[str]:
    """Classify the net error left after applying the correction.

    Returns None when the net operator acts trivially on the encoded
    qubit, otherwise "X", "Z" or "Y" for the logical it implements.  A
    net operator with nonzero stabilizer syndrome indicates a decoder
    defect and raises.
    """
    ex = correction.x_mask ^ residual.x_mask
    ez = correction.z_mask ^ residual.z_mask
    sx, sz = static_syndrome(layout, ex, ez)
    if sx or sz:
        raise RuntimeError("correction leaves a nonzero syndrome")
    x_fail = bin(ex & layout.logical_z.z_mask).count("1") % 2 == 1
    z_fail = bin(ez & layout.logical_x.x_mask).count("1") % 2 == 1
    if x_fail and z_fail:
        return "Y"
    if x_fail:
        return "X"
    if z_fail:
        return "Z"
    return None


class CodeDecoder:
    """Both matching graphs of one code plus the flag bookkeeping."""

    def __init__(self, layout: CodeLayout, circuit: ScheduledCircuit,
                 params: NoiseParams, rounds: Optional[int] = None,
                 flags_enabled: bool = True, alpha: float = 1.0,
                 engine: Optional[FastEngine] = None):
        self.layout = layout
        self.circuit = circuit
        self.params = params
        self.rounds = rounds if rounds is not None else layout.distance
        self.flags_enabled = flags_enabled
        self.alpha = alpha
        self.engine = engine or FastEngine(circuit, self.rounds)
        if layout.family == FAMILY_HEX:
            kinds = ("HexX-2D", "HexZ-3D")
        else:
            kinds = ("SquareX-3D", "SquareZ-3D")
        self.decoders = {}
        for kind in kinds:
            g = build_graph(layout, circuit, kind, params,
                            rounds=self.rounds, engine=self.engine)
            self.decoders[g.basis] = GraphDecoder(g)
        # per-graph flag slot tables: slot -> (key pieces, partner slot)
        eng = self.engine
        self._slot_ref = {slot: ref for ref, slot in eng.flag_slots.items()}
        self._partner = {}
        for ref, slot in eng.flag_slots.items():
            other = FlagRef(ref.kind, ref.gen_index,
                            "Right" if ref.side == "Left" else "Left")
            self._partner[slot] = eng.flag_slots[other]
        self._relevant = {}
        for basis, dec in self.decoders.items():
            kind = dec.graph.kind
            want = _KIND_FLAGS[kind]
            self._relevant[basis] = {
                slot for slot, ref in self._slot_ref.items()
                if ref.kind == want}

    def _nodes_of(self, events_int: int, basis: str):
        eng = self.engine
        g = self.decoders[basis].graph
        nodes = []
        word = events_int
        while word:
            bit = (word & -word).bit_length() - 1
            word &= word - 1
            layer, det = divmod(bit, eng.stride)
            if basis == "x" and det < eng.n_x:
                nodes.append(g.node(det, layer + 1))
            elif basis == "z" and det >= eng.n_x:
                nodes.append(g.node(det - eng.n_x, layer + 1))
        return nodes

    def _flag_info(self, flags_int: int, basis: str):
        """(m, highlighted boomerang keys) for one graph."""
        if not self.flags_enabled or not flags_int:
            return 0, ()
        eng = self.engine
        relevant = self._relevant[basis]
        fired = []
        word = flags_int
        while word:
            bit = (word & -word).bit_length() - 1
            word &= word - 1
            r, slot = divmod(bit, eng.n_flags)
            fired.append((r + 1, slot))
        fired_set = set(fired)
        m = 0
        highlighted = []
        for r, slot in fired:
            if slot not in relevant:
                continue
            if (r, self._partner[slot]) in fired_set:
                continue  # announced gauge element, ignored
            ref = self._slot_ref[slot]
            m += 1
            highlighted.append((ref.gen_index, r, ref.side))
        return m, tuple(highlighted)

    def decode_shot(self, events_int: int, flags_int: int):
        """Corrections from both graphs combined into one operator."""
        n = self.layout.n_qubits
        x_mask = z_mask = 0
        total_m = 0
        total_cost = 0.0
        for basis, dec in self.decoders.items():
            nodes = self._nodes_of(events_int, basis)
            m, highlighted = self._flag_info(flags_int, basis)
            res = dec.decode(nodes, m, highlighted, self.alpha)
            x_mask ^= res.correction.x_mask
            z_mask ^= res.correction.z_mask
            total_m += m
            total_cost += res.cost
        return PauliOp.from_masks(n, x_mask, z_mask), total_m, total_cost

    def adjudicate_shot(self, shot) -> Optional[str]:
        correction, _, _ = self.decode_shot(shot.events, shot.flags)
        n = self.layout.n_qubits
        residual = PauliOp.from_masks(n, shot.residual_x, shot.residual_z)
        return adjudicate(correction, residual, self.layout)
