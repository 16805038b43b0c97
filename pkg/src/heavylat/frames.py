"""Multi-round Pauli-frame simulation of repeated syndrome extraction.

A memory experiment runs the round circuit ``rounds`` times and ends
with a noiseless transversal readout of the data qubits.  Because the
simulation tracks only the error frame, one shot serves both memory
bases at once: the X-type stabilizer history (with a final layer
reconstructed from X-basis data outcomes) and the Z-type history.

Outcome layers are numbered 1..rounds for the measured rounds and
rounds+1 for the virtual readout layer.  A detection event is a change
of a stabilizer outcome between consecutive layers (layer 0 is the
noiseless initial state, so first-layer flips are events themselves).

``run_shot`` walks the circuit step by step and is the reference
implementation.  ``FastEngine`` precomputes, for every fault branch,
the round-local transient measurement flips T and the residual data
Pauli D with static syndrome S(D); a fault in round r then produces
events T at layer r and T xor S at layer r+1 and nothing later, since
the persistent syndrome cancels in consecutive differences.  Shots
become XORs of precomputed integer bit masks.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass
from typing import Dict, List, Set, Tuple

import numpy as np

from .circuits import (FlagRef, Gate, ScheduledCircuit, fault_branches,
                       propagate)
from .codes import CodeLayout
from .noise import (KIND_GATE2, KIND_IDLE, KIND_MEAS, KIND_PREP,
                    FaultLocation, NoiseParams, location_probability,
                    location_template)
from .pauli import PauliOp


def fault_pauli(n_qubits: int, gate: Gate, branch: str) -> PauliOp:
    xs, zs = [], []
    for q, ch in zip(gate.qubits, branch):
        if ch in ("X", "Y"):
            xs.append(q)
        if ch in ("Z", "Y"):
            zs.append(q)
    return PauliOp.from_support(n_qubits, xs=xs, zs=zs)


def insertion_step(circuit: ScheduledCircuit, loc: FaultLocation) -> int:
    """Step before which the fault Pauli enters the frame."""
    if loc.kind in (KIND_GATE2, KIND_PREP, KIND_IDLE):
        return loc.step + 1
    if loc.kind == KIND_MEAS:
        return loc.step
    raise ValueError(loc.kind)


# ---------------------------------------------------------------------------
# reference implementation


@dataclass
class MeasurementRecord:
    """Per-round measurement flips of one shot, plus the final frame."""
    rounds: int
    gauge_flips: List[Set]     # round r-1: set of MeasRef that flipped
    flag_flips: List[Set]      # round r-1: set of FlagRef that flipped
    final_x_mask: int
    final_z_mask: int


def run_shot(circuit: ScheduledCircuit, faults, rounds: int) -> MeasurementRecord:
    """Walk the full experiment with the given list of (location, branch)."""
    n = circuit.layout.n_qubits
    by_point: Dict[Tuple[int, int], List[PauliOp]] = {}
    for loc, branch in faults:
        if not 1 <= loc.round <= rounds:
            raise ValueError(f"fault round {loc.round} outside 1..{rounds}")
        key = (loc.round, insertion_step(circuit, loc))
        by_point.setdefault(key, []).append(fault_pauli(n, loc.gate, branch))
    x = z = 0
    gauge_flips = [set() for _ in range(rounds)]
    flag_flips = [set() for _ in range(rounds)]
    for r in range(1, rounds + 1):
        for t in range(1, circuit.depth + 2):
            for p in by_point.get((r, t), ()):
                x ^= p.x_mask
                z ^= p.z_mask
            if t > circuit.depth:
                break
            for g in circuit.gates_at(t):
                if g.kind == "CNOT":
                    c, tg = g.qubits
                    if (x >> c) & 1:
                        x ^= 1 << tg
                    if (z >> tg) & 1:
                        z ^= 1 << c
                elif g.kind in ("MEASZ", "MEASX"):
                    q = g.qubits[0]
                    bit = (x >> q) & 1 if g.kind == "MEASZ" else (z >> q) & 1
                    if bit:
                        key = (q, t)
                        if key in circuit.measured_refs:
                            gauge_flips[r - 1].add(circuit.measured_refs[key])
                        else:
                            flag_flips[r - 1].add(circuit.flag_meas[key])
                    x &= ~(1 << q)
                    z &= ~(1 << q)
                elif g.kind in ("PREPX", "PREPZ"):
                    q = g.qubits[0]
                    x &= ~(1 << q)
                    z &= ~(1 << q)
    return MeasurementRecord(rounds, gauge_flips, flag_flips, x, z)


def _gauge_to_stab_maps(layout: CodeLayout):
    x_map = [[] for _ in layout.x_gauge]
    for s, gauges in enumerate(layout.x_stab_gauges):
        for g in gauges:
            x_map[g].append(s)
    z_map = [[] for _ in layout.z_gauge]
    for s, gauges in enumerate(layout.z_stab_gauges):
        for g in gauges:
            z_map[g].append(s)
    return x_map, z_map


def _stab_flips_of_round(layout, refs, x_map, z_map):
    xs, zs = set(), set()
    for ref in refs:
        if ref.kind == "x_gauge":
            for s in x_map[ref.index]:
                xs.symmetric_difference_update((s,))
        elif ref.kind == "z_gauge":
            for s in z_map[ref.index]:
                zs.symmetric_difference_update((s,))
        elif ref.kind == "x_stab":
            xs.symmetric_difference_update((ref.index,))
        elif ref.kind == "z_stab":
            zs.symmetric_difference_update((ref.index,))
        else:
            raise ValueError(ref.kind)
    return xs, zs


def static_syndrome(layout: CodeLayout, x_mask: int, z_mask: int):
    """Stabilizers anticommuting with the given data Pauli."""
    xs = {i for i, s in enumerate(layout.x_stabilizers)
          if bin(s.x_mask & z_mask).count("1") % 2}
    zs = {i for i, s in enumerate(layout.z_stabilizers)
          if bin(s.z_mask & x_mask).count("1") % 2}
    return xs, zs


def detection_events(circuit: ScheduledCircuit, record: MeasurementRecord):
    """Set of (basis, stabilizer index, layer) with basis 'x' or 'z'."""
    layout = circuit.layout
    x_map, z_map = _gauge_to_stab_maps(layout)
    layers = []
    for r in range(record.rounds):
        layers.append(_stab_flips_of_round(layout, record.gauge_flips[r],
                                           x_map, z_map))
    layers.append(static_syndrome(layout, record.final_x_mask,
                                  record.final_z_mask))
    events = set()
    prev_x, prev_z = set(), set()
    for layer, (xs, zs) in enumerate(layers, start=1):
        for s in xs ^ prev_x:
            events.add(("x", s, layer))
        for s in zs ^ prev_z:
            events.add(("z", s, layer))
        prev_x, prev_z = xs, zs
    return events


@dataclass(frozen=True)
class FlagEvent:
    round: int
    ref: FlagRef
    usable: bool  # False when the partner flag of the same generator also fired


def flag_events(circuit: ScheduledCircuit, record: MeasurementRecord):
    """Chronological flag outcomes; simultaneous pairs are marked unusable.

    When both flags of one generator fire in the same round the error is
    a gauge element acting trivially on the data, so the pair carries no
    reweighting information and is ignored downstream.
    """
    out = []
    for r in range(1, record.rounds + 1):
        fired = sorted(record.flag_flips[r - 1])
        gens = {}
        for ref in fired:
            gens.setdefault((ref.kind, ref.gen_index), []).append(ref)
        for ref in fired:
            usable = len(gens[(ref.kind, ref.gen_index)]) == 1
            out.append(FlagEvent(r, ref, usable))
    return out


# ---------------------------------------------------------------------------
# fast path

Signature = namedtuple("Signature", ["T", "S", "flags", "res_x", "res_z"])
ShotResult = namedtuple("ShotResult", ["events", "flags",
                                       "residual_x", "residual_z"])


class FastEngine:
    """Signature-based sampler for one circuit at a fixed round count.

    Detector bits are laid out as (layer-1)*stride + id with id equal to
    the X stabilizer index, or n_x plus the Z stabilizer index.  Flag
    bits are (round-1)*n_flags + slot with slots in sorted FlagRef
    order.  The construction is independent of the noise strength, so
    one engine serves a whole sweep.
    """

    def __init__(self, circuit: ScheduledCircuit, rounds: int):
        self.circuit = circuit
        self.layout = circuit.layout
        self.rounds = rounds
        self.n_x = len(self.layout.x_stabilizers)
        self.n_z = len(self.layout.z_stabilizers)
        self.stride = self.n_x + self.n_z
        self.n_layers = rounds + 1
        self.flag_slots = {ref: i for i, ref in
                           enumerate(sorted(set(circuit.flag_meas.values())))}
        self.n_flags = len(self.flag_slots)
        self._x_map, self._z_map = _gauge_to_stab_maps(self.layout)
        data_mask = 0
        for q in self.layout.data_qubits:
            data_mask |= 1 << q
        self.template = location_template(circuit)
        self._sigs: List[List[Signature]] = []
        self._windows: List[List[int]] = []
        by_key = {}
        for t, g, br, pauli, start in fault_branches(circuit):
            by_key[(t, g, br)] = self._signature_of(pauli, start, data_mask)
        self.signatures: Dict[Tuple[int, Gate, str], Signature] = by_key
        for spec in self.template:
            sigs = [by_key[(spec.step, spec.gate, br)] for br in spec.branches]
            self._sigs.append(sigs)
            self._windows.append([self._window(s) for s in sigs])

    def _signature_of(self, pauli, start, data_mask) -> Signature:
        res = propagate(self.circuit, pauli, from_step=start)
        if (res.residual.x_mask | res.residual.z_mask) & ~data_mask:
            raise AssertionError("residual error left on an ancilla")
        T = 0
        for ref in res.flipped_refs(self.circuit):
            xs, zs = _stab_flips_of_round(self.layout, (ref,),
                                          self._x_map, self._z_map)
            for s in xs:
                T ^= 1 << s
            for s in zs:
                T ^= 1 << (self.n_x + s)
        F = 0
        for ref in res.flipped_flags(self.circuit):
            F ^= 1 << self.flag_slots[ref]
        xs, zs = static_syndrome(self.layout, res.residual.x_mask,
                                 res.residual.z_mask)
        S = 0
        for s in xs:
            S ^= 1 << s
        for s in zs:
            S ^= 1 << (self.n_x + s)
        return Signature(T, S, F, res.residual.x_mask, res.residual.z_mask)

    def _window(self, sig: Signature) -> int:
        return sig.T | ((sig.T ^ sig.S) << self.stride)

    # -- shot assembly

    def events_from_faults(self, faults) -> ShotResult:
        events = flags = rx = rz = 0
        for loc, branch in faults:
            sig = self.signatures[(loc.step, loc.gate, branch)]
            events ^= self._window(sig) << ((loc.round - 1) * self.stride)
            flags ^= sig.flags << ((loc.round - 1) * self.n_flags)
            rx ^= sig.res_x
            rz ^= sig.res_z
        return ShotResult(events, flags, rx, rz)

    def sample_shot(self, params: NoiseParams, rng: np.random.Generator) -> ShotResult:
        """Same fault distribution and stream use as noise.sample_faults."""
        probs = self._probs(params)
        events = flags = rx = rz = 0
        stride, n_flags = self.stride, self.n_flags
        for r in range(self.rounds):
            fired = np.nonzero(rng.random(len(probs)) < probs)[0]
            for idx in fired:
                sigs = self._sigs[idx]
                b = 0 if len(sigs) == 1 else rng.integers(len(sigs))
                sig = sigs[b]
                events ^= self._windows[idx][b] << (r * stride)
                flags ^= sig.flags << (r * n_flags)
                rx ^= sig.res_x
                rz ^= sig.res_z
        return ShotResult(events, flags, rx, rz)

    def _probs(self, params: NoiseParams) -> np.ndarray:
        key = (params.p,)
        cached = getattr(self, "_prob_cache", None)
        if cached is None or cached[0] != key:
            arr = np.array([location_probability(params, spec.kind)
                            for spec in self.template])
            self._prob_cache = (key, arr)
        return self._prob_cache[1]

    # -- bit bookkeeping

    def detector_bit(self, basis: str, index: int, layer: int) -> int:
        det = index if basis == "x" else self.n_x + index
        return (layer - 1) * self.stride + det

    def events_to_set(self, events: int):
        out = set()
        while events:
            bit = (events & -events).bit_length() - 1
            events &= events - 1
            layer, det = divmod(bit, self.stride)
            if det < self.n_x:
                out.add(("x", det, layer + 1))
            else:
                out.add(("z", det - self.n_x, layer + 1))
        return out

    def flag_bit(self, round_: int, ref: FlagRef) -> int:
        return (round_ - 1) * self.n_flags + self.flag_slots[ref]

    def flags_to_set(self, flags: int):
        slot_ref = {i: ref for ref, i in self.flag_slots.items()}
        out = set()
        while flags:
            bit = (flags & -flags).bit_length() - 1
            flags &= flags - 1
            r, slot = divmod(bit, self.n_flags)
            out.add((r + 1, slot_ref[slot]))
        return out
