"""Scheduled syndrome-extraction circuits for both code families.

One round of the heavy hexagon schedule takes 11 time steps; the heavy
square schedule takes 14.  Both include ancilla (re)initialization and
measurement inside the round.  Weight-4 generators are measured through
a bridge construction: the syndrome ancilla talks only to the two flag
ancillas, and the flags talk to the data, so a single ancilla fault can
spread to at most two data qubits and is then announced by a flag.

Heavy hexagon round (X portion first, then the Z-gauge reads):

  step  1   prep all ancillas (syndrome X basis, whites Z basis)
  steps 2-6 bridge and data CNOTs of the X plaquettes, boundary X pairs
  step  6/7 flag measurement (left flag at 6, right flag at 7) and
            syndrome measurement at 7; flags are re-prepared
  steps 8-10/9-11 whites read their vertical Z gauge pair and measure;
            the two parity classes are offset by one step

Heavy square round: the X faces and boundary X pairs run in steps 1-7,
the Z faces and boundary Z pairs in steps 8-14, with the roles of the
ancilla bases exchanged.  A horizontal-edge flag serves one X face in
the first half and one Z face in the second half of the round.

Time steps are 1-based.  Every qubit appears in exactly one gate per
step; explicit IDLE entries fill the gaps.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .codes import FAMILY_HEX, FAMILY_SQUARE, CodeLayout
from .pauli import F2Basis, PauliOp

Gate = namedtuple("Gate", ["kind", "qubits"])  # CNOT/(c,t), others/(q,)

MeasRef = namedtuple("MeasRef", ["kind", "index"])  # x_gauge/z_gauge/x_stab/z_stab
FlagRef = namedtuple("FlagRef", ["kind", "gen_index", "side"])

_KIND_ORDER = {"CNOT": 0, "PREPX": 1, "PREPZ": 2, "MEASX": 3, "MEASZ": 4, "IDLE": 5}


class ScheduledCircuit:
    """A single round of syndrome extraction.

    ``measured_ops[(q, step)]`` is the data operator whose eigenvalue
    the measurement reports in the absence of faults (identity for flag
    measurements).  ``measured_refs`` ties syndrome measurements to
    generator indices of the layout; ``flag_meas`` ties flag
    measurements to (generator kind, generator index, side).
    """

    def __init__(self, layout: CodeLayout):
        self.layout = layout
        self.steps: List[List[Gate]] = []
        self.measured_ops: Dict[Tuple[int, int], PauliOp] = {}
        self.measured_refs: Dict[Tuple[int, int], MeasRef] = {}
        self.flag_meas: Dict[Tuple[int, int], FlagRef] = {}

    @property
    def depth(self) -> int:
        return len(self.steps)

    def gates_at(self, step: int) -> List[Gate]:
        return self.steps[step - 1]

    def _ensure(self, depth):
        while len(self.steps) < depth:
            self.steps.append([])

    def _add(self, step, kind, *qubits):
        self._ensure(step)
        self.steps[step - 1].append(Gate(kind, tuple(qubits)))

    def _fill_idles(self):
        nq = self.layout.n_qubits
        for gates in self.steps:
            busy = set()
            for g in gates:
                busy.update(g.qubits)
            for q in range(nq):
                if q not in busy:
                    gates.append(Gate("IDLE", (q,)))

    def step_conflicts(self) -> List[str]:
        """Qubits used more than once (or never) within a time step."""
        problems = []
        nq = self.layout.n_qubits
        for t, gates in enumerate(self.steps, start=1):
            seen = {}
            for g in gates:
                for q in g.qubits:
                    seen[q] = seen.get(q, 0) + 1
            for q, c in seen.items():
                if c > 1:
                    problems.append(f"step {t}: qubit {q} used {c} times")
            if len(seen) != nq:
                problems.append(f"step {t}: {len(seen)} of {nq} qubits scheduled")
        return problems

    def measurement_basis(self, q, step):
        for g in self.gates_at(step):
            if g.qubits == (q,) and g.kind in ("MEASX", "MEASZ"):
                return "X" if g.kind == "MEASX" else "Z"
        raise KeyError((q, step))

    def to_text(self) -> str:
        lines = [f"family {self.layout.family} distance {self.layout.distance} "
                 f"qubits {self.layout.n_qubits} depth {self.depth}"]
        for t, gates in enumerate(self.steps, start=1):
            parts = []
            for g in sorted(gates, key=lambda g: (_KIND_ORDER[g.kind], g.qubits)):
                parts.append(" ".join([g.kind] + [str(q) for q in g.qubits]))
            lines.append(f"step {t}: " + " | ".join(parts))
        return "\n".join(lines) + "\n"


def build_round(layout: CodeLayout) -> ScheduledCircuit:
    if layout.family == FAMILY_HEX:
        return _build_hex_round(layout)
    if layout.family == FAMILY_SQUARE:
        return _build_square_round(layout)
    raise ValueError(layout.family)


def _build_hex_round(layout: CodeLayout) -> ScheduledCircuit:
    geo = layout.geometry
    c = ScheduledCircuit(layout)
    c._ensure(11)

    for p in geo.plaquettes:
        s, wl, wr = p.dark, p.white_left, p.white_right
        tl, tr = p.data["TL"], p.data["TR"]
        bl, br = p.data["BL"], p.data["BR"]
        c._add(1, "PREPX", s)
        c._add(2, "CNOT", s, wl)
        c._add(3, "CNOT", s, wr)
        c._add(3, "CNOT", wl, bl)
        c._add(4, "CNOT", wl, tl)
        c._add(4, "CNOT", wr, tr)
        c._add(5, "CNOT", s, wl)
        c._add(5, "CNOT", wr, br)
        c._add(6, "CNOT", s, wr)
        c._add(6, "MEASZ", wl)
        c._add(7, "MEASX", s)
        c._add(7, "MEASZ", wr)
        c._add(7, "PREPZ", wl)
        c._add(8, "PREPZ", wr)
        c.measured_refs[(s, 7)] = MeasRef("x_gauge", p.gauge_index)
        c.measured_ops[(s, 7)] = layout.x_gauge[p.gauge_index]
        c.flag_meas[(wl, 6)] = FlagRef("x_gauge", p.gauge_index, "Left")
        c.flag_meas[(wr, 7)] = FlagRef("x_gauge", p.gauge_index, "Right")
        c.measured_ops[(wl, 6)] = PauliOp.identity(layout.n_qubits)
        c.measured_ops[(wr, 7)] = PauliOp.identity(layout.n_qubits)

    for pair in geo.top_pairs:
        a = pair.ancilla
        c._add(1, "PREPX", a)
        c._add(3, "CNOT", a, pair.data[0])
        c._add(5, "CNOT", a, pair.data[1])
        c._add(7, "MEASX", a)
        c.measured_refs[(a, 7)] = MeasRef("x_gauge", pair.gen_index)
        c.measured_ops[(a, 7)] = layout.x_gauge[pair.gen_index]
    for pair in geo.bottom_pairs:
        a = pair.ancilla
        c._add(1, "PREPX", a)
        c._add(5, "CNOT", a, pair.data[1])
        c._add(6, "CNOT", a, pair.data[0])
        c._add(7, "MEASX", a)
        c.measured_refs[(a, 7)] = MeasRef("x_gauge", pair.gen_index)
        c.measured_ops[(a, 7)] = layout.x_gauge[pair.gen_index]

    # Z-gauge reads: every white measures its vertical data pair.  The
    # two parity classes run one step apart so that a data qubit shared
    # by the whites above and below it is never used twice in a step.
    for gi, w in enumerate(geo.z_gauge_white):
        top_d, bot_d = geo.z_gauge_data[gi]
        coord = layout.qubits[w].coordinate
        i, j = (coord[0]) // 2, (coord[1] + 1) // 2
        c._add(1, "PREPZ", w)
        if (i + j) % 2 == 0:
            c._add(8, "CNOT", bot_d, w)
            c._add(9, "CNOT", top_d, w)
            c._add(10, "MEASZ", w)
            c.measured_refs[(w, 10)] = MeasRef("z_gauge", gi)
            c.measured_ops[(w, 10)] = layout.z_gauge[gi]
        else:
            c._add(9, "CNOT", top_d, w)
            c._add(10, "CNOT", bot_d, w)
            c._add(11, "MEASZ", w)
            c.measured_refs[(w, 11)] = MeasRef("z_gauge", gi)
            c.measured_ops[(w, 11)] = layout.z_gauge[gi]

    c._fill_idles()
    return c


def _build_square_round(layout: CodeLayout) -> ScheduledCircuit:
    geo = layout.geometry
    c = ScheduledCircuit(layout)
    c._ensure(14)

    for f in geo.faces:
        s, ft, fb = f.syndrome, f.flag_top, f.flag_bottom
        tl, tr = f.data["TL"], f.data["TR"]
        bl, br = f.data["BL"], f.data["BR"]
        if f.basis == "X":
            c._add(1, "PREPX", s)
            c._add(1, "PREPZ", ft)
            c._add(1, "PREPZ", fb)
            c._add(2, "CNOT", s, ft)
            c._add(3, "CNOT", s, fb)
            c._add(3, "CNOT", ft, tl)
            c._add(4, "CNOT", ft, tr)
            c._add(4, "CNOT", fb, br)
            c._add(5, "CNOT", s, ft)
            c._add(5, "CNOT", fb, bl)
            c._add(6, "CNOT", s, fb)
            c._add(7, "MEASX", s)
            c._add(7, "MEASZ", ft)
            c._add(7, "MEASZ", fb)
            c.measured_refs[(s, 7)] = MeasRef("x_stab", f.stab_index)
            c.measured_ops[(s, 7)] = layout.x_stabilizers[f.stab_index]
            c.flag_meas[(ft, 7)] = FlagRef("x_stab", f.stab_index, "Left")
            c.flag_meas[(fb, 7)] = FlagRef("x_stab", f.stab_index, "Right")
            c.measured_ops[(ft, 7)] = PauliOp.identity(layout.n_qubits)
            c.measured_ops[(fb, 7)] = PauliOp.identity(layout.n_qubits)
        else:
            c._add(8, "PREPZ", s)
            c._add(8, "PREPX", ft)
            c._add(8, "PREPX", fb)
            c._add(9, "CNOT", ft, s)
            c._add(10, "CNOT", fb, s)
            c._add(10, "CNOT", tl, ft)
            c._add(11, "CNOT", tr, ft)
            c._add(11, "CNOT", br, fb)
            c._add(12, "CNOT", ft, s)
            c._add(12, "CNOT", bl, fb)
            c._add(13, "CNOT", fb, s)
            c._add(14, "MEASZ", s)
            c._add(14, "MEASX", ft)
            c._add(14, "MEASX", fb)
            c.measured_refs[(s, 14)] = MeasRef("z_stab", f.stab_index)
            c.measured_ops[(s, 14)] = layout.z_stabilizers[f.stab_index]
            c.flag_meas[(ft, 14)] = FlagRef("z_stab", f.stab_index, "Left")
            c.flag_meas[(fb, 14)] = FlagRef("z_stab", f.stab_index, "Right")
            c.measured_ops[(ft, 14)] = PauliOp.identity(layout.n_qubits)
            c.measured_ops[(fb, 14)] = PauliOp.identity(layout.n_qubits)

    for pair in geo.top_pairs + geo.bottom_pairs:
        h = pair.ancilla
        c._add(1, "PREPX", h)
        c._add(5, "CNOT", h, pair.data[0])
        c._add(6, "CNOT", h, pair.data[1])
        c._add(7, "MEASX", h)
        c.measured_refs[(h, 7)] = MeasRef("x_stab", pair.gen_index)
        c.measured_ops[(h, 7)] = layout.x_stabilizers[pair.gen_index]
    for pair in geo.left_pairs + geo.right_pairs:
        v = pair.ancilla
        even_row, odd_row = ((pair.data[1], pair.data[0])
                             if pair.side == "left"
                             else (pair.data[0], pair.data[1]))
        c._add(8, "PREPZ", v)
        c._add(12, "CNOT", even_row, v)
        c._add(13, "CNOT", odd_row, v)
        c._add(14, "MEASZ", v)
        c.measured_refs[(v, 14)] = MeasRef("z_stab", pair.gen_index)
        c.measured_ops[(v, 14)] = layout.z_stabilizers[pair.gen_index]

    c._fill_idles()
    return c


# -- Pauli propagation ------------------------------------------------

@dataclass
class PropagationResult:
    residual: PauliOp
    flips: List[Tuple[int, int]]  # (qubit, step) of flipped measurements

    def flipped_refs(self, circuit):
        out = []
        for key in self.flips:
            if key in circuit.measured_refs:
                out.append(circuit.measured_refs[key])
        return out

    def flipped_flags(self, circuit):
        out = []
        for key in self.flips:
            if key in circuit.flag_meas:
                out.append(circuit.flag_meas[key])
        return out


def propagate(circuit: ScheduledCircuit, pauli: PauliOp,
              from_step: int = 1) -> PropagationResult:
    """Push a Pauli forward from just before ``from_step`` to round end.

    Measurements flip when the frame anticommutes with the measured
    operator; measured or re-prepared qubits leave the frame.
    """
    x, z = pauli.x_mask, pauli.z_mask
    flips = []
    for t in range(from_step, circuit.depth + 1):
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
                    flips.append((q, t))
                x &= ~(1 << q)
                z &= ~(1 << q)
            elif g.kind in ("PREPX", "PREPZ"):
                q = g.qubits[0]
                x &= ~(1 << q)
                z &= ~(1 << q)
    return PropagationResult(
        PauliOp.from_masks(circuit.layout.n_qubits, x, z), flips)


def back_propagate(circuit: ScheduledCircuit, events) -> PauliOp:
    """Heisenberg picture: the operator at round start whose eigenvalue
    is the product of the given measurement outcomes.

    ``events`` is a list of (qubit, step, basis).  Same-basis factors
    hitting a preparation are absorbed (the prep fixes their value);
    conflicting factors survive, marking outcomes that depend on fresh
    ancilla randomness, as happens for individual gauge operators of a
    subsystem code.
    """
    n = circuit.layout.n_qubits
    x = z = 0
    by_step = {}
    for q, step, basis in events:
        by_step.setdefault(step, []).append((q, basis))
    for t in range(circuit.depth, 0, -1):
        for q, basis in by_step.get(t, []):
            if basis == "X":
                x ^= 1 << q
            else:
                z ^= 1 << q
        for g in circuit.gates_at(t):
            if g.kind == "CNOT":
                c, tg = g.qubits
                if (x >> c) & 1:
                    x ^= 1 << tg
                if (z >> tg) & 1:
                    z ^= 1 << c
            elif g.kind == "PREPZ":
                q = g.qubits[0]
                if (z >> q) & 1 and not (x >> q) & 1:
                    z &= ~(1 << q)
            elif g.kind == "PREPX":
                q = g.qubits[0]
                if (x >> q) & 1 and not (z >> q) & 1:
                    x &= ~(1 << q)
    return PauliOp.from_masks(n, x, z)


@dataclass
class MeasCheck:
    qubit: int
    step: int
    ref: object
    data_part_ok: bool
    ancilla_clean: bool


@dataclass
class VerificationReport:
    measurements: List[MeasCheck]
    stabilizer_products_ok: bool
    flags_trivial: bool
    problems: List[str] = field(default_factory=list)

    @property
    def all_ok(self):
        return (not self.problems
                and all(m.data_part_ok for m in self.measurements)
                and self.stabilizer_products_ok and self.flags_trivial)


def verify_measured_operators(circuit: ScheduledCircuit) -> VerificationReport:
    """Check the schedule against the layout by back-propagation.

    Three levels of checks:
      * each syndrome measurement, traced to round start, acts on the
        data qubits exactly as the generator it is labelled with;
      * each flag measurement traces to the identity (deterministic
        outcome in the absence of faults);
      * products of gauge outcomes forming a stabilizer trace to the
        bare stabilizer with no ancilla factors at all, i.e. stabilizer
        outcomes are deterministic even when individual gauge outcomes
        are not.
    """
    layout = circuit.layout
    data_mask = 0
    for q in layout.data_qubits:
        data_mask |= 1 << q
    checks = []
    problems = []

    gen_lists = {"x_gauge": layout.x_gauge, "z_gauge": layout.z_gauge,
                 "x_stab": layout.x_stabilizers, "z_stab": layout.z_stabilizers}
    meas_of_gauge = {}
    for (q, step), ref in circuit.measured_refs.items():
        basis = circuit.measurement_basis(q, step)
        meas_of_gauge[(ref.kind, ref.index)] = (q, step, basis)
        op = back_propagate(circuit, [(q, step, basis)])
        declared = gen_lists[ref.kind][ref.index]
        ok = (op.x_mask & data_mask) == declared.x_mask and \
             (op.z_mask & data_mask) == declared.z_mask
        clean = (op.x_mask | op.z_mask) & ~data_mask == 0
        checks.append(MeasCheck(q, step, ref, ok, clean))
        if not ok:
            problems.append(f"measurement ({q},{step}) does not report {ref}")
        # X-generator reads never precede anticommuting reads within the
        # round, so they must be junk-free; so must all square reads.
        if ref.kind in ("x_gauge", "x_stab", "z_stab") and not clean:
            problems.append(f"measurement ({q},{step}) carries ancilla factors")

    flags_trivial = True
    for (q, step), ref in circuit.flag_meas.items():
        basis = circuit.measurement_basis(q, step)
        op = back_propagate(circuit, [(q, step, basis)])
        if not op.is_identity:
            flags_trivial = False
            problems.append(f"flag ({q},{step}) {ref} is not deterministic")
        checks.append(MeasCheck(q, step, ref, op.is_identity, op.is_identity))

    products_ok = True
    gkind = {"x": "x_gauge" if layout.family == FAMILY_HEX else "x_stab",
             "z": "z_gauge" if layout.family == FAMILY_HEX else "z_stab"}
    for typ, stabs, comp in (("x", layout.x_stabilizers, layout.x_stab_gauges),
                             ("z", layout.z_stabilizers, layout.z_stab_gauges)):
        for si, members in enumerate(comp):
            events = [meas_of_gauge[(gkind[typ], gi)] for gi in members]
            op = back_propagate(circuit, events)
            clean = (op.x_mask | op.z_mask) & ~data_mask == 0
            match = (op.x_mask & data_mask) == stabs[si].x_mask and \
                    (op.z_mask & data_mask) == stabs[si].z_mask
            if not (clean and match):
                products_ok = False
                problems.append(f"{typ} stabilizer {si} product not deterministic")
    return VerificationReport(checks, products_ok, flags_trivial, problems)


# -- single-fault classification --------------------------------------

_TWO_QUBIT_PAULIS = [(a, b) for a in "IXYZ" for b in "IXYZ" if (a, b) != ("I", "I")]


@dataclass
class FaultOutcome:
    step: int
    gate: Gate
    branch: str  # e.g. "XI" for a CNOT, "X" otherwise
    flags: List[FlagRef]
    residual: PauliOp
    x_class: int  # 0, 1 or 2 (meaning >= 2) modulo the gauge group
    z_class: int


def _pauli_on(n, qubits, letters):
    xs, zs = [], []
    for q, ch in zip(qubits, letters):
        if ch in ("X", "Y"):
            xs.append(q)
        if ch in ("Z", "Y"):
            zs.append(q)
    return PauliOp.from_support(n, xs=xs, zs=zs)


def live_idle_steps(circuit: ScheduledCircuit, qubit: int) -> List[int]:
    """Idle steps of one qubit whose fault can influence the round.

    An error during an idle step matters only if the qubit is used
    again before being reinitialised: faults whose next gate (wrapping
    into the following round) is a preparation act on a state that is
    about to be discarded and are dropped.  Data qubits are never
    reinitialised, so all their idle steps count.
    """
    gate_kinds = {}
    idles = []
    for t in range(1, circuit.depth + 1):
        for g in circuit.gates_at(t):
            if qubit in g.qubits:
                if g.kind == "IDLE":
                    idles.append(t)
                else:
                    gate_kinds[t] = g.kind
    steps = sorted(gate_kinds)
    if not steps:
        return []
    out = []
    for t in idles:
        nxt = next((s for s in steps if s > t), steps[0])
        if gate_kinds[nxt].startswith("PREP"):
            continue
        out.append(t)
    return out


def fault_branches(circuit: ScheduledCircuit):
    """All (step, gate, branch Pauli, insertion step) of the noise model.

    CNOT faults are two-qubit Paulis after the gate; preparation faults
    flip the prepared state; measurement faults act just before the
    readout; every idle step in which a qubit's state is still live
    carries a uniform single-qubit Pauli fault.
    """
    n = circuit.layout.n_qubits
    live = {q: set(live_idle_steps(circuit, q))
            for q in range(circuit.layout.n_qubits)}
    out = []
    for t in range(1, circuit.depth + 1):
        for g in circuit.gates_at(t):
            if g.kind == "CNOT":
                for a, b in _TWO_QUBIT_PAULIS:
                    out.append((t, g, a + b, _pauli_on(n, g.qubits, a + b), t + 1))
            elif g.kind == "PREPZ":
                out.append((t, g, "X", _pauli_on(n, g.qubits, "X"), t + 1))
            elif g.kind == "PREPX":
                out.append((t, g, "Z", _pauli_on(n, g.qubits, "Z"), t + 1))
            elif g.kind == "MEASZ":
                out.append((t, g, "X", _pauli_on(n, g.qubits, "X"), t))
            elif g.kind == "MEASX":
                out.append((t, g, "Z", _pauli_on(n, g.qubits, "Z"), t))
            elif g.kind == "IDLE" and t in live[g.qubits[0]]:
                for ch in "XYZ":
                    out.append((t, g, ch, _pauli_on(n, g.qubits, ch), t + 1))
    return out


class ResidualClassifier:
    """Weight of a data Pauli modulo the gauge group, capped at 2.

    Works per CSS sector: the X part is reduced modulo the span of the
    X-type gauge generators, the Z part modulo the Z-type span.  The
    class is 0 for group elements, 1 when one qubit flip reaches the
    group, else 2.
    """

    def __init__(self, layout: CodeLayout):
        self.layout = layout
        self.x_basis = F2Basis(g.x_mask for g in layout.x_gauge)
        self.z_basis = F2Basis(g.z_mask for g in layout.z_gauge)
        self.data = layout.data_qubits

    def _cls(self, mask, basis):
        if basis.contains(mask):
            return 0
        for q in self.data:
            if basis.contains(mask ^ (1 << q)):
                return 1
        return 2

    def classify(self, residual: PauliOp):
        return (self._cls(residual.x_mask, self.x_basis),
                self._cls(residual.z_mask, self.z_basis))


def classify_single_faults(circuit: ScheduledCircuit) -> List[FaultOutcome]:
    """Propagate every single fault through its round plus one clean
    round, collecting flags and the residual data error class."""
    classifier = ResidualClassifier(circuit.layout)
    out = []
    for t, g, branch, pauli, start in fault_branches(circuit):
        if start > circuit.depth:
            res1 = PropagationResult(pauli, [])
        else:
            res1 = propagate(circuit, pauli, from_step=start)
        res2 = propagate(circuit, res1.residual, from_step=1)
        flags = res1.flipped_flags(circuit) + res2.flipped_flags(circuit)
        xc, zc = classifier.classify(res1.residual)
        out.append(FaultOutcome(t, g, branch, flags, res1.residual, xc, zc))
    return out
