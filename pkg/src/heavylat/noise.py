"""Circuit-level depolarizing noise model.

One parameter p controls everything:

  * after each CNOT, one of the 15 nontrivial two-qubit Paulis with
    total probability p (p/15 each);
  * a preparation produces the orthogonal state with probability 2p/3
    (an X flip after preparing |0>, a Z flip after preparing |+>);
  * a measurement outcome is wrong with probability 2p/3, modelled as
    the conjugate Pauli applied just before the readout, which is
    equivalent because the qubit is reprepared afterwards;
  * each data qubit suffers one depolarizing fault per round with
    probability p (X, Y or Z with p/3 each), attached to the end of
    the round.

Sampling draws one Bernoulli per fault location and then picks a
branch uniformly, so at most one branch fires per location.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from .circuits import Gate, ScheduledCircuit, live_idle_steps

CNOT_BRANCHES = tuple(a + b for a in "IXYZ" for b in "IXYZ" if a + b != "II")
IDLE_BRANCHES = ("X", "Y", "Z")

KIND_GATE2 = "Gate2"
KIND_PREP = "Prep"
KIND_MEAS = "Meas"
KIND_IDLE = "Idle"


@dataclass(frozen=True)
class NoiseParams:
    p: float

    @property
    def gate2(self) -> float:
        return self.p

    @property
    def spam(self) -> float:
        return 2.0 * self.p / 3.0

    @property
    def idle(self) -> float:
        return self.p


@dataclass(frozen=True)
class FaultLocation:
    round: int
    step: int
    gate: Gate
    kind: str


@dataclass(frozen=True)
class LocationSpec:
    step: int
    gate: Gate
    kind: str
    branches: Tuple[str, ...]


def location_template(circuit: ScheduledCircuit) -> List[LocationSpec]:
    """Fault locations of one round, in a fixed deterministic order."""
    live = {q: set(live_idle_steps(circuit, q))
            for q in range(circuit.layout.n_qubits)}
    out = []
    for t in range(1, circuit.depth + 1):
        for g in circuit.gates_at(t):
            if g.kind == "CNOT":
                out.append(LocationSpec(t, g, KIND_GATE2, CNOT_BRANCHES))
            elif g.kind in ("PREPZ", "PREPX"):
                flip = "X" if g.kind == "PREPZ" else "Z"
                out.append(LocationSpec(t, g, KIND_PREP, (flip,)))
            elif g.kind in ("MEASZ", "MEASX"):
                flip = "X" if g.kind == "MEASZ" else "Z"
                out.append(LocationSpec(t, g, KIND_MEAS, (flip,)))
            elif g.kind == "IDLE" and t in live[g.qubits[0]]:
                out.append(LocationSpec(t, g, KIND_IDLE, IDLE_BRANCHES))
    return out


def location_probability(params: NoiseParams, kind: str) -> float:
    if kind == KIND_GATE2:
        return params.gate2
    if kind in (KIND_PREP, KIND_MEAS):
        return params.spam
    if kind == KIND_IDLE:
        return params.idle
    raise ValueError(kind)


def branch_probability(params: NoiseParams, kind: str, branch: str) -> float:
    if kind == KIND_GATE2:
        return params.gate2 / 15.0
    if kind in (KIND_PREP, KIND_MEAS):
        return params.spam
    if kind == KIND_IDLE:
        return params.idle / 3.0
    raise ValueError(kind)


def _mix64(*ids) -> Tuple[int, int]:
    """Fold a heterogeneous id tuple into a 128-bit Philox key."""
    mask = (1 << 64) - 1
    h1, h2 = 0x243F6A8885A308D3, 0x13198A2E03707344
    for v in ids:
        if isinstance(v, str):
            parts = [len(v)] + [ord(c) for c in v]
        else:
            parts = [int(v) & mask]
        for x in parts:
            h1 = ((h1 ^ x) * 0x9E3779B97F4A7C15) & mask
            h2 = ((h2 + x) * 0xC2B2AE3D27D4EB4F + 0x165667B19E3779F9) & mask
    return h1, h2


def stream(*ids) -> np.random.Generator:
    """Independent deterministic random stream keyed by the id tuple."""
    k1, k2 = _mix64(*ids)
    return np.random.Generator(np.random.Philox(key=np.array([k1, k2],
                                                             dtype=np.uint64)))


def sample_faults(circuit: ScheduledCircuit, params: NoiseParams,
                  rounds: int, rng: np.random.Generator, template=None):
    """Draw one shot worth of faults over the given number of rounds."""
    if template is None:
        template = location_template(circuit)
    probs = np.array([location_probability(params, spec.kind)
                      for spec in template])
    faults = []
    for r in range(1, rounds + 1):
        fired = np.nonzero(rng.random(len(template)) < probs)[0]
        for idx in fired:
            spec = template[idx]
            if len(spec.branches) == 1:
                branch = spec.branches[0]
            else:
                branch = spec.branches[rng.integers(len(spec.branches))]
            faults.append((FaultLocation(r, spec.step, spec.gate, spec.kind),
                           branch))
    return faults


def enumerate_faults(circuit: ScheduledCircuit, params: NoiseParams,
                     order: int = 1, rounds: int = 1):
    """Yield (fault list, leading-order probability) combinations.

    Order 1 lists every branch of every location; order 2 yields all
    unordered pairs of distinct locations.
    """
    singles = []
    for r in range(1, rounds + 1):
        for spec in location_template(circuit):
            loc = FaultLocation(r, spec.step, spec.gate, spec.kind)
            for branch in spec.branches:
                singles.append(((loc, branch),
                                branch_probability(params, spec.kind, branch)))
    if order == 1:
        for fault, prob in singles:
            yield [fault], prob
    elif order == 2:
        for (fa, pa), (fb, pb) in itertools.combinations(singles, 2):
            if fa[0] == fb[0]:
                continue  # one branch per location
            yield [fa, fb], pa * pb
    else:
        raise ValueError("order must be 1 or 2")
