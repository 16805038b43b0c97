"""Frequency-collision Monte Carlo for cross-resonance hardware.

Each qubit gets a nominal 01 frequency from a small set of classes laid
out so that, with no fabrication disorder, none of the collision
conditions fire.  Controls are driven at their target's frequency, so
the conditions involve the 01, 12 and 02 transitions of coupled qubits,
of next-nearest neighbors sharing a control, and a gate-speed band on
the control-target detuning.

Three pattern variants are compared:

  bulk3      three classes; the boundary weight-2 generators are
             measured through a restored bulk-like gadget (an extra
             syndrome ancilla and one extra target per data qubit)
             so the bulk checkerboard extends to the boundary.
  boundary4  the as-built lattice, where each dedicated boundary
             ancilla couples two data qubits whose other targets
             already span both bulk target classes, forcing a fourth
             class.
  surface5   rotated surface code on the unmodified degree-four
             lattice; each syndrome ancilla needs four distinct
             target classes plus its own.

Counting is vectorized across trials; the per-trial disorder draws are
keyed by (seed, trial) so a sweep over sigma reuses the same unit
draws, scaled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .codes import CodeLayout, FAMILY_HEX, FAMILY_SQUARE
from .noise import stream

VARIANTS = ("bulk3", "boundary4", "surface5")

DEFAULT_WINDOW_MHZ = 17.0
DEFAULT_BAND_MHZ = (30.0, 300.0)
DEFAULT_ANHARMONICITY_MHZ = -335.0

# Nominal 01 frequencies in GHz; f1 is the control class.  The bulk
# targets sit +-100 MHz from the controls, clear of every transition
# degeneracy by 67 MHz or more.  The boundary class f4 is squeezed by
# the same constraints against f1..f3 to the far edge of the usable
# control-target detuning band, which is what makes the fourth
# frequency costly.  The surface pattern spreads five classes evenly
# over the same band; its binding margin (omega01 vs omega02/2 at
# 140 MHz detuning) is under a third of the heavy-lattice one.
HEAVY_CLASS_GHZ = {"f1": 5.170, "f2": 5.070, "f3": 5.270, "f4": 5.465}
SURFACE_CLASS_GHZ = {"f1": 5.160, "f2": 5.020, "f3": 5.090,
                     "f4": 5.230, "f5": 5.300}


@dataclass(frozen=True)
class SurfaceLattice:
    """Rotated surface code coupling graph (degree-four vertices).

    Data qubits are indexed 0..d^2-1 on a d x d grid; syndrome
    ancillas follow, first the (d-1)^2 bulk plaquettes, then the
    2(d-1) weight-2 boundary checks.
    """

    d: int
    n_nodes: int
    data_grid: Dict[Tuple[int, int], int]
    couplings: Tuple[Tuple[int, int], ...]  # (control, target)


def surface_lattice(d: int) -> SurfaceLattice:
    if d < 3 or d % 2 == 0:
        raise ValueError("need odd d >= 3")
    data = {(i, j): (i - 1) * d + (j - 1)
            for i in range(1, d + 1) for j in range(1, d + 1)}
    nxt = d * d
    couplings = []
    for i in range(1, d):
        for j in range(1, d):
            anc = nxt
            nxt += 1
            for di, dj in ((0, 0), (0, 1), (1, 0), (1, 1)):
                couplings.append((anc, data[(i + di, j + dj)]))
    for m in range(1, (d + 1) // 2):
        top, bottom, left, right = nxt, nxt + 1, nxt + 2, nxt + 3
        nxt += 4
        couplings.append((top, data[(1, 2 * m)]))
        couplings.append((top, data[(1, 2 * m + 1)]))
        couplings.append((bottom, data[(d, 2 * m - 1)]))
        couplings.append((bottom, data[(d, 2 * m)]))
        couplings.append((left, data[(2 * m - 1, 1)]))
        couplings.append((left, data[(2 * m, 1)]))
        couplings.append((right, data[(2 * m, d)]))
        couplings.append((right, data[(2 * m + 1, d)]))
    assert nxt == d * d + d * d - 1
    return SurfaceLattice(d, nxt, data, tuple(couplings))


@dataclass
class DisorderParams:
    sigma_f: float            # MHz
    window: float = DEFAULT_WINDOW_MHZ
    band: Tuple[float, float] = DEFAULT_BAND_MHZ
    trials: int = 2000

    def __post_init__(self):
        if self.sigma_f < 0:
            raise ValueError("sigma_f must be nonnegative")
        if self.window <= 0 or self.band[0] <= 0 or \
                self.band[1] <= self.band[0]:
            raise ValueError("windows must be positive")
        if self.trials < 1:
            raise ValueError("trials must be positive")


@dataclass
class FrequencyPattern:
    layout: object                       # CodeLayout or SurfaceLattice
    variant: str
    assignment: Dict[int, str]           # node -> class
    class_frequencies: Dict[str, float]  # class -> omega01 in GHz
    anharmonicity: float                 # MHz
    cnot_directions: Tuple[Tuple[int, int], ...]  # (control, target)
    _tables: Optional[dict] = field(default=None, repr=False)

    @property
    def nodes(self) -> List[int]:
        return sorted(self.assignment)

    def nominal_mhz(self) -> np.ndarray:
        return np.array([self.class_frequencies[self.assignment[q]] * 1e3
                         for q in self.nodes])

    def n_classes(self) -> int:
        return len({self.assignment[q] for q in self.nodes})

    def control_degree(self) -> Dict[int, int]:
        deg: Dict[int, int] = {}
        for c, t in self.cnot_directions:
            deg[c] = deg.get(c, 0) + 1
            deg[t] = deg.get(t, 0) + 1
        return {c: deg[c] for c, _ in self.cnot_directions}

    def tables(self) -> dict:
        """Index arrays for the seven collision rules."""
        if self._tables is not None:
            return self._tables
        pos = {q: i for i, q in enumerate(self.nodes)}
        nn = sorted({(min(c, t), max(c, t))
                     for c, t in self.cnot_directions})
        targets: Dict[int, List[int]] = {}
        for c, t in self.cnot_directions:
            targets.setdefault(c, []).append(t)
        nnn = sorted({(min(a, b), max(a, b))
                      for c, ts in targets.items()
                      for i, a in enumerate(ts) for b in ts[i + 1:]})
        sums = sorted((c, min(a, b), max(a, b))
                      for c, ts in targets.items()
                      for i, a in enumerate(ts) for b in ts[i + 1:])

        def cols(pairs):
            if not pairs:
                return (np.zeros(0, dtype=int),) * 2
            arr = np.array([[pos[a], pos[b]] for a, b in pairs])
            return arr[:, 0], arr[:, 1]

        t = {}
        t["nn_a"], t["nn_b"] = cols(nn)
        t["nnn_a"], t["nnn_b"] = cols(nnn)
        if sums:
            arr = np.array([[pos[c], pos[a], pos[b]] for c, a, b in sums])
            t["sum_c"], t["sum_a"], t["sum_b"] = arr[:, 0], arr[:, 1], arr[:, 2]
        else:
            t["sum_c"] = t["sum_a"] = t["sum_b"] = np.zeros(0, dtype=int)
        t["dir_c"], t["dir_t"] = cols(self.cnot_directions)
        self._tables = t
        return t


def _class_of_white(i: int, j: int) -> str:
    return "f2" if (i + j) % 2 == 0 else "f3"


def _hex_pattern(layout: CodeLayout, variant: str) -> FrequencyPattern:
    geo = layout.geometry
    assignment: Dict[int, str] = {}
    couplings: List[Tuple[int, int]] = []
    for q in layout.qubits:
        if q.role == "Data":
            assignment[q.index] = "f1"
    for k, w in enumerate(geo.z_gauge_white):
        r, c = layout.qubits[w].coordinate
        assignment[w] = _class_of_white(r // 2, (c + 1) // 2)
        for dq in geo.z_gauge_data[k]:
            couplings.append((dq, w))
    for plq in geo.plaquettes:
        assignment[plq.dark] = "f1"
        couplings.append((plq.dark, plq.white_left))
        couplings.append((plq.dark, plq.white_right))
    nxt = layout.n_qubits
    for pair in geo.top_pairs + geo.bottom_pairs:
        if variant == "boundary4":
            assignment[pair.ancilla] = "f4"
            for dq in pair.data:
                couplings.append((dq, pair.ancilla))
        else:
            # restored bulk-like boundary: a fresh syndrome ancilla
            # reads the pair through one extra white per data qubit,
            # extending the white checkerboard past the lattice edge
            dark = nxt
            nxt += 1
            assignment[dark] = "f1"
            row = 0 if pair.side == "top" else layout.distance
            for dq in pair.data:
                white = nxt
                nxt += 1
                col = (layout.qubits[dq].coordinate[1] + 1) // 2
                assignment[white] = _class_of_white(row, col)
                couplings.append((dq, white))
                couplings.append((dark, white))
    return FrequencyPattern(layout, variant, assignment,
                            dict(HEAVY_CLASS_GHZ),
                            DEFAULT_ANHARMONICITY_MHZ, tuple(couplings))


def _square_pattern(layout: CodeLayout, variant: str) -> FrequencyPattern:
    geo = layout.geometry
    assignment: Dict[int, str] = {}
    couplings = set()
    for q in layout.qubits:
        if q.role == "Data":
            assignment[q.index] = "f1"

    def h_class(h: int) -> str:
        r, c = layout.qubits[h].coordinate
        return _class_of_white((r + 1) // 2, c // 2)

    for face in geo.faces:
        assignment[face.syndrome] = "f1"
        for flag, corners in ((face.flag_top, ("TL", "TR")),
                              (face.flag_bottom, ("BL", "BR"))):
            assignment[flag] = h_class(flag)
            couplings.add((face.syndrome, flag))
            for corner in corners:
                couplings.add((face.data[corner], flag))
    for pair in geo.top_pairs + geo.bottom_pairs:
        assignment[pair.ancilla] = h_class(pair.ancilla)
        for dq in pair.data:
            couplings.add((dq, pair.ancilla))
    nxt = layout.n_qubits
    for pair in geo.left_pairs + geo.right_pairs:
        if variant == "boundary4":
            assignment[pair.ancilla] = "f4"
            for dq in pair.data:
                couplings.add((dq, pair.ancilla))
        else:
            dark = nxt
            nxt += 1
            assignment[dark] = "f1"
            col = 0 if pair.side == "left" else layout.distance
            for dq in pair.data:
                white = nxt
                nxt += 1
                row = (layout.qubits[dq].coordinate[0] + 1) // 2
                assignment[white] = _class_of_white(row, col)
                couplings.add((dq, white))
                couplings.add((dark, white))
    return FrequencyPattern(layout, variant, assignment,
                            dict(HEAVY_CLASS_GHZ),
                            DEFAULT_ANHARMONICITY_MHZ,
                            tuple(sorted(couplings)))


def _surface_pattern(lattice: SurfaceLattice) -> FrequencyPattern:
    assignment: Dict[int, str] = {}
    data_class = ["f2", "f3", "f4", "f5"]
    for (i, j), q in lattice.data_grid.items():
        assignment[q] = data_class[2 * (i % 2) + (j % 2)]
    for c, t in lattice.couplings:
        assignment[c] = "f1"
    return FrequencyPattern(lattice, "surface5", assignment,
                            dict(SURFACE_CLASS_GHZ),
                            DEFAULT_ANHARMONICITY_MHZ, lattice.couplings)


def assign_pattern(layout, variant: str) -> FrequencyPattern:
    """Collision-free frequency classes for the given lattice."""
    if variant not in VARIANTS:
        raise ValueError("variant must be one of %s" % (VARIANTS,))
    if isinstance(layout, SurfaceLattice):
        if variant != "surface5":
            raise ValueError("a surface lattice only takes surface5")
        return _surface_pattern(layout)
    if not isinstance(layout, CodeLayout):
        raise ValueError("need a CodeLayout or SurfaceLattice")
    if variant == "surface5":
        raise ValueError("surface5 needs a surface lattice")
    if layout.family == FAMILY_HEX:
        return _hex_pattern(layout, variant)
    if layout.family == FAMILY_SQUARE:
        return _square_pattern(layout, variant)
    raise ValueError(layout.family)


# ---------------------------------------------------------------------------
# counting


def _count_matrix(pattern: FrequencyPattern, omega: np.ndarray,
                  window: float, band: Tuple[float, float]) -> np.ndarray:
    """Collision counts for each row of sampled frequencies (MHz)."""
    t = pattern.tables()
    delta = pattern.anharmonicity
    lo, hi = band
    counts = np.zeros(omega.shape[0], dtype=np.int64)

    def near(x, w=window):
        return np.abs(x) < w

    a, b = omega[:, t["nn_a"]], omega[:, t["nn_b"]]
    counts += near(a - b).sum(axis=1)                      # 1: NN 01 vs 01
    counts += near(a - b - delta).sum(axis=1)              # 2: 01 vs 12
    counts += near(b - a - delta).sum(axis=1)
    counts += near(a - b - delta / 2).sum(axis=1)          # 3: 01 vs 02/2
    counts += near(b - a - delta / 2).sum(axis=1)
    j, k = omega[:, t["nnn_a"]], omega[:, t["nnn_b"]]
    counts += near(j - k).sum(axis=1)                      # 4: NNN 01 vs 01
    counts += near(j - k - delta).sum(axis=1)              # 5: NNN 01 vs 12
    counts += near(k - j - delta).sum(axis=1)
    c = omega[:, t["sum_c"]]
    s = omega[:, t["sum_a"]] + omega[:, t["sum_b"]]
    counts += near(2 * c + delta - s).sum(axis=1)          # 6: 02 vs summed 01
    dd = np.abs(omega[:, t["dir_c"]] - omega[:, t["dir_t"]])
    counts += ((dd < lo) | (dd > hi)).sum(axis=1)          # 7: gate speed
    return counts


def count_collisions(pattern: FrequencyPattern, omega01,
                     window: float = DEFAULT_WINDOW_MHZ,
                     band: Tuple[float, float] = DEFAULT_BAND_MHZ) -> int:
    """Violations of the seven collision rules for one frequency draw.

    omega01 maps node -> frequency in MHz (or is an array aligned with
    pattern.nodes).
    """
    if isinstance(omega01, Mapping):
        omega = np.array([float(omega01[q]) for q in pattern.nodes])
    else:
        omega = np.asarray(omega01, dtype=float)
        if omega.shape != (len(pattern.nodes),):
            raise ValueError("expected one frequency per node")
    return int(_count_matrix(pattern, omega[None, :], window, band)[0])


@dataclass
class SigmaPoint:
    sigma_f: float
    mean_collisions: float
    stderr: float


def sweep_sigma(pattern: FrequencyPattern, sigmas: Sequence[float],
                trials: int = 2000, seed: int = 0,
                window: float = DEFAULT_WINDOW_MHZ,
                band: Tuple[float, float] = DEFAULT_BAND_MHZ
                ) -> List[SigmaPoint]:
    """Mean collision count vs fabrication disorder.

    Unit normal draws are keyed by (seed, trial) and scaled by sigma,
    so the curve is smooth in sigma and deterministic under the seed.
    """
    nominal = pattern.nominal_mhz()
    n = nominal.shape[0]
    unit = np.stack([stream(seed, t).standard_normal(n)
                     for t in range(trials)])
    points = []
    for sigma in sigmas:
        DisorderParams(sigma_f=float(sigma), window=window, band=band,
                       trials=trials)
        counts = _count_matrix(pattern, nominal + sigma * unit,
                               window, band)
        mean = float(counts.mean())
        stderr = float(counts.std(ddof=1) / np.sqrt(trials)) if trials > 1 \
            else 0.0
        points.append(SigmaPoint(float(sigma), mean, stderr))
    return points
