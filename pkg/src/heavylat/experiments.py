"""Monte Carlo campaigns and threshold estimation.

run_campaign walks a (distance, error-rate) grid, simulating and
decoding shots and tallying logical failure classes.  Every shot draws
from its own random stream keyed by (seed, d, p_index, shot), so counts
are reproducible bit for bit regardless of how shots are batched or
distributed across workers.

estimate_threshold locates the crossing of the logical rate curves of
consecutive distances on a log-log scale, with a bootstrap resampling
of the per-point binomial counts for the uncertainty.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
import time
from dataclasses import dataclass, field, asdict
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .circuits import build_round
from .codes import build
from .decoder import CodeDecoder
from .frames import FastEngine
from .noise import NoiseParams, stream

CSV_HEADER = "family,d,p,shots,x_fail,z_fail,y_fail,x_lo,x_hi,z_lo,z_hi"

_WILSON_Z = 1.959963984540054  # two-sided 95%


def wilson_interval(k: int, n: int) -> Tuple[float, float]:
    """95% Wilson score interval for k successes in n trials."""
    if n <= 0:
        raise ValueError("need at least one shot")
    if not 0 <= k <= n:
        raise ValueError("count outside [0, shots]")
    z = _WILSON_Z
    phat = k / n
    denom = 1.0 + z * z / n
    center = phat + z * z / (2.0 * n)
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n))
    return (max((center - half) / denom, 0.0),
            min((center + half) / denom, 1.0))


@dataclass
class Campaign:
    family: str
    distances: Sequence[int]
    p_grid: Sequence[float]
    shots: int
    seed: int
    flags_enabled: bool = True

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        ps = list(self.p_grid)
        if ps != sorted(ps):
            raise ValueError("p grid must be sorted ascending")
        self.p_grid = tuple(ps)
        self.distances = tuple(self.distances)
        for d in self.distances:
            if d < 3 or d % 2 == 0:
                raise ValueError("distances must be odd and at least 3")


@dataclass
class RatePoint:
    """Failure tallies of one (d, p) grid point.

    x_fail / z_fail / y_fail are disjoint: a shot counts as Y when the
    net operator flips both logicals, and as X or Z when it flips
    exactly one.  The stored intervals are Wilson 95% bounds on the X
    and Z rates.
    """

    family: str
    d: int
    p: float
    shots: int
    x_fail: int
    z_fail: int
    y_fail: int
    x_lo: float = field(init=False)
    x_hi: float = field(init=False)
    z_lo: float = field(init=False)
    z_hi: float = field(init=False)

    def __post_init__(self):
        for k in (self.x_fail, self.z_fail, self.y_fail):
            if not 0 <= k <= self.shots:
                raise ValueError("failure count outside [0, shots]")
        self.x_lo, self.x_hi = wilson_interval(self.x_fail, self.shots)
        self.z_lo, self.z_hi = wilson_interval(self.z_fail, self.shots)

    def flip_count(self, failure: str) -> int:
        """Shots flipping the given logical (Y flips both)."""
        if failure.upper() == "X":
            return self.x_fail + self.y_fail
        if failure.upper() == "Z":
            return self.z_fail + self.y_fail
        raise ValueError("failure must be 'X' or 'Z'")

    def flip_rate(self, failure: str) -> float:
        return self.flip_count(failure) / self.shots


class CampaignPoints(list):
    """List of RatePoint; partial marks a resource-limit abort."""

    partial = False


def run_campaign(campaign: Campaign, max_seconds: Optional[float] = None,
                 progress: Optional[Callable[[RatePoint], None]] = None
                 ) -> CampaignPoints:
    """Simulate and decode every grid point of the campaign.

    Counts depend only on (seed, d, p_index, shot), never on timing or
    batching.  When max_seconds elapses between points the sweep stops
    early and the returned list has partial=True.
    """
    points = CampaignPoints()
    t0 = time.monotonic()
    for d in campaign.distances:
        layout = build(campaign.family, d)
        circuit = build_round(layout)
        engine = FastEngine(circuit, d)
        for p_idx, p in enumerate(campaign.p_grid):
            if max_seconds is not None and time.monotonic() - t0 > max_seconds:
                points.partial = True
                return points
            counts = {"X": 0, "Z": 0, "Y": 0}
            if p > 0.0:
                params = NoiseParams(p=p)
                dec = CodeDecoder(layout, circuit, params, rounds=d,
                                  flags_enabled=campaign.flags_enabled,
                                  engine=engine)
                for shot_idx in range(campaign.shots):
                    rng = stream(campaign.seed, d, p_idx, shot_idx)
                    shot = engine.sample_shot(params, rng)
                    if shot.events == 0 and shot.flags == 0 and \
                            shot.residual_x == 0 and shot.residual_z == 0:
                        continue
                    verdict = dec.adjudicate_shot(shot)
                    if verdict is not None:
                        counts[verdict] += 1
            point = RatePoint(campaign.family, d, p, campaign.shots,
                              counts["X"], counts["Z"], counts["Y"])
            points.append(point)
            if progress is not None:
                progress(point)
    return points


# ---------------------------------------------------------------------------
# threshold estimation


@dataclass
class ThresholdEstimate:
    found: bool
    p_th: float
    lo: float
    hi: float
    crossings: Tuple[Tuple[int, int, float], ...]  # (d1, d2, crossing)


def _curve(points: Sequence[RatePoint], d: int, failure: str):
    pts = sorted((pt for pt in points if pt.d == d), key=lambda pt: pt.p)
    return {pt.p: (pt.flip_count(failure), pt.shots) for pt in pts}


def _crossing_on_grid(ps, counts_a, counts_b):
    """First sign change of log r_b - log r_a, interpolated in log p."""
    ra = np.array([max(k, 0.5) / n for k, n in counts_a])
    rb = np.array([max(k, 0.5) / n for k, n in counts_b])
    g = np.log(rb) - np.log(ra)
    for i in range(len(ps) - 1):
        if g[i] < 0.0 and g[i + 1] >= 0.0:
            t = -g[i] / (g[i + 1] - g[i])
            lp = math.log(ps[i]) + t * (math.log(ps[i + 1]) - math.log(ps[i]))
            return math.exp(lp)
    return None


def estimate_threshold(points: Sequence[RatePoint], failure: str = "X",
                       bootstrap: int = 200, seed: int = 0
                       ) -> ThresholdEstimate:
    """Crossing of consecutive-distance logical rate curves.

    A crossing is where the larger distance stops being better: the
    rate curves are compared on the shared p grid and the sign change
    of their log-rate difference is interpolated linearly in log p.
    found=False reports that no curve pair crosses inside the grid.
    """
    distances = sorted({pt.d for pt in points})
    if len(distances) < 2:
        raise ValueError("need at least two distances")
    curves = {d: _curve(points, d, failure) for d in distances}
    pairs = list(zip(distances, distances[1:]))
    shared = {}
    for d1, d2 in pairs:
        ps = sorted(set(curves[d1]) & set(curves[d2]))
        if len(ps) < 2:
            raise ValueError("overlapping p grids required for %d/%d"
                             % (d1, d2))
        shared[(d1, d2)] = ps

    def crossings_of(sampler):
        out = []
        for d1, d2 in pairs:
            ps = shared[(d1, d2)]
            ca = [sampler(curves[d1][p]) for p in ps]
            cb = [sampler(curves[d2][p]) for p in ps]
            c = _crossing_on_grid(ps, ca, cb)
            if c is not None:
                out.append((d1, d2, c))
        return out

    base = crossings_of(lambda kn: kn)
    if not base:
        return ThresholdEstimate(False, math.nan, math.nan, math.nan, ())
    p_th = float(np.exp(np.mean([math.log(c) for _, _, c in base])))

    rng = stream(seed, "threshold-bootstrap")
    replicas = []
    for _ in range(bootstrap):
        def sampler(kn, rng=rng):
            k, n = kn
            return int(rng.binomial(n, k / n)), n
        got = crossings_of(sampler)
        if got:
            replicas.append(
                float(np.exp(np.mean([math.log(c) for _, _, c in got]))))
    if len(replicas) >= max(20, bootstrap // 4):
        lo, hi = np.percentile(replicas, [2.5, 97.5])
    else:
        lo = hi = math.nan
    return ThresholdEstimate(True, p_th, float(lo), float(hi), tuple(base))


# ---------------------------------------------------------------------------
# grids and files


def parse_p_grid(text: str) -> List[float]:
    """Grid notation: 'a:b:logN' geometric, 'a:b:N' linear, or a
    comma-separated explicit list."""
    text = text.strip()
    if ":" in text:
        a, b, n = text.split(":")
        lo, hi = float(a), float(b)
        if n.startswith("log"):
            vals = np.geomspace(lo, hi, int(n[3:]))
        else:
            vals = np.linspace(lo, hi, int(n))
        return [float(v) for v in vals]
    return [float(tok) for tok in text.split(",") if tok.strip()]


def export_csv(points: Sequence[RatePoint], path: str) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for pt in points:
            fh.write("%s,%d,%r,%d,%d,%d,%d,%r,%r,%r,%r\n" % (
                pt.family, pt.d, pt.p, pt.shots,
                pt.x_fail, pt.z_fail, pt.y_fail,
                pt.x_lo, pt.x_hi, pt.z_lo, pt.z_hi))


def read_csv(path: str) -> CampaignPoints:
    points = CampaignPoints()
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError("unrecognized results header: %r" % header)
        for line in fh:
            line = line.strip()
            if not line:
                continue
            tok = line.split(",")
            points.append(RatePoint(tok[0], int(tok[1]), float(tok[2]),
                                    int(tok[3]), int(tok[4]), int(tok[5]),
                                    int(tok[6])))
    return points


def _git_revision() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"],
                             capture_output=True, text=True, timeout=5,
                             cwd=os.path.dirname(os.path.abspath(__file__)))
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def export_json(points: Sequence[RatePoint], path: str,
                campaign: Optional[Campaign] = None) -> None:
    doc = {"revision": _git_revision(),
           "points": []}
    if campaign is not None:
        doc["campaign"] = asdict(campaign)
        doc["seed"] = campaign.seed
        p_index = {p: i for i, p in enumerate(campaign.p_grid)}
    for pt in points:
        rec = asdict(pt)
        if campaign is not None and pt.p in p_index:
            rec["stream"] = [campaign.seed, pt.d, p_index[pt.p]]
        doc["points"].append(rec)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def export(points: Sequence[RatePoint], path: str, format: str = "csv",
           campaign: Optional[Campaign] = None) -> None:
    if format == "csv":
        export_csv(points, path)
    elif format == "json":
        export_json(points, path, campaign)
    else:
        raise ValueError("format must be 'csv' or 'json'")
