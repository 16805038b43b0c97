"""Diagnostic: MC detector/flag rates vs graph edge-mass predictions."""
import math
import time

import numpy as np

from heavylat import codes, circuits, graphs
from heavylat.frames import FastEngine
from heavylat.noise import NoiseParams

P = 1e-3
SHOTS = 30000
T0 = time.time()


def log(msg):
    print(f"[{time.time()-T0:7.1f}s] {msg}", flush=True)


for family in (codes.FAMILY_HEX, codes.FAMILY_SQUARE):
    d = 5
    layout = codes.build(family, d)
    circuit = circuits.build_round(layout)
    eng = FastEngine(circuit, rounds=d)
    rng = np.random.default_rng(12345)
    tot_x_events = tot_z_events = tot_flags = 0
    for _ in range(SHOTS):
        shot = eng.sample_shot(NoiseParams(P), rng)
        ev = shot.events
        # count bits per sector
        while ev:
            bit = (ev & -ev).bit_length() - 1
            ev &= ev - 1
            det = bit % eng.stride
            if det < eng.n_x:
                tot_x_events += 1
            else:
                tot_z_events += 1
        tot_flags += bin(shot.flags).count("1")
    mean_x = tot_x_events / SHOTS
    mean_z = tot_z_events / SHOTS
    mean_f = tot_flags / SHOTS
    log(f"{family} d={d} MC: mean X-det events {mean_x:.4f}, "
        f"Z-det events {mean_z:.4f}, flags {mean_f:.4f}")

    # graph predictions: sum over edges of P_E * (#real endpoints)
    for kind in graphs.KINDS:
        if family == codes.FAMILY_HEX and not kind.startswith("Hex"):
            continue
        if family == codes.FAMILY_SQUARE and not kind.startswith("Square"):
            continue
        g = graphs.build_graph(layout, circuit, kind, NoiseParams(P), rounds=d)
        pred = 0.0
        n_edges = 0
        n_cross = 0
        for e in g.edges:
            prob = graphs.edge_probability_enumerated(g, e)
            ends = sum(1 for v in (e.u, e.v) if v != g.boundary)
            if e.weight >= graphs.CROSS_SENTINEL / 2:
                n_cross += 1
                continue
            pred += prob * ends
            n_edges += 1
        log(f"  {kind}: predicted mean events {pred:.4f} "
            f"({n_edges} weighted edges, {n_cross} cross)")
