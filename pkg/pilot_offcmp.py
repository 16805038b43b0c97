"""Diagnostic: flags-off failure rates, hex vs square at matched (d, p)."""
import time

from heavylat import codes, experiments

T0 = time.time()


def log(msg):
    print(f"[{time.time()-T0:7.1f}s] {msg}", flush=True)


SHOTS = 10000
for family in (codes.FAMILY_HEX, codes.FAMILY_SQUARE):
    for d in (3, 5):
        for p in (0.003, 0.0036):
            res = experiments.run_point(family, d, p, SHOTS, seed=321,
                                        flags_enabled=False)
            log(f"{family} d={d} p={p} off: x={res.x_fail} z={res.z_fail} "
                f"y={res.y_fail}")
