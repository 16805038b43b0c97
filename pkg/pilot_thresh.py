"""Pilot: locate threshold crossings under the per-step idle convention."""
import sys
import time

from heavylat import codes
from heavylat.experiments import Campaign, run_campaign, estimate_threshold

SHOTS = 20000


def sweep(tag, family, grid, flags_enabled=True):
    t0 = time.time()
    camp = Campaign(family=family, distances=(3, 5, 7), p_grid=tuple(grid),
                    shots=SHOTS, seed=101, flags_enabled=flags_enabled)
    pts = run_campaign(camp)
    print(f"== {tag} ({time.time()-t0:.0f}s)")
    for pt in pts:
        print(f"  d={pt.distance} p={pt.p:.4g} x={pt.x_rate:.4f} "
              f"z={pt.z_rate:.4f} y={pt.y_rate:.4f}")
    for basis in ("X", "Z"):
        try:
            est = estimate_threshold(pts, failure=basis)
            print(f"  threshold {basis}: {est.value:.5f} "
                  f"[{est.low:.5f},{est.high:.5f}] crossings={est.crossings}")
        except Exception as e:
            print(f"  threshold {basis}: {e}")
    sys.stdout.flush()


sweep("hex on", codes.FAMILY_HEX, (2.5e-3, 3.2e-3, 4.0e-3, 5.0e-3))
sweep("square on", codes.FAMILY_SQUARE, (1.6e-3, 2.2e-3, 3.0e-3, 4.0e-3))
sweep("square off", codes.FAMILY_SQUARE, (1.0e-3, 1.5e-3, 2.2e-3, 3.0e-3),
      flags_enabled=False)
print("pilot done")
