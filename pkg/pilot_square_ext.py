"""Locate the heavy-square crossings with an extended p grid."""
import time

from heavylat.experiments import Campaign, run_campaign, estimate_threshold

T0 = time.time()


def log(*parts):
    print("[%7.1fs]" % (time.time() - T0), *parts, flush=True)


def show(tag, campaign):
    pts = run_campaign(campaign)
    log(tag, "points:")
    for pt in pts:
        print("   d=%d p=%g x=%d z=%d y=%d" %
              (pt.d, pt.p, pt.x_fail, pt.z_fail, pt.y_fail), flush=True)
    for fail in ("X", "Z"):
        est = estimate_threshold(pts, failure=fail)
        log(tag, fail, "crossing:", est.found, est.p_th, est.lo, est.hi)
    return pts


grid_hi = (4.2e-3, 5.0e-3, 6.0e-3, 7.0e-3)
show("square-on-hi", Campaign("HeavySquare", (3, 5, 7), grid_hi,
                              shots=10000, seed=201))
grid_off = (2.5e-3, 3.0e-3, 3.6e-3, 4.4e-3)
show("square-off-hi", Campaign("HeavySquare", (3, 5, 7), grid_off,
                               shots=10000, seed=202, flags_enabled=False))
log("done")
