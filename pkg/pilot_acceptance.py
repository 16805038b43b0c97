"""Pilot runs for the acceptance campaigns (reduced shot counts)."""
import time

from heavylat.experiments import Campaign, run_campaign, estimate_threshold

T0 = time.time()


def log(*parts):
    print("[%7.1fs]" % (time.time() - T0), *parts, flush=True)


def show(tag, campaign, failure="X"):
    pts = run_campaign(campaign)
    log(tag, "points:")
    for pt in pts:
        print("   d=%d p=%g x=%d z=%d y=%d" %
              (pt.d, pt.p, pt.x_fail, pt.z_fail, pt.y_fail), flush=True)
    est = estimate_threshold(pts, failure=failure)
    log(tag, failure, "threshold:", est.found, est.p_th, est.lo, est.hi)
    return pts


hex_grid = (3.0e-3, 3.8e-3, 4.7e-3, 6.0e-3)
sq_grid = (2.0e-3, 2.6e-3, 3.3e-3, 4.2e-3)
off_grid = (1.3e-3, 1.8e-3, 2.5e-3, 3.4e-3)

hex_pts = show("hex-X", Campaign("HeavyHexagon", (3, 5, 7), hex_grid,
                                 shots=10000, seed=101))
est_z = estimate_threshold(hex_pts, failure="Z")
log("hex-Z crossing found (want False):", est_z.found, est_z.crossings)

show("square-X/Z", Campaign("HeavySquare", (3, 5, 7), sq_grid,
                            shots=10000, seed=102), failure="X")
show("square-off", Campaign("HeavySquare", (3, 5, 7), off_grid,
                            shots=10000, seed=103, flags_enabled=False))

log("ordering pilot at 3e-4, 1e5 shots")
for fam in ("HeavyHexagon", "HeavySquare"):
    pts = run_campaign(Campaign(fam, (3, 5, 7), (3e-4,), shots=100000,
                                seed=104))
    for pt in pts:
        print("   %s d=%d x=%d z=%d y=%d" %
              (fam, pt.d, pt.x_fail, pt.z_fail, pt.y_fail), flush=True)
log("hex Z at 1e-4 pilot, 2e5 shots")
pts = run_campaign(Campaign("HeavyHexagon", (3, 5), (1e-4,), shots=200000,
                            seed=105))
for pt in pts:
    print("   d=%d x=%d z=%d y=%d" % (pt.d, pt.x_fail, pt.z_fail, pt.y_fail),
          flush=True)

log("flag ablation pilot: square d5 p=1e-3, 2e4 shots")
on = run_campaign(Campaign("HeavySquare", (5,), (1e-3,), shots=20000,
                           seed=106))[0]
off = run_campaign(Campaign("HeavySquare", (5,), (1e-3,), shots=20000,
                            seed=106, flags_enabled=False))[0]
log("on z=%d y=%d  off z=%d y=%d  ratio=%.2f" %
    (on.z_fail, on.y_fail, off.z_fail, off.y_fail,
     (off.z_fail + off.y_fail) / max(on.z_fail + on.y_fail, 1)))
log("pilot done")
