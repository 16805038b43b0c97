"""Command line front end.

Subcommands mirror the library workflow: build a layout, export its
decoding graph, sample shot records, decode them, run a rate sweep, or
run the frequency-collision Monte Carlo.  All outputs are deterministic
for a fixed seed; floats in CSV files are written with repr so a file
round-trips byte for byte.
"""

from __future__ import annotations

import argparse
import struct
import sys

from . import codes, collisions, experiments, graphs
from .circuits import build_round
from .decoder import CodeDecoder, adjudicate
from .frames import FastEngine
from .noise import NoiseParams, stream
from .pauli import PauliOp

RECORD_MAGIC = b"HLRC"
RECORD_VERSION = 1

_FAMILIES = {
    "hex": codes.FAMILY_HEX,
    "heavyhexagon": codes.FAMILY_HEX,
    "square": codes.FAMILY_SQUARE,
    "heavysquare": codes.FAMILY_SQUARE,
}


def _family(name: str) -> str:
    try:
        return _FAMILIES[name.lower()]
    except KeyError:
        raise SystemExit("unknown family %r (use hex or square)" % name)


def _load_layout(args) -> codes.CodeLayout:
    if args.layout:
        return codes.load_layout(args.layout)
    if args.family and args.distance:
        return codes.build(_family(args.family), args.distance)
    raise SystemExit("need --layout or both --family and --distance")


def _add_layout_args(sub):
    sub.add_argument("--layout", help="layout JSON produced by 'build'")
    sub.add_argument("--family", help="hex or square")
    sub.add_argument("--distance", type=int)


# --------------------------------------------------------------------------
# shot records


def _write_int(fh, value: int):
    blob = value.to_bytes((value.bit_length() + 7) // 8 or 1, "little")
    fh.write(struct.pack("<I", len(blob)))
    fh.write(blob)


def _read_int(fh) -> int:
    (n,) = struct.unpack("<I", fh.read(4))
    return int.from_bytes(fh.read(n), "little")


def write_records(path, layout, rounds, p, seed, shots):
    with open(path, "wb") as fh:
        fam = layout.family.encode()
        fh.write(RECORD_MAGIC)
        fh.write(struct.pack("<HB", RECORD_VERSION, len(fam)))
        fh.write(fam)
        fh.write(struct.pack("<HHdQI", layout.distance, rounds, p,
                             seed, len(shots)))
        for shot in shots:
            for value in (shot.events, shot.flags,
                          shot.residual_x, shot.residual_z):
                _write_int(fh, value)


def read_records(path):
    """(header dict, list of (events, flags, residual_x, residual_z))."""
    with open(path, "rb") as fh:
        if fh.read(4) != RECORD_MAGIC:
            raise ValueError("not a shot-record file: %s" % path)
        version, fam_len = struct.unpack("<HB", fh.read(3))
        if version != RECORD_VERSION:
            raise ValueError("unsupported record version %d" % version)
        family = fh.read(fam_len).decode()
        d, rounds, p, seed, n = struct.unpack("<HHdQI", fh.read(24))
        header = {"family": family, "distance": d, "rounds": rounds,
                  "p": p, "seed": seed}
        shots = [tuple(_read_int(fh) for _ in range(4)) for _ in range(n)]
    return header, shots


# --------------------------------------------------------------------------
# subcommands


def _cmd_build(args):
    layout = codes.build(_family(args.family), args.distance)
    layout.save(args.out)
    print("wrote %s (%d qubits)" % (args.out, layout.n_qubits))


def _cmd_export_graph(args):
    layout = _load_layout(args)
    circuit = build_round(layout)
    rounds = args.rounds or layout.distance
    graph = graphs.build_graph(layout, circuit, args.kind,
                               NoiseParams(args.p), rounds=rounds)
    text = graphs.export_dot(graph) if args.format == "dot" \
        else graphs.export_json(graph)
    with open(args.out, "w") as fh:
        fh.write(text)
    print("wrote %s (%d nodes, %d edges)" %
          (args.out, graph.n_nodes, len(graph.edges)))


def _cmd_sample(args):
    layout = _load_layout(args)
    circuit = build_round(layout)
    rounds = args.rounds or layout.distance
    engine = FastEngine(circuit, rounds)
    params = NoiseParams(args.p)
    shots = [engine.sample_shot(params, stream(args.seed, i))
             for i in range(args.shots)]
    write_records(args.out, layout, rounds, args.p, args.seed, shots)
    print("wrote %s (%d shots)" % (args.out, args.shots))


def _cmd_decode(args):
    layout = _load_layout(args)
    header, shots = read_records(args.records)
    if header["family"] != layout.family or \
            header["distance"] != layout.distance:
        raise SystemExit("records were sampled from %s d=%d, not this layout"
                         % (header["family"], header["distance"]))
    circuit = build_round(layout)
    dec = CodeDecoder(layout, circuit, NoiseParams(header["p"]),
                      rounds=header["rounds"],
                      flags_enabled=args.flags != "off", alpha=args.alpha)
    n = layout.n_qubits
    with open(args.out, "w") as fh:
        fh.write("shot,failure,m,cost\n")
        for i, (events, flags, rx, rz) in enumerate(shots):
            correction, m, cost = dec.decode_shot(events, flags)
            verdict = adjudicate(correction,
                                 PauliOp.from_masks(n, rx, rz), layout)
            fh.write("%d,%s,%d,%r\n" % (i, verdict or "none", m, float(cost)))
    print("wrote %s (%d shots)" % (args.out, len(shots)))


def _cmd_sweep(args):
    campaign = experiments.Campaign(
        family=_family(args.family),
        distances=tuple(int(tok) for tok in args.distances.split(",")),
        p_grid=tuple(experiments.parse_p_grid(args.p)),
        shots=args.shots, seed=args.seed,
        flags_enabled=args.flags != "off")
    progress = None
    if args.verbose:
        progress = lambda pt: print("  %s d=%d p=%g: %d/%d/%d" % (
            pt.family, pt.d, pt.p, pt.x_fail, pt.z_fail, pt.y_fail),
            file=sys.stderr)
    points = experiments.run_campaign(campaign, max_seconds=args.max_seconds,
                                      progress=progress)
    experiments.export(points, args.out, args.format, campaign)
    note = " (partial)" if points.partial else ""
    print("wrote %s (%d points)%s" % (args.out, len(points), note))


def _cmd_collisions(args):
    if args.family == "surface":
        pattern = collisions.assign_pattern(
            collisions.surface_lattice(args.distance), "surface5")
    else:
        layout = codes.build(_family(args.family), args.distance)
        pattern = collisions.assign_pattern(layout, args.variant)
    sigmas = experiments.parse_p_grid(args.sigma)
    points = collisions.sweep_sigma(pattern, sigmas, trials=args.trials,
                                    seed=args.seed)
    with open(args.out, "w") as fh:
        fh.write("variant,d,sigma_f,mean_collisions,stderr\n")
        for pt in points:
            fh.write("%s,%d,%r,%r,%r\n" % (
                pattern.variant, args.distance, pt.sigma_f,
                pt.mean_collisions, pt.stderr))
    print("wrote %s (%d sigma points)" % (args.out, len(points)))


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="heavylat",
        description="heavy lattice code simulation and decoding")
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build a layout and save JSON")
    p_build.add_argument("--family", required=True)
    p_build.add_argument("--distance", type=int, required=True)
    p_build.add_argument("--out", required=True)
    p_build.set_defaults(func=_cmd_build)

    p_graph = sub.add_parser("export-graph",
                             help="export a decoding graph (json or dot)")
    _add_layout_args(p_graph)
    p_graph.add_argument("--kind", required=True, choices=graphs.KINDS)
    p_graph.add_argument("--p", type=float, default=1e-3)
    p_graph.add_argument("--rounds", type=int)
    p_graph.add_argument("--format", choices=("json", "dot"), default="json")
    p_graph.add_argument("--out", required=True)
    p_graph.set_defaults(func=_cmd_export_graph)

    p_sample = sub.add_parser("sample", help="sample noisy shot records")
    _add_layout_args(p_sample)
    p_sample.add_argument("--p", type=float, required=True)
    p_sample.add_argument("--rounds", type=int)
    p_sample.add_argument("--shots", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True)
    p_sample.set_defaults(func=_cmd_sample)

    p_dec = sub.add_parser("decode", help="decode recorded shots to CSV")
    _add_layout_args(p_dec)
    p_dec.add_argument("--records", required=True)
    p_dec.add_argument("--flags", choices=("on", "off"), default="on")
    p_dec.add_argument("--alpha", type=float, default=1.0)
    p_dec.add_argument("--out", required=True)
    p_dec.set_defaults(func=_cmd_decode)

    p_sweep = sub.add_parser("sweep", help="logical error rate campaign")
    p_sweep.add_argument("--family", required=True)
    p_sweep.add_argument("--distances", required=True,
                         help="comma list, e.g. 3,5,7")
    p_sweep.add_argument("--p", required=True,
                         help="grid: lo:hi:logN, lo:hi:N, or comma list")
    p_sweep.add_argument("--shots", type=int, required=True)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--flags", choices=("on", "off"), default="on")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.add_argument("--max-seconds", type=float)
    p_sweep.add_argument("--verbose", action="store_true")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_col = sub.add_parser("collisions",
                           help="frequency collision Monte Carlo")
    p_col.add_argument("--family", required=True,
                       help="hex, square, or surface")
    p_col.add_argument("--distance", type=int, required=True)
    p_col.add_argument("--variant", default="bulk3",
                       choices=collisions.VARIANTS)
    p_col.add_argument("--sigma", default="0:60:13",
                       help="grid in MHz: lo:hi:N or comma list")
    p_col.add_argument("--trials", type=int, default=2000)
    p_col.add_argument("--seed", type=int, default=0)
    p_col.add_argument("--out", required=True)
    p_col.set_defaults(func=_cmd_collisions)

    args = parser.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
