import numpy as np
import pytest

from heavylat import codes, circuits, frames, noise
from heavylat.circuits import FlagRef, Gate
from heavylat.noise import FaultLocation, NoiseParams


@pytest.fixture(scope="module")
def hex3():
    return circuits.build_round(codes.build(codes.FAMILY_HEX, 3))


@pytest.fixture(scope="module")
def square3():
    return circuits.build_round(codes.build(codes.FAMILY_SQUARE, 3))


@pytest.fixture(scope="module")
def hex3_engine(hex3):
    return frames.FastEngine(hex3, rounds=3)


@pytest.fixture(scope="module")
def square3_engine(square3):
    return frames.FastEngine(square3, rounds=3)


def test_clean_shot_is_silent(hex3, hex3_engine):
    rec = frames.run_shot(hex3, [], rounds=3)
    assert all(not s for s in rec.gauge_flips)
    assert all(not s for s in rec.flag_flips)
    assert rec.final_x_mask == 0 and rec.final_z_mask == 0
    assert frames.detection_events(hex3, rec) == set()
    shot = hex3_engine.events_from_faults([])
    assert shot == (0, 0, 0, 0)


def _duty_meas_location(circuit):
    for (q, step), ref in sorted(circuit.measured_refs.items()):
        if ref.kind == "z_gauge":
            return FaultLocation(0, step, Gate("MEASZ", (q,)),
                                 noise.KIND_MEAS), ref
    raise AssertionError


def test_measurement_flip_gives_vertical_pair(hex3, hex3_engine):
    # [DERIVED] a wrong gauge readout changes its stabilizer outcomes in
    # exactly one layer, producing events there and in the next layer
    loc, ref = _duty_meas_location(hex3)
    loc = FaultLocation(2, loc.step, loc.gate, loc.kind)
    _, z_map = frames._gauge_to_stab_maps(hex3.layout)
    expected = {("z", s, layer) for s in z_map[ref.index] for layer in (2, 3)}
    rec = frames.run_shot(hex3, [(loc, "X")], rounds=3)
    assert frames.detection_events(hex3, rec) == expected
    shot = hex3_engine.events_from_faults([(loc, "X")])
    assert hex3_engine.events_to_set(shot.events) == expected
    assert shot.residual_x == 0 and shot.residual_z == 0


def test_last_round_measurement_flip_reaches_readout_layer(hex3, hex3_engine):
    loc, ref = _duty_meas_location(hex3)
    loc = FaultLocation(3, loc.step, loc.gate, loc.kind)
    _, z_map = frames._gauge_to_stab_maps(hex3.layout)
    expected = {("z", s, layer) for s in z_map[ref.index] for layer in (3, 4)}
    shot = hex3_engine.events_from_faults([(loc, "X")])
    assert hex3_engine.events_to_set(shot.events) == expected


def test_idle_fault_appears_one_layer_late(hex3, hex3_engine):
    # an end-of-round error is first read out in the following round
    q = hex3.layout.data_qubits[4]
    loc = FaultLocation(1, hex3.depth, Gate("IDLE", (q,)), noise.KIND_IDLE)
    expected = {("z", s, 2)
                for s, stab in enumerate(hex3.layout.z_stabilizers)
                if (stab.z_mask >> q) & 1}
    rec = frames.run_shot(hex3, [(loc, "X")], rounds=3)
    assert frames.detection_events(hex3, rec) == expected
    assert rec.final_x_mask == 1 << q
    shot = hex3_engine.events_from_faults([(loc, "X")])
    assert hex3_engine.events_to_set(shot.events) == expected
    assert shot.residual_x == 1 << q


def test_single_bridge_fault_flags_and_is_round_local(hex3, hex3_engine):
    p = hex3.layout.geometry.plaquettes[0]
    gate = Gate("CNOT", (p.dark, p.white_left))
    loc = FaultLocation(2, 2, gate, noise.KIND_GATE2)
    rec = frames.run_shot(hex3, [(loc, "IX")], rounds=3)
    fired = frames.flag_events(hex3, rec)
    assert [(e.round, e.ref.side, e.usable) for e in fired] == \
        [(2, "Left", True)]
    shot = hex3_engine.events_from_faults([(loc, "IX")])
    assert hex3_engine.flags_to_set(shot.flags) == \
        {(2, FlagRef("x_gauge", p.gauge_index, "Left"))}
    # the weight-2 hook this flag announces
    tl, bl = p.data["TL"], p.data["BL"]
    assert shot.residual_x == (1 << tl) | (1 << bl)


def test_double_flag_is_marked_unusable(hex3):
    # a syndrome-ancilla fault between the two bridge returns fires both
    # flags and deposits no data error
    p = hex3.layout.geometry.plaquettes[0]
    gate = Gate("CNOT", (p.dark, p.white_left))
    loc = FaultLocation(1, 5, gate, noise.KIND_GATE2)
    rec = frames.run_shot(hex3, [(loc, "XX")], rounds=2)
    fired = frames.flag_events(hex3, rec)
    assert sorted((e.ref.side, e.usable) for e in fired) == \
        [("Left", False), ("Right", False)]
    assert rec.final_x_mask == 0 and rec.final_z_mask == 0


@pytest.mark.parametrize("family,d,trials", [
    (codes.FAMILY_HEX, 3, 150),
    (codes.FAMILY_SQUARE, 3, 150),
    (codes.FAMILY_HEX, 5, 40),
    (codes.FAMILY_SQUARE, 5, 40),
])
def test_engine_matches_reference_walk(family, d, trials):
    circuit = circuits.build_round(codes.build(family, d))
    engine = frames.FastEngine(circuit, rounds=d)
    params = NoiseParams(0.02)
    for trial in range(trials):
        rng = noise.stream(23, family, d, trial)
        faults = noise.sample_faults(circuit, params, d, rng,
                                     template=engine.template)
        rec = frames.run_shot(circuit, faults, rounds=d)
        shot = engine.events_from_faults(faults)
        assert engine.events_to_set(shot.events) == \
            frames.detection_events(circuit, rec)
        assert engine.flags_to_set(shot.flags) == \
            {(e.round, e.ref) for e in frames.flag_events(circuit, rec)}
        assert shot.residual_x == rec.final_x_mask
        assert shot.residual_z == rec.final_z_mask


def test_sampling_path_equals_reference_sampler(square3, square3_engine):
    params = NoiseParams(0.03)
    for k in range(30):
        shot = square3_engine.sample_shot(params, noise.stream(9, k))
        faults = noise.sample_faults(square3, params, 3, noise.stream(9, k),
                                     template=square3_engine.template)
        assert shot == square3_engine.events_from_faults(faults)


def test_detector_bit_round_trip(hex3_engine):
    e = hex3_engine
    events = 0
    wanted = {("x", 1, 2), ("z", 3, 4), ("x", 0, 1)}
    for basis, idx, layer in wanted:
        events |= 1 << e.detector_bit(basis, idx, layer)
    assert e.events_to_set(events) == wanted


def test_engine_shots_reproducible(hex3_engine):
    params = NoiseParams(0.01)
    a = [hex3_engine.sample_shot(params, noise.stream(4, i)) for i in range(20)]
    b = [hex3_engine.sample_shot(params, noise.stream(4, i)) for i in range(20)]
    assert a == b
    assert any(s.events for s in a)
