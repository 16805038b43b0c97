import numpy as np
import pytest

from heavylat import codes, circuits, noise
from heavylat.circuits import live_idle_steps


@pytest.fixture(scope="module")
def hex3():
    layout = codes.build(codes.FAMILY_HEX, 3)
    return circuits.build_round(layout)


def _census(circuit):
    n_cnot = n_prep = n_meas = 0
    for t in range(1, circuit.depth + 1):
        for g in circuit.gates_at(t):
            if g.kind == "CNOT":
                n_cnot += 1
            elif g.kind in ("PREPX", "PREPZ"):
                n_prep += 1
            elif g.kind in ("MEASX", "MEASZ"):
                n_meas += 1
    n_idle = sum(len(live_idle_steps(circuit, q))
                 for q in range(circuit.layout.n_qubits))
    return n_cnot, n_prep, n_meas, n_idle


def test_zero_strength_never_fires(hex3):
    params = noise.NoiseParams(0.0)
    rng = noise.stream(1, "zero")
    for _ in range(50):
        assert noise.sample_faults(hex3, params, 3, rng) == []


def test_order_one_enumeration_census(hex3):
    # [DERIVED] 15 branches per CNOT, 1 per prep/meas, 3 per live idle
    n_cnot, n_prep, n_meas, n_idle = _census(hex3)
    expected = 15 * n_cnot + n_prep + n_meas + 3 * n_idle
    singles = list(noise.enumerate_faults(hex3, noise.NoiseParams(1e-3)))
    assert len(singles) == expected
    doubled = list(noise.enumerate_faults(hex3, noise.NoiseParams(1e-3),
                                          rounds=2))
    assert len(doubled) == 2 * expected


def test_order_one_probability_sum(hex3):
    # [DERIVED] total burden p*(n_cnot + n_idle) + (2p/3)*(n_prep + n_meas)
    p = 1e-3
    n_cnot, n_prep, n_meas, n_idle = _census(hex3)
    total = sum(prob for _, prob in
                noise.enumerate_faults(hex3, noise.NoiseParams(p)))
    expected = p * (n_cnot + n_idle) + 2 * p / 3 * (n_prep + n_meas)
    assert total == pytest.approx(expected, rel=1e-12)


def test_branch_probabilities():
    params = noise.NoiseParams(0.015)
    assert noise.branch_probability(params, noise.KIND_GATE2, "XZ") == 0.001
    assert noise.branch_probability(params, noise.KIND_PREP, "X") == 0.01
    assert noise.branch_probability(params, noise.KIND_MEAS, "Z") == 0.01
    assert noise.branch_probability(params, noise.KIND_IDLE, "Y") == 0.005
    assert len(noise.CNOT_BRANCHES) == 15
    assert "II" not in noise.CNOT_BRANCHES


def test_order_two_pair_count(hex3):
    n_cnot, n_prep, n_meas, n_data = _census(hex3)
    n1 = 15 * n_cnot + n_prep + n_meas + 3 * n_data
    # [DERIVED] all unordered pairs minus same-location branch pairs
    same_loc = n_cnot * (15 * 14 // 2) + n_data * 3
    pairs = sum(1 for _ in noise.enumerate_faults(hex3, noise.NoiseParams(1e-3),
                                                  order=2))
    assert pairs == n1 * (n1 - 1) // 2 - same_loc


def test_sampling_rates_match_model(hex3):
    # [DERIVED] 3 sigma statistical check of the per-location rates
    p = 0.3
    params = noise.NoiseParams(p)
    template = noise.location_template(hex3)
    meas_idx = next(i for i, s in enumerate(template)
                    if s.kind == noise.KIND_MEAS)
    cnot_idx = next(i for i, s in enumerate(template)
                    if s.kind == noise.KIND_GATE2)
    meas_loc = (template[meas_idx].step, template[meas_idx].gate)
    cnot_loc = (template[cnot_idx].step, template[cnot_idx].gate)
    shots = 4000
    rng = noise.stream(11, "rates")
    meas_hits = cnot_hits = 0
    branch_counts = {b: 0 for b in noise.CNOT_BRANCHES}
    cnot_total = 0
    for _ in range(shots):
        for loc, branch in noise.sample_faults(hex3, params, 1, rng,
                                               template=template):
            if (loc.step, loc.gate) == meas_loc:
                meas_hits += 1
            if (loc.step, loc.gate) == cnot_loc:
                cnot_hits += 1
            if loc.kind == noise.KIND_GATE2:
                branch_counts[branch] += 1
                cnot_total += 1
    for hits, prob in ((meas_hits, 2 * p / 3), (cnot_hits, p)):
        sigma = (prob * (1 - prob) / shots) ** 0.5
        assert abs(hits / shots - prob) < 3 * sigma
    # branch choice is uniform over the 15 two-qubit Paulis
    for b, c in branch_counts.items():
        sigma = (cnot_total * (1 / 15) * (14 / 15)) ** 0.5
        assert abs(c - cnot_total / 15) < 5 * sigma, b


def test_keyed_streams_reproducible(hex3):
    params = noise.NoiseParams(0.02)
    a = noise.sample_faults(hex3, params, 3, noise.stream(5, "shot", 17))
    b = noise.sample_faults(hex3, params, 3, noise.stream(5, "shot", 17))
    c = noise.sample_faults(hex3, params, 3, noise.stream(5, "shot", 18))
    assert a == b
    assert a != c


def test_stream_keys_are_distinct():
    draws = set()
    for key in [(1,), (2,), (1, 0), (1, "x"), (1, "y"), ("x", 1)]:
        vals = tuple(noise.stream(*key).integers(0, 2 ** 63, size=4))
        assert vals not in draws
        draws.add(vals)
    again = tuple(noise.stream(1, "x").integers(0, 2 ** 63, size=4))
    assert again in draws
