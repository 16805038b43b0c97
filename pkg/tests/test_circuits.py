import pytest

from heavylat.circuits import (Gate, back_propagate, build_round,
                               classify_single_faults, fault_branches,
                               live_idle_steps, propagate,
                               verify_measured_operators)
from heavylat.codes import (FAMILY_HEX, FAMILY_SQUARE, build,
                            build_heavy_hexagon, build_heavy_square)
from heavylat.pauli import PauliOp, commutes, weight


@pytest.fixture(scope="module")
def hex3():
    return build_round(build_heavy_hexagon(3))


@pytest.fixture(scope="module")
def square3():
    return build_round(build_heavy_square(3))


# [PAPER] round depths: 11 for heavy hexagon, 14 for heavy square,
# including initialization and measurement.
def test_depths(hex3, square3):
    assert hex3.depth == 11
    assert square3.depth == 14
    assert build_round(build_heavy_hexagon(5)).depth == 11
    assert build_round(build_heavy_square(5)).depth == 14


@pytest.mark.parametrize("family", [FAMILY_HEX, FAMILY_SQUARE])
@pytest.mark.parametrize("d", [3, 5, 7])
def test_no_step_conflicts(family, d):
    circuit = build_round(build(family, d))
    assert circuit.step_conflicts() == []


def test_cnot_count_formulas():
    for d in (3, 5):
        hexc = build_round(build_heavy_hexagon(d))
        n = sum(1 for gates in hexc.steps for g in gates if g.kind == "CNOT")
        assert n == 4 * (d - 1) ** 2 + 2 * (d - 1) + 2 * d * (d - 1)
        sq = build_round(build_heavy_square(d))
        n = sum(1 for gates in sq.steps for g in gates if g.kind == "CNOT")
        assert n == 8 * (d - 1) ** 2 + 2 * (d - 1) + 2 * (d - 1)


@pytest.mark.parametrize("family", [FAMILY_HEX, FAMILY_SQUARE])
@pytest.mark.parametrize("d", [3, 5])
def test_verify_measured_operators(family, d):
    circuit = build_round(build(family, d))
    report = verify_measured_operators(circuit)
    assert report.problems == []
    assert report.all_ok
    assert report.flags_trivial
    assert report.stabilizer_products_ok


def test_square_measurements_all_clean():
    """No heavy square measurement depends on fresh-ancilla randomness."""
    circuit = build_round(build_heavy_square(5))
    report = verify_measured_operators(circuit)
    assert all(m.ancilla_clean for m in report.measurements)


def test_hex_gauge_randomness_structure():
    """A Z-gauge outcome traces back to its data pair times one Z factor
    on the syndrome ancilla of every X generator it anticommutes with."""
    layout = build_heavy_hexagon(5)
    circuit = build_round(layout)
    anc_of_xgen = {}
    for (q, step), ref in circuit.measured_refs.items():
        if ref.kind == "x_gauge":
            anc_of_xgen[ref.index] = q
    data = set(layout.data_qubits)
    for (q, step), ref in circuit.measured_refs.items():
        if ref.kind != "z_gauge":
            continue
        op = back_propagate(circuit, [(q, step, "Z")])
        junk = {b for b in op.z_support if b not in data}
        assert op.x_support == frozenset()
        expected = {anc_of_xgen[gi] for gi, g in enumerate(layout.x_gauge)
                    if not commutes(g, layout.z_gauge[ref.index])}
        assert junk == expected


def test_verify_detects_reversed_data_cnot():
    layout = build_heavy_hexagon(3)
    circuit = build_round(layout)
    p = layout.geometry.plaquettes[0]
    gates = circuit.gates_at(3)
    idx = gates.index(Gate("CNOT", (p.white_left, p.data["BL"])))
    gates[idx] = Gate("CNOT", (p.data["BL"], p.white_left))
    report = verify_measured_operators(circuit)
    assert not report.all_ok

    sq = build_heavy_square(3)
    circuit = build_round(sq)
    f = next(f for f in sq.geometry.faces if f.basis == "X")
    gates = circuit.gates_at(3)
    idx = gates.index(Gate("CNOT", (f.flag_top, f.data["TL"])))
    gates[idx] = Gate("CNOT", (f.data["TL"], f.flag_top))
    assert not verify_measured_operators(circuit).all_ok


def test_conflict_detection_on_duplicated_gate():
    circuit = build_round(build_heavy_hexagon(3))
    circuit.steps[2].append(Gate("CNOT", (0, 1)))
    assert circuit.step_conflicts() != []


def test_propagate_identity(hex3):
    res = propagate(hex3, PauliOp.identity(hex3.layout.n_qubits))
    assert res.residual.is_identity
    assert res.flips == []


def test_propagate_data_x_reads_as_z_gauge_flip(hex3):
    """An X error on a data qubit flips the Z-gauge reads next to it."""
    layout = hex3.layout
    q = layout.geometry.data_index[(1, 1)]
    res = propagate(hex3, PauliOp.single(layout.n_qubits, "X", q))
    refs = res.flipped_refs(hex3)
    assert [r.kind for r in refs] == ["z_gauge"]
    gi = refs[0].index
    assert q in layout.z_gauge[gi].z_support
    assert res.flipped_flags(hex3) == []
    assert res.residual == PauliOp.single(layout.n_qubits, "X", q)


def test_propagate_data_z_reads_as_plaquette_flip(hex3):
    """A Z error travels over the bridge into the X-plaquette readout."""
    layout = hex3.layout
    q = layout.geometry.data_index[(1, 1)]
    res = propagate(hex3, PauliOp.single(layout.n_qubits, "Z", q))
    refs = res.flipped_refs(hex3)
    assert len(refs) == 1 and refs[0].kind == "x_gauge"
    assert q in layout.x_gauge[refs[0].index].x_support
    assert res.flipped_flags(hex3) == []


def test_propagate_mid_bridge_fault(hex3):
    """An X fault on a flag after bridge-in spreads to two data qubits
    on one column and raises that flag."""
    layout = hex3.layout
    p = layout.geometry.plaquettes[0]
    res = propagate(hex3, PauliOp.single(layout.n_qubits, "X", p.white_left),
                    from_step=3)
    flags = res.flipped_flags(hex3)
    assert len(flags) == 1
    assert flags[0].side == "Left" and flags[0].gen_index == p.gauge_index
    assert res.residual.x_support == frozenset({p.data["TL"], p.data["BL"]})
    assert res.residual.z_support == frozenset()


def test_propagate_square_z_hook(square3):
    """A Z fault on a Z-face flag between the data reads lands on one
    data qubit and fires the flag."""
    layout = square3.layout
    f = next(f for f in layout.geometry.faces if f.basis == "Z")
    res = propagate(square3,
                    PauliOp.single(layout.n_qubits, "Z", f.flag_top),
                    from_step=11)
    flags = res.flipped_flags(square3)
    assert [fl.side for fl in flags] == ["Left"]
    assert res.residual.z_support == frozenset({f.data["TR"]})


def test_fault_branch_census():
    for family, d in ((FAMILY_HEX, 3), (FAMILY_SQUARE, 3)):
        circuit = build_round(build(family, d))
        n_cnot = sum(1 for gates in circuit.steps for g in gates
                     if g.kind == "CNOT")
        n_prep = sum(1 for gates in circuit.steps for g in gates
                     if g.kind.startswith("PREP"))
        n_meas = sum(1 for gates in circuit.steps for g in gates
                     if g.kind.startswith("MEAS"))
        n_idle = sum(len(live_idle_steps(circuit, q))
                     for q in range(circuit.layout.n_qubits))
        branches = fault_branches(circuit)
        assert len(branches) == 15 * n_cnot + n_prep + n_meas + 3 * n_idle


def test_live_idle_steps_follow_schedule():
    """Idle faults exist only while a qubit's state is still in use:
    a data qubit is live at every idle step, an ancilla only between
    its preparation and its final measurement of the round."""
    for family in (FAMILY_HEX, FAMILY_SQUARE):
        circuit = build_round(build(family, 3))
        layout = circuit.layout
        data = set(layout.data_qubits)
        for q in range(layout.n_qubits):
            busy = {t for t in range(1, circuit.depth + 1)
                    for g in circuit.gates_at(t)
                    if q in g.qubits and g.kind != "IDLE"}
            live = live_idle_steps(circuit, q)
            if q in data:
                expected = [t for t in range(1, circuit.depth + 1)
                            if t not in busy]
                assert live == expected
            else:
                assert all(t < max(busy) for t in live)
                assert all(t not in busy for t in live)


@pytest.mark.parametrize("family", [FAMILY_HEX, FAMILY_SQUARE])
def test_flag_soundness_small(family):
    """No single fault leaves an error of reduced weight 2 or more
    without raising at least one flag; both flags of one generator mean
    the data error is a gauge element."""
    circuit = build_round(build(family, 3))
    outcomes = classify_single_faults(circuit)
    for o in outcomes:
        if o.x_class >= 2 or o.z_class >= 2:
            assert o.flags, (o.step, o.gate, o.branch, o.residual.to_text())
        sides = {}
        for fl in o.flags:
            sides.setdefault((fl.kind, fl.gen_index), set()).add(fl.side)
        if any(s == {"Left", "Right"} for s in sides.values()):
            assert o.x_class == 0 and o.z_class == 0


def test_residual_errors_persist(hex3):
    """Data errors left by a fault are reproduced by later fault-free
    rounds (syndrome reads repeat, data support is unchanged)."""
    outcomes = classify_single_faults(hex3)
    for o in outcomes[::7]:
        again = propagate(hex3, o.residual, from_step=1)
        assert again.residual == o.residual


def test_golden_round_text(hex3, square3, tmp_path):
    import pathlib
    golden = pathlib.Path(__file__).parent / "golden"
    for name, circuit in (("circuit_hex_d3.txt", hex3),
                          ("circuit_square_d3.txt", square3)):
        want = (golden / name).read_text()
        assert circuit.to_text() == want
