import numpy as np
import pytest

from heavylat.codes import build
from heavylat.collisions import (DisorderParams, FrequencyPattern,
                                 assign_pattern, count_collisions,
                                 surface_lattice, sweep_sigma)

HEAVY_CASES = [(fam, d, var)
               for fam in ("HeavyHexagon", "HeavySquare")
               for d in (3, 5, 7)
               for var in ("bulk3", "boundary4")]


@pytest.mark.parametrize("family,d,variant", HEAVY_CASES)
def test_zero_disorder_is_collision_free_heavy(family, d, variant):
    pat = assign_pattern(build(family, d), variant)
    assert count_collisions(pat, pat.nominal_mhz()) == 0


@pytest.mark.parametrize("d", [3, 5, 7])
def test_zero_disorder_is_collision_free_surface(d):
    pat = assign_pattern(surface_lattice(d), "surface5")
    assert count_collisions(pat, pat.nominal_mhz()) == 0


def test_class_counts_per_variant():
    hexagon = build("HeavyHexagon", 5)
    assert assign_pattern(hexagon, "bulk3").n_classes() == 3
    assert assign_pattern(hexagon, "boundary4").n_classes() == 4
    assert assign_pattern(surface_lattice(5), "surface5").n_classes() == 5


@pytest.mark.parametrize("family", ["HeavyHexagon", "HeavySquare"])
def test_controls_sit_on_low_degree_vertices(family):
    for variant in ("bulk3", "boundary4"):
        pat = assign_pattern(build(family, 5), variant)
        assert max(pat.control_degree().values()) <= 2


def test_variant_layout_mismatch():
    hexagon = build("HeavyHexagon", 3)
    with pytest.raises(ValueError):
        assign_pattern(hexagon, "surface5")
    with pytest.raises(ValueError):
        assign_pattern(surface_lattice(3), "bulk3")
    with pytest.raises(ValueError):
        assign_pattern(hexagon, "bulk2")


def test_disorder_params_validation():
    DisorderParams(sigma_f=0.0)
    with pytest.raises(ValueError):
        DisorderParams(sigma_f=-1.0)
    with pytest.raises(ValueError):
        DisorderParams(sigma_f=5.0, window=0.0)
    with pytest.raises(ValueError):
        DisorderParams(sigma_f=5.0, band=(100.0, 50.0))
    with pytest.raises(ValueError):
        DisorderParams(sigma_f=5.0, trials=0)


def _toy_pair():
    return FrequencyPattern(None, "custom", {0: "a", 1: "b"},
                            {"a": 5.0, "b": 5.4}, -335.0, ((0, 1),))


def test_well_separated_pair_has_no_collisions():
    # 400 MHz apart, inside a wide gate-speed band: every window misses
    toy = _toy_pair()
    assert count_collisions(toy, {0: 5000.0, 1: 5400.0},
                            band=(30.0, 500.0)) == 0


def test_degenerate_pair_collides():
    toy = _toy_pair()
    assert count_collisions(toy, {0: 5000.0, 1: 5000.0},
                            band=(30.0, 500.0)) >= 1


def test_count_collisions_rejects_wrong_length():
    toy = _toy_pair()
    with pytest.raises(ValueError):
        count_collisions(toy, np.zeros(3))


def test_surface_lattice_structure():
    lat = surface_lattice(5)
    assert lat.n_nodes == 49
    assert len(lat.data_grid) == 25
    assert len(lat.couplings) == 80
    deg = {}
    for c, t in lat.couplings:
        deg[c] = deg.get(c, 0) + 1
    assert max(deg.values()) == 4
    with pytest.raises(ValueError):
        surface_lattice(4)


def test_sweep_is_deterministic_under_seed():
    pat = assign_pattern(build("HeavyHexagon", 3), "bulk3")
    a = sweep_sigma(pat, [10.0, 25.0], trials=300, seed=11)
    b = sweep_sigma(pat, [10.0, 25.0], trials=300, seed=11)
    c = sweep_sigma(pat, [10.0, 25.0], trials=300, seed=12)
    assert [(p.mean_collisions, p.stderr) for p in a] == \
        [(p.mean_collisions, p.stderr) for p in b]
    assert a[1].mean_collisions != c[1].mean_collisions


@pytest.mark.parametrize("make,variant", [
    (lambda: build("HeavyHexagon", 5), "bulk3"),
    (lambda: build("HeavyHexagon", 5), "boundary4"),
    (lambda: build("HeavySquare", 5), "bulk3"),
    (lambda: surface_lattice(5), "surface5"),
])
def test_mean_collisions_nondecreasing_in_sigma(make, variant):
    pat = assign_pattern(make(), variant)
    pts = sweep_sigma(pat, [0.0, 10.0, 20.0, 30.0, 45.0, 60.0],
                      trials=800, seed=3)
    for lo, hi in zip(pts, pts[1:]):
        slack = 2 * np.hypot(lo.stderr, hi.stderr)
        assert hi.mean_collisions >= lo.mean_collisions - slack


def test_qualitative_stack_at_moderate_disorder():
    d = 5
    sigmas = [15.0, 20.0]
    hex_b3 = sweep_sigma(assign_pattern(build("HeavyHexagon", d), "bulk3"),
                         sigmas, trials=500, seed=5)
    hex_b4 = sweep_sigma(assign_pattern(build("HeavyHexagon", d), "boundary4"),
                         sigmas, trials=500, seed=5)
    surf = sweep_sigma(assign_pattern(surface_lattice(d), "surface5"),
                       sigmas, trials=500, seed=5)
    for i in range(len(sigmas)):
        assert surf[i].mean_collisions > hex_b4[i].mean_collisions
        assert hex_b4[i].mean_collisions > hex_b3[i].mean_collisions


def test_regression_anchor_heavy_hex_bulk3():
    # frozen from the first validated run: d=5, sigma_f=30, 2000 trials
    pat = assign_pattern(build("HeavyHexagon", 5), "bulk3")
    point = sweep_sigma(pat, [30.0], trials=2000, seed=7)[0]
    assert point.mean_collisions == 11.9345
