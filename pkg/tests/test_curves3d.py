from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest
from conftest import FIXTURE_DIR, I
from hypothesis import given, settings
from hypothesis import strategies as st

from linkoid.closure import virtual_closure
from linkoid.curves3d import (
    CURVE_INVARIANTS,
    PolyCurveSet,
    load_curves,
    measure,
    parse_curves,
    project,
    projection_frame,
    sample_directions,
    spectral_measure,
    weighted_spectrum,
)
from linkoid.diagram import strand_permutation, to_gauss, validate
from linkoid.errors import (
    IrregularProjection,
    MultiComponent,
    ParseError,
    SamplingFailure,
    TooLarge,
    UnsupportedSelector,
)
from linkoid.invariants import jones
from linkoid.involution import burnside_count, enumerate_hn

sys.path.insert(0, str(FIXTURE_DIR))
from build import closed_trefoil, open_trefoil  # noqa: E402


def _closed() -> PolyCurveSet:
    return PolyCurveSet.from_lists([closed_trefoil()], [(1, 2)])


def _open(gap: float) -> PolyCurveSet:
    return PolyCurveSet.from_lists([open_trefoil(gap)], [(1, 2)])


def _split_trefoil() -> PolyCurveSet:
    """The closed trefoil cut into two arcs: endpoints 2, 3 and 4, 1 coincide."""
    pts = closed_trefoil()
    return PolyCurveSet.from_lists([pts[:25], pts[24:]], [(1, 2), (3, 4)])


def _exact_closed_jones():
    return jones(to_gauss(project(_closed(), [0.0, 0.0, 1.0])), I("(1 2)"))


def _rotation(axis, angle) -> np.ndarray:
    axis = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)


def test_curve_set_validation():
    with pytest.raises(ValueError):
        PolyCurveSet.from_lists([[[0, 0, 0]]], [(1, 2)])
    with pytest.raises(ValueError):
        PolyCurveSet.from_lists([[[0, 0, 0], [0, 0, 0]]], [(1, 2)])
    with pytest.raises(ValueError):
        PolyCurveSet.from_lists([[[0, 0, 0], [1, 0, 0]]], [(1, 3)])
    c = PolyCurveSet.from_lists([[[0, 0, 0], [1, 0, 0]], [[0, 1, 0], [1, 1, 0]]], [(1, 2), (3, 4)])
    assert c.n == 2 and str(c.tau) == "(1 2)(3 4)"


def test_default_labels():
    c = PolyCurveSet.from_lists([[[0, 0, 0], [1, 0, 0]], [[0, 1, 0], [1, 1, 0]]])
    assert [tuple(p) for p in c.labels] == [(1, 2), (3, 4)]


@pytest.mark.parametrize("xi", [[0, 0, 1], [1, 0, 0], [0.3, -0.5, 0.8], [1, 1, 1]])
def test_projection_frame_is_right_handed(xi):
    xi = np.asarray(xi, dtype=float) / np.linalg.norm(xi)
    e, f = projection_frame(xi)
    frame = np.stack([e, f, xi])
    assert np.allclose(frame @ frame.T, np.eye(3))
    assert np.linalg.det(frame) == pytest.approx(1.0)


def test_planar_zigzag_projects_without_crossings():
    zig = PolyCurveSet.from_lists([[[0, 0, 0], [1, 1, 0], [2, 0, 0], [3, 1, 0]]], [(1, 2)])
    d = project(zig, [0, 0, 1])
    assert d.classical_count == 0 and validate(d) == []


def test_standard_trefoil_view_has_three_alternating_crossings():
    d = project(_closed(), [0, 0, 1])
    g = to_gauss(d)
    assert d.classical_count == 3
    overs = [p.over for p in g.strands[0].passages]
    assert all(a != b for a, b in zip(overs, overs[1:]))


def test_projection_along_a_segment_is_irregular():
    c = PolyCurveSet.from_lists([[[0, 0, 0], [1, 0, 0], [2, 1, 0]]], [(1, 2)])
    with pytest.raises(IrregularProjection) as info:
        project(c, [1, 0, 0])
    assert info.value.feature


def test_projection_rejects_non_unit_direction():
    with pytest.raises(ValueError):
        project(_closed(), [0, 0, 2])


def test_projection_is_deterministic():
    xi = sample_directions(1, 11)[0]
    assert project(_open(0.05), xi) == project(_open(0.05), xi)


def test_sample_directions():
    dirs = sample_directions(1000, 5)
    assert len(dirs) == 1000
    assert np.allclose([np.linalg.norm(v) for v in dirs], 1.0)
    assert np.linalg.norm(np.mean(dirs, axis=0)) < 0.1
    assert all(np.array_equal(a, b) for a, b in zip(dirs, sample_directions(1000, 5)))
    assert not np.array_equal(dirs[0], sample_directions(1, 6)[0])
    with pytest.raises(ValueError):
        sample_directions(0, 1)


def test_closed_trefoil_is_constant_over_directions():
    est = measure(_closed(), I("(1 2)"), "jones", 200, seed=1)
    assert all(v == 0.0 for v in est.stderr.values())
    assert est.value.max_deviation(_exact_closed_jones()) == 0.0
    assert est.samples == 200


def test_segment_jones_is_one():
    c = load_curves(str(FIXTURE_DIR / "segment.json"))
    est = measure(c, I("(1 2)"), "jones", 50, seed=3)
    assert est.value.coefficients == {(0, ()): 1.0}
    assert est.stderr == {(0, ()): 0.0}


def test_estimates_are_seed_reproducible_and_thread_independent():
    c = _open(0.05)
    a = measure(c, I("(1 2)"), "jones", 100, seed=9)
    b = measure(c, I("(1 2)"), "jones", 100, seed=9, threads=4)
    assert json.dumps(a.to_json()) == json.dumps(b.to_json())
    other = measure(c, I("(1 2)"), "jones", 100, seed=10)
    assert other.to_json() != a.to_json()


def test_dump_samples():
    est = measure(_open(0.05), I("(1 2)"), "jones", 10, seed=2, keep_samples=True)
    data = est.to_json()
    assert len(data["per_direction"]) == 10


def test_open_trefoil_approaches_closed_value():
    exact = _exact_closed_jones()
    coarse = measure(_open(0.1), I("(1 2)"), "jones", 400, seed=4)
    fine = measure(_open(0.01), I("(1 2)"), "jones", 400, seed=4)
    assert fine.value.max_deviation(exact) < coarse.value.max_deviation(exact)


def test_one_component_invariants_need_one_component():
    c = _split_trefoil()
    with pytest.raises(MultiComponent):
        measure(c, I("(1 2)(3 4)"), "affine", 5, seed=0)
    est = measure(c, I("(1 4)(2 3)"), "odd_writhe", 20, seed=0)
    assert est.value.scalar == 0.0


def test_scalar_invariants():
    est = measure(_open(0.1), I("(1 2)"), "height_bound", 30, seed=0)
    assert est.value.is_scalar and est.value.scalar >= 0
    g = measure(_open(0.1), I("(1 2)"), "genus_bound", 30, seed=0)
    assert g.value.scalar >= 0


def test_unknown_invariant():
    with pytest.raises(UnsupportedSelector) as info:
        measure(_closed(), I("(1 2)"), "khovanov", 5)
    assert "khovanov" in str(info.value)
    assert "bracket" not in CURVE_INVARIANTS


def test_sampling_failure_when_every_direction_is_irregular():
    c = PolyCurveSet.from_lists([[[0, 0, 0], [1, 0, 0]], [[0, 0.1, 0], [1, 0.1, 0.2]]], [(1, 2), (3, 4)])
    with pytest.raises(SamplingFailure):
        measure(c, I("(1 2)(3 4)"), "jones", 2, seed=0, eps=10.0)


def test_weighted_spectrum_single_curve():
    c = _open(0.05)
    ws = weighted_spectrum(c, "jones", 20, seed=1)
    (entry,) = ws.entries
    gap = float(np.linalg.norm(c.endpoint(1) - c.endpoint(2)))
    assert entry.weight == pytest.approx(gap)
    assert ws.ratio(entry) == 1.0


def test_weighted_spectrum_weights_follow_geometry():
    c = PolyCurveSet.from_lists(
        [[[0, 0, 0], [0.5, 0.5, 0.3], [1, 0, 0]], [[0, 3, 0], [0.5, 2.5, -0.3], [1, 3, 0]]], [(1, 2), (3, 4)]
    )
    ws = weighted_spectrum(c, "jones", 10, seed=0)
    weights = {str(e.sigma): e.weight for e in ws.entries}
    assert weights["(1 2)(3 4)"] == pytest.approx(1.0)
    assert weights["(1 3)(2 4)"] == pytest.approx(3.0)
    assert weights["(1 4)(2 3)"] == pytest.approx(math.hypot(1, 3))
    assert ws.w_min == pytest.approx(1.0)


def test_coincident_pair_contributes_zero_weight():
    c = _split_trefoil()
    ws = weighted_spectrum(c, "jones", 10, seed=0)
    weights = {str(e.sigma): e.weight for e in ws.entries}
    assert weights["(1 4)(2 3)"] == 0.0 and ws.w_min == 0.0
    assert c.closure_weight(I("(1 2)(3 4)")) > 0


def test_spectral_measure_with_exact_coincidence():
    c = _split_trefoil()
    sm = spectral_measure(c, "jones", 40, seed=2)
    direct = measure(c, I("(1 4)(2 3)"), "jones", 40, seed=2)
    assert sm.value.coefficients == direct.value.coefficients
    assert sm.value.max_deviation(_exact_closed_jones()) == 0.0


def test_spectral_measure_of_one_curve_is_the_measure():
    c = _open(0.05)
    assert spectral_measure(c, "jones", 30, seed=5).value.coefficients == measure(
        c, I("(1 2)"), "jones", 30, seed=5
    ).value.coefficients


def test_spectral_measure_rejects_undefined_weighted_terms():
    c = PolyCurveSet.from_lists(
        [[[0, 0, 0], [0.5, 0.5, 0.3], [1, 0, 0]], [[0, 3, 0], [0.5, 2.5, -0.3], [1, 3, 0]]], [(1, 2), (3, 4)]
    )
    with pytest.raises(MultiComponent):
        spectral_measure(c, "odd_writhe", 5, seed=0)


def test_weighted_guard():
    curves = [[[i, 0, 0], [i, 1, 0.1 * i]] for i in range(5)]
    with pytest.raises(TooLarge):
        weighted_spectrum(PolyCurveSet.from_lists(curves), "jones", 1)


def test_rotation_keeps_estimates_within_noise():
    c = _open(0.05)
    r = c.rotated(_rotation([1, 2, 3], 0.7))
    a = measure(c, I("(1 2)"), "jones", 500, seed=8)
    b = measure(r, I("(1 2)"), "jones", 500, seed=8)
    for key in set(a.value.coefficients) | set(b.value.coefficients):
        spread = math.hypot(a.value.error(*key), b.value.error(*key))
        assert abs(a.value.coefficient(*key) - b.value.coefficient(*key)) <= 3 * spread + 1e-12


def test_rotated_closed_curve_is_unchanged():
    r = _closed().rotated(_rotation([0, 1, 0], 1.1))
    est = measure(r, I("(1 2)"), "jones", 50, seed=0)
    assert est.value.max_deviation(_exact_closed_jones()) == 0.0


def test_stderr_shrinks_like_inverse_square_root():
    c = _open(0.1)
    small = measure(c, I("(1 2)"), "jones", 500, seed=12)
    large = measure(c, I("(1 2)"), "jones", 2000, seed=13)
    ratio = small.value.error(16) / large.value.error(16)
    assert 1.5 < ratio < 2.7


@st.composite
def _random_curves(draw):
    n = draw(st.integers(1, 3))
    seed = draw(st.integers(0, 10_000))
    rng = np.random.default_rng(seed)
    curves = [np.cumsum(rng.normal(size=(draw(st.integers(2, 6)), 3)), axis=0) + 3 * i for i in range(n)]
    return PolyCurveSet.from_lists(curves), seed


@settings(max_examples=25, deadline=None)
@given(_random_curves())
def test_closure_components_match_segment_cycles(case):
    c, seed = case
    xi = sample_directions(1, seed)[0]
    try:
        d = project(c, xi)
    except IrregularProjection:
        return
    tau = strand_permutation(d)
    assert tau == c.tau
    for sigma in enumerate_hn(c.n):
        assert virtual_closure(d, sigma).component_count == burnside_count(tau, sigma)


def test_parse_curves_json_and_csv(tmp_path: Path):
    data = {"curves": [[[0, 0, 0], [1, 0, 0]], [[0, 1, 0], [1, 1, 1]]], "labels": [[1, 2], [3, 4]]}
    c = parse_curves(json.dumps(data))
    assert c.n == 2 and c.to_json() == {
        "curves": [[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0], [1.0, 1.0, 1.0]]],
        "labels": [[1, 2], [3, 4]],
    }
    csv_path = tmp_path / "curves.csv"
    csv_path.write_text("curve,x,y,z\n0,0,0,0\n0,1,0,0\n1,0,1,0\n1,1,1,1\n", encoding="utf-8")
    assert load_curves(str(csv_path)).to_json() == c.to_json()


@pytest.mark.parametrize(
    "text", ['{"curves": []}', '{"labels": [[1, 2]]}', "not json", '{"curves": [[[0, 0], [1, 1]]]}']
)
def test_bad_curve_files(text):
    with pytest.raises((ParseError, ValueError)):
        parse_curves(text)
