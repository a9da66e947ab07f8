# tests/test_losses.py
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from losses.boundary import boundary_distance, hausdorff_dt_loss, hausdorff_reciprocal
from losses.compound import compound_loss, reconstruct_compound
from losses.dispatch import evaluate_loss
from losses.focal import dice_focal_loss, focal_loss
from losses.region import dice_loss, dice_terms, tversky_loss, tversky_terms
from losses.spec import LossKind, LossSpec, load_loss_spec
from tests.oracles import brute_boundary_distance
from tests.strategies import probability_pairs
from volume.errors import ConfigError, GeometryError
from volume.geometry import Geometry
from volume.volume import BinaryMask, ProbVolume, binarize

TINY_EPS = 1e-12


def _pair(p_values, g_values, dims=None):
    p_values = np.asarray(p_values, dtype=np.float64)
    geometry = Geometry(dims or (p_values.size, 1, 1))
    return ProbVolume(geometry, p_values), BinaryMask(geometry, np.asarray(g_values))


def _binary_as_prob(mask):
    return ProbVolume(mask.geometry, mask.array.astype(np.float64))


def test_dice_perfect_overlap(rng):
    g_array = np.zeros(512, dtype=np.uint8)
    g_array[rng.choice(512, size=100, replace=False)] = 1
    p, g = _pair(g_array.astype(float), g_array, dims=(8, 8, 8))
    assert dice_loss(p, g).value < 1e-4


def test_dice_disjoint_tends_to_one():
    p, g = _pair([1, 1, 0, 0], [0, 0, 1, 1])
    assert dice_loss(p, g, eps=TINY_EPS).value == pytest.approx(1.0, abs=1e-9)


def test_dice_hand_value():
    p, g = _pair(np.full(8, 0.5), [1, 1, 0, 0, 0, 0, 0, 0], dims=(2, 2, 2))
    assert dice_loss(p, g, eps=TINY_EPS).value == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_dice_two_voxel_gradient_closed_form():
    a, b, eps = 0.3, 0.6, 1e-5
    p, g = _pair([a, b], [1, 0])
    result = dice_loss(p, g, eps)
    denominator = a + b + 1 + eps
    numerator = 2 * a + eps
    expected = [-(2 * denominator - numerator) / denominator ** 2, numerator / denominator ** 2]
    np.testing.assert_allclose(result.gradient_flat, expected, rtol=1e-12)


def test_focal_matches_truth_is_near_zero():
    p, g = _pair([1, 0, 1, 0], [1, 0, 1, 0])
    assert focal_loss(p, g).value <= 1e-6


def test_focal_without_focusing_is_cross_entropy():
    p, g = _pair(np.full(8, 0.5), [1, 0, 1, 0, 0, 0, 1, 0])
    assert focal_loss(p, g, gamma=0.0).value == pytest.approx(math.log(2.0), abs=1e-12)


def test_focal_single_voxel_hand_value():
    p, g = _pair([0.5], [1])
    assert focal_loss(p, g, gamma=2.0).value == pytest.approx(0.25 * math.log(2.0), abs=1e-12)
    assert focal_loss(p, g, gamma=2.0).value == pytest.approx(0.1733, abs=1e-4)


def test_focal_clamped_voxels_have_zero_gradient():
    p, g = _pair([0.0, 1.0, 0.4], [1, 0, 1])
    gradient = focal_loss(p, g).gradient_flat
    assert gradient[0] == 0.0 and gradient[1] == 0.0
    assert gradient[2] < 0.0


def test_focal_class_weights_scale_terms():
    p, g = _pair([0.3, 0.3], [1, 0])
    both = focal_loss(p, g, lambda_t=(1.0, 1.0)).value
    fg_only = focal_loss(p, g, lambda_t=(0.0, 1.0)).value
    bg_only = focal_loss(p, g, lambda_t=(1.0, 0.0)).value
    assert fg_only + bg_only == pytest.approx(both)
    assert fg_only > bg_only


def _spec(kind, **updates):
    return LossSpec.model_validate({"kind": kind, **updates})


def test_dice_focal_extremes(random_pair):
    p, g = random_pair
    dice_only = dice_focal_loss(p, g, _spec("DiceFocal", focal={"alpha_df": 0.0}))
    focal_only = dice_focal_loss(p, g, _spec("DiceFocal", focal={"alpha_df": 1.0}))
    assert dice_only.value == dice_loss(p, g).value
    assert focal_only.value == focal_loss(p, g).value


def test_dice_focal_hand_value():
    p, g = _pair(np.full(8, 0.5), [1, 1, 0, 0, 0, 0, 0, 0], dims=(2, 2, 2))
    spec = _spec("DiceFocal", epsilon=TINY_EPS, focal={"gamma": 0.0, "alpha_df": 0.5})
    result = dice_focal_loss(p, g, spec)
    assert result.value == pytest.approx(0.5 * (2.0 / 3.0) + 0.5 * math.log(2.0), abs=1e-9)
    assert result.value == pytest.approx(0.6799, abs=1e-4)
    assert set(result.diagnostics) == {"dice", "focal"}


def test_tversky_hand_value():
    g = [1, 1, 1, 1, 1, 0, 0, 0, 0, 0]
    p = [1, 1, 1, 0, 0, 1, 0, 0, 0, 0]
    result = tversky_loss(*_pair(p, g), alpha_t=0.3, beta_t=0.7, eps=TINY_EPS)
    assert result.value == pytest.approx(1.0 - 3.0 / (3.0 + 0.3 + 1.4), abs=1e-9)
    assert result.value == pytest.approx(0.36170, abs=1e-5)


def test_tversky_binary_perfect_prediction():
    p, g = _pair([1, 0, 0, 1], [1, 0, 0, 1])
    assert tversky_loss(p, g).value == pytest.approx(0.0, abs=1e-12)


@given(probability_pairs())
def test_tversky_half_weights_equal_dice(pair):
    p, g = pair
    g = g.astype(np.float64)
    dice_value, dice_gradient = dice_terms(p, g, 1e-5)
    tversky_value, tversky_gradient = tversky_terms(p, g, 0.5, 0.5, 1e-5)
    assert abs(dice_value - tversky_value) < 1e-12
    np.testing.assert_allclose(tversky_gradient, dice_gradient, rtol=1e-9, atol=1e-12)


@given(probability_pairs())
def test_region_losses_are_bounded(pair):
    p, g = pair
    for value, _ in (dice_terms(p, g.astype(float), 1e-5), tversky_terms(p, g.astype(float), 0.3, 0.7, 1e-5)):
        assert 0.0 <= value <= 1.0


def test_hausdorff_dt_perfect_prediction(make_mask):
    g = make_mask((6, 6, 6), [(2, 2, 2), (3, 2, 2), (3, 3, 2)])
    assert hausdorff_dt_loss(_binary_as_prob(g), g).value == 0.0


def test_hausdorff_dt_matches_brute_force(random_pair):
    p, g = random_pair
    geometry = g.geometry
    d_g = brute_boundary_distance(g.foreground, geometry.spacing, geometry.diameter_mm)
    d_p = brute_boundary_distance(p.array >= 0.5, geometry.spacing, geometry.diameter_mm)
    diff = p.array - g.array
    expected = float(np.mean(diff ** 2 * (d_g ** 2 + d_p ** 2)))
    assert hausdorff_dt_loss(p, g, alpha_h=2.0).value == pytest.approx(expected, rel=1e-10)


def test_boundary_distance_replaces_infinity(make_mask):
    empty = make_mask((4, 3, 2), spacing=(1.0, 2.0, 3.0))
    expected = math.sqrt(4 ** 2 + 6 ** 2 + 6 ** 2)
    np.testing.assert_allclose(boundary_distance(empty), expected)


def test_hausdorff_reciprocal_examples(make_mask):
    a = make_mask((6, 3, 3), [(1, 1, 1)])
    b = make_mask((6, 3, 3), [(4, 1, 1)])
    empty = make_mask((6, 3, 3))
    assert hausdorff_reciprocal(a, a) == 1.0
    assert hausdorff_reciprocal(a, b) == pytest.approx(0.25)
    assert hausdorff_reciprocal(empty, a) == 0.0
    assert hausdorff_reciprocal(empty, empty) == 1.0


def test_compound_without_boundary_term_equals_base(random_pair):
    p, g = random_pair
    tversky = _spec("TverskyHausdorffDT", compound={"alpha_c": 1.0, "beta_c": 0.0})
    assert compound_loss(p, g, tversky).value == tversky_loss(p, g).value
    dice_focal = _spec("DiceFocalHausdorffDT", compound={"alpha_c": 1.0, "beta_c": 0.0})
    assert compound_loss(p, g, dice_focal).value == dice_focal_loss(p, g, _spec("DiceFocal")).value


def test_compound_perfect_prediction_is_zero(make_mask):
    g = make_mask((5, 5, 5), [(2, 2, 2), (2, 3, 2)])
    assert compound_loss(_binary_as_prob(g), g, _spec("TverskyHausdorffDT")).value == 0.0


@pytest.mark.parametrize("kind, base", [
    ("TverskyHausdorffDT", lambda p, g: tversky_loss(p, g, 0.3, 0.7).value),
    ("DiceFocalHausdorffDT", lambda p, g: dice_focal_loss(p, g, LossSpec.default("DiceFocal")).value),
])
def test_compound_composes_components(random_pair, kind, base):
    p, g = random_pair
    result = compound_loss(p, g, LossSpec.default(kind))
    expected = 0.9 * base(p, g) + 0.1 * math.log1p(hausdorff_dt_loss(p, g).value)
    assert result.value == pytest.approx(expected, abs=1e-10)
    assert reconstruct_compound(result.diagnostics, LossSpec.default(kind)) == pytest.approx(result.value)


def test_dispatch_matches_direct_calls(random_pair):
    p, g = random_pair
    assert evaluate_loss(LossSpec.default("Dice"), p, g).value == dice_loss(p, g).value
    assert evaluate_loss(LossSpec.default("HausdorffDT"), p, g).value == hausdorff_dt_loss(p, g).value


def test_default_hyperparameters():
    spec = LossSpec.default(LossKind.TVERSKY_HAUSDORFF_DT)
    assert (spec.tversky.alpha_t, spec.tversky.beta_t) == (0.3, 0.7)
    assert (spec.compound.alpha_c, spec.compound.beta_c) == (0.9, 0.1)
    assert LossSpec.default("DiceFocal").focal.gamma == 2.0


def test_compound_diagnostics_hold_both_components(random_pair):
    p, g = random_pair
    result = evaluate_loss(LossSpec.default("TverskyHausdorffDT"), p, g)
    assert {"base", "hausdorff_dt", "tversky"} <= set(result.diagnostics)
    assert result.to_dict()["kind"] == "TverskyHausdorffDT"


def test_gradient_shape_follows_grid(random_pair):
    p, g = random_pair
    for kind in LossKind:
        result = evaluate_loss(LossSpec.default(kind), p, g)
        assert result.gradient.shape == p.dims
        assert np.all(np.isfinite(result.gradient))


def test_empty_truth_keeps_dice_finite():
    p, g = _pair(np.full(8, 0.3), np.zeros(8), dims=(2, 2, 2))
    result = dice_loss(p, g)
    assert math.isfinite(result.value) and np.all(np.isfinite(result.gradient))


def test_mismatched_grids_rejected():
    p = ProbVolume(Geometry((2, 2, 2)), np.full((2, 2, 2), 0.5))
    g = BinaryMask(Geometry((2, 2, 2), (1, 1, 2)), np.zeros((2, 2, 2)))
    with pytest.raises(GeometryError):
        dice_loss(p, g)


@pytest.mark.parametrize("name", ["TverskyHausdorffDT", "tversky-hausdorffdt", "Tversky-HausdorffDT Loss",
                                  "tverskyhausdorffdt"])
def test_loss_kind_parse_aliases(name):
    assert LossKind.parse(name) is LossKind.TVERSKY_HAUSDORFF_DT


def test_loss_spec_sources(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps({"kind": "dicefocal", "focal": {"gamma": 1.0}}))
    assert load_loss_spec(path).focal.gamma == 1.0
    assert load_loss_spec(str(path)).kind is LossKind.DICE_FOCAL
    assert load_loss_spec('{"kind": "Tversky"}').kind is LossKind.TVERSKY
    assert load_loss_spec(None).kind is LossKind.DICE


@pytest.mark.parametrize("source", [
    '{"kind": "Dice",',
    {"kind": "Dice", "epsilon": 0},
    {"kind": "NotALoss"},
    {"kind": "Dice", "unknown": 1},
    {"kind": "DiceFocal", "focal": {"alpha_df": 1.5}},
])
def test_invalid_loss_spec(source):
    with pytest.raises(ConfigError):
        load_loss_spec(source)


def test_binarized_prediction_helper(random_pair):
    p, g = random_pair
    assert binarize(p).dims == g.dims


@pytest.mark.parametrize("kind", list(LossKind))
@given(pair=probability_pairs(), axis=st.integers(0, 2))
def test_loss_is_equivariant_under_axis_flip(kind, pair, axis):
    p_array, g_array = pair
    geometry = Geometry(p_array.shape, (0.8, 1.0, 2.5))
    spec = LossSpec.default(kind)
    plain = evaluate_loss(spec, ProbVolume(geometry, p_array), BinaryMask(geometry, g_array))
    flipped = evaluate_loss(
        spec,
        ProbVolume(geometry, np.flip(p_array, axis)),
        BinaryMask(geometry, np.flip(g_array, axis)),
    )
    assert flipped.value == pytest.approx(plain.value, rel=1e-9, abs=1e-12)
    np.testing.assert_allclose(flipped.gradient, np.flip(plain.gradient, axis), rtol=1e-9, atol=1e-12)
