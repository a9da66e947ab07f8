# tests/test_gradcheck.py
import numpy as np
import pytest

from gradcheck.finite_diff import compare_gradients, finite_diff_gradient
from gradcheck.suite import check_case, default_specs, gradcheck_suite, random_case
from losses.spec import LossKind, LossSpec
from volume.errors import GradientCheckError
from volume.geometry import Geometry
from volume.volume import BinaryMask, ProbVolume


def test_constant_loss_has_zero_gradient(random_pair):
    p, g = random_pair
    spec = LossSpec.model_validate({"kind": "DiceFocal", "focal": {"alpha_df": 1.0, "lambda_t": [0.0, 0.0]}})
    np.testing.assert_array_equal(finite_diff_gradient(spec, p, g), 0.0)


def test_dice_two_voxel_toy_matches_closed_form():
    a, b, eps = 0.3, 0.6, 1e-5
    geometry = Geometry((2, 1, 1))
    p = ProbVolume(geometry, np.array([a, b]))
    g = BinaryMask(geometry, np.array([1, 0]))
    numeric = finite_diff_gradient(LossSpec(kind="Dice", epsilon=eps), p, g).ravel(order="F")
    denominator = a + b + 1 + eps
    numerator = 2 * a + eps
    expected = [-(2 * denominator - numerator) / denominator ** 2, numerator / denominator ** 2]
    np.testing.assert_allclose(numeric, expected, rtol=1e-6)


@pytest.mark.parametrize("kind", list(LossKind))
def test_every_loss_passes_on_random_cube(kind):
    p, g = random_case(np.random.default_rng(21), (6, 6, 6))
    result = check_case(LossSpec.default(kind), p, g)
    assert result.passed, result
    assert result.max_rel_error < 1e-3


def test_default_suite_passes():
    report = gradcheck_suite(seed=11)
    assert report.all_passed, report.to_text()
    assert len(report.rows) == len(default_specs()) == 6
    assert list(report.to_frame()["dims"].unique()) == ["8x8x4"]
    assert set(report.to_frame()["n_pairs"]) == {20}


def test_empty_truth_dice_passes():
    report = gradcheck_suite(seed=4, specs=[LossSpec.default("Dice")], empty_truth=True)
    assert report.all_passed


def test_hausdorff_weights_frozen_across_perturbation():
    rng = np.random.default_rng(3)
    geometry = Geometry((5, 5, 3))
    # probabilities near the 0.5 threshold: perturbations flip voxels unless weights stay fixed
    p = ProbVolume(geometry, 0.5 + rng.uniform(-2e-5, 2e-5, geometry.dims))
    g = BinaryMask(geometry, rng.random(geometry.dims) < 0.4)
    result = check_case(LossSpec.default("HausdorffDT"), p, g)
    assert result.passed, result


def test_probabilities_too_close_to_bounds():
    geometry = Geometry((2, 1, 1))
    p = ProbVolume(geometry, np.array([0.5, 1e-5]))
    g = BinaryMask(geometry, np.array([1, 0]))
    with pytest.raises(GradientCheckError):
        finite_diff_gradient(LossSpec.default("Dice"), p, g)
    with pytest.raises(GradientCheckError):
        finite_diff_gradient(LossSpec.default("Dice"), p, g, h=0.0)


def test_compare_gradients_excludes_clamped_voxels():
    p = np.array([0.5, 1e-7, 0.5])
    analytic = np.array([1.0, 0.0, 2e-7])
    numeric = np.array([1.0 + 1e-7, 5.0, 0.0])
    comparison = compare_gradients(analytic, numeric, p)
    assert comparison.n_excluded == 1
    # the tiny third component only counts toward the absolute error
    assert comparison.max_rel_error == pytest.approx(1e-7)
    assert comparison.passed


def test_report_text_lists_every_kind():
    report = gradcheck_suite(seed=1, specs=[LossSpec.default("Tversky")], n_pairs=1)
    assert "Tversky" in report.to_text()
