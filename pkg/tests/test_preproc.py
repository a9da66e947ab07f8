# tests/test_preproc.py
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from preproc.normalize import znormalize
from preproc.pipeline import PreprocessMeta, concat_channels, describe_case, preprocess_case
from preproc.resample import resample_nearest, resample_trilinear, restore_geometry
from tests.strategies import dims, intensity_grids
from volume.errors import GeometryError
from volume.geometry import Geometry
from volume.volume import BinaryMask, ScalarVolume, make_volume


def _line(values, spacing=(1.0, 1.0, 1.0)):
    return ScalarVolume(Geometry((len(values), 1, 1), spacing), np.array(values, dtype=np.float32))


def test_constant_volume_stays_constant():
    v = make_volume((5, 3, 4), (1, 2, 3), (0, 0, 0), 2.5)
    out = resample_trilinear(v, (8, 7, 2))
    assert out.dims == (8, 7, 2)
    np.testing.assert_allclose(out.array, 2.5, rtol=1e-6)


def test_identity_resample_of_ramp():
    x = np.indices((8, 8, 8))[0].astype(np.float32)
    v = ScalarVolume(Geometry((8, 8, 8)), x)
    np.testing.assert_array_equal(resample_trilinear(v, (8, 8, 8)).array, x)


def test_ramp_upsample_half_pixel_convention():
    out = resample_trilinear(_line([0, 1, 2, 3]), (8, 1, 1))
    # s = (t + 0.5) * 0.5 - 0.5, clamped to [0, 3]
    np.testing.assert_allclose(out.data, [0.0, 0.25, 0.75, 1.25, 1.75, 2.25, 2.75, 3.0], atol=1e-6)


def test_resample_rescales_spacing_and_keeps_origin():
    v = make_volume((10, 10, 4), (0.8, 0.8, 3.0), (5.0, -2.0, 1.0), 0.0)
    out = resample_trilinear(v, (5, 20, 4))
    assert out.geometry.spacing == pytest.approx((1.6, 0.4, 3.0))
    assert out.geometry.origin == v.geometry.origin


@pytest.mark.parametrize("dims", [(0, 1, 1), (2, 2), (2, -1, 3)])
def test_invalid_target_dims(dims):
    with pytest.raises(GeometryError):
        resample_trilinear(make_volume((2, 2, 2), (1, 1, 1), (0, 0, 0), 0.0), dims)


def test_nearest_identity_is_bit_identical(rng):
    mask = BinaryMask(Geometry((6, 5, 4)), rng.random((6, 5, 4)) < 0.4)
    np.testing.assert_array_equal(resample_nearest(mask, (6, 5, 4)).array, mask.array)


def test_nearest_downsample_hand_example():
    mask = BinaryMask(Geometry((4, 1, 1)), np.array([0, 0, 1, 1]))
    assert resample_nearest(mask, (2, 1, 1)).data.tolist() == [0, 1]


def test_nearest_output_stays_binary(rng):
    mask = BinaryMask(Geometry((7, 5, 3)), rng.random((7, 5, 3)) < 0.5)
    out = resample_nearest(mask, (11, 4, 9))
    assert set(np.unique(out.array)) <= {0, 1}


def test_restore_geometry_carries_native_grid(rng):
    native = Geometry((9, 7, 5), (0.8, 0.8, 3.0), (1.0, 2.0, 3.0))
    mask = BinaryMask(native, rng.random(native.dims) < 0.3)
    restored = restore_geometry(resample_nearest(mask, (18, 14, 10)), native)
    assert restored.geometry == native
    np.testing.assert_array_equal(restored.array, mask.array)


def test_znormalize_constant_maps_to_zero():
    v = make_volume((3, 3, 3), (1, 1, 1), (0, 0, 0), 4.0)
    assert np.all(znormalize(v).array == 0.0)


def test_znormalize_unit_values_unchanged():
    v = _line([-1, 1, -1, 1])
    np.testing.assert_allclose(znormalize(v).data, [-1, 1, -1, 1], atol=1e-6)


def test_znormalize_hand_values():
    out = znormalize(_line([0, 1, 2, 3]))
    np.testing.assert_allclose(out.data, [-1.3416, -0.4472, 0.4472, 1.3416], atol=1e-3)


def test_concat_keeps_argument_order():
    adc = make_volume((2, 2, 2), (1, 1, 1), (0, 0, 0), 1.0)
    zadc = make_volume((2, 2, 2), (1, 1, 1), (0, 0, 0), 2.0)
    x = concat_channels(adc, zadc)
    assert x.names == ("adc", "zadc")
    assert x.channel("adc") is adc and x.channel("zadc") is zadc


def test_concat_same_volume_twice():
    v = make_volume((2, 2, 2), (1, 1, 1), (0, 0, 0), 3.0)
    x = concat_channels(v, v)
    np.testing.assert_array_equal(x.stacked()[0], x.stacked()[1])


def test_concat_rejects_mismatched_spacing():
    a = make_volume((2, 2, 2), (1, 1, 1), (0, 0, 0), 0.0)
    b = make_volume((2, 2, 2), (1, 1, 2), (0, 0, 0), 0.0)
    with pytest.raises(GeometryError, match="spacing"):
        concat_channels(a, b)


def test_preprocess_at_target_constant_inputs():
    geometry = Geometry((4, 4, 2), (1.0, 1.0, 2.0))
    adc = ScalarVolume(geometry, np.full(geometry.dims, 700.0))
    zadc = ScalarVolume(geometry, np.full(geometry.dims, -1.5))
    label = BinaryMask(geometry, np.eye(4, dtype=np.uint8)[:, :, None].repeat(2, axis=2))
    x, out_label = preprocess_case(adc, zadc, label, (4, 4, 2))
    assert np.all(x.stacked() == 0.0)
    np.testing.assert_array_equal(out_label.array, label.array)


def test_preprocess_channels_are_standardized(rng):
    geometry = Geometry((12, 10, 5), (0.9, 0.9, 3.0))
    adc = ScalarVolume(geometry, rng.normal(800.0, 150.0, geometry.dims))
    zadc = ScalarVolume(geometry, rng.normal(0.0, 2.0, geometry.dims))
    label = BinaryMask(geometry, rng.random(geometry.dims) < 0.05)
    x, out_label = preprocess_case(adc, zadc, label, (8, 8, 4))
    assert x.geometry.dims == out_label.dims == (8, 8, 4)
    for channel in x.channels:
        values = channel.array.astype(np.float64)
        assert abs(values.mean()) < 1e-4
        assert abs(values.std() - 1.0) < 1e-4


def test_preprocess_rejects_mismatched_label():
    adc = make_volume((4, 4, 2), (1, 1, 1), (0, 0, 0), 1.0)
    label = BinaryMask(Geometry((4, 4, 3)), np.zeros((4, 4, 3)))
    with pytest.raises(GeometryError, match="dims"):
        preprocess_case(adc, adc, label, (4, 4, 2))


def test_meta_round_trip():
    adc = make_volume((9, 7, 5), (0.8, 0.8, 3.0), (1.0, 2.0, 3.0), 0.0)
    meta = describe_case("case_007", adc, (4, 4, 2))
    restored = PreprocessMeta.from_dict(meta.to_dict())
    assert restored == meta
    assert restored.original_geometry == adc.geometry


@given(intensity_grids(), dims(max_side=7))
def test_trilinear_stays_within_input_range(values, target_dims):
    v = ScalarVolume(Geometry(values.shape), values)
    out = resample_trilinear(v, target_dims).array
    assert out.shape == target_dims
    assert out.min() >= values.min() and out.max() <= values.max()


@given(intensity_grids(), st.sampled_from([1.0, 1e-3, 250.0]))
def test_znormalize_is_idempotent(values, scale):
    once = znormalize(ScalarVolume(Geometry(values.shape), values * scale))
    twice = znormalize(once)
    np.testing.assert_allclose(twice.array, once.array, atol=1e-5)
