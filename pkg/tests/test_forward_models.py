import numpy as np
import pytest

from acidlab.errors import ShapeError, ValidationError
from acidlab.forward.fourier import FourierModel, fourier_adjoint, fourier_apply
from acidlab.forward.masks import load_mask, make_mask, save_mask
from acidlab.forward.models import to_dense
from acidlab.forward.radon import (RadonGeometry, RadonModel, detector_count, radon_adjoint, radon_apply,
                                   select_views, uniform_geometry)
from acidlab.grid.metrics import psnr
from acidlab.lab.phantoms import disk_phantom


def adjoint_gap(model, rng, pairs=100):
    worst = 0.0
    for _ in range(pairs):
        f = rng.standard_normal(model.shape)
        p = rng.standard_normal(model.real_rows)
        af = model.apply(f)
        gap = abs(np.dot(af, p) - np.sum(f * model.adjoint(p)))
        worst = max(worst, gap / (np.linalg.norm(af) * np.linalg.norm(p)))
    return worst


# Radon

def test_detector_count_covers_diagonal():
    assert detector_count(64) == 91
    assert detector_count(16) == 23


def test_radon_zero_maps_to_zero(radon_model_16):
    np.testing.assert_array_equal(radon_model_16.apply(np.zeros((16, 16))), 0.0)


def test_radon_impulse_mass_per_angle():
    model = RadonModel(uniform_geometry(16, 12))
    impulse = np.zeros((16, 16))
    impulse[8, 7] = 1.0
    per_angle = model.sinogram(model.apply(impulse)).sum(axis=1)
    np.testing.assert_allclose(per_angle, 1.0, rtol=1e-12)


def test_radon_disk_matches_chord_length_on_axes():
    geometry = RadonGeometry(64, np.array([0.0, np.pi / 2]))
    model = RadonModel(geometry)
    radius = 20.0
    sinogram = model.sinogram(model.apply(disk_phantom(64, radius)))
    s = geometry.detector_positions()
    inner = np.abs(s) <= radius - 3
    chord = 2 * np.sqrt(radius ** 2 - s[inner] ** 2)
    for row in sinogram:
        np.testing.assert_allclose(row[inner], chord, atol=1.0)


def test_radon_disk_total_mass_every_angle():
    model = RadonModel(uniform_geometry(64, 18))
    disk = disk_phantom(64, 20.0)
    per_angle = model.sinogram(model.apply(disk)).sum(axis=1)
    np.testing.assert_allclose(per_angle, disk.sum(), rtol=1e-12)
    assert disk.sum() == pytest.approx(np.pi * 20.0 ** 2, rel=0.01)


def test_radon_adjoint_identity(rng):
    assert adjoint_gap(RadonModel(uniform_geometry(32, 20)), rng) <= 1e-10


def test_radon_ray_support_is_local():
    geometry = uniform_geometry(8, 5)
    model = RadonModel(geometry)
    weights = model.weights.tocoo()
    count = geometry.num_detectors
    centre = 3.5
    rows, cols = np.divmod(weights.col, 8)
    x, y = cols - centre, centre - rows
    theta = geometry.angles[weights.row // count]
    t = geometry.detector_positions()[weights.row % count]
    assert np.all(np.abs(x * np.cos(theta) + y * np.sin(theta) - t) < 1.0)


def test_radon_centroid_follows_translation():
    geometry = uniform_geometry(32, 6)
    model = RadonModel(geometry)
    s = geometry.detector_positions()
    image = np.zeros((32, 32))
    image[10:14, 18:22] = 1.0
    shifted = np.roll(image, (3, -2), axis=(0, 1))
    for theta, row, moved in zip(geometry.angles, model.sinogram(model.apply(image)),
                                 model.sinogram(model.apply(shifted))):
        expected = -2 * np.cos(theta) - 3 * np.sin(theta)
        assert np.dot(s, moved) / moved.sum() - np.dot(s, row) / row.sum() == pytest.approx(expected, abs=1e-10)


def test_radon_is_linear(rng, radon_model_16):
    f, g = rng.standard_normal((2, 16, 16))
    np.testing.assert_allclose(radon_model_16.apply(2 * f - 3 * g),
                               2 * radon_model_16.apply(f) - 3 * radon_model_16.apply(g), atol=1e-10)


def test_radon_functions_accept_geometry(rng):
    geometry = uniform_geometry(8, 4)
    f = rng.standard_normal((8, 8))
    p = radon_apply(geometry, f)
    assert p.size == 4 * detector_count(8)
    assert radon_adjoint(geometry, p).shape == (8, 8)


def test_radon_rejects_wrong_shapes(radon_model_16):
    with pytest.raises(ShapeError):
        radon_model_16.apply(np.zeros((8, 8)))
    with pytest.raises(ShapeError):
        radon_model_16.adjoint(np.zeros(7))


@pytest.mark.parametrize("angles", [[0.5, 0.2], [0.0, np.pi], [-0.1, 1.0], []])
def test_radon_geometry_rejects_bad_angles(angles):
    with pytest.raises(ValidationError):
        RadonGeometry(8, np.array(angles))


def test_select_views():
    geometry = select_views(180, 50, 64)
    assert geometry.num_angles == 50
    assert geometry.size == 64
    np.testing.assert_allclose(np.diff(geometry.angles), np.pi / 50)
    assert select_views(10, 1, 8).angles.tolist() == [0.0]
    with pytest.raises(ValidationError):
        select_views(10, 0)
    with pytest.raises(ValidationError):
        select_views(10, 11)


# Fourier

def test_fourier_dc_of_constant(full_model_16):
    p = full_model_16.apply(np.full((16, 16), 0.25))
    assert p[0] == pytest.approx(0.25 * 16)
    assert p[1] == pytest.approx(0.0)
    np.testing.assert_allclose(p[2:], 0.0, atol=1e-12)


def test_fourier_full_mask_round_trip(rng, full_model_16):
    f = rng.standard_normal((16, 16))
    np.testing.assert_allclose(full_model_16.adjoint(full_model_16.apply(f)), f, atol=1e-10)


def test_fourier_adjoint_identity(rng, gaussian_model_16):
    assert adjoint_gap(gaussian_model_16, rng) <= 1e-10


def test_fourier_dense_matrix_is_transposed_adjoint(gaussian_model_8):
    forward = to_dense(gaussian_model_8.apply, (8, 8))
    adjoint = to_dense(gaussian_model_8.adjoint, (gaussian_model_8.real_rows,))
    np.testing.assert_allclose(adjoint, forward.T, atol=1e-12)


def test_undersampling_lowers_zero_filled_quality(phantom_16, full_model_16):
    sparse_model = FourierModel(make_mask("gaussian2d", 0.3, 16, 1))
    full = full_model_16.adjoint(full_model_16.apply(phantom_16))
    partial = sparse_model.adjoint(sparse_model.apply(phantom_16))
    assert psnr(phantom_16, partial, 1.0) < psnr(phantom_16, full, 1.0)


def test_fourier_functions_check_lengths(rng):
    mask = make_mask("gaussian2d", 0.5, 8, 0)
    p = fourier_apply(mask, rng.standard_normal((8, 8)))
    assert p.size == 2 * mask.popcount
    with pytest.raises(ShapeError):
        fourier_adjoint(mask, p[:-2])


# Masks

def test_mask_rate_and_dc():
    mask = make_mask("gaussian2d", 0.25, 32, 11)
    assert mask.grid[0, 0]
    assert abs(mask.popcount - 0.25 * 1024) <= 1
    assert mask.sampling_rate == mask.popcount / 1024


def test_mask_is_deterministic_per_seed():
    a = make_mask("gaussian2d", 0.3, 16, 5)
    b = make_mask("gaussian2d", 0.3, 16, 5)
    c = make_mask("gaussian2d", 0.3, 16, 6)
    np.testing.assert_array_equal(a.grid, b.grid)
    assert not np.array_equal(a.grid, c.grid)


def test_gaussian_mask_prefers_low_frequencies():
    grid = make_mask("gaussian2d", 0.2, 64, 3).grid
    shifted = np.fft.fftshift(grid)
    centre = shifted[24:40, 24:40].mean()
    border = np.concatenate([shifted[:8].ravel(), shifted[-8:].ravel()]).mean()
    assert centre > border


def test_radial_mask_popcount():
    mask = make_mask("radial", 0.2, 64, 0)
    assert abs(mask.popcount - 819) <= 64
    assert mask.grid[0, 0]


def test_full_mask():
    assert make_mask("full", 1.0, 8, 0).popcount == 64
    assert make_mask("gaussian2d", 1.0, 8, 0).popcount == 64


@pytest.mark.parametrize("pattern, rate", [("spiral", 0.5), ("gaussian2d", 0.0), ("gaussian2d", 1.5),
                                           ("radial", 0.001)])
def test_mask_rejects_bad_arguments(pattern, rate):
    with pytest.raises(ValidationError):
        make_mask(pattern, rate, 16, 0)


def test_mask_file_round_trip(tmp_path):
    mask = make_mask("radial", 0.3, 16, 0)
    path = save_mask(tmp_path / "mask.f64", mask)
    loaded = load_mask(path, "radial")
    np.testing.assert_array_equal(loaded.grid, mask.grid)
    assert loaded.popcount == mask.popcount
