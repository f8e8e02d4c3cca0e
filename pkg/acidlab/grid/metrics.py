"""
Képminőségi metrikák: PSNR, SSIM és L2 norma.
"""
from dataclasses import dataclass

import numpy as np
from skimage.metrics import structural_similarity

from acidlab.errors import ShapeError, ValidationError
from acidlab.grid.images import Image, Measurement, as_image_array

# Azonos képeknél végtelen helyett ezt jelentjük, hogy a CSV numerikus maradjon
PSNR_CAP = 300.0

# SSIM állandók: 11x11 Gauss ablak, szórás 1.5
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricsReport:
    psnr: float
    ssim: float
    l2_error: float


def _pair(reference, candidate):
    a = as_image_array(reference)
    b = as_image_array(candidate)
    if a.shape != b.shape:
        raise ShapeError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def _check_peak(peak):
    if not np.isfinite(peak) or peak <= 0:
        raise ValidationError(f"peak must be positive, got {peak}")


def psnr(reference, candidate, peak):
    """
    Csúcs jel-zaj viszony decibelben.

    :param peak: a dinamikatartomány csúcsa (CT: fantom tartománya, MRI: 1.0)
    :return: 10*log10(peak^2/MSE), azonos képeknél PSNR_CAP
    """
    a, b = _pair(reference, candidate)
    _check_peak(peak)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return float(10.0 * np.log10(peak ** 2 / mse))


def ssim(reference, candidate, peak):
    """Átlagos lokális SSIM Gauss ablakkal."""
    a, b = _pair(reference, candidate)
    _check_peak(peak)
    if min(a.shape) < SSIM_WINDOW:
        raise ShapeError(f"image {a.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window")
    if np.array_equal(a, b):
        return 1.0
    return float(structural_similarity(
        a, b,
        data_range=peak,
        gaussian_weights=True,
        sigma=SSIM_SIGMA,
        use_sample_covariance=False,
        K1=SSIM_K1,
        K2=SSIM_K2,
    ))


def l2_norm(x):
    """
    Euklideszi norma képre vagy mérésre.

    Fourier mérésnél a váltakozó Re/Im tárolás miatt ez a komplex modulusok normája.
    """
    if isinstance(x, (Image, Measurement)):
        values = x.values
    else:
        values = np.asarray(x)
    if not np.all(np.isfinite(values)):
        raise ValidationError("norm of non-finite values")
    return float(np.linalg.norm(values.ravel()))


def metrics_report(reference, candidate, peak):
    a, b = _pair(reference, candidate)
    return MetricsReport(
        psnr=psnr(a, b, peak),
        ssim=ssim(a, b, peak),
        l2_error=l2_norm(a - b),
    )
