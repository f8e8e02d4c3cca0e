import numpy as np

from acidlab.errors import ValidationError
from acidlab.grid.images import Image, Measurement

# 15 a [0, 255] tartományon, [0, 1]-re skálázva
MRI_NOISE_SIGMA = 15.0 / 255.0


def add_noise(x, sigma, seed):
    """
    Nulla várható értékű, seedelt Gauss zaj.

    :param x: Image, Measurement vagy tömb; a kimenet azonos típusú
    """
    if not sigma >= 0:
        raise ValidationError(f"noise sigma must be non-negative, got {sigma}")
    if isinstance(x, Image):
        return Image(add_noise(x.values, sigma, seed))
    if isinstance(x, Measurement):
        return Measurement(add_noise(x.values, sigma, seed), x.kind)
    values = np.array(x, dtype=np.float64)
    if sigma == 0:
        return values
    return values + np.random.default_rng(seed).normal(0.0, sigma, values.shape)
