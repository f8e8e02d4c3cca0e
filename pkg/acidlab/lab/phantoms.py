"""
Ellipszis fantomok 4x4-es szuperminta élsimítással.

Koordináták a kép oldalának törtrészében: x jobbra, y lefelé nő,
(0.5, 0.5) a kép közepe.
"""
import logging
from dataclasses import dataclass

import numpy as np

from acidlab.errors import ValidationError

logger = logging.getLogger("lab_phantoms")

SUPERSAMPLE = 4
BODY_INTENSITY = 0.4


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    ax: float
    ay: float
    rotation: float
    intensity: float

    def __post_init__(self):
        if not (self.ax > 0 and self.ay > 0):
            raise ValidationError(f"ellipse axes must be positive, got ({self.ax}, {self.ay})")


@dataclass(frozen=True)
class EllipsePhantomSpec:
    ellipses: tuple = ()
    seed: int = 0

    @property
    def count(self):
        return len(self.ellipses)


def random_phantom_spec(count, seed):
    """
    Véletlen fantom: egy test ellipszis és count-1 belső ellipszis.

    :param count: ellipszisek száma (0: üres fantom)
    """
    if count < 0:
        raise ValidationError(f"ellipse count must be non-negative, got {count}")
    rng = np.random.default_rng(seed)
    ellipses = []
    if count:
        ellipses.append(Ellipse(0.5, 0.5, 0.42, 0.34, rng.uniform(-0.2, 0.2), BODY_INTENSITY))
    for _ in range(count - 1):
        radius = 0.22 * np.sqrt(rng.uniform())
        angle = rng.uniform(0, 2 * np.pi)
        ellipses.append(Ellipse(
            cx=0.5 + radius * np.cos(angle),
            cy=0.5 + 0.8 * radius * np.sin(angle),
            ax=rng.uniform(0.04, 0.14),
            ay=rng.uniform(0.04, 0.14),
            rotation=rng.uniform(0, np.pi),
            intensity=rng.uniform(0.05, 0.25),
        ))
    return EllipsePhantomSpec(tuple(ellipses), seed)


def ellipse_coverage(ellipse, dims):
    """Az ellipszis által lefedett terület pixelenként, [0, 1]."""
    offsets = (np.arange(SUPERSAMPLE) + 0.5) / SUPERSAMPLE
    v = (np.repeat(np.arange(dims), SUPERSAMPLE) + np.tile(offsets, dims)) / dims
    u = v.copy()
    vv, uu = np.meshgrid(v, u, indexing="ij")
    dx, dy = uu - ellipse.cx, vv - ellipse.cy
    cos_r, sin_r = np.cos(ellipse.rotation), np.sin(ellipse.rotation)
    xr = dx * cos_r + dy * sin_r
    yr = -dx * sin_r + dy * cos_r
    inside = (xr / ellipse.ax) ** 2 + (yr / ellipse.ay) ** 2 <= 1.0
    return inside.reshape(dims, SUPERSAMPLE, dims, SUPERSAMPLE).mean(axis=(1, 3))


def make_phantom(spec, dims):
    image = np.zeros((dims, dims))
    for ellipse in spec.ellipses:
        image += ellipse.intensity * ellipse_coverage(ellipse, dims)
    logger.debug(f"Phantom {dims}x{dims} with {spec.count} ellipses (seed {spec.seed})")
    return image


def disk_phantom(dims, radius, value=1.0):
    """Középre igazított korong; a sugár pixelben."""
    return make_phantom(EllipsePhantomSpec((Ellipse(0.5, 0.5, radius / dims, radius / dims, 0.0, value),)), dims)
