"""
Fourier mintavételi maszkok: gaussian2d, radial és full.

A maszkot a nem eltolt frekvenciarácson tároljuk (DC a [0, 0] helyen),
a numpy.fft kimenetével azonos elrendezésben.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from acidlab.errors import ValidationError
from acidlab.grid.images import read_f64grid, write_f64grid

logger = logging.getLogger("forward_models")

PATTERNS = ("gaussian2d", "radial", "full")


@dataclass(frozen=True)
class FourierMask:
    grid: np.ndarray = field(repr=False)
    sampling_rate: float
    pattern: str
    seed: int

    def __post_init__(self):
        grid = np.array(self.grid, dtype=bool)
        if grid.ndim != 2:
            raise ValidationError("mask grid must be 2D")
        if not grid[0, 0]:
            raise ValidationError("mask must sample the DC location")
        if self.pattern not in PATTERNS:
            raise ValidationError(f"unknown mask pattern '{self.pattern}'")
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)

    @property
    def shape(self):
        return self.grid.shape

    @property
    def popcount(self):
        return int(np.count_nonzero(self.grid))


def _gaussian_grid(shape, count, rng):
    # Előjeles frekvencia indexek, szórás = méret/6
    ky = np.fft.fftfreq(shape[0]) * shape[0]
    kx = np.fft.fftfreq(shape[1]) * shape[1]
    ky, kx = np.meshgrid(ky, kx, indexing="ij")
    density = np.exp(-0.5 * ((ky / (shape[0] / 6.0)) ** 2 + (kx / (shape[1] / 6.0)) ** 2))

    # Súlyozott permutáció: a legnagyobb log(u)/w kulcsok nyernek
    keys = np.log(rng.random(shape)) / density
    order = np.argsort(-keys.ravel(), kind="stable")
    chosen = order[:count]
    if 0 not in chosen:
        chosen = np.concatenate([[0], chosen[:-1]])
    grid = np.zeros(shape[0] * shape[1], dtype=bool)
    grid[chosen] = True
    return grid.reshape(shape)


def _spokes(shape, spoke_count):
    centre_y, centre_x = shape[0] // 2, shape[1] // 2
    reach = max(shape)
    steps = np.arange(-2 * reach, 2 * reach + 1) / 2.0
    grid = np.zeros(shape, dtype=bool)
    grid[centre_y, centre_x] = True
    for angle in np.pi * np.arange(spoke_count) / spoke_count:
        ys = np.round(centre_y - steps * np.sin(angle)).astype(np.int64)
        xs = np.round(centre_x + steps * np.cos(angle)).astype(np.int64)
        inside = (ys >= 0) & (ys < shape[0]) & (xs >= 0) & (xs < shape[1])
        grid[ys[inside], xs[inside]] = True
    return grid


def _radial_grid(shape, count):
    best, best_gap = None, None
    for spoke_count in range(1, 2 * max(shape) + 1):
        grid = _spokes(shape, spoke_count)
        gap = abs(int(np.count_nonzero(grid)) - count)
        if best_gap is None or gap < best_gap:
            best, best_gap = grid, gap
        if np.count_nonzero(grid) >= count and gap > best_gap:
            break
    # A raszter középre igazított; visszaállítjuk az FFT elrendezést
    return np.fft.ifftshift(best)


def make_mask(pattern, rate, dims, seed):
    """
    Mintavételi maszk készítése.

    :param pattern: 'gaussian2d', 'radial' vagy 'full'
    :param rate: mintavételi arány (0, 1]
    :param dims: a rács mérete (egész vagy (magasság, szélesség))
    :param seed: a véletlen generátor magja
    :return: FourierMask, a sampling_rate a ténylegesen elért arány
    """
    shape = (dims, dims) if np.isscalar(dims) else tuple(dims)
    total = shape[0] * shape[1]
    if pattern not in PATTERNS:
        raise ValidationError(f"unknown mask pattern '{pattern}'")
    if not 0 < rate <= 1:
        raise ValidationError(f"sampling rate must be in (0, 1], got {rate}")
    if rate * total < 1:
        raise ValidationError(f"rate {rate} selects no sample on a {shape[0]}x{shape[1]} grid")

    count = int(round(rate * total))
    if pattern == "full" or count >= total:
        grid = np.ones(shape, dtype=bool)
    elif pattern == "gaussian2d":
        grid = _gaussian_grid(shape, count, np.random.default_rng(seed))
    else:
        grid = _radial_grid(shape, count)
        grid[0, 0] = True

    mask = FourierMask(grid, np.count_nonzero(grid) / total, pattern, int(seed))
    logger.info(f"Mask {pattern} rate={rate} seed={seed}: {mask.popcount}/{total} samples")
    return mask


def save_mask(path, mask):
    return write_f64grid(path, mask.grid.astype(np.float64))


def load_mask(path, pattern="full", seed=0):
    values = read_f64grid(path)
    if not np.all((values == 0.0) | (values == 1.0)):
        raise ValidationError(f"{path}: mask values must be 0 or 1")
    grid = values == 1.0
    return FourierMask(grid, np.count_nonzero(grid) / grid.size, pattern, seed)
