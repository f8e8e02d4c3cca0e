"""
Kép és mérés konténerek, valamint a fájlformátumok.

A numerikus mag numpy tömbökön dolgozik (kép: 2D float64, mérés: 1D float64,
Fourier esetén váltakozó valós/képzetes párokkal). Az Image és Measurement
osztályok a határokon (fájl I/O, labor) validálnak.
"""
import logging
from dataclasses import dataclass

import numpy as np

from acidlab.errors import ShapeError, ValidationError

logger = logging.getLogger("grid_core")

F64GRID_MAGIC = "F64GRID"
MEASUREMENT_KINDS = ("radon", "fourier")


def as_image_array(f):
    """
    Kép értékek ellenőrzött 2D float64 tömbként.

    :param f: Image vagy tömbszerű érték
    :return: numpy tömb (height, width)
    """
    values = f.values if isinstance(f, Image) else np.asarray(f, dtype=np.float64)
    if values.ndim != 2:
        raise ShapeError(f"image must be 2D, got shape {values.shape}")
    if values.shape[0] < 2 or values.shape[1] < 2:
        raise ShapeError(f"image must be at least 2x2, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValidationError("image contains non-finite values")
    return values


def as_measurement_array(p):
    values = p.values if isinstance(p, Measurement) else np.asarray(p, dtype=np.float64)
    if values.ndim != 1:
        raise ShapeError(f"measurement must be 1D, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValidationError("measurement contains non-finite values")
    return values


@dataclass(frozen=True)
class Image:
    """Valós értékű 2D rács, sorfolytonos sorrendben."""
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        object.__setattr__(self, "values", as_image_array(values))
        values.setflags(write=False)

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class Measurement:
    """
    Lapos mérési vektor.

    :param values: valós minták (radon) vagy váltakozó Re/Im párok (fourier)
    :param kind: 'radon' vagy 'fourier'
    """
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in MEASUREMENT_KINDS:
            raise ValidationError(f"unknown measurement kind '{self.kind}'")
        values = np.array(self.values, dtype=np.float64)
        object.__setattr__(self, "values", as_measurement_array(values))
        values.setflags(write=False)
        if self.kind == "fourier" and values.size % 2:
            raise ShapeError("fourier measurement needs an even number of reals")

    @property
    def length(self):
        """Mintaszám: Fourier esetén a komplex minták száma."""
        return self.values.size // 2 if self.kind == "fourier" else self.values.size

    def as_complex(self):
        if self.kind != "fourier":
            raise ValidationError("only fourier measurements are complex")
        return self.values[0::2] + 1j * self.values[1::2]


def write_f64grid(path, f):
    """
    Kép mentése F64GRID formátumban.

    Fejléc: `F64GRID <width> <height>\\n`, utána little-endian float64 értékek.
    """
    values = as_image_array(f)
    height, width = values.shape
    with open(path, "wb") as handle:
        handle.write(f"{F64GRID_MAGIC} {width} {height}\n".encode("ascii"))
        handle.write(np.ascontiguousarray(values, dtype="<f8").tobytes())
    logger.debug(f"Wrote F64GRID {width}x{height} to {path}")
    return path


def read_f64grid(path):
    with open(path, "rb") as handle:
        header = handle.readline().decode("ascii").split()
        if len(header) != 3 or header[0] != F64GRID_MAGIC:
            raise ValidationError(f"{path}: not an F64GRID file")
        width, height = int(header[1]), int(header[2])
        payload = handle.read()
    if len(payload) != 8 * width * height:
        raise ShapeError(f"{path}: expected {width * height} values, found {len(payload) // 8}")
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(height, width)
    return as_image_array(values)


def write_pgm(path, f, window=None):
    """
    8 bites PGM export megtekintéshez.

    :param window: (low, high) lineáris ablak; alapértelmezetten a kép min/max értéke
    """
    values = as_image_array(f)
    low, high = window if window is not None else (float(values.min()), float(values.max()))
    if high <= low:
        scaled = np.zeros_like(values)
    else:
        scaled = np.clip((values - low) / (high - low), 0.0, 1.0)
    pixels = np.round(scaled * 255).astype(np.uint8)
    height, width = values.shape
    with open(path, "wb") as handle:
        handle.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        handle.write(pixels.tobytes())
    return path
