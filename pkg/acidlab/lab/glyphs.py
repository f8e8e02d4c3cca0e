"""
Beépített 5x7-es bitmap betűkészlet és a szerkezeti beszúrások.
"""
from dataclasses import dataclass

import numpy as np

from acidlab.errors import ValidationError
from acidlab.grid.images import as_image_array

GLYPH_HEIGHT = 7
GLYPH_WIDTH = 5

FONT = {
    "A": ("01110", "10001", "10001", "11111", "10001", "10001", "10001"),
    "B": ("11110", "10001", "10001", "11110", "10001", "10001", "11110"),
    "C": ("01110", "10001", "10000", "10000", "10000", "10001", "01110"),
    "D": ("11110", "10001", "10001", "10001", "10001", "10001", "11110"),
    "E": ("11111", "10000", "10000", "11110", "10000", "10000", "11111"),
    "F": ("11111", "10000", "10000", "11110", "10000", "10000", "10000"),
    "G": ("01110", "10001", "10000", "10111", "10001", "10001", "01111"),
    "H": ("10001", "10001", "10001", "11111", "10001", "10001", "10001"),
    "I": ("01110", "00100", "00100", "00100", "00100", "00100", "01110"),
    "J": ("00111", "00010", "00010", "00010", "00010", "10010", "01100"),
    "K": ("10001", "10010", "10100", "11000", "10100", "10010", "10001"),
    "L": ("10000", "10000", "10000", "10000", "10000", "10000", "11111"),
    "M": ("10001", "11011", "10101", "10101", "10001", "10001", "10001"),
    "N": ("10001", "10001", "11001", "10101", "10011", "10001", "10001"),
    "O": ("01110", "10001", "10001", "10001", "10001", "10001", "01110"),
    "P": ("11110", "10001", "10001", "11110", "10000", "10000", "10000"),
    "Q": ("01110", "10001", "10001", "10001", "10101", "10010", "01101"),
    "R": ("11110", "10001", "10001", "11110", "10100", "10010", "10001"),
    "S": ("01111", "10000", "10000", "01110", "00001", "00001", "11110"),
    "T": ("11111", "00100", "00100", "00100", "00100", "00100", "00100"),
    "U": ("10001", "10001", "10001", "10001", "10001", "10001", "01110"),
    "V": ("10001", "10001", "10001", "10001", "10001", "01010", "00100"),
    "W": ("10001", "10001", "10001", "10101", "10101", "10101", "01010"),
    "X": ("10001", "10001", "01010", "00100", "01010", "10001", "10001"),
    "Y": ("10001", "10001", "01010", "00100", "00100", "00100", "00100"),
    "Z": ("11111", "00001", "00010", "00100", "01000", "10000", "11111"),
    "0": ("01110", "10001", "10011", "10101", "11001", "10001", "01110"),
    "1": ("00100", "01100", "00100", "00100", "00100", "00100", "01110"),
    "2": ("01110", "10001", "00001", "00010", "00100", "01000", "11111"),
    "3": ("11111", "00010", "00100", "00010", "00001", "10001", "01110"),
    "4": ("00010", "00110", "01010", "10010", "11111", "00010", "00010"),
    "5": ("11111", "10000", "11110", "00001", "00001", "10001", "01110"),
    "6": ("00110", "01000", "10000", "11110", "10001", "10001", "01110"),
    "7": ("11111", "00001", "00010", "00100", "01000", "01000", "01000"),
    "8": ("01110", "10001", "10001", "01110", "10001", "10001", "01110"),
    "9": ("01110", "10001", "10001", "01111", "00001", "00010", "01100"),
    " ": ("00000",) * 7,
    ".": ("00000", "00000", "00000", "00000", "00000", "01100", "01100"),
    "-": ("00000", "00000", "00000", "11111", "00000", "00000", "00000"),
    "!": ("00100", "00100", "00100", "00100", "00100", "00000", "00100"),
    "?": ("01110", "10001", "00001", "00010", "00100", "00000", "00100"),
}


def render_text(text, scale=1):
    """
    Szöveg bitmapje; a karakterek között egy oszlop köz van.

    :param scale: egész nagyítás
    """
    if scale < 1:
        raise ValidationError(f"text scale must be at least 1, got {scale}")
    text = text.upper()
    unknown = sorted({ch for ch in text if ch not in FONT})
    if unknown:
        raise ValidationError(f"no glyph for characters {unknown}")
    if not text:
        return np.zeros((0, 0), dtype=bool)
    blocks = []
    for i, ch in enumerate(text):
        if i:
            blocks.append(np.zeros((GLYPH_HEIGHT, 1), dtype=bool))
        blocks.append(np.array([[bit == "1" for bit in row] for row in FONT[ch]]))
    bitmap = np.hstack(blocks)
    return np.kron(bitmap, np.ones((scale, scale), dtype=bool)).astype(bool)


@dataclass(frozen=True)
class StructuralInsert:
    glyph: np.ndarray
    position: tuple
    intensity: float


def insert_structure(f, insert):
    """A glyph pixeleit felülírjuk az intenzitással, a többi pixel változatlan."""
    values = as_image_array(f).copy()
    glyph = np.asarray(insert.glyph, dtype=bool)
    row, col = insert.position
    if glyph.size == 0:
        return values
    if row < 0 or col < 0 or row + glyph.shape[0] > values.shape[0] or col + glyph.shape[1] > values.shape[1]:
        raise ValidationError(f"insert of shape {glyph.shape} at {insert.position} does not fit "
                              f"image {values.shape}")
    window = values[row:row + glyph.shape[0], col:col + glyph.shape[1]]
    window[glyph] = insert.intensity
    return values


def text_insert(text, position, intensity, scale=1):
    return StructuralInsert(render_text(text, scale), tuple(position), float(intensity))
