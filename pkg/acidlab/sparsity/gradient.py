"""
Diszkrét gradiens transzformáció (H) és a teljes variáció.
"""
from dataclasses import dataclass

import numpy as np

from acidlab.grid.images import as_image_array


@dataclass(frozen=True)
class GradientField:
    """
    Előre differenciák a forráskép méretében.

    :param dx: vízszintes különbségek, az első oszlop 0
    :param dy: függőleges különbségek, az első sor 0
    """
    dx: np.ndarray
    dy: np.ndarray


def gradient_transform(f):
    values = as_image_array(f)
    dx = np.zeros_like(values)
    dy = np.zeros_like(values)
    dx[:, 1:] = values[:, 1:] - values[:, :-1]
    dy[1:, :] = values[1:, :] - values[:-1, :]
    return GradientField(dx, dy)


def total_variation(f):
    """Anizotróp TV: sum(|dx| + |dy|)."""
    field = gradient_transform(f)
    return float(np.sum(np.abs(field.dx)) + np.sum(np.abs(field.dy)))


def sparsity_count(f, epsilon):
    """A küszöb feletti gradiens elemek száma."""
    field = gradient_transform(f)
    return int(np.count_nonzero(np.abs(field.dx) > epsilon) + np.count_nonzero(np.abs(field.dy) > epsilon))
