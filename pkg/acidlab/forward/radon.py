"""
Párhuzamos nyalábú diszkrét Radon transzformáció.

Minden pixel középpontját az adott szögnél a detektor tengelyére vetítjük, és
értékét lineárisan osztjuk szét a két legközelebbi detektor cella között. Az
így kapott ritka súlytábla (W) adja az előre vetítést, transzponáltja pontosan
az adjungáltat. Szögenként a pixel tömege és első momentuma is megmarad.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from acidlab.errors import ValidationError
from acidlab.forward.models import ForwardModel

logger = logging.getLogger("forward_models")


def detector_count(size):
    """A detektorok a kép átlóját fedik le: ceil(sqrt(2)*n)."""
    return int(np.ceil(np.sqrt(2.0) * size))


@dataclass(frozen=True)
class RadonGeometry:
    size: int
    angles: np.ndarray = field(repr=False)

    def __post_init__(self):
        angles = np.array(self.angles, dtype=np.float64)
        if self.size < 2:
            raise ValidationError(f"image side must be at least 2, got {self.size}")
        if angles.ndim != 1 or angles.size < 1:
            raise ValidationError("geometry needs at least one angle")
        if np.any(np.diff(angles) <= 0) or angles[0] < 0 or angles[-1] >= np.pi:
            raise ValidationError("angles must be strictly increasing in [0, pi)")
        angles.setflags(write=False)
        object.__setattr__(self, "angles", angles)

    @property
    def num_angles(self):
        return self.angles.size

    @property
    def num_detectors(self):
        return detector_count(self.size)

    def detector_positions(self):
        """Detektor cella középpontok egységnyi osztással, 0 körül szimmetrikusan."""
        count = self.num_detectors
        return np.arange(count) - (count - 1) / 2.0


def uniform_geometry(size, num_angles):
    return RadonGeometry(size, np.pi * np.arange(num_angles) / num_angles)


def select_views(full_angles, kept, size=64):
    """
    Ritkított szöghalmaz: `kept` egyenletes szög [0, pi)-ben.

    :param full_angles: a teljes vetületszám
    :param kept: a megtartott vetületek száma
    :param size: a kép oldalhossza, amelyre a geometria készül
    """
    if kept < 1:
        raise ValidationError(f"at least one view must be kept, got {kept}")
    if kept > full_angles:
        raise ValidationError(f"cannot keep {kept} of {full_angles} views")
    logger.debug(f"Selecting {kept} of {full_angles} views for a {size}x{size} grid")
    return uniform_geometry(size, kept)


def _ray_weights(geometry):
    n = geometry.size
    count = geometry.num_detectors
    half = (count - 1) / 2.0

    # Pixel középpontok: x jobbra, y felfelé nő
    centre = (n - 1) / 2.0
    rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    x = (cols - centre).ravel()
    y = (centre - rows).ravel()
    pixel = np.arange(n * n)

    row_index, col_index, weights = [], [], []
    for a, theta in enumerate(geometry.angles):
        u = x * np.cos(theta) + y * np.sin(theta) + half
        lower = np.floor(u).astype(np.int64)
        frac = u - lower
        for bins, w in ((lower, 1.0 - frac), (lower + 1, frac)):
            keep = (w > 0) & (bins >= 0) & (bins < count)
            row_index.append(a * count + bins[keep])
            col_index.append(pixel[keep])
            weights.append(w[keep])

    return sparse.csr_matrix(
        (np.concatenate(weights), (np.concatenate(row_index), np.concatenate(col_index))),
        shape=(geometry.num_angles * count, n * n),
    )


class RadonModel(ForwardModel):
    """Radon mérési modell előre kiszámolt ritka súlytáblával."""
    kind = "radon"

    def __init__(self, geometry):
        super().__init__((geometry.size, geometry.size), geometry.num_angles * geometry.num_detectors)
        self.geometry = geometry
        self.weights = _ray_weights(geometry)
        self._weights_t = self.weights.T.tocsr()
        logger.info(f"Radon model ready: {geometry.num_angles} angles, {geometry.num_detectors} detectors, "
                    f"{self.weights.nnz} ray weights")

    def _apply(self, f):
        return self.weights @ f.ravel()

    def _adjoint(self, p):
        return (self._weights_t @ p).reshape(self.shape)

    def sinogram(self, p):
        """Mérés (szög, detektor) alakban."""
        return np.asarray(p).reshape(self.geometry.num_angles, self.geometry.num_detectors)

    def descriptor(self):
        return {
            "modality": "radon",
            "size": self.geometry.size,
            "views": self.geometry.num_angles,
            "detectors": self.geometry.num_detectors,
        }


def radon_apply(geometry_or_model, f):
    return _radon_model(geometry_or_model).apply(f)


def radon_adjoint(geometry_or_model, p):
    return _radon_model(geometry_or_model).adjoint(p)


def _radon_model(geometry_or_model):
    if isinstance(geometry_or_model, RadonModel):
        return geometry_or_model
    return RadonModel(geometry_or_model)
