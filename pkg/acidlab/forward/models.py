"""
A mérési mátrix (A) közös felülete.

Minden modell megmutatja a kép alakját, a sorok számát és az apply/adjoint
párt. A mérések valós vektorok; a Fourier modell komplex mintáit
váltakozó Re/Im párokban tároljuk.
"""
import logging

import numpy as np

from acidlab.errors import ShapeError
from acidlab.grid.images import Measurement, as_image_array, as_measurement_array

logger = logging.getLogger("forward_models")


class ForwardModel:
    """
    Lineáris mérési operátor alaposztálya.

    Az alosztályok a _apply és _adjoint metódusokat valósítják meg
    ellenőrzött numpy tömbökön.
    """
    kind = None

    def __init__(self, shape, row_count):
        self.shape = tuple(shape)
        self.row_count = int(row_count)

    @property
    def col_count(self):
        return self.shape[0] * self.shape[1]

    @property
    def real_rows(self):
        """A valós mérési vektor hossza."""
        return self.row_count

    def apply(self, f):
        values = as_image_array(f)
        if values.shape != self.shape:
            raise ShapeError(f"{self.kind} model expects image {self.shape}, got {values.shape}")
        return self._apply(values)

    def adjoint(self, p):
        values = as_measurement_array(p)
        if values.size != self.real_rows:
            raise ShapeError(f"{self.kind} model expects {self.real_rows} measurement reals, got {values.size}")
        return self._adjoint(values)

    def measurement(self, values):
        return Measurement(values, self.kind)

    def descriptor(self):
        """Kulcs-érték párok a futási manifesthez."""
        raise NotImplementedError

    def _apply(self, f):
        raise NotImplementedError

    def _adjoint(self, p):
        raise NotImplementedError


def to_dense(linear_map, input_shape):
    """
    Lineáris leképezés sűrű mátrixa oszloponkénti kiértékeléssel.

    Csak kis példányokon használjuk (inicializálás, teszt orákulumok).
    """
    size = int(np.prod(input_shape))
    columns = []
    for index in range(size):
        unit = np.zeros(size)
        unit[index] = 1.0
        columns.append(np.ravel(linear_map(unit.reshape(input_shape))))
    return np.stack(columns, axis=1)
