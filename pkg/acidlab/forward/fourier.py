"""
Maszkolt unitér 2D DFT.

A mért minták a maszk igaz helyei sorfolytonos sorrendben (nem eltolt rács),
valós vektorként váltakozó Re/Im párokban. Az adjungált a valós skalárszorzatra
vonatkozik, ami a mérés oldalon konjugált komplex skalárszorzat valós része.
"""
import numpy as np

from acidlab.errors import ShapeError
from acidlab.forward.models import ForwardModel


class FourierModel(ForwardModel):
    kind = "fourier"

    def __init__(self, mask):
        super().__init__(mask.shape, mask.popcount)
        self.mask = mask

    @property
    def real_rows(self):
        return 2 * self.row_count

    def _apply(self, f):
        samples = np.fft.fft2(f, norm="ortho")[self.mask.grid]
        out = np.empty(2 * samples.size)
        out[0::2] = samples.real
        out[1::2] = samples.imag
        return out

    def _adjoint(self, p):
        spectrum = np.zeros(self.shape, dtype=np.complex128)
        spectrum[self.mask.grid] = p[0::2] + 1j * p[1::2]
        return np.fft.ifft2(spectrum, norm="ortho").real

    def descriptor(self):
        return {
            "modality": "fourier",
            "size": self.shape[0],
            "pattern": self.mask.pattern,
            "mask_seed": self.mask.seed,
            "samples": self.mask.popcount,
        }


def fourier_apply(mask, f):
    return FourierModel(mask).apply(f)


def fourier_adjoint(mask, p):
    model = FourierModel(mask)
    if np.asarray(p).size != model.real_rows:
        raise ShapeError(f"measurement length does not match mask popcount {mask.popcount}")
    return model.adjoint(p)
