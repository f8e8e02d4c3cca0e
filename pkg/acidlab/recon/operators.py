"""
Rekonstrukciós operátorok (Φ): mérésből kép.

Minden operátor ismeri a saját mérési modelljét, és képességjelzőkkel
mondja meg, hogy differenciálható-e (vjp) illetve tanítható-e.
"""
import logging

import numpy as np
from scipy.linalg import toeplitz

from acidlab.errors import CapabilityError, ShapeError
from acidlab.grid.images import as_measurement_array

logger = logging.getLogger("recon_ops")


class ReconOperator:
    """
    Φ alaposztálya.

    Az alosztályok a _forward és (ha differenciálhatóak) a _vjp metódust
    írják meg ellenőrzött tömbökön.

    :param model: a hozzá tartozó ForwardModel
    """
    kind = "base"
    differentiable = False
    trainable = False

    def __init__(self, model):
        self.model = model
        # A tanító mérések legnagyobb abszolút értéke; lineáris operátoroknál nincs
        self.input_scale = None

    def forward(self, p):
        values = self._checked(p)
        return self._forward(values)

    def vjp(self, p, cotangent):
        if not self.differentiable:
            raise CapabilityError(f"{self.kind} operator is not differentiable")
        values = self._checked(p)
        cot = np.asarray(cotangent, dtype=np.float64)
        if cot.shape != self.model.shape:
            raise ShapeError(f"cotangent {cot.shape} does not match image {self.model.shape}")
        return self._vjp(values, cot)

    def __call__(self, p):
        return self.forward(p)

    def descriptor(self):
        return {"operator": self.kind}

    def _checked(self, p):
        values = as_measurement_array(p)
        if values.size != self.model.real_rows:
            raise ShapeError(f"{self.kind} operator expects {self.model.real_rows} measurement reals, "
                             f"got {values.size}")
        return values

    def _forward(self, p):
        raise NotImplementedError

    def _vjp(self, p, cotangent):
        raise NotImplementedError


def ramlak_kernel(count):
    """Ram-Lak szűrő egységnyi detektor osztásra: h[0]=1/4, páratlan n-re -1/(pi n)^2."""
    offsets = np.arange(count)
    kernel = np.zeros(count)
    kernel[0] = 0.25
    odd = offsets % 2 == 1
    kernel[odd] = -1.0 / (np.pi * offsets[odd]) ** 2
    return kernel


def recon_forward(op, p):
    return op.forward(p)


def recon_vjp(op, p, cotangent):
    return op.vjp(p, cotangent)


class AdjointRecon(ReconOperator):
    """
    Lineáris hagyományos rekonstrukció.

    Fourier modellnél a nullákkal kitöltött inverz DFT, Radon modellnél
    szűrt visszavetítés (filtered=True) vagy nyers visszavetítés.
    """
    kind = "adjoint"
    differentiable = True

    def __init__(self, model, filtered=True):
        super().__init__(model)
        self.filtered = filtered
        self._ramp = None
        if model.kind == "radon":
            geometry = model.geometry
            self._weight = np.pi / geometry.num_angles
            if filtered:
                # Szimmetrikus Toeplitz mátrix, így a szűrő önadjungált
                self._ramp = toeplitz(ramlak_kernel(geometry.num_detectors))

    def _filter(self, p):
        if self.model.kind != "radon":
            return p
        sinogram = self.model.sinogram(p)
        if self._ramp is not None:
            sinogram = sinogram @ self._ramp
        return self._weight * sinogram.ravel()

    def _forward(self, p):
        return self.model.adjoint(self._filter(p))

    def _vjp(self, p, cotangent):
        return self._filter(self.model.apply(cotangent))

    def descriptor(self):
        return {"operator": "adjoint", "filtered": int(self.filtered)}


def build_adjoint_recon(model, filtered=True):
    return AdjointRecon(model, filtered=filtered)


class ScaledRecon(ReconOperator):
    """Egy alap operátor konstansszorosa."""
    kind = "scaled"

    def __init__(self, base, factor):
        super().__init__(base.model)
        self.base = base
        self.factor = float(factor)
        self.differentiable = base.differentiable
        self.input_scale = base.input_scale

    def _forward(self, p):
        return self.factor * self.base.forward(p)

    def _vjp(self, p, cotangent):
        return self.base.vjp(p, self.factor * cotangent)

    def descriptor(self):
        return {**self.base.descriptor(), "scale": self.factor}


class ResampledRecon(ReconOperator):
    """
    Más mintavételre tanított operátor átültetése új modellre.

    Φ_new(p) = Φ(A_train A_newᵀ p); a vjp ennek pontos transzponáltja.
    """
    kind = "resampled"

    def __init__(self, base, model):
        super().__init__(model)
        if base.model.shape != model.shape:
            raise ShapeError(f"cannot resample {base.model.shape} operator onto {model.shape} model")
        self.base = base
        self.differentiable = base.differentiable
        self.input_scale = base.input_scale

    def _to_base(self, p):
        return self.base.model.apply(self.model.adjoint(p))

    def _forward(self, p):
        return self.base.forward(self._to_base(p))

    def _vjp(self, p, cotangent):
        inner = self.base.vjp(self._to_base(p), cotangent)
        return self.model.apply(self.base.model.adjoint(inner))

    def descriptor(self):
        return {**self.base.descriptor(), "resampled": 1}
