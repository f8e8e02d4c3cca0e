"""
AutomapMini: két teljesen összekötött réteg, kézzel írt forward és vjp.

    Φ(p) = W2 · tanh(W1 · p + b1) + b2

Kezdőállapotban az operátor közelítőleg a lineáris AdjointRecon-t adja:
W1 = g·R ortonormált R-rel, W2 = B·Rᵀ/g, ahol B az AdjointRecon sűrű mátrixa.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr

from acidlab.errors import CapabilityError, ValidationError
from acidlab.forward.models import to_dense
from acidlab.recon.operators import AdjointRecon, ReconOperator

logger = logging.getLogger("recon_ops")

# Sűrű súlyok miatt ennél nagyobb képet nem vállalunk
MAX_PIXELS = 64 * 64


@dataclass
class AutomapParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        # Sorfolytonos float64 tömbök, ahogy a blobból betöltve
        for name in ("w1", "b1", "w2", "b2"):
            setattr(self, name, np.ascontiguousarray(getattr(self, name), dtype=np.float64))

    def copy(self):
        return AutomapParams(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())

    def axpy(self, step, grads):
        """Új paraméterkészlet: self - step * grads."""
        return AutomapParams(self.w1 - step * grads.w1, self.b1 - step * grads.b1,
                             self.w2 - step * grads.w2, self.b2 - step * grads.b2)


class AutomapMini(ReconOperator):
    kind = "automap"
    differentiable = True
    trainable = True

    def __init__(self, model, params, seed=None):
        super().__init__(model)
        if model.col_count > MAX_PIXELS:
            raise CapabilityError(f"AutomapMini supports at most {MAX_PIXELS} pixels, got {model.col_count}")
        self.params = params
        self.seed = seed
        self.training_losses = ()

    @property
    def hidden(self):
        return self.params.b1.size

    def _hidden_activations(self, p):
        return np.tanh(self.params.w1 @ p + self.params.b1)

    def _forward(self, p):
        activations = self._hidden_activations(p)
        return (self.params.w2 @ activations + self.params.b2).reshape(self.model.shape)

    def _vjp(self, p, cotangent):
        activations = self._hidden_activations(p)
        grad_hidden = (self.params.w2.T @ cotangent.ravel()) * (1.0 - activations ** 2)
        return self.params.w1.T @ grad_hidden

    def with_params(self, params, input_scale=None):
        clone = AutomapMini(self.model, params, self.seed)
        clone.input_scale = input_scale if input_scale is not None else self.input_scale
        return clone

    def descriptor(self):
        return {"operator": "automap", "hidden": self.hidden, "seed": self.seed}


def build_automap_mini(model, hidden=None, seed=0, gain=1.0):
    """
    Determinisztikus inicializálás a magból.

    :param hidden: rejtett réteg mérete, alapértelmezetten 4·m (valós sorok)
    :param gain: a rejtett réteg bemeneti erősítése; kicsi értéknél a tanh lineáris
    """
    if model.col_count > MAX_PIXELS:
        raise CapabilityError(f"AutomapMini supports at most {MAX_PIXELS} pixels, got {model.col_count}")
    rows = model.real_rows
    hidden = int(hidden) if hidden is not None else 4 * rows
    if hidden < 1 or gain <= 0:
        raise ValidationError(f"invalid AutomapMini shape: hidden={hidden}, gain={gain}")

    rng = np.random.default_rng(seed)
    basis, _ = qr(rng.standard_normal((max(hidden, rows), min(hidden, rows))), mode="economic")
    # R: hidden x rows, ortonormált sorok vagy oszlopok
    rotation = basis if hidden >= rows else basis.T
    linear = to_dense(AdjointRecon(model).forward, (rows,))

    params = AutomapParams(
        w1=gain * rotation,
        b1=1e-3 * rng.standard_normal(hidden),
        w2=linear @ rotation.T / gain,
        b2=np.zeros(model.col_count),
    )
    logger.info(f"AutomapMini initialised: rows={rows}, hidden={hidden}, pixels={model.col_count}, seed={seed}")
    return AutomapMini(model, params, seed)
