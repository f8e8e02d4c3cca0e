"""
BREN arány és empirikus Lipschitz becslés.
"""
import logging
from dataclasses import dataclass

import numpy as np

from acidlab.errors import ValidationError
from acidlab.grid.images import as_image_array

logger = logging.getLogger("recon_ops")


@dataclass(frozen=True)
class BrenReport:
    ratio: float
    numerator: float
    denominator: float

    @property
    def sigma(self):
        return 1.0 - self.ratio


@dataclass(frozen=True)
class LipschitzEstimate:
    lower: float
    samples: int
    perturbation_scale: float
    ratios: tuple = ()


def bren_ratio(op, model, f_star):
    """‖Φ(A f*) − f*‖ / ‖f*‖."""
    f_star = as_image_array(f_star)
    denominator = float(np.linalg.norm(f_star))
    if denominator == 0.0:
        raise ValidationError("BREN ratio needs a ground truth with nonzero norm")
    numerator = float(np.linalg.norm(op.forward(model.apply(f_star)) - f_star))
    return BrenReport(numerator / denominator, numerator, denominator)


def lipschitz_estimate(op, model, probes, perturbations_per_probe, scale, seed):
    """
    Alsó becslés a Lipschitz állandóra mintavételezett perturbációkkal.

    Minden mintánál f' = f + e, ahol e véletlen irányú és ‖e‖ = scale.
    """
    probes = [as_image_array(f) for f in probes]
    if not probes:
        raise ValidationError("Lipschitz estimate needs at least one probe image")
    if scale <= 0:
        raise ValidationError(f"perturbation scale must be positive, got {scale}")

    rng = np.random.default_rng(seed)
    ratios = []
    for f in probes:
        reference = op.forward(model.apply(f))
        for _ in range(perturbations_per_probe):
            direction = rng.standard_normal(f.shape)
            e = scale * direction / np.linalg.norm(direction)
            moved = op.forward(model.apply(f + e))
            ratios.append(float(np.linalg.norm(moved - reference) / np.linalg.norm(e)))

    lower = max(ratios) if ratios else 0.0
    logger.info(f"Lipschitz estimate for {op.kind}: {lower:.6g} over {len(ratios)} samples")
    return LipschitzEstimate(lower, len(ratios), float(scale), tuple(ratios))
