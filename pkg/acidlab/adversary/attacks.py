"""
Kis képtartománybeli perturbáció keresése egy rekonstrukciós operátor ellen.

Célfüggvény (végponttól végpontig, l(f) = Φ(Af)):

    D(e) = ½‖Φ(Af + Ae) − l(f)‖² − (γ/2)‖e‖²

A keresés momentumos gradiens emelkedés: v ← τv + ϑ∇D, e ← e + v.
"""
import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from acidlab.errors import AttackAbortedError, CapabilityError, DivergedError, ShapeError, ValidationError
from acidlab.grid.images import as_image_array

logger = logging.getLogger("adversary")

# e0 normája a kép normájához képest
INITIAL_RELATIVE_NORM = 1e-3


@dataclass(frozen=True)
class AttackConfig:
    gamma: float
    step: float
    momentum: float
    max_iters: int
    norm_budget: float = None

    def __post_init__(self):
        if self.gamma < 0:
            raise ValidationError(f"gamma must be non-negative, got {self.gamma}")
        if not self.step > 0:
            raise ValidationError(f"step must be positive, got {self.step}")
        if not 0 <= self.momentum < 1:
            raise ValidationError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.max_iters < 0:
            raise ValidationError(f"max_iters must be non-negative, got {self.max_iters}")
        if self.norm_budget is not None and not self.norm_budget > 0:
            raise ValidationError(f"norm_budget must be positive, got {self.norm_budget}")


@dataclass
class AttackResult:
    perturbation: np.ndarray
    objective_trace: list = field(default_factory=list)
    norm_trace: list = field(default_factory=list)
    perturbation_norm: float = 0.0
    output_distortion: float = 0.0

    def to_csv(self, path):
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["iter", "objective", "norm"])
            for i, (objective, norm) in enumerate(zip(self.objective_trace, self.norm_trace)):
                writer.writerow([i, repr(objective), repr(norm)])
        return path


def _checked_pair(model, f, e):
    f = as_image_array(f)
    e = np.asarray(e, dtype=np.float64)
    if f.shape != model.shape or e.shape != model.shape:
        raise ShapeError(f"image {f.shape} and perturbation {e.shape} must match model {model.shape}")
    return f, e


def attack_objective(op, model, f, e, gamma):
    f, e = _checked_pair(model, f, e)
    label = op.forward(model.apply(f))
    output = op.forward(model.apply(f + e))
    return 0.5 * float(np.sum((output - label) ** 2)) - 0.5 * gamma * float(np.sum(e ** 2))


def attack_gradient(op, model, f, e, gamma):
    """∇_e D = Aᵀ vjp(Φ, u1, Φ(u1) − l(f)) − γe, u1 = A f + A e."""
    if not op.differentiable:
        raise CapabilityError(f"{op.kind} operator is not differentiable")
    f, e = _checked_pair(model, f, e)
    label = op.forward(model.apply(f))
    u1 = model.apply(f + e)
    return model.adjoint(op.vjp(u1, op.forward(u1) - label)) - gamma * e


def output_distortion(op, model, f, e):
    f, e = _checked_pair(model, f, e)
    return float(np.linalg.norm(op.forward(model.apply(f + e)) - op.forward(model.apply(f))))


def random_perturbation(shape, norm, seed):
    """Véletlen irányú perturbáció adott L2 normával."""
    direction = np.random.default_rng(seed).standard_normal(shape)
    return norm * direction / np.linalg.norm(direction)


def initial_perturbation(f, seed):
    f = as_image_array(f)
    return random_perturbation(f.shape, INITIAL_RELATIVE_NORM * np.linalg.norm(f), seed)


def momentum_ascent(objective_and_gradient, e0, cfg, label="attack"):
    """
    Közös emelkedő ciklus.

    :param objective_and_gradient: e -> (D(e), ∇D(e))
    :return: (e, objective_trace, norm_trace)
    """
    e = np.array(e0, dtype=np.float64)
    velocity = np.zeros_like(e)
    objectives, norms = [], []

    for i in range(cfg.max_iters):
        try:
            objective, gradient = objective_and_gradient(e)
        except (ValidationError, DivergedError) as err:
            # Nem véges köztes érték a modellben vagy az ACID láncban
            logger.error(f"{label}: {err} at iteration {i}")
            raise AttackAbortedError(objectives) from err
        if not np.isfinite(objective) or not np.all(np.isfinite(gradient)):
            logger.error(f"{label}: non-finite objective at iteration {i}")
            raise AttackAbortedError(objectives)
        objectives.append(float(objective))
        norms.append(float(np.linalg.norm(e)))

        velocity = cfg.momentum * velocity + cfg.step * gradient
        e = e + velocity
        if not np.all(np.isfinite(e)):
            raise AttackAbortedError(objectives)

        norm = float(np.linalg.norm(e))
        if cfg.norm_budget is not None and norm > cfg.norm_budget:
            e *= cfg.norm_budget / norm
            logger.warning(f"{label}: norm budget {cfg.norm_budget:.4g} reached at iteration {i + 1}")
            break
        if (i + 1) % 25 == 0:
            logger.info(f"{label}: iteration {i + 1}, objective {objective:.6g}, norm {norm:.4g}")

    return e, objectives, norms


def attack_network(op, model, f, cfg, seed):
    """
    Perturbáció keresése egyetlen operátor ellen.

    :raises AttackAbortedError: ha a keresés nem véges értéket ad
    """
    if not op.differentiable:
        raise CapabilityError(f"{op.kind} operator is not differentiable")
    f = as_image_array(f)
    if f.shape != model.shape:
        raise ShapeError(f"image {f.shape} does not match model {model.shape}")

    label = op.forward(model.apply(f))

    def objective_and_gradient(e):
        u1 = model.apply(f + e)
        output = op.forward(u1)
        diff = output - label
        objective = 0.5 * float(np.sum(diff ** 2)) - 0.5 * cfg.gamma * float(np.sum(e ** 2))
        return objective, model.adjoint(op.vjp(u1, diff)) - cfg.gamma * e

    logger.info(f"Attacking {op.kind} operator: seed={seed}, iterations={cfg.max_iters}")
    e, objectives, norms = momentum_ascent(objective_and_gradient, initial_perturbation(f, seed), cfg,
                                           label=f"attack-net[{seed}]")
    return AttackResult(
        perturbation=e,
        objective_trace=objectives,
        norm_trace=norms,
        perturbation_norm=float(np.linalg.norm(e)),
        output_distortion=output_distortion(op, model, f, e),
    )
