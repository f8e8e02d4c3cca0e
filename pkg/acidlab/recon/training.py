"""
AutomapMini tanítása teljes kötegű gradiens módszerrel.

Ha egy lépés növelné a veszteséget, a lépést elvetjük és a lépésközt
felezzük, így a veszteség sorozat monoton nem növekvő.
"""
import logging

import numpy as np

from acidlab.errors import CapabilityError, ShapeError, ValidationError
from acidlab.grid.images import as_image_array, as_measurement_array
from acidlab.recon.automap import AutomapParams

logger = logging.getLogger("recon_ops")

MAX_HALVINGS = 40


def _stack_pairs(op, pairs):
    measurements, images = [], []
    for p, f in pairs:
        p = as_measurement_array(p)
        f = as_image_array(f)
        if p.size != op.model.real_rows or f.shape != op.model.shape:
            raise ShapeError("training pair does not match the operator's model")
        measurements.append(p)
        images.append(f.ravel())
    return np.stack(measurements, axis=1), np.stack(images, axis=1)


def _loss_and_grads(params, inputs, targets):
    batch = inputs.shape[1]
    activations = np.tanh(params.w1 @ inputs + params.b1[:, None])
    residual = params.w2 @ activations + params.b2[:, None] - targets
    loss = 0.5 * float(np.sum(residual ** 2)) / batch

    grad_hidden = (params.w2.T @ residual) * (1.0 - activations ** 2) / batch
    grads = AutomapParams(
        w1=grad_hidden @ inputs.T,
        b1=grad_hidden.sum(axis=1),
        w2=residual @ activations.T / batch,
        b2=residual.mean(axis=1),
    )
    return loss, grads


def _loss(params, inputs, targets):
    activations = np.tanh(params.w1 @ inputs + params.b1[:, None])
    residual = params.w2 @ activations + params.b2[:, None] - targets
    return 0.5 * float(np.sum(residual ** 2)) / inputs.shape[1]


def consistency_residual(op, inputs):
    """Átlagos ‖AΦ(p) − p‖/‖p‖ a tanító méréseken."""
    ratios = []
    for p in inputs.T:
        norm = np.linalg.norm(p)
        if norm > 0:
            ratios.append(np.linalg.norm(op.model.apply(op.forward(p)) - p) / norm)
    return float(np.mean(ratios)) if ratios else 0.0


def train_automap_mini(op, pairs, epochs, step, log_every=50):
    """
    Tanítás az átlagos négyzetes rekonstrukciós hibára.

    :param op: tanítható operátor
    :param pairs: (mérés, kép) párok listája
    :param epochs: epochok száma
    :param step: kezdő lépésköz
    :return: új operátor a tanított paraméterekkel
    """
    if not op.trainable:
        raise CapabilityError(f"{op.kind} operator is not trainable")
    pairs = list(pairs)
    if not pairs:
        raise ValidationError("training needs at least one (measurement, image) pair")
    if epochs < 0 or step <= 0:
        raise ValidationError(f"invalid training schedule: epochs={epochs}, step={step}")

    inputs, targets = _stack_pairs(op, pairs)
    input_scale = float(np.max(np.abs(inputs)))
    params = op.params.copy()
    loss, grads = _loss_and_grads(params, inputs, targets)
    losses = [loss]
    logger.info(f"Training {op.kind}: {len(pairs)} pairs, {epochs} epochs, initial loss {loss:.6g}")

    for epoch in range(1, epochs + 1):
        for _ in range(MAX_HALVINGS):
            candidate = params.axpy(step, grads)
            candidate_loss = _loss(candidate, inputs, targets)
            if np.isfinite(candidate_loss) and candidate_loss <= loss:
                break
            step /= 2.0
            logger.warning(f"Epoch {epoch}: loss would increase, halving step to {step:.3g}")
        else:
            logger.warning(f"Epoch {epoch}: no descent step found, stopping early")
            break

        params = candidate
        loss, grads = _loss_and_grads(params, inputs, targets)
        losses.append(loss)
        if epoch % log_every == 0 or epoch == epochs:
            trained = op.with_params(params, input_scale)
            logger.info(f"Epoch {epoch}/{epochs}: loss {loss:.6g}, "
                        f"consistency {consistency_residual(trained, inputs[:, :8]):.4f}")

    trained = op.with_params(params, input_scale)
    trained.training_losses = tuple(losses)
    return trained
