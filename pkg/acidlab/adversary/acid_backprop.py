"""
Támadás a teljes ACID folyamat ellen.

A forward futás minden köztes értéket megtart, majd a gradiens három
szakaszban halad visszafelé: az utolsó iterációtól a köztes iterációkon
át a kezdő f(0) = sparsify(Φ(p0)) lépésig. Az iterációnkénti járulékok
p0-ra összegződnek, végül ∇_e = Aᵀ g_p0 − γe.

A normalizálási skálák és az effektív ε értékek a forward futás
állandóinak számítanak.
"""
import logging

import numpy as np

from acidlab.errors import CapabilityError, ShapeError
from acidlab.adversary.attacks import AttackResult, initial_perturbation, momentum_ascent
from acidlab.engine.acid import AcidIterator
from acidlab.grid.images import as_image_array
from acidlab.sparsity.threshold import sparsify_vjp

logger = logging.getLogger("adversary")


def acid_forward(p0, model, op, cfg):
    """ACID futás köztes értékek megtartásával."""
    state = AcidIterator(p0, model, op, cfg, keep_tape=True)
    for _ in range(cfg.iterations):
        state.step()
    return state


def _cs_vjp(state, k, cotangent):
    if not state.cfg.sparsify:
        return cotangent
    return sparsify_vjp(state.tape_inputs[k], cotangent, state.tape_epsilons[k])


def acid_vjp(state, cotangent):
    """
    A kész ACID futás kimenetének vjp-je p0 szerint.

    :param state: acid_forward által visszaadott állapot
    :param cotangent: képtartománybeli kotangens f(K)-ra
    :return: mérési tartománybeli gradiens
    """
    cfg, op, model = state.cfg, state.op, state.model
    residual_weight, prior_weight = cfg.residual_weight, cfg.prior_weight
    grad_f = np.asarray(cotangent, dtype=np.float64)
    grad_p0 = np.zeros_like(state.p0)

    for k in range(state.iteration, 0, -1):
        grad_in = _cs_vjp(state, k, grad_f)
        scale = state.tape_scales[k - 1]
        grad_p = op.vjp(scale * state.tape_residuals[k - 1], prior_weight * grad_in)
        # f(k-1) közvetlen ága és a reziduumon át vezető ág összege
        grad_f = grad_in - residual_weight * model.adjoint(grad_p)
        grad_p0 += residual_weight * grad_p

    grad_p0 += op.vjp(state.p0, _cs_vjp(state, 0, grad_f))
    return grad_p0


def kink_margin(state):
    """A legkisebb távolság a ritkító lépés elágazási pontjaitól (|v_a − v_b| = ε)."""
    margins = []
    for image, epsilon in zip(state.tape_inputs, state.tape_epsilons):
        padded = np.pad(image, 1, mode="edge")
        for neighbour in (padded[1:-1, 2:], padded[2:, 1:-1], padded[1:-1, :-2], padded[:-2, 1:-1]):
            diff = np.abs(image - neighbour)
            active = diff > 0
            if np.any(active):
                margins.append(float(np.min(np.abs(diff[active] - epsilon))))
    return min(margins) if margins else np.inf


def acid_attack_objective(op, model, f, e, acid_cfg, gamma, reference=None):
    """½‖ACID(Af + Ae) − ACID(Af)‖² − (γ/2)‖e‖²."""
    f = as_image_array(f)
    if reference is None:
        reference = acid_forward(model.apply(f), model, op, acid_cfg).f
    attacked = acid_forward(model.apply(f + e), model, op, acid_cfg).f
    return 0.5 * float(np.sum((attacked - reference) ** 2)) - 0.5 * gamma * float(np.sum(e ** 2))


def acid_attack_gradient(op, model, f, e, acid_cfg, gamma, reference=None):
    f = as_image_array(f)
    if reference is None:
        reference = acid_forward(model.apply(f), model, op, acid_cfg).f
    state = acid_forward(model.apply(f + e), model, op, acid_cfg)
    return model.adjoint(acid_vjp(state, state.f - reference)) - gamma * e


def attack_acid(op, model, f, acid_cfg, cfg, seed):
    """
    Perturbáció keresése a teljes ACID folyamat ellen.

    A ciklus azonos az attack_network ciklusával; leáll max_iters után vagy
    ha ‖e‖ túllépi a norm_budget értéket.
    """
    if not op.differentiable:
        raise CapabilityError(f"{op.kind} operator is not differentiable")
    f = as_image_array(f)
    if f.shape != model.shape:
        raise ShapeError(f"image {f.shape} does not match model {model.shape}")

    reference = acid_forward(model.apply(f), model, op, acid_cfg).f

    def objective_and_gradient(e):
        state = acid_forward(model.apply(f + e), model, op, acid_cfg)
        diff = state.f - reference
        objective = 0.5 * float(np.sum(diff ** 2)) - 0.5 * cfg.gamma * float(np.sum(e ** 2))
        return objective, model.adjoint(acid_vjp(state, diff)) - cfg.gamma * e

    logger.info(f"Attacking ACID pipeline: K={acid_cfg.iterations}, seed={seed}, iterations={cfg.max_iters}")
    e, objectives, norms = momentum_ascent(objective_and_gradient, initial_perturbation(f, seed), cfg,
                                           label=f"attack-acid[{seed}]")
    attacked = acid_forward(model.apply(f + e), model, op, acid_cfg).f
    return AttackResult(
        perturbation=e,
        objective_trace=objectives,
        norm_trace=norms,
        perturbation_norm=float(np.linalg.norm(e)),
        output_distortion=float(np.linalg.norm(attacked - reference)),
    )
