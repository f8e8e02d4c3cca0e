"""
Kontrakciós próba szintetikus, szabályozott hibájú operátorral.

A szintetikus Φ a pontos visszaállítás (megfigyelhető rész A†p, null-tér rész
f*-ból) plusz egy (1−σ)-szeresére skálázott műtermék, amelynek megfigyelhető
és null-tér komponense is van. Iterációnként két normát rögzítünk:

- observable_error: ‖P_ob(f(k) − f*)‖, P_ob = A†A
- artifact_error: ‖P_ob Φ(p(k)) − A†p(k)‖, Φ megfigyelhető hibája a
  reziduumon; a végső ε-korlát erre vonatkozik
"""
import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse.linalg import LinearOperator, lsqr

from acidlab.errors import ValidationError
from acidlab.engine.acid import AcidHistory, AcidIterator, IterationRecord
from acidlab.grid.images import as_image_array
from acidlab.recon.operators import ReconOperator
from acidlab.sparsity.gradient import sparsity_count

logger = logging.getLogger("acid_engine")

# Normálegyenlet ridge tag a range/null felbontáshoz
RIDGE = 1e-10

ARTIFACT_OBSERVABLE = -0.8
ARTIFACT_NULL = -0.6


class RangeProjector:
    """A† és P_ob = A†A közelítése csillapított legkisebb négyzetekkel."""

    def __init__(self, model, ridge=RIDGE):
        self.model = model
        self.damp = np.sqrt(ridge)
        self.operator = LinearOperator(
            (model.real_rows, model.col_count),
            matvec=lambda x: model.apply(np.reshape(x, model.shape)),
            rmatvec=lambda y: model.adjoint(np.ravel(y)).ravel(),
            dtype=np.float64,
        )

    def pinv(self, p):
        solution = lsqr(self.operator, np.ravel(p), damp=self.damp, atol=1e-14, btol=1e-14,
                        iter_lim=10 * self.model.col_count)[0]
        return solution.reshape(self.model.shape)

    def observable(self, f):
        return self.pinv(self.model.apply(f))


class SyntheticRecon(ReconOperator):
    """
    Φ(p) = G(p) + (1−σ)·Art(G(p)).

    G(A f*) = f*; Art(g) = −0.8·P_ob g − 0.6·P_nl(tükrözött g).
    """
    kind = "synthetic"

    def __init__(self, model, f_star, sigma, projector=None):
        super().__init__(model)
        self.sigma = float(sigma)
        self.projector = projector or RangeProjector(model)
        self.f_star = as_image_array(f_star)
        self._ob_star = self.projector.observable(self.f_star)
        self._nl_star = self.f_star - self._ob_star
        self._ob_energy = float(np.sum(self._ob_star ** 2))

    def exact(self, p):
        recovered = self.projector.pinv(p)
        weight = float(np.sum(recovered * self._ob_star)) / self._ob_energy
        return recovered + weight * self._nl_star

    def artifact(self, g):
        flipped = np.flip(g)
        observable = self.projector.observable(g)
        return ARTIFACT_OBSERVABLE * observable + ARTIFACT_NULL * (flipped - self.projector.observable(flipped))

    def _forward(self, p):
        base = self.exact(p)
        return base + (1.0 - self.sigma) * self.artifact(base)


@dataclass(frozen=True)
class GeometricFit:
    rate: float
    constant: float
    points: int


def fit_geometric_rate(errors, floor=0.0):
    """
    C·ρ^k burkoló illesztése a floor feletti hibákra.

    ρ a log-hibák legkisebb négyzetes meredekségéből, C a legkisebb olyan
    állandó, amellyel minden pont a burkoló alatt marad.
    """
    errors = np.asarray(errors, dtype=np.float64)
    k = np.arange(1, errors.size + 1)
    keep = errors > floor
    if np.count_nonzero(keep) < 2:
        raise ValidationError("need at least two errors above the floor to fit a rate")
    slope, _ = np.polyfit(k[keep], np.log(errors[keep]), 1)
    rate = float(np.exp(slope))
    constant = float(np.max(errors[keep] / rate ** k[keep]))
    return GeometricFit(rate, constant, int(np.count_nonzero(keep)))


def terminal_bound(sigma, f_star, cfg):
    """
    (1−σ)·√s·ε / (M2·σ), s a küszöb feletti gradiens elemek száma.

    A határérték az artifact_error-ra vonatkozik.
    """
    count = sparsity_count(f_star, cfg.epsilon)
    return float((1.0 - sigma) * np.sqrt(count) * cfg.epsilon / (cfg.prior_weight * sigma))


def contraction_probe(sigma, model, f_star, cfg):
    """
    ACID futás szintetikus Φ-vel, a megfigyelhető hiba rögzítésével.

    :param sigma: a BREN tartalék (0, 1]; 1 a tökéletes operátor
    :return: AcidHistory, minden rekordban observable_error és artifact_error
    """
    if not 0 < sigma <= 1:
        raise ValidationError(f"sigma must be in (0, 1], got {sigma}")
    f_star = as_image_array(f_star)
    if not np.any(f_star):
        raise ValidationError("contraction probe needs a ground truth with nonzero norm")

    # A korlát a nyers ε-ra vonatkozik
    cfg = replace(cfg, normalize=False)
    op = SyntheticRecon(model, f_star, sigma)
    projector = op.projector
    state = AcidIterator(model.apply(f_star), model, op, cfg)
    history = AcidHistory(initial_residual=float(np.linalg.norm(state.residual())))
    logger.info(f"Contraction probe: sigma={sigma}, lambda={cfg.lambda_}, epsilon={cfg.epsilon}")

    for _ in range(cfg.iterations):
        increment_norm = state.step()
        history.records.append(IterationRecord(
            iteration=state.iteration,
            residual_norm=float(np.linalg.norm(state.residual())),
            increment_norm=increment_norm,
            observable_error=float(np.linalg.norm(projector.observable(state.f - f_star))),
            artifact_error=float(np.linalg.norm(
                projector.pinv(model.apply(state.last_increment) - state.last_residual))),
        ))
    return history
