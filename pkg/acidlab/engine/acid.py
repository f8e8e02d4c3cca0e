"""
Az ACID meta-iteráció.

    p(k+1) = λ (p0 − A f(k)) / (1 + λ + μ)
    f(k+1) = sparsify(f(k) + ((1 + μ)/λ) Φ(p(k+1)), ε)

f(0) = sparsify(Φ(p0), ε). Normalizálás esetén a reziduum hívásokat az
operátor tanító tartományára skálázzuk, és a ritkító lépés ε-ját a bemeneti
kép dinamikatartományával szorozzuk (ez egyenértékű a kép [0, 1]-re
normálásával és visszaalakításával).
"""
import csv
import logging
import os
from dataclasses import dataclass, field, replace

import numpy as np

from acidlab.errors import DivergedError, ShapeError, ValidationError
from acidlab.grid.images import as_image_array, as_measurement_array, write_f64grid
from acidlab.grid.metrics import SSIM_WINDOW, psnr, ssim
from acidlab.recon.operators import AdjointRecon, ReconOperator
from acidlab.sparsity.threshold import sparsify

logger = logging.getLogger("acid_engine")


@dataclass(frozen=True)
class AcidConfig:
    lambda_: float
    epsilon: float
    iterations: int
    normalize: bool = False
    mu: float = 0.0
    sparsify: bool = True
    tolerance: float = None

    def __post_init__(self):
        if not self.lambda_ > 0:
            raise ValidationError(f"lambda must be positive, got {self.lambda_}")
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        if self.iterations < 1:
            raise ValidationError(f"iterations must be at least 1, got {self.iterations}")
        if self.mu < 0:
            raise ValidationError(f"mu must be non-negative, got {self.mu}")

    @property
    def residual_weight(self):
        """M1 = λ/(1+λ+μ)."""
        return self.lambda_ / (1.0 + self.lambda_ + self.mu)

    @property
    def prior_weight(self):
        """M2 = (1+μ)/λ."""
        return (1.0 + self.mu) / self.lambda_

    @property
    def contraction_weight(self):
        """M = M1·M2 = (1+μ)/(1+λ+μ)."""
        return self.residual_weight * self.prior_weight


@dataclass(frozen=True)
class NormalizationRecord:
    """Lineáris leképezés [input_min, input_max] -> [target_min, target_max]."""
    input_min: float
    input_max: float
    target_min: float
    target_max: float

    @property
    def gain(self):
        return (self.target_max - self.target_min) / (self.input_max - self.input_min)

    def normalize(self, x):
        return self.target_min + (np.asarray(x) - self.input_min) * self.gain

    def denormalize(self, y):
        return self.input_min + (np.asarray(y) - self.target_min) / self.gain


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual_norm: float
    increment_norm: float
    psnr: float = None
    ssim: float = None
    lipschitz_ratio: float = None
    observable_error: float = None
    artifact_error: float = None


@dataclass
class AcidHistory:
    initial_residual: float = 0.0
    records: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return [getattr(record, name) for record in self.records]

    def to_csv(self, path):
        """Oszlopok: iter,residual_norm,psnr,ssim (hiányzó metrika üres mező)."""
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["iter", "residual_norm", "psnr", "ssim"])
            for record in self.records:
                writer.writerow([record.iteration, repr(record.residual_norm),
                                 _cell(record.psnr), _cell(record.ssim)])
        return path

    def save_snapshots(self, directory):
        paths = []
        for k, image in sorted(self.snapshots.items()):
            paths.append(write_f64grid(os.path.join(directory, f"iter_{k}.f64"), image))
        return paths


def _cell(value):
    return "" if value is None else repr(value)


class AcidIterator:
    """
    Egyetlen ACID futás állapotgépe.

    Ha keep_tape igaz, minden köztes értéket megtart a visszaterjesztéshez:
    a ritkítás előtti képeket, az effektív ε értékeket, a reziduumokat és a
    normalizálási skálákat.
    """

    def __init__(self, p0, model, op, cfg, keep_tape=False):
        self.p0 = as_measurement_array(p0)
        if self.p0.size != model.real_rows:
            raise ShapeError(f"p0 has {self.p0.size} reals, model expects {model.real_rows}")
        if op.model.shape != model.shape or op.model.real_rows != model.real_rows:
            raise ShapeError("reconstruction operator belongs to a different model")
        self.model = model
        self.op = op
        self.cfg = cfg
        self.keep_tape = keep_tape
        self.iteration = 0
        self.tape_inputs, self.tape_epsilons, self.tape_residuals, self.tape_scales = [], [], [], []
        self._zero_response = None
        self.last_residual = self.last_increment = None

        image = op.forward(self.p0)
        self.f = self._sparsify(image)
        self._check(self.f)

    def _residual_scale(self, p):
        # Szimmetrikus min-max leképezés a tanító tartományra
        if not self.cfg.normalize or self.op.input_scale is None:
            return None
        peak = float(np.max(np.abs(p)))
        if peak == 0.0:
            return None
        return NormalizationRecord(-peak, peak, -self.op.input_scale, self.op.input_scale)

    def residual_call(self, p):
        """
        Φ a reziduumon; normalizálásnál (Φ(a·p) − Φ(0))/a.

        :return: (kép, a) ahol a az alkalmazott skála (1, ha nincs normalizálás)
        """
        record = self._residual_scale(p)
        if record is None:
            if self.cfg.normalize and self.op.input_scale is not None:
                return np.zeros(self.model.shape), 1.0
            return self.op.forward(p), 1.0
        if self._zero_response is None:
            self._zero_response = self.op.forward(np.zeros(self.model.real_rows))
        out = (self.op.forward(record.normalize(p)) - self._zero_response) / record.gain
        return out, record.gain

    def effective_epsilon(self, image):
        if not self.cfg.normalize:
            return self.cfg.epsilon
        spread = float(np.max(image) - np.min(image))
        return self.cfg.epsilon * spread if spread > 0 else self.cfg.epsilon

    def _sparsify(self, image):
        epsilon = self.effective_epsilon(image)
        if self.keep_tape:
            self.tape_inputs.append(image)
            self.tape_epsilons.append(epsilon)
        if not self.cfg.sparsify:
            return image
        return sparsify(image, epsilon)

    def _check(self, image):
        if not np.all(np.isfinite(image)):
            logger.error(f"ACID diverged at iteration {self.iteration}")
            raise DivergedError(self.iteration)

    def residual(self, f=None):
        return self.p0 - self.model.apply(self.f if f is None else f)

    def step(self):
        """Egy ACID iteráció; visszaadja a reziduum (p(k+1)) normáját."""
        p = self.cfg.residual_weight * self.residual()
        increment, scale = self.residual_call(p)
        if self.keep_tape:
            self.tape_residuals.append(p)
            self.tape_scales.append(scale)
        self.iteration += 1
        self._check(increment)
        self.last_residual, self.last_increment = p, increment
        self.f = self._sparsify(self.f + self.cfg.prior_weight * increment)
        self._check(self.f)
        return float(np.linalg.norm(p))


def acid_run(p0, model, op, cfg, ground_truth=None, *, peak=None, snapshot_every=0, probe=None):
    """
    ACID futtatása.

    :param ground_truth: ha adott, PSNR és SSIM kerül a történetbe
    :param peak: PSNR/SSIM csúcsérték, alapértelmezetten a ground truth tartománya
    :param snapshot_every: ennyi iterációnként képet mentünk a történetbe (0: soha)
    :param probe: képtartománybeli perturbáció a Lipschitz arány követéséhez
    :return: (f(K), AcidHistory)
    """
    state = AcidIterator(p0, model, op, cfg)
    twin = None
    if probe is not None:
        probe = as_image_array(probe)
        probe_norm = float(np.linalg.norm(probe))
        if probe_norm == 0.0:
            raise ValidationError("Lipschitz probe must have nonzero norm")
        twin = AcidIterator(state.p0 + model.apply(probe), model, op, cfg)

    truth = None if ground_truth is None else as_image_array(ground_truth)
    if truth is not None and peak is None:
        peak = float(truth.max() - truth.min()) or 1.0
    with_ssim = truth is not None and min(truth.shape) >= SSIM_WINDOW

    history = AcidHistory(initial_residual=float(np.linalg.norm(state.residual())))
    logger.info(f"ACID run: {op.kind} operator, lambda={cfg.lambda_}, epsilon={cfg.epsilon}, "
                f"K={cfg.iterations}, mu={cfg.mu}, normalize={cfg.normalize}")

    for _ in range(cfg.iterations):
        increment_norm = state.step()
        residual_norm = float(np.linalg.norm(state.residual()))
        ratio = None
        if twin is not None:
            twin.step()
            ratio = float(np.linalg.norm(twin.f - state.f) / probe_norm)
        record = IterationRecord(
            iteration=state.iteration,
            residual_norm=residual_norm,
            increment_norm=increment_norm,
            psnr=psnr(truth, state.f, peak) if truth is not None else None,
            ssim=ssim(truth, state.f, peak) if with_ssim else None,
            lipschitz_ratio=ratio,
        )
        history.records.append(record)
        logger.debug(f"Iteration {state.iteration}: residual {residual_norm:.6g}")
        if snapshot_every and state.iteration % snapshot_every == 0:
            history.snapshots[state.iteration] = state.f.copy()
        if cfg.tolerance is not None and residual_norm < cfg.tolerance:
            logger.info(f"Residual below tolerance after {state.iteration} iterations")
            break

    return state.f, history


ABLATIONS = ("NI", "NDL", "NCS")


def acid_ablate(variant, p0, model, op, cfg, ground_truth=None, **kwargs):
    """
    Ablációs változatok.

    NI: K = 1; NDL: AdjointRecon a mélytanult operátor helyett;
    NCS: ritkító lépés nélkül.
    """
    if variant == "NI":
        cfg = replace(cfg, iterations=1)
    elif variant == "NDL":
        op = AdjointRecon(model)
    elif variant == "NCS":
        cfg = replace(cfg, sparsify=False)
    else:
        raise ValidationError(f"unknown ablation '{variant}', expected one of {ABLATIONS}")
    logger.info(f"Ablation {variant}")
    return acid_run(p0, model, op, cfg, ground_truth, **kwargs)


class AcidRecon(ReconOperator):
    """A teljes ACID folyamat rekonstrukciós operátorként (nem differenciálható)."""
    kind = "acid"

    def __init__(self, op, cfg):
        super().__init__(op.model)
        self.op = op
        self.cfg = cfg

    def _forward(self, p):
        image, _ = acid_run(p, self.model, self.op, self.cfg)
        return image

    def descriptor(self):
        return {**self.op.descriptor(), "acid": 1}
