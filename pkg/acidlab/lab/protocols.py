"""
A kísérleti protokollok.

Minden protokoll egy Experiment-et kap, a kimeneteit a manifesten keresztül
nevezi el, és a független példányokat (seedek, sweep pontok) szálkészleten
futtatja; az eredmények sorrendje a bemeneté.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from acidlab.adversary.acid_backprop import acid_forward, attack_acid
from acidlab.adversary.attacks import AttackConfig, attack_network, random_perturbation
from acidlab.engine.acid import ABLATIONS, AcidRecon, acid_ablate, acid_run
from acidlab.engine.contraction import contraction_probe, fit_geometric_rate, terminal_bound
from acidlab.engine.sweep import data_sweep
from acidlab.forward.masks import save_mask
from acidlab.grid.images import write_f64grid, write_pgm
from acidlab.grid.metrics import SSIM_WINDOW, l2_norm, psnr, ssim
from acidlab.lab.noise import MRI_NOISE_SIGMA, add_noise
from acidlab.lab.tables import write_rows
from acidlab.recon.operators import AdjointRecon, ResampledRecon

logger = logging.getLogger("lab_runner")


def _parallel(experiment, function, items):
    # A megosztott építőköveket a szálak indítása előtt felépítjük
    experiment.phantom()
    experiment.model()
    with ThreadPoolExecutor(max_workers=experiment.config.workers) as executor:
        return list(executor.map(function, items))


def _quality(experiment, image):
    truth = experiment.phantom()
    peak = experiment.peak
    value = ssim(truth, image, peak) if min(truth.shape) >= SSIM_WINDOW else None
    return psnr(truth, image, peak), value


def _write_image(experiment, name, image, window=None):
    write_f64grid(experiment.manifest.artifact(f"{name}.f64"), image)
    write_pgm(experiment.manifest.artifact(f"{name}.pgm"), image, window)


def run_phantom(experiment):
    _write_image(experiment, "phantom", experiment.phantom())


def run_forward(experiment):
    model = experiment.model()
    p0 = experiment.measure(model)
    _write_image(experiment, "phantom", experiment.phantom())
    write_rows(experiment.manifest.artifact("measurement.csv"), ["index", "value"], enumerate(p0.tolist()))
    if model.kind == "fourier":
        save_mask(experiment.manifest.artifact("mask.f64"), model.mask)
    elif model.geometry.num_angles >= 2:
        write_pgm(experiment.manifest.artifact("sinogram.pgm"), model.sinogram(p0))


def run_reconstruct(experiment):
    cfg = experiment.config
    truth = experiment.phantom()
    model = experiment.model()
    op = experiment.operator()
    p0 = experiment.measure(model)

    probe = None
    if cfg.lipschitz_probe > 0:
        probe = random_perturbation(truth.shape, cfg.lipschitz_probe, cfg.seed)
    image, history = acid_run(p0, model, op, experiment.acid_config(), truth,
                              peak=experiment.peak, snapshot_every=cfg.snapshot_every, probe=probe)

    window = (float(truth.min()), float(truth.max()))
    _write_image(experiment, "phantom", truth, window)
    _write_image(experiment, "final", image, window)
    history.to_csv(experiment.manifest.artifact("history.csv"))
    for k, snapshot in sorted(history.snapshots.items()):
        write_f64grid(experiment.manifest.artifact(f"iter_{k}.f64"), snapshot)
    if probe is not None:
        write_rows(experiment.manifest.artifact("lipschitz.csv"), ["iter", "lipschitz_ratio"],
                   zip(history.column("iteration"), history.column("lipschitz_ratio")))

    rows = []
    for method, estimate in (("adjoint", AdjointRecon(model).forward(p0)), (op.kind, op.forward(p0)),
                             ("acid", image)):
        rows.append((method, *_quality(experiment, estimate), l2_norm(estimate - truth)))
    write_rows(experiment.manifest.artifact("metrics.csv"), ["method", "psnr", "ssim", "l2_error"], rows)
    logger.info(f"Reconstruction PSNR: adjoint {rows[0][1]:.2f} dB, {op.kind} {rows[1][1]:.2f} dB, "
                f"ACID {rows[2][1]:.2f} dB")


def run_ablate(experiment):
    model = experiment.model()
    op = experiment.operator()
    acid_cfg = experiment.acid_config()

    def one_seed(seed):
        p0 = experiment.measure(model, noise_seed=seed)
        image, _ = acid_run(p0, model, op, acid_cfg)
        rows = [(seed, "ACID", *_quality(experiment, image))]
        for variant in ABLATIONS:
            image, _ = acid_ablate(variant, p0, model, op, acid_cfg)
            rows.append((seed, variant, *_quality(experiment, image)))
        return rows

    results = _parallel(experiment, one_seed, experiment.config.noise_seeds)
    write_rows(experiment.manifest.artifact("ablation.csv"), ["seed", "variant", "psnr", "ssim"],
               [row for rows in results for row in rows])


def run_sweep(experiment):
    cfg = experiment.config
    if cfg.modality == "fourier":
        points = sorted(cfg.sweep_rates)

        def model_factory(point):
            return experiment.build_model(rate=point)
    else:
        points = sorted(cfg.sweep_views)

        def model_factory(point):
            return experiment.build_model(views=point)

    if cfg.sweep_operator == "adjoint" or cfg.operator != "automap":
        def operator_factory(model):
            return experiment.build_operator(model, "adjoint" if cfg.sweep_operator == "adjoint" else None)
    elif cfg.sweep_operator == "adapt":
        base = experiment.operator()

        def operator_factory(model):
            return ResampledRecon(base, model)
    else:
        def operator_factory(model):
            return experiment.build_operator(model, use_blob=False)

    rows = data_sweep(points, model_factory, operator_factory, experiment.phantom(), experiment.acid_config(),
                      measure=lambda model, point: experiment.measure(model), peak=experiment.peak,
                      workers=cfg.workers)
    write_rows(experiment.manifest.artifact("sweep.csv"), ["point", "psnr", "ssim"],
               [(row.point, row.psnr, row.ssim) for row in rows])


def _attack_config(cfg, norm_budget=None):
    return AttackConfig(
        gamma=cfg.attack_gamma,
        step=cfg.attack_step,
        momentum=cfg.attack_momentum,
        max_iters=cfg.attack_iters,
        norm_budget=norm_budget if norm_budget is not None else cfg.norm_budget,
    )


def _degradation(experiment, reconstruct, model, e):
    """PSNR csökkenés: tiszta minus perturbált bemenet."""
    clean = reconstruct(experiment.measure(model))
    attacked = reconstruct(experiment.measure(model, image=experiment.phantom() + e))
    return _quality(experiment, clean)[0] - _quality(experiment, attacked)[0]


def _network_attack(experiment, seed):
    model = experiment.model()
    op = experiment.operator()
    acid = AcidRecon(op, experiment.acid_config())
    result = attack_network(op, model, experiment.phantom(), _attack_config(experiment.config), seed)
    delta_net = _degradation(experiment, op.forward, model, result.perturbation)
    delta_acid = _degradation(experiment, acid.forward, model, result.perturbation)
    return result, delta_net, delta_acid


def run_attack_net(experiment):
    experiment.operator()

    def one_seed(seed):
        result, delta_net, delta_acid = _network_attack(experiment, seed)
        write_f64grid(experiment.manifest.artifact(f"perturbation_{seed}.f64"), result.perturbation)
        result.to_csv(experiment.manifest.artifact(f"trace_{seed}.csv"))
        return seed, result.perturbation_norm, result.output_distortion, delta_net, delta_acid

    rows = _parallel(experiment, one_seed, experiment.config.attack_seeds)
    write_rows(experiment.manifest.artifact("attack_net.csv"),
               ["seed", "norm", "distortion", "delta_net", "delta_acid"], rows)
    logger.info(f"Median degradation: network {np.median([r[3] for r in rows]):.3f} dB, "
                f"ACID {np.median([r[4] for r in rows]):.3f} dB")


def run_attack_acid(experiment):
    cfg = experiment.config
    model = experiment.model()
    op = experiment.operator()
    attack_cfg = experiment.acid_config(cfg.attack_acid_iterations)

    def reconstruct(p):
        return acid_forward(p, model, op, attack_cfg).f

    def one_seed(seed):
        delta_net = None
        budget = cfg.norm_budget
        if budget is None:
            network, delta_net, _ = _network_attack(experiment, seed)
            budget = network.perturbation_norm
        result = attack_acid(op, model, experiment.phantom(), attack_cfg, _attack_config(cfg, budget), seed)
        write_f64grid(experiment.manifest.artifact(f"acid_perturbation_{seed}.f64"), result.perturbation)
        result.to_csv(experiment.manifest.artifact(f"acid_trace_{seed}.csv"))
        delta_acid = _degradation(experiment, reconstruct, model, result.perturbation)
        return seed, budget, result.perturbation_norm, result.output_distortion, delta_net, delta_acid

    rows = _parallel(experiment, one_seed, cfg.attack_seeds)
    write_rows(experiment.manifest.artifact("attack_acid.csv"),
               ["seed", "budget", "norm", "distortion", "delta_net", "delta_acid"], rows)


def run_contraction(experiment):
    cfg = experiment.config
    model = experiment.model()
    truth = experiment.phantom()
    acid_cfg = experiment.acid_config(cfg.contraction_iterations)

    def one_sigma(sigma):
        history = contraction_probe(sigma, model, truth, acid_cfg)
        errors = history.column("observable_error")
        write_rows(experiment.manifest.artifact(f"contraction_{sigma!r}.csv"),
                   ["iter", "residual_norm", "observable_error", "artifact_error"],
                   zip(history.column("iteration"), history.column("residual_norm"), errors,
                       history.column("artifact_error")))
        floor = 10.0 * errors[-1]
        fit = fit_geometric_rate(errors, floor) if np.count_nonzero(np.asarray(errors) > floor) >= 2 else None
        predicted = 1.0 - acid_cfg.contraction_weight * sigma
        return (sigma, fit.rate if fit else None, predicted, fit.constant if fit else None, errors[-1],
                history.records[-1].artifact_error, terminal_bound(sigma, truth, acid_cfg))

    rows = _parallel(experiment, one_sigma, cfg.sigma_values)
    write_rows(experiment.manifest.artifact("contraction.csv"),
               ["sigma", "rate", "predicted_rate", "envelope", "terminal_error", "terminal_artifact", "bound"], rows)


def run_noise_stability(experiment):
    cfg = experiment.config
    model = experiment.model()
    op = experiment.operator()
    acid = AcidRecon(op, experiment.acid_config())
    sigma = cfg.noise_sigma or MRI_NOISE_SIGMA
    clean = model.apply(experiment.phantom())
    reference = {"operator": op.forward(clean), "acid": acid.forward(clean)}

    def one_seed(seed):
        noise = add_noise(np.zeros_like(clean), sigma, seed)
        size = float(np.linalg.norm(noise))
        return (seed,
                float(np.linalg.norm(op.forward(clean + noise) - reference["operator"])) / size,
                float(np.linalg.norm(acid.forward(clean + noise) - reference["acid"])) / size)

    rows = _parallel(experiment, one_seed, cfg.noise_seeds)
    write_rows(experiment.manifest.artifact("noise_stability.csv"), ["seed", "operator_ratio", "acid_ratio"], rows)

    ratios = np.array([row[1:] for row in rows])
    edges = np.histogram_bin_edges(ratios, bins=10)
    operator_counts, _ = np.histogram(ratios[:, 0], bins=edges)
    acid_counts, _ = np.histogram(ratios[:, 1], bins=edges)
    write_rows(experiment.manifest.artifact("noise_histogram.csv"),
               ["bin_low", "bin_high", "operator_count", "acid_count"],
               [(float(lo), float(hi), int(a), int(b))
                for lo, hi, a, b in zip(edges[:-1], edges[1:], operator_counts, acid_counts)])


PROTOCOLS = {
    "phantom": run_phantom,
    "forward": run_forward,
    "reconstruct": run_reconstruct,
    "ablate": run_ablate,
    "sweep": run_sweep,
    "attack-net": run_attack_net,
    "attack-acid": run_attack_acid,
    "contraction": run_contraction,
    "noise-stability": run_noise_stability,
}
