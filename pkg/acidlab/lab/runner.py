"""
Kísérlet futtató: a konfigurációból felépíti a fantomot, a mérési modellt
és az operátort, lefuttatja a protokollt, és megírja a manifestet.
"""
import logging
import os

import numpy as np

from acidlab import settings
from acidlab.engine.acid import AcidConfig
from acidlab.forward.fourier import FourierModel
from acidlab.forward.masks import make_mask
from acidlab.forward.radon import RadonModel, select_views
from acidlab.grid.images import as_image_array
from acidlab.lab.config import load_config
from acidlab.lab.glyphs import insert_structure, text_insert
from acidlab.lab.manifest import RunManifest
from acidlab.lab.noise import add_noise
from acidlab.lab.phantoms import EllipsePhantomSpec, make_phantom, random_phantom_spec
from acidlab.lab.protocols import PROTOCOLS
from acidlab.lab.tables import write_rows
from acidlab.recon.automap import build_automap_mini
from acidlab.recon.diagnostics import bren_ratio
from acidlab.recon.operators import build_adjoint_recon
from acidlab.recon.serialization import load_operator, save_operator
from acidlab.recon.training import train_automap_mini

logger = logging.getLogger("lab_runner")

# A tanító fantomok magjai a konfigurált fantom magjától elkülönülnek
TRAINING_SEED_BASE = 1_000_000
HELDOUT_SEED_BASE = 2_000_000


class Experiment:
    """
    Egy futás építőkövei és kimeneti könyvtára.

    :param config: LabConfig
    :param out_dir: a futás könyvtára; minden kimenet ide kerül
    """

    def __init__(self, config, out_dir):
        self.config = config
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)
        self.manifest = RunManifest(config, out_dir)
        self._phantom = None
        self._operator = None
        self._model = None

    # Fantom és mérés

    def phantom(self):
        if self._phantom is None:
            cfg = self.config
            if cfg.ellipses:
                spec = EllipsePhantomSpec(cfg.ellipses, cfg.phantom_seed)
            else:
                spec = random_phantom_spec(cfg.phantom_count, cfg.phantom_seed)
            image = make_phantom(spec, cfg.size)
            if cfg.text:
                image = insert_structure(image, text_insert(cfg.text, (cfg.text_row, cfg.text_col),
                                                            cfg.text_intensity, cfg.text_scale))
            self._phantom = image
        return self._phantom

    @property
    def peak(self):
        if self.config.peak is not None:
            return self.config.peak
        f = self.phantom()
        return float(f.max() - f.min()) or 1.0

    def build_model(self, rate=None, views=None):
        cfg = self.config
        if cfg.modality == "fourier":
            return FourierModel(make_mask(cfg.pattern, rate or cfg.rate, cfg.size, cfg.mask_seed))
        views = views or cfg.views
        return RadonModel(select_views(max(cfg.full_views, views), views, cfg.size))

    def model(self):
        if self._model is None:
            self._model = self.build_model()
            self.manifest.model = self._model.descriptor()
        return self._model

    def measure(self, model, image=None, noise_seed=None):
        """Mérés A f-ből, a konfigurált zajjal."""
        image = self.phantom() if image is None else as_image_array(image)
        seed = self.config.noise_seed if noise_seed is None else noise_seed
        return add_noise(model.apply(image), self.config.noise_sigma, seed)

    # Operátorok

    def training_images(self, count, base):
        cfg = self.config
        return [make_phantom(random_phantom_spec(max(cfg.phantom_count, 1), base + cfg.seed * 10_000 + i), cfg.size)
                for i in range(count)]

    def build_operator(self, model, kind=None, use_blob=True):
        cfg = self.config
        kind = kind or cfg.operator
        if kind in ("adjoint", "backprojection"):
            return build_adjoint_recon(model, filtered=kind == "adjoint")

        blob = cfg.operator_blob if use_blob else ""
        if blob and os.path.exists(blob):
            op = load_operator(blob, model)
        else:
            images = self.training_images(cfg.train_pairs, TRAINING_SEED_BASE)
            pairs = [(model.apply(f), f) for f in images]
            largest = max(np.linalg.norm(p) for p, _ in pairs)
            op = build_automap_mini(model, cfg.hidden or None, cfg.operator_seed, gain=1.0 / largest)
            op = train_automap_mini(op, pairs, cfg.train_epochs, cfg.train_step)
            if blob:
                os.makedirs(os.path.dirname(os.path.abspath(blob)), exist_ok=True)
                save_operator(blob, op)
        return op

    def operator(self):
        if self._operator is None:
            model = self.model()
            self._operator = self.build_operator(model)
            self.manifest.operator = self._operator.descriptor()
            if self._operator.trainable:
                self.heldout_bren(self._operator)
        return self._operator

    def heldout_bren(self, op):
        """BREN arány a tanításból kihagyott fantomokon."""
        ratios = [bren_ratio(op, op.model, f).ratio
                  for f in self.training_images(self.config.heldout_pairs, HELDOUT_SEED_BASE)]
        write_rows(self.manifest.artifact("operator_bren.csv"), ["index", "ratio"], enumerate(ratios))
        if ratios:
            logger.info(f"Held-out BREN ratio: mean {np.mean(ratios):.4f} over {len(ratios)} phantoms")
        return ratios

    def acid_config(self, iterations=None):
        cfg = self.config
        return AcidConfig(
            lambda_=cfg.lambda_,
            epsilon=cfg.epsilon,
            iterations=iterations or cfg.iterations,
            normalize=cfg.normalize,
            mu=cfg.mu,
            tolerance=cfg.tolerance,
        )


def execute(config, out_dir=None):
    """
    Protokoll futtatása egy kész LabConfig-gal.

    Hiba esetén is megírjuk a manifestet az addig elkészült kimenetekkel;
    a kivétel `manifest` attribútumot kap.
    """
    out_dir = out_dir or os.path.join(settings.OUT_ROOT, config.experiment)
    experiment = Experiment(config, out_dir)
    logger.info(f"Starting experiment {config.experiment} in {out_dir}")
    try:
        PROTOCOLS[config.experiment](experiment)
    except Exception as e:
        logger.error(f"Experiment {config.experiment} failed: {e}")
        e.manifest = experiment.manifest
        raise
    finally:
        experiment.manifest.write()
    logger.info(f"Experiment {config.experiment} finished with {len(experiment.manifest.artifacts)} artifacts")
    return experiment.manifest


def run_experiment(config_path, out_dir=None, seed=None, experiment=None):
    """
    Kísérlet futtatása konfigurációs fájlból (vagy korábbi manifestből).

    :param seed: a globális mag felülírása
    :param experiment: a protokoll felülírása (CLI alparancs)
    """
    config = load_config(config_path, overrides={"seed": seed, "experiment": experiment})
    return execute(config, out_dir)
