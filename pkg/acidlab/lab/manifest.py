"""
Futási manifest: a feloldott konfiguráció plusz leírók és a kimeneti fájlok.

A manifest maga is érvényes konfiguráció, így `run_experiment(manifest)`
újrafuttatja a kísérletet.
"""
import logging
import os
from dataclasses import dataclass, field

from acidlab import __version__
from acidlab.lab.config import config_lines

logger = logging.getLogger("lab_runner")

MANIFEST_NAME = "manifest.txt"


@dataclass
class RunManifest:
    config: object
    out_dir: str
    model: dict = field(default_factory=dict)
    operator: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    path: str = None

    @property
    def experiment(self):
        return self.config.experiment

    @property
    def seeds(self):
        cfg = self.config
        return {
            "seed": cfg.seed,
            "mask_seed": cfg.mask_seed,
            "phantom_seed": cfg.phantom_seed,
            "noise_seed": cfg.noise_seed,
            "operator_seed": cfg.operator_seed,
        }

    def artifact(self, name):
        """Kimeneti útvonal a futási könyvtárban; a nevet rögzítjük."""
        if name not in self.artifacts:
            self.artifacts.append(name)
        return os.path.join(self.out_dir, name)

    def lines(self):
        lines = ["# acidlab run manifest", f"acidlab_version = {__version__}"]
        lines += config_lines(self.config)
        lines += [f"model.{key} = {value}" for key, value in self.model.items()]
        lines += [f"operator.{key} = {value}" for key, value in self.operator.items()]
        lines += [f"artifact = {name}" for name in sorted(self.artifacts)]
        return lines

    def write(self):
        self.path = self.artifact(MANIFEST_NAME)
        with open(self.path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(self.lines()) + "\n")
        logger.info(f"Manifest written to {self.path} ({len(self.artifacts)} artifacts)")
        return self.path
