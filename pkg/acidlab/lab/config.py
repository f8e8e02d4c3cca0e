"""
Kísérleti konfiguráció: lapos `kulcs = érték` szöveg.

Szabályok:
    - `#` után a sor hátralévő része megjegyzés
    - az `ellipse = cx cy ax ay rotation intensity` sor ismételhető
    - a `model.*`, `operator.*` és `artifact` kulcsok a manifestből
      származó tájékoztató sorok, a validálás átugorja őket
"""
import logging
import re
from dataclasses import dataclass, field, fields

from acidlab import settings
from acidlab.errors import ConfigError
from acidlab.lab.phantoms import Ellipse

logger = logging.getLogger("lab_config")

KEY_PATTERN = re.compile(r"[a-z_][a-z0-9_.]*")
REPEATABLE_KEYS = ("ellipse", "artifact")
INFO_PREFIXES = ("model.", "operator.", "artifact", "acidlab_version")

EXPERIMENTS = ("phantom", "forward", "reconstruct", "ablate", "sweep", "attack-net", "attack-acid",
               "contraction", "noise-stability")
MODALITIES = ("fourier", "radon")
OPERATORS = ("automap", "adjoint", "backprojection")
SWEEP_OPERATORS = ("adapt", "retrain", "adjoint")


def _bool(text):
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _floats(text):
    return tuple(float(token) for token in text.replace(",", " ").split())


def _ints(text):
    return tuple(int(token) for token in text.replace(",", " ").split())


def _option(*choices):
    def parse(text):
        if text not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}")
        return text
    return parse


def _entry(default, parse, key=None, **kwargs):
    return field(default=default, metadata={"parse": parse, "key": key}, **kwargs)


@dataclass(frozen=True)
class LabConfig:
    experiment: str = _entry("reconstruct", _option(*EXPERIMENTS))
    seed: int = _entry(settings.DEFAULT_SEED, int)
    size: int = _entry(64, int)
    modality: str = _entry("fourier", _option(*MODALITIES))
    pattern: str = _entry("gaussian2d", _option("gaussian2d", "radial", "full"))
    rate: float = _entry(0.3, float)
    mask_seed: int = _entry(7, int)
    views: int = _entry(40, int)
    full_views: int = _entry(1000, int)

    phantom_count: int = _entry(8, int)
    phantom_seed: int = _entry(0, int)
    ellipses: tuple = _entry((), None, key="ellipse")
    text: str = _entry("", str)
    text_row: int = _entry(0, int)
    text_col: int = _entry(0, int)
    text_intensity: float = _entry(0.6, float)
    text_scale: int = _entry(1, int)

    noise_sigma: float = _entry(0.0, float)
    noise_seed: int = _entry(0, int)
    noise_seeds: tuple = _entry(tuple(range(20)), _ints)

    operator: str = _entry("automap", _option(*OPERATORS))
    operator_seed: int = _entry(0, int)
    hidden: int = _entry(0, int)
    train_pairs: int = _entry(200, int)
    train_epochs: int = _entry(500, int)
    train_step: float = _entry(1.0, float)
    heldout_pairs: int = _entry(10, int)
    operator_blob: str = _entry("", str)

    lambda_: float = _entry(0.76, float, key="lambda")
    epsilon: float = _entry(0.7e-3, float)
    iterations: int = _entry(50, int)
    mu: float = _entry(0.0, float)
    normalize: bool = _entry(True, _bool)
    tolerance: float = _entry(None, float)
    peak: float = _entry(None, float)
    snapshot_every: int = _entry(0, int)
    lipschitz_probe: float = _entry(0.0, float)

    sweep_rates: tuple = _entry((0.1, 0.2, 0.3, 0.4, 0.5), _floats)
    sweep_views: tuple = _entry((10, 20, 30, 50, 60, 75, 100, 150, 300), _ints)
    sweep_operator: str = _entry("adapt", _option(*SWEEP_OPERATORS))

    attack_gamma: float = _entry(0.0, float)
    attack_step: float = _entry(1e-3, float)
    attack_momentum: float = _entry(0.9, float)
    attack_iters: int = _entry(50, int)
    attack_seeds: tuple = _entry(tuple(range(10)), _ints)
    attack_acid_iterations: int = _entry(10, int)
    norm_budget: float = _entry(None, float)

    sigma_values: tuple = _entry((0.2, 0.5, 0.8), _floats)
    contraction_iterations: int = _entry(100, int)

    workers: int = _entry(settings.WORKERS, int)

    def __post_init__(self):
        checks = (
            ("size", self.size >= 2),
            ("rate", 0 < self.rate <= 1),
            ("views", self.views >= 1),
            ("full_views", self.full_views >= self.views),
            ("phantom_count", self.phantom_count >= 0),
            ("noise_sigma", self.noise_sigma >= 0),
            ("hidden", self.hidden >= 0),
            ("train_pairs", self.train_pairs >= 1),
            ("train_epochs", self.train_epochs >= 0),
            ("train_step", self.train_step > 0),
            ("lambda", self.lambda_ > 0),
            ("epsilon", self.epsilon > 0),
            ("iterations", self.iterations >= 1),
            ("mu", self.mu >= 0),
            ("snapshot_every", self.snapshot_every >= 0),
            ("lipschitz_probe", self.lipschitz_probe >= 0),
            ("attack_step", self.attack_step > 0),
            ("attack_momentum", 0 <= self.attack_momentum < 1),
            ("attack_iters", self.attack_iters >= 0),
            ("attack_acid_iterations", self.attack_acid_iterations >= 1),
            ("norm_budget", self.norm_budget is None or self.norm_budget > 0),
            ("sigma_values", all(0 < s <= 1 for s in self.sigma_values)),
            ("workers", self.workers >= 1),
        )
        for key, ok in checks:
            if not ok:
                raise ConfigError(f"invalid value for {key}", key=key)

    def replace(self, **changes):
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return LabConfig(**values)


def _config_fields():
    return {(f.metadata.get("key") or f.name): f for f in fields(LabConfig)}


def parse_lines(text):
    """
    Nyers bejegyzések kinyerése.

    :return: (kulcs, érték, sorszám, oszlop) lista
    :raises ConfigError: hibás sor esetén sorral és oszloppal
    """
    entries = []
    seen = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            column = len(line) - len(line.lstrip()) + 1
            raise ConfigError("expected 'key = value'", line=number, column=column)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip()
        key_column = len(key_part) - len(key_part.lstrip()) + 1
        if not KEY_PATTERN.fullmatch(key):
            raise ConfigError(f"malformed key '{key}'", line=number, column=key_column)
        value = value_part.strip()
        if not value:
            raise ConfigError(f"missing value for '{key}'", line=number, column=len(key_part) + 2)
        if key in seen and key not in REPEATABLE_KEYS:
            raise ConfigError(f"duplicate key '{key}' (first on line {seen[key]})", line=number,
                              column=key_column)
        seen.setdefault(key, number)
        value_column = len(key_part) + 1 + (len(value_part) - len(value_part.lstrip())) + 1
        entries.append((key, value, number, value_column))
    return entries


def _ellipse(value, number, column):
    try:
        numbers = [float(token) for token in value.split()]
    except ValueError:
        raise ConfigError("ellipse needs six numbers", line=number, column=column, key="ellipse")
    if len(numbers) != 6:
        raise ConfigError("ellipse needs six numbers: cx cy ax ay rotation intensity",
                          line=number, column=column, key="ellipse")
    try:
        return Ellipse(*numbers)
    except Exception as e:
        raise ConfigError(str(e), line=number, column=column, key="ellipse")


def config_from_text(text, overrides=None):
    """
    Szöveg -> validált LabConfig.

    :param overrides: kulcs -> érték felülírások (pl. --seed)
    """
    known = _config_fields()
    values = {}
    ellipses = []
    for key, value, number, column in parse_lines(text):
        if key == "ellipse":
            ellipses.append(_ellipse(value, number, column))
            continue
        if key.startswith(INFO_PREFIXES):
            continue
        spec = known.get(key)
        if spec is None:
            raise ConfigError(f"unknown key '{key}'", line=number, column=1, key=key)
        try:
            values[spec.name] = spec.metadata["parse"](value)
        except ValueError as e:
            raise ConfigError(f"cannot parse '{value}': {e}", line=number, column=column, key=key)
    if ellipses:
        values["ellipses"] = tuple(ellipses)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[known[key].name] = value
    return LabConfig(**values)


def load_config(path, overrides=None):
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    config = config_from_text(text, overrides)
    logger.info(f"Loaded config {path}: experiment={config.experiment}")
    return config


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return " ".join(_format(item) for item in value)
    return str(value)


def config_lines(config):
    """A feloldott konfiguráció sorai; visszaolvasva azonos LabConfig-ot adnak."""
    lines = []
    for spec in fields(LabConfig):
        key = spec.metadata.get("key") or spec.name
        value = getattr(config, spec.name)
        if spec.name == "ellipses":
            for e in value:
                lines.append(f"ellipse = {_format((e.cx, e.cy, e.ax, e.ay, e.rotation, e.intensity))}")
            continue
        if value is None or value == "" or value == ():
            continue
        lines.append(f"{key} = {_format(value)}")
    return lines
