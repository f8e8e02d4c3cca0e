from acidlab.lab.config import LabConfig, config_from_text, config_lines, load_config
from acidlab.lab.glyphs import StructuralInsert, insert_structure, render_text, text_insert
from acidlab.lab.manifest import RunManifest
from acidlab.lab.noise import MRI_NOISE_SIGMA, add_noise
from acidlab.lab.phantoms import Ellipse, EllipsePhantomSpec, make_phantom, random_phantom_spec
from acidlab.lab.runner import Experiment, execute, run_experiment

__all__ = [
    "LabConfig", "config_from_text", "config_lines", "load_config",
    "StructuralInsert", "insert_structure", "render_text", "text_insert",
    "RunManifest", "MRI_NOISE_SIGMA", "add_noise",
    "Ellipse", "EllipsePhantomSpec", "make_phantom", "random_phantom_spec",
    "Experiment", "execute", "run_experiment",
]
