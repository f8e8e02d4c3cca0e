import os

import numpy as np
import pytest

from acidlab.errors import ConfigError, ValidationError
from acidlab.grid.images import Image, Measurement, read_f64grid, write_f64grid
from acidlab.lab.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from acidlab.lab.config import LabConfig, config_from_text, config_lines, load_config
from acidlab.lab.glyphs import StructuralInsert, insert_structure, render_text, text_insert
from acidlab.lab.manifest import MANIFEST_NAME, RunManifest
from acidlab.lab.noise import add_noise
from acidlab.lab.phantoms import Ellipse, EllipsePhantomSpec, make_phantom, random_phantom_spec
from acidlab.lab.runner import execute, run_experiment
from acidlab.lab.tables import write_rows

SMALL_RUN = """
# kis rekonstrukció
size = 16
rate = 0.4
operator = adjoint
iterations = 3
epsilon = 1e-3
noise_sigma = 0.01
noise_seed = 5
phantom_count = 4
phantom_seed = 3
workers = 2
"""


def write_config(path, text):
    path.write_text(text)
    return str(path)


def small_config(**changes):
    return config_from_text(SMALL_RUN).replace(**changes)


# Config

@pytest.mark.parametrize("text, line, column", [
    ("size = 16\nrate 0.3\n", 2, 1),
    ("size = 16\n  9size = 3\n", 2, 3),
    ("size =   \n", 1, 7),
    ("size = 16\nsize = 32\n", 2, 1),
])
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ConfigError) as caught:
        config_from_text(text)
    assert (caught.value.line, caught.value.column) == (line, column)


def test_unknown_key():
    with pytest.raises(ConfigError) as caught:
        config_from_text("size = 16\nsparsity = 3\n")
    assert caught.value.key == "sparsity"
    assert caught.value.line == 2


def test_unparsable_value_reports_key():
    with pytest.raises(ConfigError) as caught:
        config_from_text("iterations = many")
    assert caught.value.key == "iterations"
    assert caught.value.column == 14


@pytest.mark.parametrize("text, key", [("rate = 0", "rate"), ("lambda = -1", "lambda"),
                                       ("views = 50\nfull_views = 10", "full_views"),
                                       ("sigma_values = 0.5 1.5", "sigma_values")])
def test_validation_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as caught:
        config_from_text(text)
    assert caught.value.key == key


def test_comments_defaults_and_lambda_key():
    config = config_from_text("lambda = 0.5  # lépés\n\n# csak megjegyzés\nnormalize = off\n")
    assert config.lambda_ == 0.5
    assert config.normalize is False
    assert config.size == 64
    assert config.tolerance is None


def test_repeated_ellipse_lines():
    config = config_from_text("ellipse = 0.5 0.5 0.4 0.3 0 0.4\nellipse = 0.4 0.5 0.1 0.1 0.2 0.2\n")
    assert config.ellipses == (Ellipse(0.5, 0.5, 0.4, 0.3, 0.0, 0.4), Ellipse(0.4, 0.5, 0.1, 0.1, 0.2, 0.2))
    with pytest.raises(ConfigError) as caught:
        config_from_text("ellipse = 0.5 0.5 0.4\n")
    assert caught.value.key == "ellipse"


def test_overrides_win_over_text():
    config = config_from_text("seed = 3\nexperiment = phantom\n", {"seed": 9, "experiment": None})
    assert config.seed == 9
    assert config.experiment == "phantom"


def test_config_lines_round_trip():
    config = LabConfig(size=32, rate=0.25, text="AB", tolerance=1e-6, peak=1.0, sweep_rates=(0.1, 0.3),
                       ellipses=(Ellipse(0.5, 0.5, 0.3, 0.2, 0.1, 0.7),), normalize=False)
    assert config_from_text("\n".join(config_lines(config))) == config


# Phantoms

def test_empty_phantom_is_zero():
    np.testing.assert_array_equal(make_phantom(random_phantom_spec(0, 4), 8), 0.0)


def test_full_grid_ellipse_gives_constant():
    spec = EllipsePhantomSpec((Ellipse(0.5, 0.5, 1.0, 1.0, 0.0, 0.3),))
    np.testing.assert_allclose(make_phantom(spec, 8), 0.3, atol=1e-15)


def test_random_phantom_is_deterministic():
    a = make_phantom(random_phantom_spec(6, 11), 16)
    np.testing.assert_array_equal(a, make_phantom(random_phantom_spec(6, 11), 16))
    assert not np.array_equal(a, make_phantom(random_phantom_spec(6, 12), 16))
    assert a.min() >= 0


def test_bad_ellipse_axes():
    with pytest.raises(ValidationError):
        Ellipse(0.5, 0.5, 0.0, 0.1, 0.0, 1.0)
    with pytest.raises(ValidationError):
        random_phantom_spec(-1, 0)


# Structural inserts

def test_render_text():
    bitmap = render_text("HI")
    assert bitmap.shape == (7, 11)
    assert not bitmap[:, 5].any()
    assert render_text("hi", scale=2).shape == (14, 22)
    assert render_text("").shape == (0, 0)
    with pytest.raises(ValidationError):
        render_text("~")


def test_empty_glyph_leaves_image_unchanged(phantom_16):
    out = insert_structure(phantom_16, StructuralInsert(np.zeros((0, 0), dtype=bool), (3, 3), 1.0))
    np.testing.assert_array_equal(out, phantom_16)


def test_full_grid_glyph_gives_constant(phantom_8):
    out = insert_structure(phantom_8, StructuralInsert(np.ones((8, 8), dtype=bool), (0, 0), 0.9))
    np.testing.assert_array_equal(out, 0.9)


def test_insert_changes_exactly_the_glyph_pixels(phantom_16):
    insert = text_insert("A", (4, 5), 2.0)
    out = insert_structure(phantom_16, insert)
    assert np.count_nonzero(out != phantom_16) == np.count_nonzero(insert.glyph)
    np.testing.assert_array_equal(out[4:11, 5:10][insert.glyph], 2.0)


def test_insert_must_fit(phantom_16):
    with pytest.raises(ValidationError):
        insert_structure(phantom_16, text_insert("AB", (0, 6), 1.0))
    with pytest.raises(ValidationError):
        insert_structure(phantom_16, text_insert("A", (-1, 0), 1.0))


# Noise

def test_zero_noise_is_a_copy(rng):
    values = rng.standard_normal(10)
    noisy = add_noise(values, 0.0, 1)
    np.testing.assert_array_equal(noisy, values)
    assert noisy is not values


def test_noise_statistics_and_seeding():
    noisy = add_noise(np.zeros(256), 0.1, 42)
    assert 0.08 <= np.std(noisy) <= 0.12
    np.testing.assert_array_equal(noisy, add_noise(np.zeros(256), 0.1, 42))
    assert not np.array_equal(noisy, add_noise(np.zeros(256), 0.1, 43))
    with pytest.raises(ValidationError):
        add_noise(np.zeros(4), -0.1, 0)


def test_noise_keeps_type():
    assert isinstance(add_noise(Image(np.zeros((4, 4))), 0.1, 0), Image)
    noisy = add_noise(Measurement(np.zeros(6), "radon"), 0.1, 0)
    assert isinstance(noisy, Measurement)
    assert noisy.kind == "radon"


# Manifest

def test_manifest_lines_and_write(tmp_path):
    manifest = RunManifest(small_config(), str(tmp_path), model={"kind": "fourier"})
    manifest.artifact("b.csv")
    manifest.artifact("a.csv")
    manifest.artifact("a.csv")
    path = manifest.write()
    lines = open(path, encoding="utf-8").read().splitlines()
    assert lines[0].startswith("#")
    assert "size = 16" in lines
    assert "model.kind = fourier" in lines
    assert lines[-3:] == ["artifact = a.csv", "artifact = b.csv", f"artifact = {MANIFEST_NAME}"]
    assert load_config(path) == manifest.config


# Runner

def test_reconstruct_run_writes_artifacts(tmp_path):
    manifest = execute(small_config(snapshot_every=1, lipschitz_probe=1e-3), str(tmp_path))
    for name in ("phantom.f64", "final.f64", "history.csv", "metrics.csv", "iter_1.f64", "lipschitz.csv",
                 MANIFEST_NAME):
        assert name in manifest.artifacts
        assert os.path.exists(tmp_path / name)
    metrics = (tmp_path / "metrics.csv").read_text().splitlines()
    assert metrics[0] == "method,psnr,ssim,l2_error"
    assert [row.split(",")[0] for row in metrics[1:]] == ["adjoint", "adjoint", "acid"]
    assert read_f64grid(str(tmp_path / "final.f64")).shape == (16, 16)


def test_cached_operator_blob_reproduces_run(tmp_path):
    config = small_config(operator="automap", hidden=32, train_pairs=4, train_epochs=3, heldout_pairs=2,
                          operator_blob=str(tmp_path / "ops" / "automap.blob"))
    first = execute(config, str(tmp_path / "first"))
    assert os.path.exists(config.operator_blob)
    assert "operator_bren.csv" in first.artifacts
    execute(config, str(tmp_path / "second"))
    for name in ("history.csv", "metrics.csv"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


PROTOCOL_CASES = [
    ("phantom", {}, "phantom.pgm"),
    ("forward", {}, "mask.f64"),
    ("forward", {"modality": "radon", "views": 6, "full_views": 12}, "sinogram.pgm"),
    ("ablate", {"noise_seeds": (0, 1)}, "ablation.csv"),
    ("sweep", {"sweep_rates": (0.5, 0.2)}, "sweep.csv"),
    ("attack-net", {"attack_seeds": (0,), "attack_iters": 3}, "attack_net.csv"),
    ("attack-acid", {"attack_seeds": (0,), "attack_iters": 2, "attack_acid_iterations": 2}, "attack_acid.csv"),
    ("contraction", {"sigma_values": (0.5,), "contraction_iterations": 5}, "contraction.csv"),
    ("noise-stability", {"noise_seeds": (0, 1, 2)}, "noise_histogram.csv"),
]


@pytest.mark.parametrize("experiment, changes, expected", PROTOCOL_CASES)
def test_every_protocol_runs(tmp_path, experiment, changes, expected):
    manifest = execute(small_config(experiment=experiment, **changes), str(tmp_path))
    assert expected in manifest.artifacts
    assert os.path.exists(tmp_path / expected)


@pytest.mark.parametrize("experiment, changes, expected", PROTOCOL_CASES + [("reconstruct", {}, "final.f64")])
def test_rerun_from_manifest_is_byte_identical(tmp_path, experiment, changes, expected):
    first = execute(small_config(experiment=experiment, **changes), str(tmp_path / "first"))
    second = run_experiment(first.path, str(tmp_path / "second"))
    assert sorted(second.artifacts) == sorted(first.artifacts)
    assert expected in first.artifacts
    for name in first.artifacts:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes(), name


def test_sweep_rows_are_sorted(tmp_path):
    execute(small_config(experiment="sweep", sweep_rates=(0.5, 0.2, 0.3)), str(tmp_path))
    points = [float(row.split(",")[0]) for row in (tmp_path / "sweep.csv").read_text().splitlines()[1:]]
    assert points == [0.2, 0.3, 0.5]


def test_failed_run_still_writes_manifest(tmp_path):
    with pytest.raises(ValidationError) as caught:
        execute(small_config(experiment="phantom", text="HELLO"), str(tmp_path))
    assert caught.value.manifest.path == os.path.join(str(tmp_path), MANIFEST_NAME)
    assert os.path.exists(tmp_path / MANIFEST_NAME)


def test_table_cells_use_plain_float_repr(tmp_path):
    path = write_rows(str(tmp_path / "t.csv"), ["a", "b", "c", "d"], [(np.float64(0.1), None, 3, np.int64(7))])
    assert open(path).read().splitlines() == ["a,b,c,d", "0.1,,3,7"]


# CLI

def test_cli_runs_experiment(tmp_path):
    config = write_config(tmp_path / "run.txt", SMALL_RUN)
    out = str(tmp_path / "out")
    assert main(["--config", config, "--out", out, "--seed", "3", "phantom"]) == EXIT_OK
    assert load_config(os.path.join(out, MANIFEST_NAME)).seed == 3
    assert load_config(os.path.join(out, MANIFEST_NAME)).experiment == "phantom"


def test_cli_config_error_exit_code(tmp_path):
    config = write_config(tmp_path / "bad.txt", "size = 16\nwobble = 1\n")
    assert main(["--config", config, "--out", str(tmp_path / "out"), "phantom"]) == EXIT_CONFIG


def test_cli_runtime_error_exit_code(tmp_path):
    config = write_config(tmp_path / "run.txt", SMALL_RUN + "text = HELLO\n")
    assert main(["--config", config, "--out", str(tmp_path / "out"), "phantom"]) == EXIT_RUNTIME
    assert main(["--config", str(tmp_path / "missing.txt"), "phantom"]) == EXIT_RUNTIME


def test_cli_unexpected_error_exit_code(tmp_path, monkeypatch):
    def broken(config, out_dir):
        raise RuntimeError("boom")

    monkeypatch.setattr("acidlab.lab.cli.execute", broken)
    config = write_config(tmp_path / "run.txt", SMALL_RUN)
    assert main(["--config", config, "--out", str(tmp_path / "out"), "phantom"]) == EXIT_RUNTIME


def test_cli_rejects_unknown_command():
    with pytest.raises(SystemExit):
        main(["reconstruct-everything"])


def test_cli_metrics(tmp_path, capsys, phantom_16):
    reference = write_f64grid(str(tmp_path / "a.f64"), phantom_16)
    candidate = write_f64grid(str(tmp_path / "b.f64"), phantom_16 + 0.01)
    assert main(["--out", str(tmp_path / "m"), "metrics", reference, candidate, "--peak", "1"]) == EXIT_OK
    output = capsys.readouterr().out
    assert "np." not in output
    printed = dict(item.split("=") for item in output.split())
    assert float(printed["psnr"]) == pytest.approx(40.0, abs=1e-6)
    rows = (tmp_path / "m" / "metrics.csv").read_text().splitlines()
    assert rows[0] == "psnr,ssim,l2_error"
    assert float(rows[1].split(",")[2]) == pytest.approx(0.16)
