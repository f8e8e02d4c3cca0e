import numpy as np
import pytest

from acidlab.adversary.acid_backprop import (acid_attack_gradient, acid_attack_objective, acid_forward,
                                             attack_acid, kink_margin)
from acidlab.adversary.attacks import (AttackConfig, attack_gradient, attack_network, attack_objective,
                                       initial_perturbation, momentum_ascent, output_distortion,
                                       random_perturbation)
from acidlab.engine.acid import AcidConfig, AcidRecon
from acidlab.errors import AttackAbortedError, CapabilityError, ValidationError
from acidlab.forward.models import to_dense
from acidlab.recon.automap import build_automap_mini
from acidlab.recon.operators import AdjointRecon


class InfRecon(AdjointRecon):
    def _forward(self, p):
        return np.full(self.model.shape, np.inf)


class LateInfRecon(AdjointRecon):
    """Az első `finite_calls` kiértékelés után végtelent ad."""

    def __init__(self, model, finite_calls):
        super().__init__(model)
        self.finite_calls = finite_calls

    def _forward(self, p):
        self.finite_calls -= 1
        if self.finite_calls < 0:
            return np.full(self.model.shape, np.inf)
        return super()._forward(p)


@pytest.fixture
def automap_8(gaussian_model_8):
    return build_automap_mini(gaussian_model_8, seed=4, gain=0.5)


def central_difference(objective, e, direction, h):
    return (objective(e + h * direction) - objective(e - h * direction)) / (2 * h)


# Single operator

def test_objective_at_zero_perturbation(automap_8, gaussian_model_8, phantom_8):
    assert attack_objective(automap_8, gaussian_model_8, phantom_8, np.zeros((8, 8)), 0.5) == 0.0


def test_objective_for_linear_operator(rng, gaussian_model_8, phantom_8):
    op = AdjointRecon(gaussian_model_8)
    e = rng.standard_normal((8, 8))
    expected = 0.5 * np.sum(op.forward(gaussian_model_8.apply(e)) ** 2) - 0.5 * 0.3 * np.sum(e ** 2)
    assert attack_objective(op, gaussian_model_8, phantom_8, e, 0.3) == pytest.approx(expected, rel=1e-10)


def test_gradient_matches_finite_differences(rng, automap_8, gaussian_model_8, phantom_8):
    for _ in range(20):
        e = 0.1 * rng.standard_normal((8, 8))
        direction = rng.standard_normal((8, 8))

        def objective(x):
            return attack_objective(automap_8, gaussian_model_8, phantom_8, x, 0.2)

        numeric = central_difference(objective, e, direction, 1e-5)
        analytic = np.sum(attack_gradient(automap_8, gaussian_model_8, phantom_8, e, 0.2) * direction)
        assert analytic == pytest.approx(numeric, rel=1e-4)


def test_gamma_only_adds_norm_penalty(rng, automap_8, gaussian_model_8, phantom_8):
    e = 0.1 * rng.standard_normal((8, 8))
    plain = attack_gradient(automap_8, gaussian_model_8, phantom_8, e, 0.0)
    penalised = attack_gradient(automap_8, gaussian_model_8, phantom_8, e, 2.0)
    np.testing.assert_allclose(penalised - plain, -2.0 * e, atol=1e-12)


def test_gradient_vanishes_at_zero(automap_8, gaussian_model_8, phantom_8):
    gradient = attack_gradient(automap_8, gaussian_model_8, phantom_8, np.zeros((8, 8)), 0.7)
    np.testing.assert_array_equal(gradient, 0.0)


def test_gradient_needs_differentiable_operator(full_model_16, phantom_16):
    acid = AcidRecon(AdjointRecon(full_model_16), AcidConfig(lambda_=0.76, epsilon=1e-3, iterations=2))
    with pytest.raises(CapabilityError):
        attack_gradient(acid, full_model_16, phantom_16, np.zeros((16, 16)), 0.1)
    with pytest.raises(CapabilityError):
        attack_network(acid, full_model_16, phantom_16, AttackConfig(0.1, 0.1, 0.0, 3), seed=0)


# Ascent loop

def test_zero_iterations_return_initial_perturbation(automap_8, gaussian_model_8, phantom_8):
    result = attack_network(automap_8, gaussian_model_8, phantom_8, AttackConfig(0.1, 0.1, 0.5, 0), seed=3)
    np.testing.assert_array_equal(result.perturbation, initial_perturbation(phantom_8, 3))
    assert result.objective_trace == []
    assert result.perturbation_norm == pytest.approx(1e-3 * np.linalg.norm(phantom_8))


def test_objective_trace_increases_for_linear_operator(gaussian_model_16, phantom_16):
    op = AdjointRecon(gaussian_model_16)
    result = attack_network(op, gaussian_model_16, phantom_16, AttackConfig(0.1, 0.5, 0.0, 20), seed=1)
    assert len(result.objective_trace) == 20
    assert np.all(np.diff(result.objective_trace) >= 0)


def test_norm_budget_stops_search(gaussian_model_16, phantom_16):
    op = AdjointRecon(gaussian_model_16)
    budget = 2e-3 * np.linalg.norm(phantom_16)
    result = attack_network(op, gaussian_model_16, phantom_16, AttackConfig(0.1, 0.5, 0.0, 50, budget), seed=1)
    assert len(result.objective_trace) < 50
    assert result.perturbation_norm == pytest.approx(budget, rel=1e-12)


def test_found_perturbation_beats_random_direction(radon_model_16, phantom_16):
    op = AdjointRecon(radon_model_16)
    cfg = AttackConfig(gamma=0.0, step=0.1, momentum=0.5, max_iters=30, norm_budget=1.0)
    result = attack_network(op, radon_model_16, phantom_16, cfg, seed=2)
    random_distortions = [output_distortion(op, radon_model_16, phantom_16,
                                            random_perturbation((16, 16), result.perturbation_norm, seed))
                          for seed in range(5)]
    assert result.output_distortion > max(random_distortions)


def test_larger_gamma_gives_smaller_perturbation(gaussian_model_16, phantom_16):
    op = AdjointRecon(gaussian_model_16)
    norms = [attack_network(op, gaussian_model_16, phantom_16, AttackConfig(gamma, 0.5, 0.0, 10), seed=4)
             .perturbation_norm for gamma in (0.0, 0.5, 1.0)]
    assert norms[0] > norms[1] > norms[2]


def test_non_finite_objective_aborts(gaussian_model_8, phantom_8):
    with pytest.raises(AttackAbortedError) as caught:
        attack_network(InfRecon(gaussian_model_8), gaussian_model_8, phantom_8, AttackConfig(0.1, 0.1, 0.0, 5),
                       seed=0)
    assert caught.value.trace == []


def test_late_non_finite_output_aborts_with_trace(gaussian_model_8, phantom_8):
    # címke + két véges iteráció, a harmadikban a vjp nem véges kotangenst kap
    op = LateInfRecon(gaussian_model_8, finite_calls=3)
    with pytest.raises(AttackAbortedError) as caught:
        attack_network(op, gaussian_model_8, phantom_8, AttackConfig(0.1, 0.1, 0.0, 5), seed=0)
    assert len(caught.value.trace) == 2
    assert all(np.isfinite(caught.value.trace))


def test_momentum_ascent_turns_validation_error_into_abort():
    calls = []

    def objective_and_gradient(e):
        calls.append(1)
        if len(calls) == 3:
            raise ValidationError("image contains non-finite values")
        return 0.0, np.ones_like(e)

    with pytest.raises(AttackAbortedError) as caught:
        momentum_ascent(objective_and_gradient, np.zeros(4), AttackConfig(0.0, 0.1, 0.0, 10))
    assert caught.value.trace == [0.0, 0.0]


def test_momentum_ascent_on_quadratic():
    # D(e) = -½‖e - 1‖²: a maximum az egyes vektor
    e, objectives, norms = momentum_ascent(lambda e: (-0.5 * float(np.sum((e - 1) ** 2)), 1 - e),
                                           np.zeros(4), AttackConfig(0.0, 0.2, 0.5, 200))
    np.testing.assert_allclose(e, 1.0, atol=1e-8)
    assert len(objectives) == len(norms) == 200


def test_attack_config_validation():
    for values in ((-1.0, 0.1, 0.0, 1), (0.1, 0.0, 0.0, 1), (0.1, 0.1, 1.0, 1), (0.1, 0.1, 0.0, -1),
                   (0.1, 0.1, 0.0, 1, 0.0)):
        with pytest.raises(ValidationError):
            AttackConfig(*values)


def test_attack_result_csv(tmp_path, automap_8, gaussian_model_8, phantom_8):
    result = attack_network(automap_8, gaussian_model_8, phantom_8, AttackConfig(0.1, 0.1, 0.5, 3), seed=0)
    lines = result.to_csv(tmp_path / "trace.csv").read_text().splitlines()
    assert lines[0] == "iter,objective,norm"
    assert len(lines) == 4


# Full ACID pipeline

def test_single_linear_iteration_has_closed_form(rng, gaussian_model_8, phantom_8):
    op = AdjointRecon(gaussian_model_8)
    cfg = AcidConfig(lambda_=0.76, epsilon=1e-3, iterations=1, sparsify=False)
    forward = to_dense(gaussian_model_8.apply, (8, 8))
    recon = to_dense(op.forward, (gaussian_model_8.real_rows,))
    weight = cfg.contraction_weight
    pipeline = recon + weight * (recon - recon @ forward @ recon)
    end_to_end = pipeline @ forward

    e = 0.05 * rng.standard_normal((8, 8))
    expected = end_to_end.T @ end_to_end @ e.ravel() - 0.3 * e.ravel()
    gradient = acid_attack_gradient(op, gaussian_model_8, phantom_8, e, cfg, 0.3)
    assert np.linalg.norm(gradient.ravel() - expected) <= 1e-10 * np.linalg.norm(expected)


def test_pipeline_gradient_matches_finite_differences(rng, automap_8, gaussian_model_8, phantom_8):
    cfg = AcidConfig(lambda_=0.76, epsilon=0.05, iterations=3)
    reference = acid_forward(gaussian_model_8.apply(phantom_8), gaussian_model_8, automap_8, cfg).f
    checked = 0
    for _ in range(200):
        e = 0.05 * rng.standard_normal((8, 8))
        state = acid_forward(gaussian_model_8.apply(phantom_8 + e), gaussian_model_8, automap_8, cfg)
        if kink_margin(state) < 1e-4:
            continue
        direction = rng.standard_normal((8, 8))
        direction /= np.linalg.norm(direction)

        def objective(x):
            return acid_attack_objective(automap_8, gaussian_model_8, phantom_8, x, cfg, 0.1, reference)

        numeric = central_difference(objective, e, direction, 1e-7)
        gradient = acid_attack_gradient(automap_8, gaussian_model_8, phantom_8, e, cfg, 0.1, reference)
        assert np.sum(gradient * direction) == pytest.approx(numeric, rel=5e-3, abs=1e-8)
        checked += 1
        if checked == 20:
            break
    assert checked == 20


def test_pipeline_gradient_vanishes_at_zero(automap_8, gaussian_model_8, phantom_8):
    cfg = AcidConfig(lambda_=0.76, epsilon=0.05, iterations=3)
    gradient = acid_attack_gradient(automap_8, gaussian_model_8, phantom_8, np.zeros((8, 8)), cfg, 0.4)
    np.testing.assert_array_equal(gradient, 0.0)


def test_attack_acid_respects_budget(automap_8, gaussian_model_8, phantom_8):
    acid_cfg = AcidConfig(lambda_=0.76, epsilon=0.05, iterations=3)
    budget = 5e-3 * np.linalg.norm(phantom_8)
    result = attack_acid(automap_8, gaussian_model_8, phantom_8, acid_cfg,
                         AttackConfig(0.0, 1.0, 0.5, 40, budget), seed=1)
    assert result.perturbation_norm <= budget * (1 + 1e-12)
    assert result.output_distortion > 0
    assert result.objective_trace[-1] >= result.objective_trace[0]
