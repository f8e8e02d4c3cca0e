from acidlab.adversary.attacks import (AttackConfig, AttackResult, attack_gradient, attack_network,
                                       attack_objective, initial_perturbation, momentum_ascent,
                                       output_distortion, random_perturbation)
from acidlab.adversary.acid_backprop import (acid_attack_gradient, acid_attack_objective, acid_forward,
                                             acid_vjp, attack_acid, kink_margin)
from acidlab.sparsity.threshold import sparsify_vjp

__all__ = [
    "AttackConfig", "AttackResult", "attack_objective", "attack_gradient", "attack_network",
    "initial_perturbation", "momentum_ascent", "output_distortion", "random_perturbation",
    "acid_forward", "acid_vjp", "acid_attack_objective", "acid_attack_gradient", "attack_acid",
    "kink_margin", "sparsify_vjp",
]
