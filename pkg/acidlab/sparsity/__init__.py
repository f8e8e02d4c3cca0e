from acidlab.sparsity.gradient import GradientField, gradient_transform, sparsity_count, total_variation
from acidlab.sparsity.threshold import (ThresholdParams, soft_threshold, soft_threshold_pinv, sparsify,
                                        sparsify_vjp)

__all__ = [
    "GradientField", "gradient_transform", "total_variation", "sparsity_count",
    "ThresholdParams", "soft_threshold", "soft_threshold_pinv", "sparsify", "sparsify_vjp",
]
