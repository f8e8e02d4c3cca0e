from acidlab.recon.operators import (AdjointRecon, ReconOperator, ResampledRecon, ScaledRecon,
                                     build_adjoint_recon, ramlak_kernel, recon_forward, recon_vjp)
from acidlab.recon.automap import AutomapMini, AutomapParams, build_automap_mini
from acidlab.recon.training import consistency_residual, train_automap_mini
from acidlab.recon.diagnostics import BrenReport, LipschitzEstimate, bren_ratio, lipschitz_estimate
from acidlab.recon.serialization import load_operator, save_operator

__all__ = [
    "ReconOperator", "AdjointRecon", "ScaledRecon", "ResampledRecon",
    "build_adjoint_recon", "ramlak_kernel", "recon_forward", "recon_vjp",
    "AutomapMini", "AutomapParams", "build_automap_mini",
    "train_automap_mini", "consistency_residual",
    "BrenReport", "LipschitzEstimate", "bren_ratio", "lipschitz_estimate",
    "save_operator", "load_operator",
]
