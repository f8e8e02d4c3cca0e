from acidlab.forward.models import ForwardModel, to_dense
from acidlab.forward.radon import (RadonGeometry, RadonModel, detector_count, radon_adjoint,
                                   radon_apply, select_views, uniform_geometry)
from acidlab.forward.masks import FourierMask, load_mask, make_mask, save_mask
from acidlab.forward.fourier import FourierModel, fourier_adjoint, fourier_apply

__all__ = [
    "ForwardModel", "to_dense",
    "RadonGeometry", "RadonModel", "detector_count", "radon_apply", "radon_adjoint",
    "select_views", "uniform_geometry",
    "FourierMask", "make_mask", "save_mask", "load_mask",
    "FourierModel", "fourier_apply", "fourier_adjoint",
]
