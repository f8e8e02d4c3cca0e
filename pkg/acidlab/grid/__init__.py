from acidlab.grid.images import (Image, Measurement, as_image_array, as_measurement_array,
                                 read_f64grid, write_f64grid, write_pgm)
from acidlab.grid.metrics import MetricsReport, psnr, ssim, l2_norm, metrics_report, PSNR_CAP

__all__ = [
    "Image", "Measurement", "as_image_array", "as_measurement_array",
    "read_f64grid", "write_f64grid", "write_pgm",
    "MetricsReport", "psnr", "ssim", "l2_norm", "metrics_report", "PSNR_CAP",
]
