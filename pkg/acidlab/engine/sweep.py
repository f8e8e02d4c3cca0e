"""
Adat-sweep: ACID több mintavételi aránnyal vagy vetületszámmal.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from acidlab.errors import ValidationError
from acidlab.engine.acid import acid_run
from acidlab.grid.images import as_image_array
from acidlab.grid.metrics import SSIM_WINDOW, psnr, ssim

logger = logging.getLogger("acid_engine")


@dataclass(frozen=True)
class SweepRow:
    point: float
    psnr: float
    ssim: float


def data_sweep(points, model_factory, operator_factory, f_star, cfg, *, measure=None, peak=None, workers=1):
    """
    ACID futtatása minden sweep pontra.

    :param points: növekvő arányok vagy vetületszámok
    :param model_factory: pont -> ForwardModel (rögzített maggal)
    :param operator_factory: ForwardModel -> ReconOperator
    :param measure: (model, pont) -> p0; alapértelmezetten zajmentes A f*
    :param workers: párhuzamos szálak száma; az eredmények sorrendje a pontoké
    :return: SweepRow lista
    """
    points = list(points)
    if not points:
        raise ValidationError("sweep needs at least one point")
    if any(b < a for a, b in zip(points, points[1:])):
        raise ValidationError(f"sweep points must be sorted ascending, got {points}")
    f_star = as_image_array(f_star)
    if peak is None:
        peak = float(f_star.max() - f_star.min()) or 1.0

    def run_point(point):
        model = model_factory(point)
        op = operator_factory(model)
        p0 = measure(model, point) if measure is not None else model.apply(f_star)
        image, _ = acid_run(p0, model, op, cfg)
        row = SweepRow(
            point=point,
            psnr=psnr(f_star, image, peak),
            ssim=ssim(f_star, image, peak) if min(f_star.shape) >= SSIM_WINDOW else None,
        )
        logger.info(f"Sweep point {point}: PSNR {row.psnr:.3f} dB")
        return row

    # Párhuzamos futtatás, a kimenet a bemenet sorrendjében
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        return list(executor.map(run_point, points))


def sweep_trend(rows):
    """Az utolsó és az első pont PSNR különbsége."""
    if not rows:
        return 0.0
    return rows[-1].psnr - rows[0].psnr
