"""
Operátor paraméterek mentése lapos F64 blobként.

Fejléc: `RECOP1 <kind> <m> <N> <hidden>\\n`, utána little-endian float64
értékek: W1, b1, W2, b2 és végül a tanító bemeneti skála (NaN ha nincs).
"""
import logging

import numpy as np

from acidlab.errors import ShapeError, ValidationError
from acidlab.recon.automap import AutomapMini, AutomapParams
from acidlab.recon.operators import AdjointRecon

logger = logging.getLogger("recon_ops")

HEADER_MAGIC = "RECOP1"


def save_operator(path, op):
    rows, pixels = op.model.real_rows, op.model.col_count
    if isinstance(op, AutomapMini):
        blob = np.concatenate([op.params.w1.ravel(), op.params.b1, op.params.w2.ravel(), op.params.b2])
        hidden = op.hidden
    elif isinstance(op, AdjointRecon):
        blob = np.array([float(op.filtered)])
        hidden = 0
    else:
        raise ValidationError(f"cannot serialize {op.kind} operator")
    scale = np.nan if op.input_scale is None else op.input_scale
    with open(path, "wb") as handle:
        handle.write(f"{HEADER_MAGIC} {op.kind} {rows} {pixels} {hidden}\n".encode("ascii"))
        handle.write(np.append(blob, scale).astype("<f8").tobytes())
    logger.info(f"Saved {op.kind} operator to {path}")
    return path


def load_operator(path, model):
    """
    Operátor betöltése a megadott mérési modellhez.

    :raises ShapeError: ha a fejléc méretei nem illenek a modellhez
    """
    with open(path, "rb") as handle:
        header = handle.readline().decode("ascii").split()
        payload = np.frombuffer(handle.read(), dtype="<f8").astype(np.float64)
    if len(header) != 5 or header[0] != HEADER_MAGIC:
        raise ValidationError(f"{path}: not a {HEADER_MAGIC} operator blob")
    kind, rows, pixels, hidden = header[1], int(header[2]), int(header[3]), int(header[4])
    if rows != model.real_rows or pixels != model.col_count:
        raise ShapeError(f"{path}: operator is for m={rows}, N={pixels}, "
                         f"model has m={model.real_rows}, N={model.col_count}")

    blob, scale = payload[:-1], payload[-1]
    if kind == "automap":
        sizes = [hidden * rows, hidden, pixels * hidden, pixels]
        if blob.size != sum(sizes):
            raise ShapeError(f"{path}: expected {sum(sizes)} parameters, found {blob.size}")
        w1, b1, w2, b2 = np.split(blob, np.cumsum(sizes)[:-1])
        op = AutomapMini(model, AutomapParams(w1.reshape(hidden, rows), b1.copy(),
                                              w2.reshape(pixels, hidden), b2.copy()))
    elif kind == "adjoint":
        op = AdjointRecon(model, filtered=bool(blob[0]))
    else:
        raise ValidationError(f"{path}: unknown operator kind '{kind}'")
    op.input_scale = None if np.isnan(scale) else float(scale)
    logger.info(f"Loaded {kind} operator from {path}")
    return op
