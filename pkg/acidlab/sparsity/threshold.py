"""
Soft-threshold kernel, páronkénti pszeudo-inverze és a ritkító lépés.

A ritkító lépés minden pixelre a négy szomszéddal (jobb, lent, bal, fent)
képzett pszeudo-inverz értékek átlaga. A rácson kívüli szomszéd a középső
pixel értékét veszi fel, így a peremen a hozzájárulás maga a középérték.
"""
from dataclasses import dataclass

import numpy as np

from acidlab.errors import ShapeError, ValidationError
from acidlab.grid.images import as_image_array


@dataclass(frozen=True)
class ThresholdParams:
    epsilon: float

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            raise ValidationError(f"epsilon must be finite and positive, got {self.epsilon}")


def _epsilon(params):
    if isinstance(params, ThresholdParams):
        return params.epsilon
    return ThresholdParams(float(params)).epsilon


def soft_threshold(x, epsilon):
    """S_eps(x): 0 ha |x| < eps, különben x - sgn(x)*eps."""
    x = np.asarray(x, dtype=np.float64)
    out = np.where(np.abs(x) < epsilon, 0.0, x - np.sign(x) * epsilon)
    return out if out.ndim else float(out)


def soft_threshold_pinv(v_a, v_b, epsilon):
    """
    A soft-threshold kernel pszeudo-inverze egy szomszéd párra.

    :return: (v_a+v_b)/2 ha |v_a-v_b| <= eps, különben v_a -/+ eps/2
    """
    v_a = np.asarray(v_a, dtype=np.float64)
    v_b = np.asarray(v_b, dtype=np.float64)
    diff = v_a - v_b
    out = np.where(diff > epsilon, v_a - epsilon / 2,
                   np.where(diff < -epsilon, v_a + epsilon / 2, (v_a + v_b) / 2))
    return out if out.ndim else float(out)


def _neighbours(values):
    # Perem: a hiányzó szomszéd a középső pixel
    padded = np.pad(values, 1, mode="edge")
    return (
        padded[1:-1, 2:],   # jobb
        padded[2:, 1:-1],   # lent
        padded[1:-1, :-2],  # bal
        padded[:-2, 1:-1],  # fent
    )


def sparsify(f_half, params):
    """
    Ritkító szűrés: H* S_eps(H f) a pszeudo-inverz H*-gal.

    :param f_half: a mélytanult növekmény utáni kép
    :param params: ThresholdParams vagy epsilon
    """
    values = as_image_array(f_half)
    epsilon = _epsilon(params)
    total = np.zeros_like(values)
    for neighbour in _neighbours(values):
        total += soft_threshold_pinv(values, neighbour, epsilon)
    return total / 4.0


def _fold_edge_pad(padded):
    # Az edge-padding adjungáltja: a peremsávot visszagyűjtjük a szélső pixelekre
    out = padded[1:-1, 1:-1].copy()
    out[0, :] += padded[0, 1:-1]
    out[-1, :] += padded[-1, 1:-1]
    out[:, 0] += padded[1:-1, 0]
    out[:, -1] += padded[1:-1, -1]
    return out


def sparsify_vjp(f_half, cotangent, epsilon):
    """
    A sparsify lépés vektor-Jacobi szorzata.

    Ágankénti derivált (v_a, v_b) szerint: átlag ágon (1/2, 1/2), levágott
    ágon (1, 0). |v_a - v_b| = eps esetén az átlag ágat használjuk.
    """
    values = as_image_array(f_half)
    cot = np.asarray(cotangent, dtype=np.float64)
    if cot.shape != values.shape:
        raise ShapeError(f"cotangent {cot.shape} does not match image {values.shape}")
    epsilon = _epsilon(epsilon)

    quarter = cot / 4.0
    centre_grad = np.zeros_like(values)
    padded_grad = np.zeros((values.shape[0] + 2, values.shape[1] + 2))
    slots = (
        (slice(1, -1), slice(2, None)),
        (slice(2, None), slice(1, -1)),
        (slice(1, -1), slice(None, -2)),
        (slice(None, -2), slice(1, -1)),
    )
    for neighbour, slot in zip(_neighbours(values), slots):
        mean_branch = np.abs(values - neighbour) <= epsilon
        centre_grad += np.where(mean_branch, 0.5, 1.0) * quarter
        padded_grad[slot] += np.where(mean_branch, 0.5, 0.0) * quarter
    return centre_grad + _fold_edge_pad(padded_grad)
