import numpy as np


def relative_error(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)
    return float(np.linalg.norm(a - b) / scale)


def directional_derivative(function, x, direction, h):
    """Központi differencia: (F(x + h d) - F(x - h d)) / 2h."""
    return (np.asarray(function(x + h * direction)) - np.asarray(function(x - h * direction))) / (2 * h)
