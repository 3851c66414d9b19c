import numpy as np


def fill_quadrant(out: np.ndarray, a: float, b: float, c: float, forcing: np.ndarray | None = None) -> np.ndarray:
    """Fill ``out[1:, 1:]`` in place with
    ``out[i, j] = a out[i-1, j] + b out[i, j-1] + c out[i-1, j-1] + forcing[i, j]``.

    Row 0 and column 0 of ``out`` are boundary data and are left untouched.
    Cells on one anti-diagonal depend only on the two previous anti-diagonals,
    so each diagonal is updated as a vector.
    """
    n1, n2 = out.shape
    for d in range(2, n1 + n2 - 1):
        i = np.arange(max(1, d - n2 + 1), min(n1 - 1, d - 1) + 1)
        if i.size == 0:
            continue
        j = d - i
        val = a * out[i - 1, j] + b * out[i, j - 1] + c * out[i - 1, j - 1]
        if forcing is not None:
            val = val + forcing[i, j]
        out[i, j] = val
    return out
