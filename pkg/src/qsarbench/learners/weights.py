from __future__ import annotations

import numpy as np


def balanced_weights(y) -> tuple[np.ndarray, bool]:
    """Per-sample weights n / (2 * count(class)).

    Returns:
        (weights, single_class). When only one class is present the weights
        are uniform and ``single_class`` is True.
    """
    y = np.asarray(y)
    n = len(y)
    if n == 0:
        raise ValueError("empty label vector")
    n1 = int(np.sum(y == 1))
    n0 = n - n1
    if n0 == 0 or n1 == 0:
        return np.ones(n), True
    return np.where(y == 1, n / (2.0 * n1), n / (2.0 * n0)), False
