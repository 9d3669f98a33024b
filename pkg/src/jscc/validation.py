"""Input checks shared by the estimator front end."""

from __future__ import annotations

import numpy as np

from .errors import UsageError


def check_gf_array(X, q: int, width: int | None = None, name: str = "X") -> np.ndarray:
    """
    Validate a 2-D array of symbols in ``{0, ..., q-1}``.

    A 1-D input is read as a single block.  Returns an ``int64`` copy.
    """
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise UsageError(f"{name} must be 2-D (blocks x symbols), got {arr.ndim}-D")
    if arr.shape[0] == 0:
        raise UsageError(f"{name} has no blocks")
    if width is not None and arr.shape[1] != width:
        raise UsageError(f"{name} has blocks of length {arr.shape[1]}, expected {width}")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise UsageError(f"{name} must hold integer symbols")
    elif arr.dtype.kind not in "iub":
        raise UsageError(f"{name} must hold integer symbols, got dtype {arr.dtype}")
    arr = arr.astype(np.int64)
    if arr.min() < 0 or arr.max() >= q:
        raise UsageError(f"{name} has symbols outside [0, {q})")
    return arr


def check_probability_vector(p, size: int, name: str = "p") -> tuple:
    p = tuple(float(x) for x in p)
    if len(p) != size:
        raise UsageError(f"{name} has {len(p)} entries, expected {size}")
    if any(x < 0 for x in p) or abs(sum(p) - 1) > 1e-9:
        raise UsageError(f"{name} must be a probability vector")
    return p
