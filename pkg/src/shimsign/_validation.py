"""Argument checks shared by the estimators and the CLI."""

from __future__ import annotations

import math
from numbers import Integral

import numpy as np


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_unit_residue(d: int, q: int) -> int:
    q = check_positive_int(q, "q")
    if math.gcd(d, q) != 1:
        raise ValueError(f"gcd(d={d}, q={q}) must be 1")
    return int(d)


def check_delta_grid(grid) -> list[float]:
    grid = [float(x) for x in grid]
    if not grid:
        raise ValueError("delta grid is empty")
    if any(x <= 0 for x in grid):
        raise ValueError("delta grid values must be positive")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("delta grid must be strictly decreasing")
    return grid


def check_unit_interval_values(values, name: str = "values") -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > 1.0):
        raise ValueError(f"{name} must lie in [-1, 1]")
    return arr


def one_indexed(seq) -> list:
    """Prepend a dummy slot so that ``out[n]`` is the n-th entry of ``seq``."""
    return [0] + list(seq)
