"""Named initial-datum profiles shared by the CLI, the scenarios, and tests."""

from __future__ import annotations

import numpy as np


def smoothstep(x):
    """Quintic smoothstep: 0 below 0, 1 above 1, C^2 across the joints."""
    z = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return z**3 * (10.0 - 15.0 * z + 6.0 * z * z)


def front(x, t=0.0):
    """Decreasing C^2 front: 1 on x < 0, reversed smoothstep on [0, 1], 0 beyond."""
    return 1.0 - smoothstep(x)


def front_value_integral() -> float:
    """Exact integral of the front restriction over [0, 1]."""
    # 1 - (10/4 - 15/5 + 6/6) z-polynomial integral = 1 - 1/2
    return 0.5


def gaussian_bump(x, t=0.0, sigma=1.0, amplitude=1.0, center=0.0):
    x = np.asarray(x, dtype=float)
    if x.ndim and x.shape[-1:] == (2,) and x.ndim >= 2:
        r2 = np.sum((x - center) ** 2, axis=-1)
    else:
        r2 = (x - center) ** 2
    return amplitude * np.exp(-0.5 * r2 / sigma**2)


def compact_bump(x, t=0.0, halfwidth=1.0, amplitude=1.0, center=0.0):
    """C^1 compactly supported bump (cosine squared)."""
    x = np.asarray(x, dtype=float)
    r = np.abs(x - center)
    out = np.where(r < halfwidth,
                   amplitude * np.cos(0.5 * np.pi * r / halfwidth) ** 2, 0.0)
    return out


def make_profile(name: str, **params):
    """Return a pointwise function fn(x, t) for a named profile."""
    if name == "front-smoothstep":
        return front
    if name == "gaussian-bump":
        return lambda x, t=0.0: gaussian_bump(x, t, **params)
    if name == "compact-bump":
        return lambda x, t=0.0: compact_bump(x, t, **params)
    if name == "constant":
        value = float(params.get("value", 0.0))
        return lambda x, t=0.0: np.full_like(np.asarray(x, dtype=float)
                                             if np.ndim(x) else np.float64(x),
                                             value, dtype=float)
    if name == "zero":
        return lambda x, t=0.0: np.zeros_like(np.asarray(x, dtype=float)
                                              if np.ndim(x) else np.float64(x))
    raise ValueError(f"unknown profile {name!r}")


PROFILE_NAMES = ("front-smoothstep", "gaussian-bump", "compact-bump",
                 "constant", "zero")
