"""Synthetic phantoms, intensity scaling and Poisson sampling."""

import numpy as np

from ..core import ConfigurationError, DimensionError, DomainError, as_image

__all__ = ["make_phantom", "scale_to_max", "poisson_sample", "DISKS", "PHANTOMS"]

_SUPERSAMPLE = 8

# (center_y, center_x, radius) as fractions of the side, amplitude
DISKS = [
    ((0.28, 0.30, 0.16), 1.00),
    ((0.30, 0.74, 0.10), 0.55),
    ((0.70, 0.25, 0.12), 0.75),
    ((0.72, 0.68, 0.20), 0.40),
    ((0.50, 0.50, 0.05), 0.85),
    ((0.12, 0.52, 0.04), 0.65),
    ((0.90, 0.45, 0.05), 0.90),
]


def _subpixel_grid(height, width, ss=_SUPERSAMPLE):
    """Subpixel sample coordinates in units of the image side (0..1)."""
    off = (np.arange(ss) + 0.5) / ss
    yy = (np.arange(height)[:, None] + off[None, :]).ravel() / height
    xx = (np.arange(width)[:, None] + off[None, :]).ravel() / width
    return yy[:, None], xx[None, :]


def _box_average(fine, height, width, ss=_SUPERSAMPLE):
    return fine.reshape(height, ss, width, ss).mean(axis=(1, 3))


def _disks(height, width):
    yy, xx = _subpixel_grid(height, width)
    side = min(height, width)
    fine = np.zeros((yy.shape[0], xx.shape[1]))
    for (cy, cx, r), amp in DISKS:
        # radii are fractions of the shorter side
        inside = ((yy - cy) * height) ** 2 + ((xx - cx) * width) ** 2 <= (r * side) ** 2
        fine = np.where(inside, amp, fine)
    return _box_average(fine, height, width)


def _segment_distance(py, px, ay, ax, by, bx):
    dy, dx = by - ay, bx - ax
    t = np.clip(((py - ay) * dy + (px - ax) * dx) / (dy * dy + dx * dx), 0.0, 1.0)
    return np.hypot(py - (ay + t * dy), px - (ax + t * dx))


def _dendrite(height, width):
    yy, xx = _subpixel_grid(height, width)
    fine = np.zeros((yy.shape[0], xx.shape[1]))

    def shaft_y(x):
        return 0.5 + 0.12 * np.sin(2.0 * np.pi * (x - 0.1) / 1.1)

    # shaft: ridge of half-width 0.035 along a sinusoid, brighter at the core
    dist = np.abs(yy - shaft_y(xx))
    fine = np.maximum(fine, np.where(dist <= 0.035, 0.55 + 0.15 * (1.0 - dist / 0.035), 0.0))

    # spines: (x along shaft, side +-1, neck length, head radius)
    spines = [
        (0.15, -1, 0.13, 0.040),
        (0.32, 1, 0.16, 0.050),
        (0.47, -1, 0.10, 0.030),
        (0.60, 1, 0.12, 0.045),
        (0.76, -1, 0.17, 0.055),
        (0.88, 1, 0.09, 0.035),
    ]
    for sx, side, neck, head in spines:
        by = shaft_y(sx)
        hy, hx = by + side * neck, sx + 0.02
        neck_d = _segment_distance(yy, xx, by, sx, hy, hx)
        fine = np.maximum(fine, np.where(neck_d <= 0.008, 0.6, 0.0))
        head_d = np.hypot(yy - hy, xx - hx)
        fine = np.maximum(fine, np.where(head_d <= head, 1.0 - 0.3 * (head_d / head) ** 2, 0.0))
    return _box_average(fine, height, width)


PHANTOMS = {"disks": _disks, "dendrite": _dendrite}


def make_phantom(kind, width, height):
    """Deterministic builtin phantom with minimum 0 and maximum 1.

    ``kind`` is ``'disks'`` or ``'dendrite'``; both sides must be powers of two.
    """
    if kind not in PHANTOMS:
        raise ConfigurationError(f"unknown phantom {kind!r}; choose from {sorted(PHANTOMS)}")
    for side in (width, height):
        if side < 8 or side & (side - 1):
            raise DimensionError("phantom sides must be powers of two >= 8")
    img = PHANTOMS[kind](height, width)
    img -= img.min()
    return img / img.max()


def scale_to_max(x, target):
    """Rescale ``x`` so that its maximum equals ``target``."""
    x = as_image(x)
    peak = x.max()
    if not peak > 0:
        raise DomainError("image must have a positive maximum")
    if not target > 0:
        raise ConfigurationError("target maximum must be positive")
    out = x * (target / peak)
    out[x == peak] = target
    return out


def poisson_sample(intensity, rng):
    """Independent Poisson counts with the given means."""
    intensity = np.asarray(intensity, dtype=np.float64)
    if np.any(intensity < 0) or np.any(np.isnan(intensity)):
        raise DomainError("Poisson intensities must be nonnegative")
    return rng.poisson(intensity).astype(np.float64)
