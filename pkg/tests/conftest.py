import math

import numpy as np
import pytest


def regular_ngon(n, circumradius=1.0, phase=0.0, center=(0.0, 0.0)):
    """Vertices of a regular n-gon, counterclockwise."""
    k = np.arange(n)
    ang = phase + 2.0 * np.pi * k / n
    return np.column_stack(
        [center[0] + circumradius * np.cos(ang), center[1] + circumradius * np.sin(ang)]
    )


def star_polygon(rng, n_min=4, n_max=30, center=(0.0, 0.0)):
    """Random simple polygon, star-shaped about its center."""
    n = int(rng.integers(n_min, n_max + 1))
    ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    # Collapsing angles would create near-duplicate vertices; spread them out.
    while np.min(np.diff(ang, append=ang[0] + 2.0 * np.pi)) < 1e-3:
        ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
    r = rng.uniform(0.3, 2.0, n)
    return np.column_stack([center[0] + r * np.cos(ang), center[1] + r * np.sin(ang)])


def rotate(vertices, theta, about=(0.0, 0.0)):
    v = np.asarray(vertices, dtype=float) - about
    c, s = math.cos(theta), math.sin(theta)
    return v @ np.array([[c, s], [-s, c]]) + about


def ramp_disc_values(size, ramp_radius=None):
    """Radial ramp clamp(1 - r/R, 0, 1) centered on a size x size grid.

    The 0.5 level set is the circle of radius R/2.  Default R scales with the
    grid (80 px at 256) so refinement studies keep the same relative geometry.
    """
    if ramp_radius is None:
        ramp_radius = size * 80.0 / 256.0
    c = (size - 1) / 2.0
    y, x = np.mgrid[0:size, 0:size]
    r = np.hypot(x - c, y - c)
    return np.clip(1.0 - r / ramp_radius, 0.0, 1.0)


def gaussian_random_field(shape, sigma, seed):
    """Smooth isotropic random field on [0, 1], via spectral filtering of white noise."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(shape)
    ky = np.fft.fftfreq(shape[0])[:, None]
    kx = np.fft.fftfreq(shape[1])[None, :]
    kernel = np.exp(-2.0 * (np.pi * sigma) ** 2 * (kx**2 + ky**2))
    field = np.fft.ifft2(np.fft.fft2(noise) * kernel).real
    lo, hi = field.min(), field.max()
    return (field - lo) / (hi - lo)


def stretch_x2(values):
    """Resample a field at x/2: blobs come out elongated 2x along x."""
    h, w = values.shape
    half = values[:, : w // 2 + 1]
    out = np.empty((h, 2 * (half.shape[1] - 1)), dtype=float)
    out[:, 0::2] = half[:, :-1]
    out[:, 1::2] = 0.5 * (half[:, :-1] + half[:, 1:])
    return out[:, :w]


def triangular_lattice(nx, ny, spacing=1.0):
    pts = []
    for r in range(ny):
        for c in range(nx):
            pts.append(((c + 0.5 * (r % 2)) * spacing, r * spacing * math.sqrt(3.0) / 2.0))
    return np.array(pts)


def square_lattice(nx, ny, spacing=1.0):
    y, x = np.mgrid[0:ny, 0:nx]
    return np.column_stack([x.ravel() * spacing, y.ravel() * spacing])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
