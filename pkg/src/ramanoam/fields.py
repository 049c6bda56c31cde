"""Sampled transverse fields, Laguerre-Gauss synthesis and free-space propagation.

Lengths are in millimetres. Arrays are indexed ``values[iy, ix]`` with the
optical axis at index ``(ny // 2, nx // 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre

from ramanoam.errors import AliasingError, InvalidParameterError, ResolutionError

#: Cesium D2 wavelength in mm.
CS_D2_WAVELENGTH = 852e-6

_SPECTRAL_LEAK = 1e-9


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    dx: float
    dy: float

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if int(n) != n or not _is_pow2(int(n)) or n < 64:
                raise InvalidParameterError(f"{name} must be a power of two >= 64, got {n}")
        for name in ("dx", "dy"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidParameterError(f"{name} must be > 0")

    @classmethod
    def square(cls, n, window):
        """``n x n`` grid spanning ``window`` mm per side."""
        return cls(n, n, window / n, window / n)

    @property
    def width(self):
        return self.nx * self.dx

    @property
    def height(self):
        return self.ny * self.dy

    @property
    def x(self):
        return (np.arange(self.nx) - self.nx // 2) * self.dx

    @property
    def y(self):
        return (np.arange(self.ny) - self.ny // 2) * self.dy

    def mesh(self):
        """``(X, Y)`` coordinate arrays of shape ``(ny, nx)``."""
        return np.meshgrid(self.x, self.y, indexing="xy")

    def polar(self):
        X, Y = self.mesh()
        return np.hypot(X, Y), np.arctan2(Y, X)

    @property
    def cell_area(self):
        return self.dx * self.dy


@dataclass(frozen=True)
class LGIndex:
    ell: int
    p: int = 0

    def __post_init__(self):
        if int(self.ell) != self.ell or int(self.p) != self.p:
            raise InvalidParameterError("ell and p must be integers")
        if self.p < 0:
            raise InvalidParameterError("p must be >= 0")


@dataclass
class ComplexField2D:
    grid: Grid2D
    values: np.ndarray
    wavelength: float = CS_D2_WAVELENGTH

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.ny, self.grid.nx):
            raise InvalidParameterError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.ny}, {self.grid.nx})"
            )
        if not np.isfinite(self.values).all():
            raise InvalidParameterError("field values must be finite")
        if not (self.wavelength > 0):
            raise InvalidParameterError("wavelength must be > 0")

    @property
    def intensity(self):
        return np.abs(self.values) ** 2

    def power(self):
        return float(np.sum(self.intensity) * self.grid.cell_area)

    def copy(self, values=None):
        v = self.values.copy() if values is None else values
        return ComplexField2D(self.grid, v, self.wavelength)

    def moments(self):
        """Intensity-weighted ``(cx, cy, var_x, var_y, cov_xy)``."""
        return intensity_moments(self.intensity, self.grid)

    def spectral_sigma(self):
        """RMS spatial frequency per axis (cycles/mm) of the angular spectrum."""
        spec = np.abs(np.fft.fft2(self.values)) ** 2
        fx = np.fft.fftfreq(self.grid.nx, self.grid.dx)
        fy = np.fft.fftfreq(self.grid.ny, self.grid.dy)
        total = spec.sum()
        px = spec.sum(axis=0) / total
        py = spec.sum(axis=1) / total
        mx, my = (px * fx).sum(), (py * fy).sum()
        return (math.sqrt(max((px * (fx - mx) ** 2).sum(), 0.0)),
                math.sqrt(max((py * (fy - my) ** 2).sum(), 0.0)))

    def rayleigh_range(self):
        """Rayleigh range from second moments, assuming the field is at its waist.

        Independent of the mode order: the ratio of spatial to angular width
        is the same for every member of a Laguerre-Gauss family.
        """
        _, _, vx, vy, _ = self.moments()
        sfx, sfy = self.spectral_sigma()
        zx = math.sqrt(vx) / (self.wavelength * sfx)
        zy = math.sqrt(vy) / (self.wavelength * sfy)
        return 0.5 * (zx + zy)


def intensity_moments(image, grid):
    w = np.asarray(image, float)
    total = w.sum()
    if not total > 0:
        raise InvalidParameterError("image has no power")
    X, Y = grid.mesh()
    cx = (w * X).sum() / total
    cy = (w * Y).sum() / total
    vx = (w * (X - cx) ** 2).sum() / total
    vy = (w * (Y - cy) ** 2).sum() / total
    cxy = (w * (X - cx) * (Y - cy)).sum() / total
    return float(cx), float(cy), float(vx), float(vy), float(cxy)


def _check_waist(grid, waist):
    if not (waist > 0 and math.isfinite(waist)):
        raise InvalidParameterError("waist must be > 0")
    if 2 * waist < 8 * max(grid.dx, grid.dy):
        raise ResolutionError(
            f"waist {waist} mm spans fewer than 8 samples (pitch {max(grid.dx, grid.dy)} mm)"
        )
    if min(grid.width, grid.height) < 6 * waist:
        raise ResolutionError(
            f"window {min(grid.width, grid.height)} mm is smaller than 6x waist {waist} mm"
        )


def lg_radial(rho, ell, p, waist):
    """Unnormalised radial profile of the Laguerre-Gauss mode at its waist."""
    u = 2 * rho ** 2 / waist ** 2
    m = abs(int(ell))
    return (np.sqrt(u)) ** m * np.exp(-u / 2) * eval_genlaguerre(int(p), m, u)


def lg_field(grid: Grid2D, idx: LGIndex, waist: float, power: float = 1.0,
             wavelength: float = CS_D2_WAVELENGTH) -> ComplexField2D:
    """Laguerre-Gauss mode ``LG_p^ell`` at its waist plane.

    The amplitude is scaled so the grid-integrated power equals ``power``.
    """
    _check_waist(grid, waist)
    if not (power > 0 and math.isfinite(power)):
        raise InvalidParameterError("power must be > 0")
    rho, phi = grid.polar()
    values = lg_radial(rho, idx.ell, idx.p, waist).astype(np.complex128)
    if idx.ell != 0:
        values *= np.exp(1j * idx.ell * phi)
    norm = math.sqrt(np.sum(np.abs(values) ** 2) * grid.cell_area)
    values *= math.sqrt(power) / norm
    return ComplexField2D(grid, values, wavelength)


def gaussian_field(grid: Grid2D, waist: float, power: float = 1.0,
                   wavelength: float = CS_D2_WAVELENGTH) -> ComplexField2D:
    """Fundamental Gaussian beam at its waist."""
    return lg_field(grid, LGIndex(0, 0), waist, power, wavelength)


def gaussian_width(w0, z, wavelength=CS_D2_WAVELENGTH):
    """Analytic ``1/e^2`` radius of a Gaussian beam a distance ``z`` from its waist."""
    zr = math.pi * w0 ** 2 / wavelength
    return w0 * math.sqrt(1 + (z / zr) ** 2)


def _band_limit(length, wavelength, z):
    return 1.0 / (wavelength * math.sqrt((2 * z / length) ** 2 + 1))


def propagate(field: ComplexField2D, distance: float) -> ComplexField2D:
    """Band-limited angular-spectrum propagation over ``distance`` mm.

    Components outside the band limit would alias the transfer function on
    this grid; if they carry non-negligible power an :class:`AliasingError`
    is raised rather than silently dropping them.
    """
    if not math.isfinite(distance):
        raise InvalidParameterError("distance must be finite")
    if distance == 0:
        return field.copy()
    g, lam = field.grid, field.wavelength
    fx = np.fft.fftfreq(g.nx, g.dx)
    fy = np.fft.fftfreq(g.ny, g.dy)
    FX, FY = np.meshgrid(fx, fy, indexing="xy")
    z = abs(distance)
    lim_x = _band_limit(g.width, lam, z)
    lim_y = _band_limit(g.height, lam, z)
    arg = 1.0 / lam ** 2 - FX ** 2 - FY ** 2
    passband = (np.abs(FX) <= lim_x) & (np.abs(FY) <= lim_y) & (arg > 0)

    spectrum = np.fft.fft2(field.values)
    power = np.abs(spectrum) ** 2
    leak = power[~passband].sum() / power.sum()
    if leak > _SPECTRAL_LEAK:
        raise AliasingError(
            f"{leak:.2e} of the spectral power lies outside the band limit "
            f"(|fx|<={lim_x:.3g}, |fy|<={lim_y:.3g} /mm) at z={distance} mm; "
            "enlarge the window or refine the grid"
        )
    # kz - k without cancellation; the common exp(ikz) carrier is dropped.
    f2 = FX ** 2 + FY ** 2
    dkz = -2 * np.pi * f2 / (np.sqrt(np.where(passband, arg, 0.0)) + 1.0 / lam)
    h = np.where(passband, np.exp(1j * dkz * distance), 0.0)
    return field.copy(np.fft.ifft2(spectrum * h))
