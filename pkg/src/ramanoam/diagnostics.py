"""Topological-charge diagnostics for vortex beams.

Three independent readouts:

* the tilted-lens pattern, whose bright lobes are counted along their
  common axis (``|ell| + 1`` lobes, axis orientation gives the sign);
* the phase accumulated around a centred circle;
* overlap integrals with a Laguerre-Gauss basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.signal import find_peaks

from ramanoam.errors import (
    AliasingError,
    InvalidParameterError,
    LowContrastError,
    ResolutionError,
    UndefinedPhaseError,
)
from ramanoam.fields import ComplexField2D, Grid2D, intensity_moments, lg_radial

#: Lobe-axis orientation sign produced by a positive charge with the lens
#: astigmatism used here (shorter focal length along x), observed between foci.
POSITIVE_CHARGE_ORIENTATION = -1

_WINDOW_SIGMAS = 14.0


# ---------------------------------------------------------------------------
# tilted lens


def astigmatic_foci(focal, tilt_deg):
    """Effective focal lengths ``(f_x, f_y)`` of a thin lens tilted by ``tilt_deg``."""
    th = math.radians(tilt_deg)
    return focal * math.cos(th), focal / math.cos(th)


def conversion_focal(rayleigh_range, tilt_deg):
    """Focal length that makes the lens a quarter-wave astigmatic converter.

    At the midpoint between the foci the x and y Gouy phases then differ by
    pi/2 for a collimated input beam with the given Rayleigh range, which
    turns each Laguerre-Gauss ring into a diagonal row of Hermite-Gauss lobes.
    From the ray-transfer Gouy phases this gives
    ``f = z_R sin^2(tilt) / (1 + cos^2(tilt))``.
    """
    if not 0 < tilt_deg < 45:
        raise InvalidParameterError("tilt must lie in (0, 45) degrees")
    th = math.radians(tilt_deg)
    return rayleigh_range * math.sin(th) ** 2 / (1 + math.cos(th) ** 2)


@dataclass(frozen=True)
class LensGeometry:
    focal: float
    tilt_deg: float
    observe_z: float

    @classmethod
    def for_field(cls, field: ComplexField2D, tilt_deg=10.0, focal=None, observe_z=None):
        """Fill in unset values: focal from the beam's Rayleigh range, z at the mid-focus."""
        if focal is None:
            focal = conversion_focal(field.rayleigh_range(), tilt_deg)
        if observe_z is None:
            observe_z = 0.5 * sum(astigmatic_foci(focal, tilt_deg))
        return cls(float(focal), float(tilt_deg), float(observe_z))


def _output_window(field, fx_lens, fy_lens, z):
    cx, cy, vx, vy, _ = field.moments()
    sfx, sfy = field.spectral_sigma()
    lam = field.wavelength
    # Ray-transfer estimate of the rms size at the observation plane.
    sx = math.hypot((1 - z / fx_lens) * math.sqrt(vx), lam * z * sfx)
    sy = math.hypot((1 - z / fy_lens) * math.sqrt(vy), lam * z * sfy)
    return _WINDOW_SIGMAS * max(sx, sy)


def _fresnel_matrix(x_in, x_out, chirp, lam, z, d_in):
    k = 2 * np.pi / lam
    kernel = np.exp(-2j * np.pi * np.outer(x_out, x_in) / (lam * z))
    return kernel * (np.exp(0.5j * k * chirp * x_in ** 2) * d_in)[None, :]


def tilted_lens_transform(field: ComplexField2D, focal: float, tilt_deg: float,
                          observe_z: float | None = None, window: float | None = None,
                          n_out: int | None = None) -> ComplexField2D:
    """Field ``observe_z`` mm behind a tilted thin lens.

    The lens is astigmatic with ``f_x = f cos(tilt)`` and ``f_y = f / cos(tilt)``.
    Propagation uses the paraxial Fresnel integral evaluated as a separable
    matrix transform, so the output grid (``window`` mm, ``n_out`` samples
    per side) is chosen independently of the input pitch; by default it is
    sized from the beam's second moments.
    """
    if not focal > 0:
        raise InvalidParameterError("focal length must be > 0")
    if not 0 < tilt_deg < 45:
        raise InvalidParameterError("tilt must lie in (0, 45) degrees")
    fx_l, fy_l = astigmatic_foci(focal, tilt_deg)
    z = 0.5 * (fx_l + fy_l) if observe_z is None else float(observe_z)
    if not z > 0:
        raise InvalidParameterError("observe_z must be > 0")
    g, lam = field.grid, field.wavelength
    n = int(n_out or g.nx)
    if window is None:
        window = _output_window(field, fx_l, fy_l, z)
    out = Grid2D(n, n, window / n, window / n)

    # The discrete sum reproduces the integral only inside one replica period.
    if window > min(lam * z / g.dx, lam * z / g.dy):
        raise AliasingError(
            f"output window {window:.4g} mm exceeds the replica period "
            f"{min(lam * z / g.dx, lam * z / g.dy):.4g} mm of the input sampling"
        )
    chirp_x = 1 / z - 1 / fx_l
    chirp_y = 1 / z - 1 / fy_l
    inten = field.intensity
    sig = inten > 1e-12 * inten.max()
    X, Y = g.mesh()
    rmax_x = np.abs(X[sig]).max()
    rmax_y = np.abs(Y[sig]).max()
    if (abs(chirp_x) * rmax_x / lam > 0.5 / g.dx
            or abs(chirp_y) * rmax_y / lam > 0.5 / g.dy):
        raise AliasingError("residual lens chirp is under-sampled on the input grid")

    ax = _fresnel_matrix(g.x, out.x, chirp_x, lam, z, g.dx)
    ay = _fresnel_matrix(g.y, out.y, chirp_y, lam, z, g.dy)
    u = ay @ field.values @ ax.T
    k = 2 * np.pi / lam
    Xo, Yo = out.mesh()
    u *= np.exp(0.5j * k * (Xo ** 2 + Yo ** 2) / z) / (1j * lam * z)
    return ComplexField2D(out, u, lam)


# ---------------------------------------------------------------------------
# fringe counting


@dataclass(frozen=True)
class FringeCount:
    bright_fringes: int
    orientation_sign: int
    axis_angle_deg: float
    profile: np.ndarray
    peak_positions: np.ndarray


def count_fringes(image, grid: Grid2D, threshold=0.1, prominence=0.05) -> FringeCount:
    """Count bright lobes along the principal axis of an intensity image.

    The image is projected onto its intensity-weighted major axis (summing
    along the minor axis) and local maxima are kept when they reach
    ``threshold`` of the profile maximum with ``prominence`` of it. The
    orientation sign is the sign of the major-axis angle measured from +x.
    """
    img = np.asarray(image, float)
    top, bottom = img.max(), img.min()
    if not top > 0 or (top - bottom) < prominence * top:
        raise LowContrastError("image has no usable contrast")
    cx, cy, vx, vy, cxy = intensity_moments(img, grid)
    evals, evecs = np.linalg.eigh(np.array([[vx, cxy], [cxy, vy]]))
    ux, uy = evecs[:, 1]
    if ux < 0 or (ux == 0 and uy < 0):
        ux, uy = -ux, -uy
    angle = math.degrees(math.atan2(uy, ux))
    sign = 1 if angle > 0 else -1

    h = min(grid.dx, grid.dy)
    half = 0.5 * math.hypot(grid.width, grid.height)
    s = np.arange(-half, half + h / 2, h)
    S, T = np.meshgrid(s, s, indexing="ij")
    xs = cx + S * ux - T * uy
    ys = cy + S * uy + T * ux
    coords = np.array([ys / grid.dy + grid.ny // 2, xs / grid.dx + grid.nx // 2])
    samples = map_coordinates(img, coords, order=1, mode="constant", cval=0.0)
    profile = samples.sum(axis=1)
    pmax = profile.max()
    peaks, _ = find_peaks(profile, height=threshold * pmax, prominence=prominence * pmax)
    if peaks.size == 0:
        raise LowContrastError("no fringe clears the acceptance thresholds")
    return FringeCount(int(peaks.size), sign, angle, profile, s[peaks])


# ---------------------------------------------------------------------------
# phase winding and modal content


def phase_winding(field: ComplexField2D, radius: float, n_samples: int = 2048) -> float:
    """Phase accumulated around a centred circle, in units of 2*pi."""
    g = field.grid
    if not radius > 0:
        raise InvalidParameterError("radius must be > 0")
    if radius > 0.5 * min(g.width, g.height) - 2 * max(g.dx, g.dy):
        raise InvalidParameterError("circle leaves the grid")
    th = np.linspace(0.0, 2 * np.pi, n_samples, endpoint=False)
    coords = np.array([radius * np.sin(th) / g.dy + g.ny // 2,
                       radius * np.cos(th) / g.dx + g.nx // 2])
    re = map_coordinates(field.values.real, coords, order=3, mode="nearest")
    im = map_coordinates(field.values.imag, coords, order=3, mode="nearest")
    e = re + 1j * im
    peak = field.intensity.max()
    if np.min(np.abs(e) ** 2) < 1e-12 * peak:
        raise UndefinedPhaseError(f"field vanishes on the circle r={radius} mm")
    steps = np.angle(np.roll(e, -1) * np.conj(e))
    return float(steps.sum() / (2 * np.pi))


def ring_radius(field: ComplexField2D) -> float:
    """Radius of peak azimuthally averaged intensity, floored at half the rms radius."""
    g = field.grid
    rho, _ = g.polar()
    inten = field.intensity
    dr = max(g.dx, g.dy)
    bins = np.floor(rho / dr).astype(int)
    sums = np.bincount(bins.ravel(), inten.ravel())
    counts = np.bincount(bins.ravel())
    mean = sums / np.maximum(counts, 1)
    r_peak = (np.argmax(mean) + 0.5) * dr
    r_rms = math.sqrt((inten * rho ** 2).sum() / inten.sum())
    return float(max(r_peak, 0.5 * r_rms))


@dataclass
class ModeTable:
    """Power fractions ``{(ell, p): fraction}`` of a field in an LG basis."""

    waist: float
    fractions: dict

    def ell_fraction(self, ell):
        return sum(v for (l, _), v in self.fractions.items() if l == ell)

    def total(self):
        return sum(self.fractions.values())

    def dominant(self):
        """``(ell, fraction summed over p)`` of the strongest charge."""
        ells = sorted({l for l, _ in self.fractions})
        best = max(ells, key=self.ell_fraction)
        return best, self.ell_fraction(best)


def decompose_lg(field: ComplexField2D, waist: float, max_ell: int = 6,
                 max_p: int = 8) -> ModeTable:
    """Overlap integrals of ``field`` with ``LG_p^ell`` for ``|ell| <= max_ell``, ``p <= max_p``."""
    g = field.grid
    if not waist > 0:
        raise InvalidParameterError("waist must be > 0")
    if 2 * waist < 8 * max(g.dx, g.dy) or min(g.width, g.height) < 6 * waist:
        raise ResolutionError(f"basis waist {waist} mm not resolvable on this grid")
    rho, phi = g.polar()
    dA = g.cell_area
    total = float(np.sum(field.intensity) * dA)
    if not total > 0:
        raise InvalidParameterError("field has no power")
    fractions = {}
    for ell in range(-max_ell, max_ell + 1):
        proj = field.values * np.exp(-1j * ell * phi)
        for p in range(max_p + 1):
            r = lg_radial(rho, ell, p, waist)
            norm = math.sqrt(np.sum(r * r) * dA)
            c = np.sum(r * proj) * dA / norm
            fractions[(ell, p)] = float(abs(c) ** 2 / total)
    return ModeTable(waist, fractions)


# ---------------------------------------------------------------------------
# combined readout


@dataclass(frozen=True)
class ChargeReport:
    bright_fringes: int
    tilt_sign: int
    inferred_ell: int
    dominant_mode_fraction: float
    dominant_ell: int | None = None
    winding: float | None = None

    def __post_init__(self):
        if self.bright_fringes < 1:
            raise InvalidParameterError("bright_fringes must be >= 1")
        if abs(self.inferred_ell) != self.bright_fringes - 1:
            raise InvalidParameterError("|inferred_ell| must equal bright_fringes - 1")


def charge_from_fringes(count: FringeCount) -> tuple[int, int]:
    """``(tilt_sign, inferred_ell)`` with ``tilt_sign`` equal to the charge sign."""
    tilt_sign = count.orientation_sign * POSITIVE_CHARGE_ORIENTATION
    return tilt_sign, tilt_sign * (count.bright_fringes - 1)
