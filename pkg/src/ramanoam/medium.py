"""Thin atomic slab acting on a transverse signal field as a complex mask."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ramanoam.bloch import LambdaSystem
from ramanoam.errors import AtomicSolverError, InvalidParameterError
from ramanoam.fields import ComplexField2D, Grid2D
from ramanoam.spectra import absorption_dispersion

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GainMedium:
    """Pumped cloud with a Gaussian coupling beam.

    ``coupling_waist`` may be ``math.inf`` for a uniform coupling field.
    ``pump_profile`` maps radius (mm) to a local pump rate; ``None`` keeps
    ``atomic.gamma_p`` everywhere.
    """

    optical_density: float = 3.0
    coupling_waist: float = 3.0
    coupling_peak_rabi: float = 0.1
    atomic: LambdaSystem = field(default_factory=lambda: LambdaSystem(gamma_p=0.05))
    thin_slab: bool = True
    length: float = 2.0
    pump_profile: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not self.coupling_waist > 0:
            raise InvalidParameterError("coupling_waist must be > 0")
        if not (self.optical_density >= 0 and math.isfinite(self.optical_density)):
            raise InvalidParameterError("optical_density must be finite and >= 0")
        if not (self.coupling_peak_rabi >= 0 and math.isfinite(self.coupling_peak_rabi)):
            raise InvalidParameterError("coupling_peak_rabi must be finite and >= 0")
        if not self.thin_slab:
            raise InvalidParameterError("only the thin-slab model is implemented")
        if self.atomic.gamma_ba != self.atomic.gamma_bc:
            raise InvalidParameterError("closed-form response needs gamma_ba == gamma_bc")

    def coupling_rabi(self, rho):
        if math.isinf(self.coupling_waist):
            return np.full_like(rho, self.coupling_peak_rabi, dtype=float)
        return self.coupling_peak_rabi * np.exp(-(rho / self.coupling_waist) ** 2)


def gain_mask(grid: Grid2D, medium: GainMedium) -> np.ndarray:
    """Complex amplitude transmission ``t(x, y)`` of the slab."""
    rho, _ = grid.polar()
    oc = medium.coupling_rabi(rho)
    at = medium.atomic
    gp = at.gamma_p if medium.pump_profile is None else medium.pump_profile(rho)
    a, d = absorption_dispersion(oc, gp, at.delta_c, at.delta_s, at.gamma)
    with np.errstate(all="ignore"):
        t = np.exp(0.5 * medium.optical_density * (-a + 1j * d))
    bad = ~np.isfinite(t)
    if bad.any():
        iy, ix = np.argwhere(bad)[0]
        x, y = grid.x[ix], grid.y[iy]
        raise AtomicSolverError(
            f"atomic response undefined at x={x:.4g} mm, y={y:.4g} mm "
            f"(omega_c={oc[iy, ix]:.4g})", x=float(x), y=float(y),
        )
    return t


def thin_slab_ratio(signal: ComplexField2D, medium: GainMedium) -> float:
    """Rayleigh range of the signal over the slab length."""
    return signal.rayleigh_range() / medium.length


def apply_gain_medium(signal: ComplexField2D, medium: GainMedium) -> ComplexField2D:
    """Pass ``signal`` through the slab; the input field is not modified."""
    if medium.optical_density == 0:
        return signal.copy()
    ratio = thin_slab_ratio(signal, medium)
    if ratio < 10:
        log.warning("thin-slab approximation marginal: z_R / L = %.3g", ratio)
    return signal.copy(signal.values * gain_mask(signal.grid, medium))
