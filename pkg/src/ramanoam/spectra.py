"""Signal transmission spectra of the pumped Lambda medium.

The medium is a thin slab with resonant optical density ``b0``; the signal
intensity transmission is ``exp(-b0 * a)`` where ``a`` is the absorption
normalised to the bare c-b transition on resonance.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ramanoam.bloch import GAMMA_MHZ, LambdaSystem, linear_response
from ramanoam.errors import InvalidParameterError

CSV_HEADER = "delta_MHz,delta_Gamma,transmission"


@dataclass(frozen=True)
class MediumSpec:
    optical_density: float = 3.0

    def __post_init__(self):
        if not (self.optical_density >= 0 and math.isfinite(self.optical_density)):
            raise InvalidParameterError("optical_density must be finite and >= 0")


def _bare_norm(gamma):
    # Bare two-level response on resonance, from the same machinery.
    r0 = complex(linear_response(0.0, 0.0, 0.0, 0.0, gamma))
    return -(gamma / 2) * r0.imag


def absorption_dispersion(omega_c, gamma_p, delta_c, delta_s, gamma=1.0):
    """Normalised absorption ``a`` and dispersion ``d`` on arrays.

    ``a == 1`` for the bare transition on resonance and ``a < 0`` is gain;
    ``d`` uses the same scale on the real part of the response.
    """
    r = linear_response(omega_c, gamma_p, delta_c, delta_s, gamma)
    norm = _bare_norm(gamma)
    return -(gamma / 2) * r.imag / norm, (gamma / 2) * r.real / norm


def normalized_absorption(sys: LambdaSystem) -> float:
    """Signal absorption in units of the bare resonant absorption (negative = gain)."""
    if sys.gamma_ba != sys.gamma_bc:
        raise InvalidParameterError("closed-form response needs gamma_ba == gamma_bc")
    a, _ = absorption_dispersion(sys.omega_c, sys.gamma_p, sys.delta_c, sys.delta_s,
                                 sys.gamma)
    return float(a)


def transmission(sys: LambdaSystem, medium: MediumSpec) -> float:
    """Intensity transmission ``T``; ``T > 1`` means the signal is amplified."""
    return math.exp(-medium.optical_density * normalized_absorption(sys))


@dataclass
class SpectrumScan:
    """Transmission sampled against two-photon detuning (Γ units)."""

    delta_values: np.ndarray
    transmission: np.ndarray
    system: LambdaSystem
    medium: MediumSpec

    def __post_init__(self):
        self.delta_values = np.asarray(self.delta_values, float)
        self.transmission = np.asarray(self.transmission, float)
        if self.delta_values.shape != self.transmission.shape:
            raise InvalidParameterError("delta and transmission lengths differ")
        steps = np.diff(self.delta_values)
        degenerate = self.delta_values.size and np.all(self.delta_values == self.delta_values[0])
        if not degenerate and np.any(steps <= 0):
            raise InvalidParameterError("delta values must be strictly increasing")
        if np.any(~(self.transmission > 0)):
            raise InvalidParameterError("transmission must be > 0")

    @property
    def delta_mhz(self):
        return self.delta_values * GAMMA_MHZ

    def to_csv(self) -> str:
        """CSV text with round-trip float formatting."""
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for dg, t in zip(self.delta_values.tolist(), self.transmission.tolist()):
            buf.write(f"{dg * GAMMA_MHZ!r},{dg!r},{t!r}\n")
        return buf.getvalue()


def read_spectrum_csv(text):
    """Parse CSV produced by :meth:`SpectrumScan.to_csv` into ``(delta_gamma, T)`` arrays."""
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError("unexpected spectrum CSV header")
    rows = [tuple(float(v) for v in ln.split(",")) for ln in lines[1:]]
    arr = np.array(rows, float).reshape(-1, 3)
    return arr[:, 1], arr[:, 2]


def scan_spectrum(sys_template: LambdaSystem, medium: MediumSpec,
                  delta_range=(-2.0, 2.0), n_points=401, workers=None) -> SpectrumScan:
    """Scan the two-photon detuning at fixed coupling detuning.

    The signal detuning is set to ``delta_c - delta`` for each sample. With
    ``workers > 1`` the grid is split into contiguous chunks evaluated in a
    thread pool; the result is identical to the serial scan.
    """
    if n_points < 2:
        raise InvalidParameterError("n_points must be >= 2")
    lo, hi = (float(v) for v in delta_range)
    if hi < lo:
        raise InvalidParameterError("delta_range must be ordered (lo, hi)")
    s = sys_template
    if s.gamma_ba != s.gamma_bc:
        raise InvalidParameterError("closed-form response needs gamma_ba == gamma_bc")
    deltas = np.linspace(lo, hi, int(n_points))

    def chunk(d):
        a, _ = absorption_dispersion(s.omega_c, s.gamma_p, s.delta_c, s.delta_c - d, s.gamma)
        return np.exp(-medium.optical_density * a)

    if workers and workers > 1:
        parts = np.array_split(deltas, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            t = np.concatenate(list(pool.map(chunk, parts)))
    else:
        t = chunk(deltas)
    return SpectrumScan(deltas, t, s, medium)


@dataclass(frozen=True)
class PeakReport:
    peak_delta: float
    peak_transmission: float
    is_gain: bool
    fwhm: float | None = None  # Γ units
    fwhm_truncated: bool = False  # half-maximum not reached inside the scan

    @property
    def peak_delta_mhz(self):
        return self.peak_delta * GAMMA_MHZ

    @property
    def fwhm_mhz(self):
        return None if self.fwhm is None else self.fwhm * GAMMA_MHZ

    @property
    def peak_gain(self):
        return self.peak_transmission - 1.0


def _crossing(x0, y0, x1, y1, level):
    if y1 == y0:
        return x0
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def analyze_peak(scan: SpectrumScan) -> PeakReport:
    """Peak transmission and full width at half maximum of ``T - 1``."""
    x, t = scan.delta_values, scan.transmission
    if x.size == 0:
        raise InvalidParameterError("empty scan")
    i = int(np.argmax(t))
    tmax = float(t[i])
    if tmax <= 1.0:
        return PeakReport(float(x[i]), tmax, False)
    g = t - 1.0
    half = (tmax - 1.0) / 2
    truncated = False
    j = i
    while j > 0 and g[j - 1] >= half:
        j -= 1
    if j == 0:
        left, truncated = float(x[0]), True
    else:
        left = _crossing(x[j - 1], g[j - 1], x[j], g[j], half)
    k = i
    while k < x.size - 1 and g[k + 1] >= half:
        k += 1
    if k == x.size - 1:
        right, truncated = float(x[-1]), True
    else:
        right = _crossing(x[k], g[k], x[k + 1], g[k + 1], half)
    return PeakReport(float(x[i]), tmax, True, float(right - left), truncated)
