"""Raman amplification of vortex beams in a pumped three-level Lambda medium."""

from ramanoam._backend import BACKEND
from ramanoam.bloch import (
    GAMMA_MHZ,
    DensityMatrix,
    LambdaSystem,
    bloch_rhs,
    first_order_signal_coherence,
    full_steady_state,
    gamma_to_mhz,
    integrate_to_steady_state,
    mhz_to_gamma,
    signal_response_ratio,
    zero_order_steady_state,
)
from ramanoam.diagnostics import (
    ChargeReport,
    LensGeometry,
    count_fringes,
    decompose_lg,
    phase_winding,
    tilted_lens_transform,
)
from ramanoam.fields import (
    ComplexField2D,
    Grid2D,
    LGIndex,
    gaussian_field,
    lg_field,
    propagate,
)
from ramanoam.medium import GainMedium, apply_gain_medium
from ramanoam.spectra import (
    MediumSpec,
    PeakReport,
    SpectrumScan,
    analyze_peak,
    normalized_absorption,
    scan_spectrum,
    transmission,
)

__version__ = "0.1.0"
