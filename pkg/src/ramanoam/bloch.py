"""Three-level Lambda system: Bloch equations and their steady states.

Levels: ``a`` and ``c`` are the ground states, ``b`` the excited state. The
coupling field drives a-b with real Rabi frequency ``omega_c``; the weak
signal drives c-b with complex ``omega_s``. An incoherent rate ``gamma_p``
moves population from c to a. All rates and detunings are in units of the
excited-state decay rate (``gamma == 1`` by default); the helpers
:func:`mhz_to_gamma` and :func:`gamma_to_mhz` convert frequencies quoted as
``Δ/2π`` in MHz.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from ramanoam._backend import kernels
from ramanoam.errors import (
    InvalidParameterError,
    NonConvergenceError,
    SingularSystemError,
)

#: Natural linewidth Γ/2π of the cesium D2 line in MHz.
GAMMA_MHZ = 5.2

_COND_LIMIT = 1e12


def mhz_to_gamma(f_mhz):
    """Convert a frequency ``Δ/2π`` in MHz to units of Γ."""
    return f_mhz / GAMMA_MHZ


def gamma_to_mhz(x):
    """Convert a frequency in units of Γ to ``Δ/2π`` in MHz."""
    return x * GAMMA_MHZ


def _finite(name, value):
    if not math.isfinite(abs(value)):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class LambdaSystem:
    """Physical parameters of the driven Lambda scheme.

    ``gamma_ba`` and ``gamma_bc`` default to ``gamma / 2``. ``delta`` is the
    two-photon detuning ``delta_c - delta_s``.
    """

    gamma: float = 1.0
    gamma_ba: float | None = None
    gamma_bc: float | None = None
    gamma_p: float = 0.0
    omega_c: float = 0.0
    omega_s: complex = 0j
    delta_c: float = 0.0
    delta_s: float = 0.0

    def __post_init__(self):
        if self.gamma_ba is None and self.gamma_bc is None:
            object.__setattr__(self, "gamma_ba", self.gamma / 2)
            object.__setattr__(self, "gamma_bc", self.gamma / 2)
        elif self.gamma_ba is None:
            object.__setattr__(self, "gamma_ba", self.gamma - self.gamma_bc)
        elif self.gamma_bc is None:
            object.__setattr__(self, "gamma_bc", self.gamma - self.gamma_ba)
        object.__setattr__(self, "omega_s", complex(self.omega_s))
        for name in ("gamma", "gamma_ba", "gamma_bc", "gamma_p", "omega_c",
                     "omega_s", "delta_c", "delta_s"):
            _finite(name, getattr(self, name))
        if not self.gamma > 0:
            raise InvalidParameterError("gamma must be > 0")
        for name in ("gamma_ba", "gamma_bc", "gamma_p"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0")
        if isinstance(self.omega_c, complex) or self.omega_c < 0:
            raise InvalidParameterError("omega_c must be real and >= 0")
        if abs(self.gamma_ba + self.gamma_bc - self.gamma) > 1e-12 * self.gamma:
            raise InvalidParameterError(
                "gamma_ba + gamma_bc must equal gamma "
                f"({self.gamma_ba} + {self.gamma_bc} != {self.gamma})"
            )

    @classmethod
    def from_two_photon(cls, delta_c=0.0, delta=0.0, **kwargs):
        """Build a system from the coupling detuning and two-photon detuning."""
        return cls(delta_c=delta_c, delta_s=delta_c - delta, **kwargs)

    @property
    def delta(self):
        return self.delta_c - self.delta_s

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def with_delta(self, delta):
        """Copy at fixed ``delta_c`` with the signal detuned to two-photon ``delta``."""
        return dataclasses.replace(self, delta_s=self.delta_c - delta)

    def params(self):
        """Flat parameter tuple in the kernel layout."""
        return (
            float(self.gamma), float(self.gamma_ba), float(self.gamma_bc),
            float(self.gamma_p), float(self.omega_c),
            self.omega_s.real, self.omega_s.imag,
            float(self.delta_c), float(self.delta_s),
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Independent elements of the 3x3 slow-envelope density matrix.

    Only ``sigma_ab``, ``sigma_cb`` and ``sigma_ac`` are stored; their
    conjugates are derived. Also used to carry time derivatives, which is why
    construction does not validate; call :meth:`check` for that.
    """

    sigma_aa: float = 0.0
    sigma_bb: float = 0.0
    sigma_cc: float = 0.0
    sigma_ab: complex = 0j
    sigma_cb: complex = 0j
    sigma_ac: complex = 0j

    @classmethod
    def pure(cls, level):
        """Population entirely in ``level`` ('a', 'b' or 'c')."""
        if level not in ("a", "b", "c"):
            raise InvalidParameterError(f"unknown level {level!r}")
        return cls(**{f"sigma_{level}{level}": 1.0})

    @classmethod
    def from_vector(cls, x):
        return cls(
            float(x[0]), float(x[1]), float(x[2]),
            complex(x[3], x[4]), complex(x[5], x[6]), complex(x[7], x[8]),
        )

    def to_vector(self):
        return [
            float(self.sigma_aa), float(self.sigma_bb), float(self.sigma_cc),
            self.sigma_ab.real, self.sigma_ab.imag,
            self.sigma_cb.real, self.sigma_cb.imag,
            self.sigma_ac.real, self.sigma_ac.imag,
        ]

    @property
    def sigma_ba(self):
        return self.sigma_ab.conjugate()

    @property
    def sigma_bc(self):
        return self.sigma_cb.conjugate()

    @property
    def sigma_ca(self):
        return self.sigma_ac.conjugate()

    @property
    def trace(self):
        return self.sigma_aa + self.sigma_bb + self.sigma_cc

    def matrix(self):
        """Full Hermitian matrix in the basis order (a, b, c)."""
        return np.array([
            [self.sigma_aa, self.sigma_ab, self.sigma_ac],
            [self.sigma_ba, self.sigma_bb, self.sigma_bc],
            [self.sigma_ca, self.sigma_cb, self.sigma_cc],
        ], dtype=complex)

    def violations(self, tol=1e-9):
        """List the density-matrix invariants this instance breaks."""
        out = []
        pops = {"aa": self.sigma_aa, "bb": self.sigma_bb, "cc": self.sigma_cc}
        for k, v in pops.items():
            if not (-tol <= v <= 1 + tol):
                out.append(f"sigma_{k}={v} outside [0, 1]")
        if abs(self.trace - 1) > tol:
            out.append(f"trace={self.trace} != 1")
        for ij, coh in (("ab", self.sigma_ab), ("cb", self.sigma_cb), ("ac", self.sigma_ac)):
            bound = pops[ij[0] * 2] * pops[ij[1] * 2]
            if abs(coh) ** 2 > bound + tol:
                out.append(f"|sigma_{ij}|^2={abs(coh) ** 2} exceeds {bound}")
        return out

    def check(self, tol=1e-9):
        bad = self.violations(tol)
        if bad:
            raise InvalidParameterError("invalid density matrix: " + "; ".join(bad))
        return self

    def max_abs_diff(self, other):
        return max(abs(u - v) for u, v in zip(self.to_vector(), other.to_vector()))


def bloch_rhs(sys: LambdaSystem, rho: DensityMatrix) -> DensityMatrix:
    """Time derivative of ``rho`` under the rotating-wave Bloch equations.

    The signal coherence rotates at the signal detuning, i.e. the c-b
    equation carries ``i*delta_s*sigma_cb``.
    """
    return DensityMatrix.from_vector(kernels.rhs(sys.params(), rho.to_vector()))


def _liouvillian(sys):
    """Real 9x9 matrix of the (linear, homogeneous) Bloch equations."""
    p = sys.params()
    m = np.empty((9, 9))
    e = [0.0] * 9
    for j in range(9):
        e[j] = 1.0
        m[:, j] = kernels.rhs(p, e)
        e[j] = 0.0
    return m


# ---------------------------------------------------------------------------
# closed forms


def zero_order_populations(omega_c, delta_c, gamma_p, gamma=1.0):
    """Signal-free steady state on arrays: ``(s_aa, s_bb, s_cc, s_ab)``.

    Vectorised over any broadcastable inputs. ``gamma_p == 0`` takes the
    optical-pumping limit (everything in ``c``, no coherence).
    """
    omega_c, delta_c, gamma_p = np.broadcast_arrays(
        np.asarray(omega_c, float), np.asarray(delta_c, float), np.asarray(gamma_p, float)
    )
    pumped = gamma_p > 0
    # Closed forms scaled by 2*gamma_p so that gamma/(2*gamma_p) never overflows.
    g2 = 2 * gamma_p
    oc2 = omega_c ** 2
    base = delta_c ** 2 + gamma ** 2 / 4
    with np.errstate(invalid="ignore", divide="ignore"):
        s_aa = np.where(oc2 > 0, g2 * (oc2 + base) / (oc2 * (2 * g2 + gamma) + g2 * base), 1.0)
        s_bb = g2 * (1 - s_aa) / (g2 + gamma)
        s_cc = gamma * (1 - s_aa) / (g2 + gamma)
        s_ab = (-1j * omega_c * (g2 - (2 * g2 + gamma) * s_aa)
                / ((1j * delta_c - gamma / 2) * (g2 + gamma)))
    s_aa = np.where(pumped, s_aa, 0.0)
    s_bb = np.where(pumped, s_bb, 0.0)
    s_cc = np.where(pumped, s_cc, 1.0)
    s_ab = np.where(pumped, s_ab, 0j)
    return s_aa, s_bb, s_cc, s_ab


def linear_response(omega_c, gamma_p, delta_c, delta_s, gamma=1.0):
    """First-order signal coherence per unit signal Rabi frequency.

    Returns ``sigma_cb / omega_s`` to first order in the signal and all
    orders in the coupling field, vectorised over broadcastable inputs.
    Positive imaginary part means gain.
    """
    omega_c, gamma_p, delta_c, delta_s = np.broadcast_arrays(
        np.asarray(omega_c, float), np.asarray(gamma_p, float),
        np.asarray(delta_c, float), np.asarray(delta_s, float),
    )
    s_aa, s_bb, s_cc, s_ab = zero_order_populations(omega_c, delta_c, gamma_p, gamma)
    s_ba = np.conj(s_ab)
    delta = delta_c - delta_s
    inversion = s_cc - s_bb
    optical = 1j * delta_s - gamma / 2
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        num = (-delta + 0.5j * gamma_p) * inversion - omega_c * s_ba
        den = (1j * delta + gamma_p / 2) * optical - omega_c ** 2
        general = num / den
    # Without coupling the Raman factor (i*delta + gamma_p/2) cancels exactly.
    # A subnormal omega_c**2 is treated as no coupling: the transparency
    # window it would open is far below double resolution.
    bare = 1j * inversion / optical
    return np.where(omega_c ** 2 >= np.finfo(float).tiny, general, bare)


def zero_order_steady_state(sys: LambdaSystem) -> DensityMatrix:
    """Steady state to zeroth order in the signal field.

    Requires symmetric branching (``gamma_ba == gamma_bc``), for which the
    closed forms hold.
    """
    if sys.gamma_ba != sys.gamma_bc:
        raise InvalidParameterError("closed-form steady state needs gamma_ba == gamma_bc")
    s_aa, s_bb, s_cc, s_ab = zero_order_populations(
        sys.omega_c, sys.delta_c, sys.gamma_p, sys.gamma
    )
    s_aa, s_bb, s_cc = float(s_aa), float(s_bb), float(s_cc)
    # Absorb rounding so the trace is exactly one.
    s_bb = 1.0 - s_aa - s_cc
    return DensityMatrix(s_aa, s_bb, s_cc, complex(s_ab), 0j, 0j)


def signal_response_ratio(sys: LambdaSystem) -> complex:
    """``sigma_cb / omega_s`` at first order; independent of the signal strength."""
    if sys.gamma_ba != sys.gamma_bc:
        raise InvalidParameterError("closed-form response needs gamma_ba == gamma_bc")
    return complex(linear_response(sys.omega_c, sys.gamma_p, sys.delta_c,
                                   sys.delta_s, sys.gamma))


def first_order_signal_coherence(sys: LambdaSystem) -> complex:
    """First-order coherence ``sigma_cb`` on the signal transition.

    Linear in ``sys.omega_s``, so its phase follows the signal's local phase.
    """
    return sys.omega_s * signal_response_ratio(sys)


# ---------------------------------------------------------------------------
# numerical solvers


@dataclass
class IntegrationResult:
    rho: DensityMatrix
    t: float
    criterion: str  # "steady-state" or "t_end"
    residual: float
    n_steps: int
    n_rejected: int
    history: list = field(default_factory=list, repr=False)

    @property
    def converged(self):
        return self.criterion == "steady-state"


def integrate_to_steady_state(sys: LambdaSystem, rho0: DensityMatrix, t_end=1e6,
                              tol=1e-10, *, rtol=1e-12, atol=1e-14, record=False,
                              strict=True, backend=None) -> IntegrationResult:
    """Integrate the Bloch equations until the state stops changing.

    Uses an embedded Dormand-Prince 5(4) pair with PI step-size control. The
    run stops once ``max|d sigma/dt| < tol * gamma`` or at ``t_end`` (in
    units of ``1/gamma``).

    Parameters
    ----------
    record : bool
        Keep every accepted ``(t, DensityMatrix)`` in ``history``.
    strict : bool
        Raise :class:`NonConvergenceError` when ``t_end`` fires first.
    backend : module, optional
        Kernel module to use instead of the import-time choice.

    Returns
    -------
    IntegrationResult
    """
    if not t_end > 0:
        raise InvalidParameterError("t_end must be > 0")
    if not tol > 0:
        raise InvalidParameterError("tol must be > 0")
    rho0.check()
    k = backend or kernels
    x, t, n_acc, n_rej, ok, resid, hist = k.integrate(
        sys.params(), rho0.to_vector(), float(t_end), float(tol),
        rtol, atol, 0.0, 50_000_000, record,
    )
    rho = DensityMatrix.from_vector(x)
    history = [(ti, DensityMatrix.from_vector(xi)) for ti, xi in hist]
    result = IntegrationResult(rho, t, "steady-state" if ok else "t_end", resid,
                               n_acc, n_rej, history)
    if not ok and strict:
        raise NonConvergenceError(
            f"no steady state by t={t:g}/gamma (residual {resid:.3e} >= {tol * sys.gamma:.3e})",
            state=rho, t=t, residual=resid,
        )
    return result


def full_steady_state(sys: LambdaSystem) -> DensityMatrix:
    """Exact steady state at all orders in both fields.

    Solves the stationary Bloch equations with ``sigma_bb`` eliminated through
    the trace condition, leaving eight real unknowns.

    Raises
    ------
    SingularSystemError
        If the stationary state is not unique (e.g. no drive and no pump).
    """
    m = _liouvillian(sys)
    keep = [0, 2, 3, 4, 5, 6, 7, 8]  # drop the redundant d(sigma_bb)/dt row
    # x_bb = 1 - x_aa - x_cc
    col_bb = m[:, 1]
    a = m[np.ix_(keep, keep)].copy()
    a[:, 0] -= col_bb[keep]
    a[:, 1] -= col_bb[keep]
    b = -col_bb[keep]
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularSystemError(
            f"steady state not unique (condition number {cond:.3g})"
        )
    y = np.linalg.solve(a, b)
    aa, cc = y[0], y[1]
    x = [aa, 1.0 - aa - cc, cc, *y[2:]]
    return DensityMatrix.from_vector(x)
