"""Pure-Python Bloch kernels.

Fallback twin of ``_ckernels.pyx``; both expose the same three functions and
must produce the same numbers to rounding. The flat layouts are

params : (gamma, gamma_ba, gamma_bc, gamma_p, omega_c,
          Re omega_s, Im omega_s, delta_c, delta_s)
state  : (s_aa, s_bb, s_cc, Re s_ab, Im s_ab, Re s_cb, Im s_cb, Re s_ac, Im s_ac)
"""

import math

NPARAM = 9
NSTATE = 9

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# b - b_hat
_E1 = 71 / 57600
_E3 = -71 / 16695
_E4 = 71 / 1920
_E5 = -17253 / 339200
_E6 = 22 / 525
_E7 = -1 / 40

_SAFETY = 0.9
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_FAC_MIN = 0.2
_FAC_MAX = 5.0


def rhs(params, x):
    """Time derivative of the flat state vector."""
    g, gba, gbc, gp, oc, osr, osi, dc, ds = params
    aa, bb, cc = x[0], x[1], x[2]
    ab = complex(x[3], x[4])
    cb = complex(x[5], x[6])
    ac = complex(x[7], x[8])
    os_ = complex(osr, osi)
    osc = os_.conjugate()
    ba = ab.conjugate()
    bc = cb.conjugate()
    ca = ac.conjugate()
    delta = dc - ds

    drive_c = 1j * (oc * ba - oc * ab)
    drive_s = 1j * (os_ * bc - osc * cb)
    daa = drive_c.real + gba * bb + gp * cc
    dcc = drive_s.real + gbc * bb - gp * cc
    dbb = -(drive_c.real + drive_s.real) - g * bb
    dab = 1j * dc * ab + 1j * oc * (bb - aa) - 1j * os_ * ac - 0.5 * g * ab
    dcb = 1j * ds * cb + 1j * os_ * (bb - cc) - 1j * oc * ca - 0.5 * g * cb
    dac = 1j * delta * ac + 1j * (oc * bc - osc * ab) - 0.5 * gp * ac
    return [daa, dbb, dcc, dab.real, dab.imag, dcb.real, dcb.imag, dac.real, dac.imag]


def _axpy(x, h, coeffs, ks):
    out = list(x)
    for c, k in zip(coeffs, ks):
        if c == 0.0:
            continue
        hc = h * c
        for i in range(NSTATE):
            out[i] += hc * k[i]
    return out


def integrate(params, x0, t_end, tol, rtol=1e-12, atol=1e-14, h0=0.0,
              max_steps=50_000_000, record=False):
    """Adaptive DOPRI5 with PI step control until steady state or ``t_end``.

    Returns
    -------
    tuple
        ``(state, t, n_accepted, n_rejected, converged, residual, history)``
        where ``residual`` is the max-norm of the derivative at ``state`` and
        ``history`` is a list of ``(t, state)`` pairs (empty unless ``record``).
    """
    gamma = params[0]
    threshold = tol * gamma
    x = [float(v) for v in x0]
    k1 = rhs(params, x)
    resid = max(abs(v) for v in k1)
    history = [(0.0, list(x))] if record else []
    t = 0.0
    if resid < threshold:
        return x, t, 0, 0, True, resid, history

    h = h0 if h0 > 0 else min(0.01 / max(gamma, 1e-300), t_end)
    err_old = 1e-4
    n_acc = n_rej = 0
    while n_acc + n_rej < max_steps:
        if t + h > t_end:
            h = t_end - t
        k2 = rhs(params, _axpy(x, h, (_A21,), (k1,)))
        k3 = rhs(params, _axpy(x, h, (_A31, _A32), (k1, k2)))
        k4 = rhs(params, _axpy(x, h, (_A41, _A42, _A43), (k1, k2, k3)))
        k5 = rhs(params, _axpy(x, h, (_A51, _A52, _A53, _A54), (k1, k2, k3, k4)))
        k6 = rhs(params, _axpy(x, h, (_A61, _A62, _A63, _A64, _A65), (k1, k2, k3, k4, k5)))
        xn = _axpy(x, h, (_B1, 0.0, _B3, _B4, _B5, _B6), (k1, k2, k3, k4, k5, k6))
        k7 = rhs(params, xn)

        acc = 0.0
        for i in range(NSTATE):
            e = h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i]
                     + _E6 * k6[i] + _E7 * k7[i])
            sc = atol + rtol * max(abs(x[i]), abs(xn[i]))
            acc += (e / sc) ** 2
        err = math.sqrt(acc / NSTATE)

        if err <= 1.0:
            t += h
            x = xn
            k1 = k7
            n_acc += 1
            if record:
                history.append((t, list(x)))
            resid = max(abs(v) for v in k1)
            if resid < threshold:
                return x, t, n_acc, n_rej, True, resid, history
            if t >= t_end:
                return x, t, n_acc, n_rej, False, resid, history
            err = max(err, 1e-10)
            fac = _SAFETY * err ** (-_ALPHA) * err_old ** _BETA
            fac = min(_FAC_MAX, max(_FAC_MIN, fac))
            err_old = err
        else:
            n_rej += 1
            fac = max(_FAC_MIN, _SAFETY * err ** (-_ALPHA))
        h *= fac
    return x, t, n_acc, n_rej, False, resid, history
