# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Bloch kernels; same API and layouts as ``_pykernels``."""

from libc.math cimport sqrt, fabs, fmin, fmax, pow

NPARAM = 9
NSTATE = 9

cdef double C_A21 = 1.0 / 5
cdef double C_A31 = 3.0 / 40, C_A32 = 9.0 / 40
cdef double C_A41 = 44.0 / 45, C_A42 = -56.0 / 15, C_A43 = 32.0 / 9
cdef double C_A51 = 19372.0 / 6561, C_A52 = -25360.0 / 2187
cdef double C_A53 = 64448.0 / 6561, C_A54 = -212.0 / 729
cdef double C_A61 = 9017.0 / 3168, C_A62 = -355.0 / 33, C_A63 = 46732.0 / 5247
cdef double C_A64 = 49.0 / 176, C_A65 = -5103.0 / 18656
cdef double C_B1 = 35.0 / 384, C_B3 = 500.0 / 1113, C_B4 = 125.0 / 192
cdef double C_B5 = -2187.0 / 6784, C_B6 = 11.0 / 84
cdef double C_E1 = 71.0 / 57600, C_E3 = -71.0 / 16695, C_E4 = 71.0 / 1920
cdef double C_E5 = -17253.0 / 339200, C_E6 = 22.0 / 525, C_E7 = -1.0 / 40

cdef double SAFETY = 0.9
cdef double BETA = 0.04
cdef double ALPHA = 0.2 - 0.75 * 0.04
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 5.0


cdef void _rhs(const double* p, const double* x, double* out) noexcept nogil:
    cdef double g = p[0], gba = p[1], gbc = p[2], gp = p[3], oc = p[4]
    cdef double complex os_ = p[5] + 1j * p[6]
    cdef double complex osc = p[5] - 1j * p[6]
    cdef double dc = p[7], ds = p[8]
    cdef double aa = x[0], bb = x[1], cc = x[2]
    cdef double complex ab = x[3] + 1j * x[4]
    cdef double complex cb = x[5] + 1j * x[6]
    cdef double complex ac = x[7] + 1j * x[8]
    cdef double complex ba = x[3] - 1j * x[4]
    cdef double complex bc = x[5] - 1j * x[6]
    cdef double complex ca = x[7] - 1j * x[8]
    cdef double delta = dc - ds
    cdef double complex drive_c = 1j * (oc * ba - oc * ab)
    cdef double complex drive_s = 1j * (os_ * bc - osc * cb)
    cdef double complex dab, dcb, dac
    out[0] = drive_c.real + gba * bb + gp * cc
    out[2] = drive_s.real + gbc * bb - gp * cc
    out[1] = -(drive_c.real + drive_s.real) - g * bb
    dab = 1j * dc * ab + 1j * oc * (bb - aa) - 1j * os_ * ac - 0.5 * g * ab
    dcb = 1j * ds * cb + 1j * os_ * (bb - cc) - 1j * oc * ca - 0.5 * g * cb
    dac = 1j * delta * ac + 1j * (oc * bc - osc * ab) - 0.5 * gp * ac
    out[3] = dab.real
    out[4] = dab.imag
    out[5] = dcb.real
    out[6] = dcb.imag
    out[7] = dac.real
    out[8] = dac.imag


cdef double _maxabs(const double* v) noexcept nogil:
    cdef double m = 0.0
    cdef int i
    for i in range(9):
        m = fmax(m, fabs(v[i]))
    return m


def rhs(params, x):
    """Time derivative of the flat state vector."""
    cdef double p[9]
    cdef double s[9]
    cdef double out[9]
    cdef int i
    for i in range(9):
        p[i] = params[i]
        s[i] = x[i]
    _rhs(p, s, out)
    return [out[i] for i in range(9)]


def integrate(params, x0, double t_end, double tol, double rtol=1e-12,
              double atol=1e-14, double h0=0.0, long max_steps=50_000_000,
              bint record=False):
    """Adaptive DOPRI5 with PI step control until steady state or ``t_end``.

    Returns ``(state, t, n_accepted, n_rejected, converged, residual, history)``.
    """
    cdef double p[9]
    cdef double x[9]
    cdef double xn[9]
    cdef double tmp[9]
    cdef double k1[9]
    cdef double k2[9]
    cdef double k3[9]
    cdef double k4[9]
    cdef double k5[9]
    cdef double k6[9]
    cdef double k7[9]
    cdef int i
    cdef double t = 0.0, h, err, acc, e, sc, fac, resid, err_old = 1e-4
    cdef long n_acc = 0, n_rej = 0
    cdef double gamma, threshold
    cdef bint converged = False

    for i in range(9):
        p[i] = params[i]
        x[i] = x0[i]
    gamma = p[0]
    threshold = tol * gamma
    history = []
    if record:
        history.append((0.0, [x[i] for i in range(9)]))
    _rhs(p, x, k1)
    resid = _maxabs(k1)
    if resid < threshold:
        return [x[i] for i in range(9)], t, 0, 0, True, resid, history

    if h0 > 0:
        h = h0
    else:
        h = fmin(0.01 / fmax(gamma, 1e-300), t_end)

    while n_acc + n_rej < max_steps:
        if t + h > t_end:
            h = t_end - t
        for i in range(9):
            tmp[i] = x[i] + h * C_A21 * k1[i]
        _rhs(p, tmp, k2)
        for i in range(9):
            tmp[i] = x[i] + h * (C_A31 * k1[i] + C_A32 * k2[i])
        _rhs(p, tmp, k3)
        for i in range(9):
            tmp[i] = x[i] + h * (C_A41 * k1[i] + C_A42 * k2[i] + C_A43 * k3[i])
        _rhs(p, tmp, k4)
        for i in range(9):
            tmp[i] = x[i] + h * (C_A51 * k1[i] + C_A52 * k2[i] + C_A53 * k3[i]
                                 + C_A54 * k4[i])
        _rhs(p, tmp, k5)
        for i in range(9):
            tmp[i] = x[i] + h * (C_A61 * k1[i] + C_A62 * k2[i] + C_A63 * k3[i]
                                 + C_A64 * k4[i] + C_A65 * k5[i])
        _rhs(p, tmp, k6)
        for i in range(9):
            xn[i] = x[i] + h * (C_B1 * k1[i] + C_B3 * k3[i] + C_B4 * k4[i]
                                + C_B5 * k5[i] + C_B6 * k6[i])
        _rhs(p, xn, k7)

        acc = 0.0
        for i in range(9):
            e = h * (C_E1 * k1[i] + C_E3 * k3[i] + C_E4 * k4[i] + C_E5 * k5[i]
                     + C_E6 * k6[i] + C_E7 * k7[i])
            sc = atol + rtol * fmax(fabs(x[i]), fabs(xn[i]))
            acc += (e / sc) * (e / sc)
        err = sqrt(acc / 9)

        if err <= 1.0:
            t += h
            for i in range(9):
                x[i] = xn[i]
                k1[i] = k7[i]
            n_acc += 1
            if record:
                history.append((t, [x[i] for i in range(9)]))
            resid = _maxabs(k1)
            if resid < threshold:
                converged = True
                break
            if t >= t_end:
                break
            err = fmax(err, 1e-10)
            fac = SAFETY * pow(err, -ALPHA) * pow(err_old, BETA)
            fac = fmin(FAC_MAX, fmax(FAC_MIN, fac))
            err_old = err
        else:
            n_rej += 1
            fac = fmax(FAC_MIN, SAFETY * pow(err, -ALPHA))
        h *= fac

    return [x[i] for i in range(9)], t, n_acc, n_rej, converged, resid, history
