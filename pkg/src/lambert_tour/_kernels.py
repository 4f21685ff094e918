"""Compiled numerical core.

Hot paths are scalar math with no per-call allocation: Kepler propagation,
the multiple-revolution Lambert boundary-value solver (Lancaster-Blanchard
variable, Householder iterations with monotone-bisection fallbacks),
pairwise rendezvous cost evaluation, grid sweeps, and a 2-D box-constrained
quasi-Newton minimizer.

Kernels report status codes; the Python wrappers translate them into
exceptions or sentinel results.  Units: km, s, rad.
"""

import math

import numpy as np
from numba import njit, prange

# status codes
ST_OK = 0
ST_INFEASIBLE = 1
ST_COLLINEAR = 2
ST_NOCONV = 3
ST_BAD_INPUT = 4

HUGE = 1e30          # cost sentinel on walls / failed evaluations
TWO_PI = 2.0 * math.pi

# branch codes
SHORT = 0
LONG = 1


# ---------------------------------------------------------------------------
# Kepler propagation
# ---------------------------------------------------------------------------

@njit(cache=True)
def _stumpff_c2(z):
    if z > 1e-8:
        sz = math.sqrt(z)
        return (1.0 - math.cos(sz)) / z
    if z < -1e-8:
        sz = math.sqrt(-z)
        return (math.cosh(sz) - 1.0) / (-z)
    return 0.5 - z / 24.0 + z * z / 720.0


@njit(cache=True)
def _stumpff_c3(z):
    if z > 1e-8:
        sz = math.sqrt(z)
        return (sz - math.sin(sz)) / (z * sz)
    if z < -1e-8:
        sz = math.sqrt(-z)
        return (math.sinh(sz) - sz) / (sz * sz * sz)
    return 1.0 / 6.0 - z / 120.0 + z * z / 5040.0


@njit(cache=True)
def _kepler_E(M, e):
    """Eccentric anomaly from mean anomaly, elliptic Newton iteration."""
    M = M % TWO_PI
    if e < 0.8:
        E = M + e * math.sin(M)
    else:
        E = math.pi if M >= 0.0 else -math.pi
    for _ in range(64):
        se = math.sin(E)
        f = E - e * se - M
        d = f / (1.0 - e * math.cos(E))
        E -= d
        if abs(d) < 1e-13:
            break
    return E


@njit(cache=True)
def _els_state(a, e, inc, raan, argp, nu, mu):
    """Cartesian state from classical elements at true anomaly nu."""
    p = a * (1.0 - e * e)
    cn = math.cos(nu)
    sn = math.sin(nu)
    r = p / (1.0 + e * cn)
    rpx = r * cn
    rpy = r * sn
    vc = math.sqrt(mu / p)
    vpx = -vc * sn
    vpy = vc * (e + cn)

    cO = math.cos(raan)
    sO = math.sin(raan)
    ci = math.cos(inc)
    si = math.sin(inc)
    cw = math.cos(argp)
    sw = math.sin(argp)
    R11 = cO * cw - sO * sw * ci
    R12 = -cO * sw - sO * cw * ci
    R21 = sO * cw + cO * sw * ci
    R22 = -sO * sw + cO * cw * ci
    R31 = sw * si
    R32 = cw * si

    rx = R11 * rpx + R12 * rpy
    ry = R21 * rpx + R22 * rpy
    rz = R31 * rpx + R32 * rpy
    vx = R11 * vpx + R12 * vpy
    vy = R21 * vpx + R22 * vpy
    vz = R31 * vpx + R32 * vpy
    return rx, ry, rz, vx, vy, vz


@njit(cache=True)
def _body_rv(el, t, mu):
    """Unperturbed ephemeris state of a body at time t.

    el = (a, e, i, raan, argp, M0, epoch); mean anomaly advanced by n*(t-epoch).
    """
    a = el[0]
    e = el[1]
    n = math.sqrt(mu / (a * a * a))
    M = el[5] + n * (t - el[6])
    E = _kepler_E(M, e)
    nu = 2.0 * math.atan2(math.sqrt(1.0 + e) * math.sin(0.5 * E),
                          math.sqrt(1.0 - e) * math.cos(0.5 * E))
    return _els_state(a, e, el[2], el[3], el[4], nu, mu)


@njit(cache=True)
def _propagate_uv(rx, ry, rz, vx, vy, vz, dt, mu):
    """Universal-variable Kepler propagation (Lagrange F and G).

    Elliptic motion is reduced modulo the orbital period before iterating,
    which keeps the Newton step well-conditioned for multi-year spans.
    Returns (status, rx, ry, rz, vx, vy, vz).
    """
    if dt == 0.0:
        return ST_OK, rx, ry, rz, vx, vy, vz
    r0 = math.sqrt(rx * rx + ry * ry + rz * rz)
    if r0 <= 0.0 or mu <= 0.0:
        return ST_BAD_INPUT, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    v2 = vx * vx + vy * vy + vz * vz
    alpha = 2.0 / r0 - v2 / mu
    sqmu = math.sqrt(mu)

    dts = dt
    if alpha > 1e-12:
        a = 1.0 / alpha
        Tper = TWO_PI * math.sqrt(a * a * a / mu)
        dts = dt - Tper * math.floor(dt / Tper + 0.5)
        if dts == 0.0:
            return ST_OK, rx, ry, rz, vx, vy, vz

    vr0 = (rx * vx + ry * vy + rz * vz) / r0

    # bracket the (strictly increasing) time equation in chi
    if abs(alpha) > 1e-10:
        chi = sqmu * abs(alpha) * dts
    else:
        chi = sqmu * dts / r0
    lo = 0.0
    hi = 0.0
    step = abs(chi) if abs(chi) > 1e-8 else 1.0
    if dts > 0.0:
        hi = step
        for _ in range(200):
            z = alpha * hi * hi
            F = (r0 * vr0 / sqmu * hi * hi * _stumpff_c2(z)
                 + (1.0 - alpha * r0) * hi * hi * hi * _stumpff_c3(z)
                 + r0 * hi - sqmu * dts)
            if F >= 0.0:
                break
            lo = hi
            hi *= 2.0
    else:
        lo = -step
        for _ in range(200):
            z = alpha * lo * lo
            F = (r0 * vr0 / sqmu * lo * lo * _stumpff_c2(z)
                 + (1.0 - alpha * r0) * lo * lo * lo * _stumpff_c3(z)
                 + r0 * lo - sqmu * dts)
            if F <= 0.0:
                break
            hi = lo
            lo *= 2.0

    if chi < lo or chi > hi:
        chi = 0.5 * (lo + hi)
    converged = False
    for _ in range(50):
        z = alpha * chi * chi
        C = _stumpff_c2(z)
        S = _stumpff_c3(z)
        F = (r0 * vr0 / sqmu * chi * chi * C
             + (1.0 - alpha * r0) * chi * chi * chi * S
             + r0 * chi - sqmu * dts)
        if F > 0.0:
            hi = chi
        else:
            lo = chi
        dF = (r0 * vr0 / sqmu * chi * (1.0 - alpha * chi * chi * S)
              + (1.0 - alpha * r0) * chi * chi * C + r0)
        d = F / dF
        nchi = chi - d
        if nchi <= lo or nchi >= hi:
            nchi = 0.5 * (lo + hi)
        dstep = abs(nchi - chi)
        chi = nchi
        if dstep < 1e-10 * max(1.0, abs(chi)):
            converged = True
            break
    if not converged:
        return ST_NOCONV, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0

    z = alpha * chi * chi
    C = _stumpff_c2(z)
    S = _stumpff_c3(z)
    f = 1.0 - chi * chi * C / r0
    g = dts - chi * chi * chi * S / sqmu
    nrx = f * rx + g * vx
    nry = f * ry + g * vy
    nrz = f * rz + g * vz
    rn = math.sqrt(nrx * nrx + nry * nry + nrz * nrz)
    fdot = sqmu / (rn * r0) * (z * S - 1.0) * chi
    gdot = 1.0 - chi * chi * C / rn
    nvx = fdot * rx + gdot * vx
    nvy = fdot * ry + gdot * vy
    nvz = fdot * rz + gdot * vz
    return ST_OK, nrx, nry, nrz, nvx, nvy, nvz


# ---------------------------------------------------------------------------
# Lambert solver (Lancaster-Blanchard variable x, Izzo-style iteration)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _hyper_f(z):
    """Gauss hypergeometric 2F1(3, 1, 5/2, z) by series, |z| < 1."""
    Sj = 1.0
    Cj = 1.0
    for j in range(200):
        Cj = Cj * (3.0 + j) * (1.0 + j) / (2.5 + j) * z / (j + 1.0)
        Sj += Cj
        if abs(Cj) < 1e-12:
            break
    return Sj


@njit(cache=True)
def _x2tof(x, lam, n):
    """Non-dimensional time of flight T(x) for n complete revolutions."""
    battin = 0.01
    lagrange = 0.2
    dist = abs(x - 1.0)
    if battin < dist < lagrange:
        a = 1.0 / (1.0 - x * x)
        if a > 0.0:
            alfa = 2.0 * math.acos(min(1.0, max(-1.0, x)))
            beta = 2.0 * math.asin(math.sqrt(min(1.0, lam * lam / a)))
            if lam < 0.0:
                beta = -beta
            return (a * math.sqrt(a)
                    * ((alfa - math.sin(alfa)) - (beta - math.sin(beta))
                       + TWO_PI * n)) / 2.0
        else:
            alfa = 2.0 * math.acosh(x)
            beta = 2.0 * math.asinh(math.sqrt(-lam * lam / a))
            if lam < 0.0:
                beta = -beta
            return -a * math.sqrt(-a) * ((beta - math.sinh(beta))
                                         - (alfa - math.sinh(alfa))) / 2.0
    K = lam * lam
    E = x * x - 1.0
    rho = abs(E)
    z = math.sqrt(max(0.0, 1.0 + K * E))
    if dist < battin:
        eta = z - lam * x
        S1 = 0.5 * (1.0 - lam - x * eta)
        Q = _hyper_f(S1) * 4.0 / 3.0
        return (eta * eta * eta * Q + 4.0 * lam * eta) / 2.0 \
            + n * math.pi / (rho ** 1.5)
    y = math.sqrt(rho)
    g = x * z - lam * E
    if E < 0.0:
        l = math.acos(min(1.0, max(-1.0, g)))
        d = n * math.pi + l
    else:
        f = y * (z - lam * x)
        d = math.log(max(1e-300, f + g))
    return (x - lam * z - d / y) / E


@njit(cache=True)
def _dt3(x, T, lam):
    """First three derivatives of T(x) (Lancaster-Blanchard recursion)."""
    l2 = lam * lam
    l3 = l2 * lam
    umx2 = 1.0 - x * x
    y = math.sqrt(max(1e-300, 1.0 - l2 * umx2))
    y3 = y * y * y
    y5 = y3 * y * y
    DT = (3.0 * T * x - 2.0 + 2.0 * l3 * x / y) / umx2
    DDT = (3.0 * T + 5.0 * x * DT + 2.0 * (1.0 - l2) * l3 / y3) / umx2
    DDDT = (7.0 * x * DDT + 8.0 * DT
            - 6.0 * (1.0 - l2) * l2 * l3 * x / y5) / umx2
    return DT, DDT, DDDT


@njit(cache=True)
def _householder(T_target, x0, n, lam, eps, itmax):
    """Householder (3rd order) iteration for T(x) = T_target."""
    x = x0
    for _ in range(itmax):
        tof = _x2tof(x, lam, n)
        DT, DDT, DDDT = _dt3(x, tof, lam)
        delta = tof - T_target
        DT2 = DT * DT
        den = DT * (DT2 - delta * DDT) + DDDT * delta * delta / 6.0
        if den == 0.0:
            return x, False
        xn = x - delta * (DT2 - delta * DDT / 2.0) / den
        if n > 0:
            # multi-revolution solutions are strictly elliptic
            if xn >= 1.0:
                xn = 0.5 * (x + 1.0)
            if xn <= -1.0:
                xn = 0.5 * (x - 1.0)
        err = abs(x - xn)
        x = xn
        if err < eps:
            return x, True
    return x, False


@njit(cache=True)
def _tmin_mrev(lam, n):
    """Minimum-time point of the n-revolution TOF curve.

    Bisection on dT/dx over x in (-1, 1), tolerance 1e-9 on x.
    Returns (x_min, T_min).
    """
    a = -1.0 + 1e-9
    b = 1.0 - 1e-9
    while b - a > 1e-9:
        m = 0.5 * (a + b)
        Tm = _x2tof(m, lam, n)
        DT, _, _ = _dt3(m, Tm, lam)
        if DT < 0.0:
            a = m
        else:
            b = m
    xm = 0.5 * (a + b)
    return xm, _x2tof(xm, lam, n)


@njit(cache=True)
def _bisect_tof(T_target, lam, n, lo, hi, decreasing):
    """Bisection for T(x) = T_target on a monotone segment [lo, hi]."""
    a = lo
    b = hi
    for _ in range(200):
        m = 0.5 * (a + b)
        Tm = _x2tof(m, lam, n)
        if decreasing:
            if Tm > T_target:
                a = m
            else:
                b = m
        else:
            if Tm > T_target:
                b = m
            else:
                a = m
        if b - a < 1e-13 * max(1.0, abs(m)):
            break
    return 0.5 * (a + b)


@njit(cache=True)
def _solve_x_zero(T, lam):
    """Zero-revolution solve: T(x) is strictly decreasing on (-1, inf)."""
    T00 = math.acos(min(1.0, max(-1.0, lam))) + lam * math.sqrt(max(0.0, 1.0 - lam * lam))
    T1 = 2.0 / 3.0 * (1.0 - lam * lam * lam)
    if T >= T00:
        x0 = -(T - T00) / (T - T00 + 4.0)
    elif T <= T1:
        x0 = T1 * (T1 - T) / (0.4 * (1.0 - lam ** 5) * T) + 1.0
    else:
        x0 = (T / T00) ** (0.69314718055994529 / math.log(T1 / T00)) - 1.0
    x, ok = _householder(T, x0, 0, lam, 1e-12, 60)
    if ok and x > -1.0:
        tof = _x2tof(x, lam, 0)
        if abs(tof - T) <= 1e-9 * (1.0 + T):
            return ST_OK, x
    # monotone bisection fallback
    lo = -1.0 + 1e-12
    hi = 0.0
    if _x2tof(hi, lam, 0) > T:
        # expand toward +1 then into the hyperbolic region
        for _ in range(120):
            if hi < 1.0 - 1e-9:
                hi = hi + (1.0 - hi) * 0.5
            else:
                hi = (hi + 1.0) * 2.0
            if _x2tof(hi, lam, 0) <= T:
                break
    x = _bisect_tof(T, lam, 0, lo, hi, True)
    tof = _x2tof(x, lam, 0)
    if abs(tof - T) <= 1e-8 * (1.0 + T):
        return ST_OK, x
    return ST_NOCONV, x


@njit(cache=True)
def _solve_x_pair(T, lam, m):
    """Both m-revolution solutions (left and right of the TOF minimum).

    Returns (status, x_left, x_right); infeasible when T < T_min(m).
    """
    pi = math.pi
    tmp = ((m * pi + pi) / (8.0 * T)) ** (2.0 / 3.0)
    xl0 = (tmp - 1.0) / (tmp + 1.0)
    tmp = ((8.0 * T) / (m * pi)) ** (2.0 / 3.0)
    xr0 = (tmp - 1.0) / (tmp + 1.0)
    xl, okl = _householder(T, xl0, m, lam, 1e-12, 60)
    xr, okr = _householder(T, xr0, m, lam, 1e-12, 60)
    if okl and abs(xl) < 1.0:
        okl = abs(_x2tof(xl, lam, m) - T) <= 1e-9 * (1.0 + T)
    else:
        okl = False
    if okr and abs(xr) < 1.0:
        okr = abs(_x2tof(xr, lam, m) - T) <= 1e-9 * (1.0 + T)
    else:
        okr = False
    if okl and okr and xr - xl > 1e-10:
        return ST_OK, xl, xr
    # robust fallback through the curve minimum
    xm, Tm = _tmin_mrev(lam, m)
    if T < Tm:
        return ST_INFEASIBLE, 0.0, 0.0
    xl = _bisect_tof(T, lam, m, -1.0 + 1e-12, xm, True)
    xr = _bisect_tof(T, lam, m, xm, 1.0 - 1e-12, False)
    return ST_OK, xl, xr


@njit(cache=True)
def _max_revs(T, lam, mcap):
    """Largest m with T_min(m) <= T, capped at mcap (mcap < 0: uncapped).

    Uses T(x, m) >= m*pi, so floor(T/pi) bounds the answer from above, and
    T >= (m+1)*pi guarantees feasibility of m revolutions.
    """
    M = int(T / math.pi)
    if mcap >= 0 and M > mcap:
        return mcap
    if M == 0:
        return 0
    T00m = math.acos(min(1.0, max(-1.0, lam))) \
        + lam * math.sqrt(max(0.0, 1.0 - lam * lam)) + M * math.pi
    if T >= T00m:
        return M
    _, Tm = _tmin_mrev(lam, M)
    if T >= Tm:
        return M
    return M - 1


@njit(cache=True)
def _lambert_prep(r1x, r1y, r1z, r2x, r2y, r2z, retrograde):
    """Geometry setup shared by every Lambert solve.

    Returns (status, lam, s, cn, r1n, r2n,
             ir1x..z, ir2x..z, it1x..z, it2x..z).
    """
    r1n = math.sqrt(r1x * r1x + r1y * r1y + r1z * r1z)
    r2n = math.sqrt(r2x * r2x + r2y * r2y + r2z * r2z)
    if r1n <= 0.0 or r2n <= 0.0:
        return (ST_BAD_INPUT, 0.0, 0.0, 0.0, 0.0, 0.0,
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    hx = r1y * r2z - r1z * r2y
    hy = r1z * r2x - r1x * r2z
    hz = r1x * r2y - r1y * r2x
    hn = math.sqrt(hx * hx + hy * hy + hz * hz)
    dot = r1x * r2x + r1y * r2y + r1z * r2z
    theta = math.atan2(hn, dot)  # in (0, pi)
    if theta < 1e-8 or math.pi - theta < 1e-8:
        return (ST_COLLINEAR, 0.0, 0.0, 0.0, r1n, r2n,
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    cx = r2x - r1x
    cy = r2y - r1y
    cz = r2z - r1z
    cn = math.sqrt(cx * cx + cy * cy + cz * cz)
    s = 0.5 * (r1n + r2n + cn)
    lam = math.sqrt(max(0.0, 1.0 - cn / s))
    if retrograde:
        flip = hz > 0.0
    else:
        flip = hz < 0.0
    sgn = -1.0 if flip else 1.0
    if flip:
        lam = -lam
    htx = sgn * hx / hn
    hty = sgn * hy / hn
    htz = sgn * hz / hn
    ir1x = r1x / r1n
    ir1y = r1y / r1n
    ir1z = r1z / r1n
    ir2x = r2x / r2n
    ir2y = r2y / r2n
    ir2z = r2z / r2n
    it1x = hty * ir1z - htz * ir1y
    it1y = htz * ir1x - htx * ir1z
    it1z = htx * ir1y - hty * ir1x
    it2x = hty * ir2z - htz * ir2y
    it2y = htz * ir2x - htx * ir2z
    it2z = htx * ir2y - hty * ir2x
    return (ST_OK, lam, s, cn, r1n, r2n,
            ir1x, ir1y, ir1z, ir2x, ir2y, ir2z,
            it1x, it1y, it1z, it2x, it2y, it2z)


@njit(cache=True)
def _vel_from_x(x, lam, gamma, rho, sigma, r1n, r2n,
                ir1x, ir1y, ir1z, ir2x, ir2y, ir2z,
                it1x, it1y, it1z, it2x, it2y, it2z):
    """Terminal velocity vectors for a converged x."""
    y = math.sqrt(max(0.0, 1.0 - lam * lam * (1.0 - x * x)))
    ly = lam * y
    vr1 = gamma * ((ly - x) - rho * (ly + x)) / r1n
    vr2 = -gamma * ((ly - x) + rho * (ly + x)) / r2n
    vt = gamma * sigma * (y + lam * x)
    vt1 = vt / r1n
    vt2 = vt / r2n
    v1x = vr1 * ir1x + vt1 * it1x
    v1y = vr1 * ir1y + vt1 * it1y
    v1z = vr1 * ir1z + vt1 * it1z
    v2x = vr2 * ir2x + vt2 * it2x
    v2y = vr2 * ir2y + vt2 * it2y
    v2z = vr2 * ir2z + vt2 * it2z
    return v1x, v1y, v1z, v2x, v2y, v2z


@njit(cache=True)
def _lambert_all(r1, r2, tof, mu, mcap, retrograde):
    """Every multi-revolution solution for one geometry (allocating, cold path).

    Returns (status, count, ms, sides, xs, v1s, v2s); sides: 0 left, 1 right
    of the per-revolution TOF minimum (left/right of x_min).
    """
    prep = _lambert_prep(r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], retrograde)
    st = prep[0]
    ms = np.empty(0, dtype=np.int64)
    sides = np.empty(0, dtype=np.int64)
    xs = np.empty(0)
    v1s = np.empty((0, 3))
    v2s = np.empty((0, 3))
    if st != ST_OK:
        return st, 0, ms, sides, xs, v1s, v2s
    lam = prep[1]
    s = prep[2]
    cn = prep[3]
    r1n = prep[4]
    r2n = prep[5]
    if tof <= 0.0 or mu <= 0.0:
        return ST_BAD_INPUT, 0, ms, sides, xs, v1s, v2s
    T = math.sqrt(2.0 * mu / (s * s * s)) * tof
    gamma = math.sqrt(mu * s / 2.0)
    rho = (r1n - r2n) / cn
    sigma = math.sqrt(max(0.0, 1.0 - rho * rho))
    M = _max_revs(T, lam, mcap)
    nsol = 2 * M + 1
    ms = np.empty(nsol, dtype=np.int64)
    sides = np.empty(nsol, dtype=np.int64)
    xs = np.empty(nsol)
    v1s = np.empty((nsol, 3))
    v2s = np.empty((nsol, 3))
    k = 0
    st0, x0 = _solve_x_zero(T, lam)
    if st0 == ST_OK:
        vv = _vel_from_x(x0, lam, gamma, rho, sigma, r1n, r2n,
                         prep[6], prep[7], prep[8], prep[9], prep[10],
                         prep[11], prep[12], prep[13], prep[14], prep[15],
                         prep[16], prep[17])
        ms[k] = 0
        sides[k] = 0
        xs[k] = x0
        v1s[k, 0] = vv[0]
        v1s[k, 1] = vv[1]
        v1s[k, 2] = vv[2]
        v2s[k, 0] = vv[3]
        v2s[k, 1] = vv[4]
        v2s[k, 2] = vv[5]
        k += 1
    else:
        return ST_NOCONV, 0, ms, sides, xs, v1s, v2s
    for m in range(1, M + 1):
        stp, xl, xr = _solve_x_pair(T, lam, m)
        if stp != ST_OK:
            continue
        for side in range(2):
            x = xl if side == 0 else xr
            vv = _vel_from_x(x, lam, gamma, rho, sigma, r1n, r2n,
                             prep[6], prep[7], prep[8], prep[9], prep[10],
                             prep[11], prep[12], prep[13], prep[14], prep[15],
                             prep[16], prep[17])
            ms[k] = m
            sides[k] = side
            xs[k] = x
            v1s[k, 0] = vv[0]
            v1s[k, 1] = vv[1]
            v1s[k, 2] = vv[2]
            v2s[k, 0] = vv[3]
            v2s[k, 1] = vv[4]
            v2s[k, 2] = vv[5]
            k += 1
    return ST_OK, k, ms[:k], sides[:k], xs[:k], v1s[:k], v2s[:k]


@njit(cache=True)
def _nondim_T(r1, r2, tof, mu, retrograde):
    """(status, T, lam) for max_revolutions / min-TOF queries."""
    prep = _lambert_prep(r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], retrograde)
    if prep[0] != ST_OK:
        return prep[0], 0.0, 0.0
    s = prep[2]
    return ST_OK, math.sqrt(2.0 * mu / (s * s * s)) * tof, prep[1]


@njit(cache=True)
def _time_scale(r1, r2, mu, retrograde):
    """(status, scale, lam): physical seconds per unit of non-dimensional T."""
    prep = _lambert_prep(r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], retrograde)
    if prep[0] != ST_OK:
        return prep[0], 0.0, 0.0
    s = prep[2]
    return ST_OK, 1.0 / math.sqrt(2.0 * mu / (s * s * s)), prep[1]


# ---------------------------------------------------------------------------
# Pairwise rendezvous cost
# ---------------------------------------------------------------------------

@njit(cache=True)
def _pair_cost_full(depel, arrel, t1, dt, mu, mcap):
    """Single-pair rendezvous cost at (t1, dt).

    Departure state rides the departure body's orbit at t1; arrival state is
    the arrival body at t1+dt.  Cost is min over revolutions (0..N_max,
    capped) and both period branches of |dv1| + |dv2|.

    Collinear endpoint geometry is a cost wall; the one exception is a
    coasting chaser whose own orbit already meets the target (identical
    orbits), which costs only the terminal velocity match.

    Returns (cost, m, branch, dv1x, dv1y, dv1z, dv2x, dv2y, dv2z, ncalls);
    branch: 0 short-period (smaller transfer semi-major axis), 1 long-period.
    """
    if dt <= 0.0:
        return HUGE, -1, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0
    r1x, r1y, r1z, vcx, vcy, vcz = _body_rv(depel, t1, mu)
    r2x, r2y, r2z, vtx, vty, vtz = _body_rv(arrel, t1 + dt, mu)
    prep = _lambert_prep(r1x, r1y, r1z, r2x, r2y, r2z, False)
    st = prep[0]
    r2n = prep[5]
    if st == ST_COLLINEAR:
        pst, px, py, pz, pvx, pvy, pvz = _propagate_uv(
            r1x, r1y, r1z, vcx, vcy, vcz, dt, mu)
        if pst == ST_OK:
            dx = px - r2x
            dy = py - r2y
            dz = pz - r2z
            if math.sqrt(dx * dx + dy * dy + dz * dz) <= 1e-6 * r2n:
                d2x = vtx - pvx
                d2y = vty - pvy
                d2z = vtz - pvz
                cost = math.sqrt(d2x * d2x + d2y * d2y + d2z * d2z)
                n_dep = math.sqrt(mu / (depel[0] ** 3))
                m_coast = int(math.floor(dt * n_dep / TWO_PI + 0.5))
                return cost, m_coast, 0, 0.0, 0.0, 0.0, d2x, d2y, d2z, 0
        return HUGE, -1, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0
    if st != ST_OK:
        return HUGE, -1, 0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0

    lam = prep[1]
    s = prep[2]
    cn = prep[3]
    r1n = prep[4]
    T = math.sqrt(2.0 * mu / (s * s * s)) * dt
    gamma = math.sqrt(mu * s / 2.0)
    rho = (r1n - r2n) / cn
    sigma = math.sqrt(max(0.0, 1.0 - rho * rho))
    M = _max_revs(T, lam, mcap)

    best = HUGE
    bm = -1
    bb = 0
    b1x = 0.0
    b1y = 0.0
    b1z = 0.0
    b2x = 0.0
    b2y = 0.0
    b2z = 0.0
    ncalls = 0
    for m in range(M + 1):
        if m == 0:
            ncalls += 1
            st0, x0 = _solve_x_zero(T, lam)
            if st0 != ST_OK:
                continue
            nsol = 1
            xl = x0
            xr = x0
        else:
            ncalls += 2
            stp, xl, xr = _solve_x_pair(T, lam, m)
            if stp != ST_OK:
                continue
            nsol = 2
        for k in range(nsol):
            x = xl if k == 0 else xr
            vv = _vel_from_x(x, lam, gamma, rho, sigma, r1n, r2n,
                             prep[6], prep[7], prep[8], prep[9], prep[10],
                             prep[11], prep[12], prep[13], prep[14], prep[15],
                             prep[16], prep[17])
            d1x = vv[0] - vcx
            d1y = vv[1] - vcy
            d1z = vv[2] - vcz
            d2x = vtx - vv[3]
            d2y = vty - vv[4]
            d2z = vtz - vv[5]
            c = math.sqrt(d1x * d1x + d1y * d1y + d1z * d1z) \
                + math.sqrt(d2x * d2x + d2y * d2y + d2z * d2z)
            if c < best:
                best = c
                bm = m
                if m == 0:
                    bb = SHORT
                else:
                    # smaller |x| -> smaller transfer semi-major axis
                    if abs(xl) <= abs(xr):
                        bb = SHORT if k == 0 else LONG
                    else:
                        bb = LONG if k == 0 else SHORT
                b1x = d1x
                b1y = d1y
                b1z = d1z
                b2x = d2x
                b2y = d2y
                b2z = d2z
    return best, bm, bb, b1x, b1y, b1z, b2x, b2y, b2z, ncalls


@njit(cache=True)
def _cost_only(depel, arrel, t1, dt, mu, mcap):
    res = _pair_cost_full(depel, arrel, t1, dt, mu, mcap)
    return res[0], res[9]


@njit(cache=True, parallel=True)
def _grid_costs(depel, arrel, t1s, dts, mu, mcap):
    """Cost surface on the tensor grid dts x t1s.  Returns (grid, calls)."""
    nc = t1s.size
    nr = dts.size
    out = np.empty((nr, nc))
    calls = 0
    for i in prange(nr):
        local = 0
        for j in range(nc):
            res = _pair_cost_full(depel, arrel, t1s[j], dts[i], mu, mcap)
            out[i, j] = res[0]
            local += res[9]
        calls += local
    return out, calls


# ---------------------------------------------------------------------------
# Box-constrained quasi-Newton local minimizer (2-D, scaled coordinates)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _fd_grad(depel, arrel, mu, mcap, u0, u1, s0, s1, h, fc):
    """Central-difference gradient in scaled coordinates.

    Falls back to one-sided differences next to cost walls (HUGE values).
    Returns (g0, g1, ncalls).
    """
    ncalls = 0
    fp, c = _cost_only(depel, arrel, (u0 + h) * s0, u1 * s1, mu, mcap)
    ncalls += c
    fm, c = _cost_only(depel, arrel, (u0 - h) * s0, u1 * s1, mu, mcap)
    ncalls += c
    if fp < HUGE and fm < HUGE:
        g0 = (fp - fm) / (2.0 * h)
    elif fp < HUGE:
        g0 = (fp - fc) / h
    elif fm < HUGE:
        g0 = (fc - fm) / h
    else:
        g0 = 0.0
    fp, c = _cost_only(depel, arrel, u0 * s0, (u1 + h) * s1, mu, mcap)
    ncalls += c
    fm, c = _cost_only(depel, arrel, u0 * s0, (u1 - h) * s1, mu, mcap)
    ncalls += c
    if fp < HUGE and fm < HUGE:
        g1 = (fp - fm) / (2.0 * h)
    elif fp < HUGE:
        g1 = (fp - fc) / h
    elif fm < HUGE:
        g1 = (fc - fm) / h
    else:
        g1 = 0.0
    return g0, g1, ncalls


@njit(cache=True)
def _minimize_box(depel, arrel, mu, mcap,
                  lo0, hi0, lo1, hi1, x0a, x0b,
                  scale0, scale1, gstep, pg_tol, maxiter):
    """Projected-BFGS minimization of the pair cost over a box.

    Works in scaled coordinates u = (t1/scale0, dt/scale1); gstep is the
    finite-difference step in u.  Convergence: projected-gradient norm in
    physical units <= pg_tol * (1 + cost), or step collapse.

    Returns (t1, dt, f, pg_norm, g_norm, bound_mask, converged, ncalls);
    bound_mask bits: 1 lo-t1, 2 hi-t1, 4 lo-dt, 8 hi-dt.
    """
    L0 = lo0 / scale0
    H0 = hi0 / scale0
    L1 = lo1 / scale1
    H1 = hi1 / scale1
    span0 = H0 - L0
    span1 = H1 - L1
    eps0 = 1e-9 * span0
    eps1 = 1e-9 * span1
    step_tol = 1e-11 * max(span0, span1)

    u0 = min(max(x0a / scale0, L0), H0)
    u1 = min(max(x0b / scale1, L1), H1)

    ncalls = 0
    f, c = _cost_only(depel, arrel, u0 * scale0, u1 * scale1, mu, mcap)
    ncalls += c
    if f >= HUGE:
        # nudge off a wall toward the box center
        c0 = 0.5 * (L0 + H0)
        c1 = 0.5 * (L1 + H1)
        for k in range(1, 9):
            t = k * 0.004
            tu0 = u0 + (c0 - u0) * t
            tu1 = u1 + (c1 - u1) * t
            f, cc = _cost_only(depel, arrel, tu0 * scale0, tu1 * scale1,
                               mu, mcap)
            ncalls += cc
            if f < HUGE:
                u0 = tu0
                u1 = tu1
                break
        if f >= HUGE:
            return (u0 * scale0, u1 * scale1, HUGE, HUGE, HUGE, 0, 0, ncalls)

    g0, g1, c = _fd_grad(depel, arrel, mu, mcap, u0, u1,
                         scale0, scale1, gstep, f)
    ncalls += c
    h00 = 1.0
    h01 = 0.0
    h11 = 1.0
    converged = 0
    steepest_retry = False

    for _ in range(maxiter):
        at_l0 = u0 <= L0 + eps0
        at_h0 = u0 >= H0 - eps0
        at_l1 = u1 <= L1 + eps1
        at_h1 = u1 >= H1 - eps1
        pg0 = g0
        if at_l0 and pg0 > 0.0:
            pg0 = 0.0
        if at_h0 and pg0 < 0.0:
            pg0 = 0.0
        pg1 = g1
        if at_l1 and pg1 > 0.0:
            pg1 = 0.0
        if at_h1 and pg1 < 0.0:
            pg1 = 0.0
        pg_phys = math.sqrt((pg0 / scale0) ** 2 + (pg1 / scale1) ** 2)
        if pg_phys <= pg_tol * (1.0 + abs(f)):
            converged = 1
            break

        if steepest_retry:
            d0 = -pg0
            d1 = -pg1
        else:
            d0 = -(h00 * g0 + h01 * g1)
            d1 = -(h01 * g0 + h11 * g1)
            # freeze active bounds whose direction points outward
            if (at_l0 and d0 < 0.0) or (at_h0 and d0 > 0.0):
                d0 = 0.0
            if (at_l1 and d1 < 0.0) or (at_h1 and d1 > 0.0):
                d1 = 0.0
            dg = d0 * g0 + d1 * g1
            if dg >= 0.0 or (d0 == 0.0 and d1 == 0.0):
                h00 = 1.0
                h01 = 0.0
                h11 = 1.0
                d0 = -pg0
                d1 = -pg1
        dg = d0 * g0 + d1 * g1
        if dg >= 0.0:
            break

        # largest feasible step
        amax = 1e18
        if d0 > 0.0:
            amax = min(amax, (H0 - u0) / d0)
        elif d0 < 0.0:
            amax = min(amax, (L0 - u0) / d0)
        if d1 > 0.0:
            amax = min(amax, (H1 - u1) / d1)
        elif d1 < 0.0:
            amax = min(amax, (L1 - u1) / d1)
        alpha = min(1.0, amax)
        if alpha <= 0.0:
            break

        accepted = False
        nu0 = u0
        nu1 = u1
        fn = f
        for _ls in range(40):
            tu0 = u0 + alpha * d0
            tu1 = u1 + alpha * d1
            if tu0 < L0 + eps0 * 1e-3:
                tu0 = L0
            elif tu0 > H0 - eps0 * 1e-3:
                tu0 = H0
            if tu1 < L1 + eps1 * 1e-3:
                tu1 = L1
            elif tu1 > H1 - eps1 * 1e-3:
                tu1 = H1
            fn, cc = _cost_only(depel, arrel, tu0 * scale0, tu1 * scale1,
                                mu, mcap)
            ncalls += cc
            if fn < HUGE and fn <= f + 1e-4 * alpha * dg:
                accepted = True
                nu0 = tu0
                nu1 = tu1
                break
            alpha *= 0.5
            if alpha < 1e-16:
                break
        if not accepted:
            if steepest_retry:
                break
            steepest_retry = True
            h00 = 1.0
            h01 = 0.0
            h11 = 1.0
            continue
        steepest_retry = False

        s0v = nu0 - u0
        s1v = nu1 - u1
        ng0, ng1, c = _fd_grad(depel, arrel, mu, mcap, nu0, nu1,
                               scale0, scale1, gstep, fn)
        ncalls += c
        y0 = ng0 - g0
        y1 = ng1 - g1
        sy = s0v * y0 + s1v * y1
        snorm = math.sqrt(s0v * s0v + s1v * s1v)
        ynorm = math.sqrt(y0 * y0 + y1 * y1)
        if sy > 1e-12 * snorm * ynorm:
            rho_b = 1.0 / sy
            a00 = 1.0 - rho_b * s0v * y0
            a01 = -rho_b * s0v * y1
            a10 = -rho_b * s1v * y0
            a11 = 1.0 - rho_b * s1v * y1
            m00 = a00 * h00 + a01 * h01
            m01 = a00 * h01 + a01 * h11
            m10 = a10 * h00 + a11 * h01
            m11 = a10 * h01 + a11 * h11
            nh00 = m00 * a00 + m01 * a01 + rho_b * s0v * s0v
            nh01 = m00 * a10 + m01 * a11 + rho_b * s0v * s1v
            nh11 = m10 * a10 + m11 * a11 + rho_b * s1v * s1v
            h00 = nh00
            h01 = nh01
            h11 = nh11
        u0 = nu0
        u1 = nu1
        f = fn
        g0 = ng0
        g1 = ng1
        if snorm < step_tol:
            pg0 = g0
            pg1 = g1
            if (u0 <= L0 + eps0 and pg0 > 0.0) or (u0 >= H0 - eps0 and pg0 < 0.0):
                pg0 = 0.0
            if (u1 <= L1 + eps1 and pg1 > 0.0) or (u1 >= H1 - eps1 and pg1 < 0.0):
                pg1 = 0.0
            pg_phys = math.sqrt((pg0 / scale0) ** 2 + (pg1 / scale1) ** 2)
            if pg_phys <= pg_tol * (1.0 + abs(f)):
                converged = 1
            break

    # final diagnostics at the resting point
    g0, g1, c = _fd_grad(depel, arrel, mu, mcap, u0, u1,
                         scale0, scale1, gstep, f)
    ncalls += c
    at_l0 = u0 <= L0 + eps0
    at_h0 = u0 >= H0 - eps0
    at_l1 = u1 <= L1 + eps1
    at_h1 = u1 >= H1 - eps1
    pg0 = g0
    if at_l0 and pg0 > 0.0:
        pg0 = 0.0
    if at_h0 and pg0 < 0.0:
        pg0 = 0.0
    pg1 = g1
    if at_l1 and pg1 > 0.0:
        pg1 = 0.0
    if at_h1 and pg1 < 0.0:
        pg1 = 0.0
    pg_phys = math.sqrt((pg0 / scale0) ** 2 + (pg1 / scale1) ** 2)
    g_phys = math.sqrt((g0 / scale0) ** 2 + (g1 / scale1) ** 2)
    if pg_phys <= pg_tol * (1.0 + abs(f)):
        converged = 1
    bmask = 0
    if at_l0:
        bmask |= 1
    if at_h0:
        bmask |= 2
    if at_l1:
        bmask |= 4
    if at_h1:
        bmask |= 8
    return (u0 * scale0, u1 * scale1, f, pg_phys, g_phys, bmask,
            converged, ncalls)
