"""Numeric kernels for the aircraft model: aerodynamic coefficients, wind-frame
forces and body torques, the 12-state dynamics, analytic force Jacobians and
the third-derivative map driving the cascade feedback.

These are the hot inner loops of planning and closed-loop simulation.  By
default they are compiled with numba; setting ``FLATCHAIN_NUMBA=0`` selects
the identical pure-numpy code path (same functions, uncompiled).  See
``benchmarks/bench_kernels.py`` for a comparison of the two backends.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .params import LAPSE, RHO_EXP, T0_K, THETA0

_FLAG = os.environ.get("FLATCHAIN_NUMBA", "auto").strip().lower()

if _FLAG in ("0", "false", "no", "off"):
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        if _FLAG in ("1", "true", "yes", "on"):
            raise
        NUMBA_ENABLED = False


def _jit(f):
    if NUMBA_ENABLED:
        import numba

        return numba.njit(cache=True, fastmath=False)(f)
    return f


# packed-parameter slots (see params.AircraftParams.packed)
_M, _S, _SPAN, _CHORD = 0, 1, 2, 3
_IXX, _IYY, _IZZ, _IXZ = 4, 5, 6, 7
_YP, _EPS, _G, _RHO0 = 8, 9, 10, 11
_RHO_MODE, _RATE_MODE, _FMAX = 12, 13, 14


@_jit
def rho_and_drho(pk, z):
    """Air density and its z-derivative (z points down: aloft means z < 0)."""
    rho0 = pk[_RHO0]
    if pk[_RHO_MODE] == 0.0:
        return rho0, 0.0
    base = 1.0 + LAPSE * z / T0_K
    rho = rho0 * base**RHO_EXP
    drho = rho0 * RHO_EXP * base ** (RHO_EXP - 1.0) * (LAPSE / T0_K)
    return rho, drho


@_jit
def rate_terms(pk, V, p, q, r):
    """Nondimensional body rates p~, q~, r~ per the configured scaling."""
    if pk[_RATE_MODE] == 1.0:  # raw scaling: lengths only
        return pk[_SPAN] * p, pk[_CHORD] * q, pk[_SPAN] * r
    inv = 1.0 / (2.0 * V)
    return pk[_SPAN] * p * inv, pk[_CHORD] * q * inv, pk[_SPAN] * r * inv


@_jit
def force_coeffs(pk, V, alpha, beta, p, q, r, dl, dm, dn, simplified):
    """C_D, C_Y, C_L; in simplified mode the rates and deflections read 0."""
    th = pk[THETA0:]
    if simplified:
        pt = 0.0
        qt = 0.0
        rt = 0.0
        dl_ = 0.0
        dm_ = 0.0
        dn_ = 0.0
    else:
        pt, qt, rt = rate_terms(pk, V, p, q, r)
        dl_ = dl
        dm_ = dm
        dn_ = dn
    a2 = alpha * alpha
    a3 = a2 * alpha
    a4 = a2 * a2
    CD = (
        th[0] + th[1] * alpha + th[2] * alpha * qt + th[3] * alpha * dm_
        + th[4] * a2 + th[5] * a2 * qt + th[6] * dm_
        + th[7] * a3 + th[8] * a3 * qt + th[9] * a4
    )
    CY = th[10] * beta + th[11] * pt + th[12] * rt + th[13] * dl_ + th[14] * dn_
    CL = (
        th[15] + th[16] * alpha + th[17] * qt + th[18] * dm_
        + th[19] * alpha * qt + th[20] * a2 + th[21] * a3 + th[22] * a4
    )
    return CD, CY, CL


@_jit
def moment_coeffs(pk, V, alpha, beta, p, q, r, dl, dm, dn):
    """C_l, C_m, C_n; the moments always keep rates and deflections."""
    th = pk[THETA0:]
    pt, qt, rt = rate_terms(pk, V, p, q, r)
    a2 = alpha * alpha
    a3 = a2 * alpha
    a4 = a2 * a2
    Cl = th[23] * beta + th[24] * pt + th[25] * rt + th[26] * dl + th[27] * dn
    Cm = (
        th[28] + th[29] * alpha + th[30] * qt + th[31] * dm
        + th[32] * alpha * qt + th[33] * a2 * qt + th[34] * a2 * dm
        + th[35] * a3 * qt + th[36] * a3 * dm + th[37] * a4
    )
    Cn = (
        th[38] * beta + th[39] * pt + th[40] * rt + th[41] * dl + th[42] * dn
        + th[43] * beta * beta + th[44] * beta * beta * beta
    )
    return Cl, Cm, Cn


@_jit
def wind_coeffs(CD, CY, CL, beta):
    """(C_D, C_Y, C_L) -> (C_x, C_y, C_z) by the sideslip rotation."""
    cb = math.cos(beta)
    sb = math.sin(beta)
    return cb * CD - sb * CY, sb * CD + cb * CY, CL


@_jit
def forces_moments(pk, z, V, gamma, alpha, beta, mu, F, dl, dm, dn, p, q, r, eta, simplified):
    """Wind-frame forces (gravity folded in) and body torques.

    Returns (X, Y, Z, L, M, N, CD, CY, CL, Cx, Cy, Cz, Cl, Cm, Cn).
    """
    m = pk[_M]
    g = pk[_G]
    rho, _ = rho_and_drho(pk, z)
    qbar = 0.5 * rho * pk[_S] * V * V
    CD, CY, CL = force_coeffs(pk, V, alpha, beta, p, q, r, dl, dm, dn, simplified)
    Cx, Cy, Cz = wind_coeffs(CD, CY, CL, beta)
    Cl, Cm, Cn = moment_coeffs(pk, V, alpha, beta, p, q, r, dl, dm, dn)
    cae = math.cos(alpha + pk[_EPS])
    sae = math.sin(alpha + pk[_EPS])
    cb = math.cos(beta)
    sb = math.sin(beta)
    cg = math.cos(gamma)
    sg = math.sin(gamma)
    cm_ = math.cos(mu)
    sm_ = math.sin(mu)
    X = F * cae * cb - qbar * Cx - g * m * sg
    Y = F * cae * sb + qbar * Cy + g * m * cg * sm_
    Z = -F * sae - qbar * Cz + g * m * cg * cm_
    f_diff = eta * F  # F1 - F2
    L = -pk[_YP] * math.sin(pk[_EPS]) * f_diff + qbar * pk[_SPAN] * Cl
    M = qbar * pk[_CHORD] * Cm
    N = pk[_YP] * math.cos(pk[_EPS]) * f_diff + qbar * pk[_SPAN] * Cn
    return X, Y, Z, L, M, N, CD, CY, CL, Cx, Cy, Cz, Cl, Cm, Cn


@_jit
def force_jacobian(pk, z, V, gamma, alpha, beta, mu, F, dl, dm, dn, p, q, r, simplified):
    """Analytic d(X, Y, Z)/d(z, V, gamma, alpha, beta, mu, F), rates and
    deflections held fixed.  3x7 array; column order (z, V, g, a, b, m, F)."""
    m = pk[_M]
    g = pk[_G]
    th = pk[THETA0:]
    rho, drho = rho_and_drho(pk, z)
    S = pk[_S]
    qbar = 0.5 * rho * S * V * V
    dqbar_dz = 0.5 * drho * S * V * V
    dqbar_dV = rho * S * V
    if simplified:
        pt = 0.0
        qt = 0.0
        rt = 0.0
        dm_ = 0.0
        dqt_dV = 0.0
        dpt_dV = 0.0
        drt_dV = 0.0
    else:
        pt, qt, rt = rate_terms(pk, V, p, q, r)
        dm_ = dm
        if pk[_RATE_MODE] == 1.0:
            dpt_dV = 0.0
            dqt_dV = 0.0
            drt_dV = 0.0
        else:
            dpt_dV = -pt / V
            dqt_dV = -qt / V
            drt_dV = -rt / V
    CD, CY, CL = force_coeffs(pk, V, alpha, beta, p, q, r, dl, dm, dn, simplified)
    a2 = alpha * alpha
    a3 = a2 * alpha
    dCD_da = (
        th[1] + th[2] * qt + th[3] * dm_ + 2.0 * th[4] * alpha + 2.0 * th[5] * alpha * qt
        + 3.0 * th[7] * a2 + 3.0 * th[8] * a2 * qt + 4.0 * th[9] * a3
    )
    dCD_dV = (th[2] * alpha + th[5] * a2 + th[8] * a3) * dqt_dV
    dCY_db = th[10]
    dCY_dV = th[11] * dpt_dV + th[12] * drt_dV
    dCL_da = th[16] + th[19] * qt + 2.0 * th[20] * alpha + 3.0 * th[21] * a2 + 4.0 * th[22] * a3
    dCL_dV = (th[17] + th[19] * alpha) * dqt_dV
    cb = math.cos(beta)
    sb = math.sin(beta)
    Cx = cb * CD - sb * CY
    Cy = sb * CD + cb * CY
    Cz = CL
    dCx_da = cb * dCD_da
    dCx_db = -sb * CD - cb * CY - sb * dCY_db
    dCx_dV = cb * dCD_dV - sb * dCY_dV
    dCy_da = sb * dCD_da
    dCy_db = cb * CD - sb * CY + cb * dCY_db
    dCy_dV = sb * dCD_dV + cb * dCY_dV
    dCz_da = dCL_da
    dCz_dV = dCL_dV
    cae = math.cos(alpha + pk[_EPS])
    sae = math.sin(alpha + pk[_EPS])
    cg = math.cos(gamma)
    sg = math.sin(gamma)
    cm_ = math.cos(mu)
    sm_ = math.sin(mu)
    out = np.empty((3, 7))
    # X row
    out[0, 0] = -dqbar_dz * Cx
    out[0, 1] = -dqbar_dV * Cx - qbar * dCx_dV
    out[0, 2] = -g * m * cg
    out[0, 3] = -F * sae * cb - qbar * dCx_da
    out[0, 4] = -F * cae * sb - qbar * dCx_db
    out[0, 5] = 0.0
    out[0, 6] = cae * cb
    # Y row
    out[1, 0] = dqbar_dz * Cy
    out[1, 1] = dqbar_dV * Cy + qbar * dCy_dV
    out[1, 2] = -g * m * sg * sm_
    out[1, 3] = -F * sae * sb + qbar * dCy_da
    out[1, 4] = F * cae * cb + qbar * dCy_db
    out[1, 5] = g * m * cg * cm_
    out[1, 6] = cae * sb
    # Z row
    out[2, 0] = -dqbar_dz * Cz
    out[2, 1] = -dqbar_dV * Cz - qbar * dCz_dV
    out[2, 2] = -g * m * sg * cm_
    out[2, 3] = -F * cae - qbar * dCz_da
    out[2, 4] = 0.0
    out[2, 5] = -g * m * cg * sm_
    out[2, 6] = -sae
    return out


@_jit
def q_vector(pk, z, V, gamma, alpha, beta, mu, F, simplified):
    """(X, sin(mu) Y + cos(mu) Z, cos(mu) Y - sin(mu) Z) for the simplified
    force balance; these drive both planning and the outer feedback loop."""
    X, Y, Z = forces_moments(
        pk, z, V, gamma, alpha, beta, mu, F, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, simplified
    )[:3]
    sm_ = math.sin(mu)
    cm_ = math.cos(mu)
    return X, sm_ * Y + cm_ * Z, cm_ * Y - sm_ * Z


@_jit
def q_jacobian(pk, z, V, gamma, alpha, beta, mu, F, simplified):
    """d(X, S, C)/d(alpha, beta, mu, F) with S, C the banked force combos.

    This is the flat-output selection matrix: deleting one column gives the
    singularity determinant of the corresponding fourth flat output.
    """
    jf = force_jacobian(pk, z, V, gamma, alpha, beta, mu, F, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, simplified)
    X, Y, Z = forces_moments(
        pk, z, V, gamma, alpha, beta, mu, F, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, simplified
    )[:3]
    sm_ = math.sin(mu)
    cm_ = math.cos(mu)
    out = np.empty((3, 4))
    for k in range(4):
        col = 3 + k  # (alpha, beta, mu, F) columns of the force jacobian
        dX = jf[0, col]
        dY = jf[1, col]
        dZ = jf[2, col]
        out[0, k] = dX
        out[1, k] = sm_ * dY + cm_ * dZ
        out[2, k] = cm_ * dY - sm_ * dZ
    # product-rule terms from the mu rotation itself
    out[1, 2] += cm_ * Y - sm_ * Z
    out[2, 2] += -sm_ * Y - cm_ * Z
    return out


@_jit
def rate_solve_matrix(alpha, beta):
    """M with M (p,q,r)^T = (adot - Z/(mVcb), bdot - Y/(mV), mudot - W/(mVcb))."""
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    cb = math.cos(beta)
    tb = math.tan(beta)
    out = np.empty((3, 3))
    out[0, 0] = -ca * tb
    out[0, 1] = 1.0
    out[0, 2] = -sa * tb
    out[1, 0] = sa
    out[1, 1] = 0.0
    out[1, 2] = -ca
    out[2, 0] = ca / cb
    out[2, 1] = 0.0
    out[2, 2] = sa / cb
    return out


@_jit
def angle_rates(pk, V, gamma, alpha, beta, mu, Y, Z, p, q, r):
    """(alphadot, betadot, mudot) rows of the dynamics, given forces."""
    m = pk[_M]
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    cb = math.cos(beta)
    sb = math.sin(beta)
    cm_ = math.cos(mu)
    sm_ = math.sin(mu)
    tg = math.tan(gamma)
    mV = m * V
    adot = (-p * ca * sb + q * cb - r * sa * sb + Z / mV) / cb
    bdot = p * sa - r * ca + Y / mV
    W = Y * cm_ * tg * cb - Z * (sm_ * tg * cb + sb)
    mudot = (p * ca + r * sa + W / mV) / cb
    return adot, bdot, mudot


@_jit
def inertia_solve(pk, t1, t2, t3):
    """J^{-1} (t1, t2, t3) for the plane-of-symmetry inertia tensor."""
    Ixx = pk[_IXX]
    Iyy = pk[_IYY]
    Izz = pk[_IZZ]
    Ixz = pk[_IXZ]
    d = Ixx * Izz - Ixz * Ixz
    return (Izz * t1 + Ixz * t3) / d, t2 / Iyy, (Ixz * t1 + Ixx * t3) / d


@_jit
def gyroscopic(pk, p, q, r):
    Ixx = pk[_IXX]
    Iyy = pk[_IYY]
    Izz = pk[_IZZ]
    Ixz = pk[_IXZ]
    g1 = (Iyy - Izz) * q * r + Ixz * p * q
    g2 = (Izz - Ixx) * p * r + Ixz * (r * r - p * p)
    g3 = (Ixx - Iyy) * p * q - Ixz * r * q
    return g1, g2, g3


@_jit
def wind_to_frame(chi, gamma, mu, wx, wy, wz):
    """Rotate an earth-frame force into the wind frame."""
    cc = math.cos(chi)
    sc = math.sin(chi)
    cg = math.cos(gamma)
    sg = math.sin(gamma)
    cm_ = math.cos(mu)
    sm_ = math.sin(mu)
    fx = cc * cg * wx + sc * cg * wy - sg * wz
    fy = (-sc * cm_ + cc * sg * sm_) * wx + (cc * cm_ + sc * sg * sm_) * wy + cg * sm_ * wz
    fz = (sc * sm_ + cc * sg * cm_) * wx + (-cc * sm_ + sc * sg * cm_) * wy + cg * cm_ * wz
    return fx, fy, fz


@_jit
def dynamics12(pk, st, F, dl, dm, dn, eta, simplified, wx, wy, wz):
    """Right-hand side of the 12-state model; wind given in the earth frame."""
    z = st[2]
    V = st[3]
    gamma = st[4]
    chi = st[5]
    alpha = st[6]
    beta = st[7]
    mu = st[8]
    p = st[9]
    q = st[10]
    r = st[11]
    m = pk[_M]
    fm = forces_moments(pk, z, V, gamma, alpha, beta, mu, F, dl, dm, dn, p, q, r, eta, simplified)
    X = fm[0]
    Y = fm[1]
    Z = fm[2]
    if wx != 0.0 or wy != 0.0 or wz != 0.0:
        fx, fy, fz = wind_to_frame(chi, gamma, mu, wx, wy, wz)
        X += fx
        Y += fy
        Z += fz
    cg = math.cos(gamma)
    sg = math.sin(gamma)
    cm_ = math.cos(mu)
    sm_ = math.sin(mu)
    out = np.empty(12)
    out[0] = V * math.cos(chi) * cg
    out[1] = V * math.sin(chi) * cg
    out[2] = -V * sg
    out[3] = X / m
    out[4] = -(Y * sm_ + Z * cm_) / (m * V)
    out[5] = (Y * cm_ - Z * sm_) / (m * V * cg)
    adot, bdot, mudot = angle_rates(pk, V, gamma, alpha, beta, mu, Y, Z, p, q, r)
    out[6] = adot
    out[7] = bdot
    out[8] = mudot
    g1, g2, g3 = gyroscopic(pk, p, q, r)
    pd, qd, rd = inertia_solve(pk, g1 + fm[3], g2 + fm[4], g3 + fm[5])
    out[9] = pd
    out[10] = qd
    out[11] = rd
    return out


@_jit
def third_derivative_map(pk, x, y, z, V, gamma, chi, alpha, beta, mu, F,
                         p, q, r, Fdot, out_kind):
    """(x''', y''', z''', wdot) of the simplified model under commanded
    (p, q, r, Fdot); w is beta (0), mu (1) or F (2).

    Exactly affine in the commands, which makes the finite-difference
    extraction of the feedback's Delta matrices exact up to rounding.
    """
    m = pk[_M]
    X, Y, Z = forces_moments(
        pk, z, V, gamma, alpha, beta, mu, F, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, True
    )[:3]
    sm_ = math.sin(mu)
    cm_ = math.cos(mu)
    cg = math.cos(gamma)
    sg = math.sin(gamma)
    cc = math.cos(chi)
    sc = math.sin(chi)
    S = Y * sm_ + Z * cm_
    C = Y * cm_ - Z * sm_
    Vd = X / m
    gd = -S / (m * V)
    cd = C / (m * V * cg)
    zd = -V * sg
    adot, bdot, mudot = angle_rates(pk, V, gamma, alpha, beta, mu, Y, Z, p, q, r)
    jf = force_jacobian(pk, z, V, gamma, alpha, beta, mu, F, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, True)
    Xd = (jf[0, 0] * zd + jf[0, 1] * Vd + jf[0, 2] * gd + jf[0, 3] * adot
          + jf[0, 4] * bdot + jf[0, 5] * mudot + jf[0, 6] * Fdot)
    Yd = (jf[1, 0] * zd + jf[1, 1] * Vd + jf[1, 2] * gd + jf[1, 3] * adot
          + jf[1, 4] * bdot + jf[1, 5] * mudot + jf[1, 6] * Fdot)
    Zd = (jf[2, 0] * zd + jf[2, 1] * Vd + jf[2, 2] * gd + jf[2, 3] * adot
          + jf[2, 4] * bdot + jf[2, 5] * mudot + jf[2, 6] * Fdot)
    Sd = Yd * sm_ + Zd * cm_ + mudot * C
    Cd = Yd * cm_ - Zd * sm_ - mudot * S
    Vdd = Xd / m
    gdd = -Sd / (m * V) + S * Vd / (m * V * V)
    cdd = Cd / (m * V * cg) - C * (Vd * cg - V * sg * gd) / (m * V * V * cg * cg)
    x3 = (Vdd * cc * cg - 2.0 * Vd * sc * cg * cd - 2.0 * Vd * cc * sg * gd
          - V * cc * cg * (cd * cd + gd * gd) + 2.0 * V * sc * sg * gd * cd
          - V * sc * cg * cdd - V * cc * sg * gdd)
    y3 = (Vdd * sc * cg + 2.0 * Vd * cc * cg * cd - 2.0 * Vd * sc * sg * gd
          - V * sc * cg * (cd * cd + gd * gd) - 2.0 * V * cc * sg * gd * cd
          + V * cc * cg * cdd - V * sc * sg * gdd)
    z3 = -Vdd * sg - 2.0 * Vd * cg * gd + V * sg * gd * gd - V * cg * gdd
    if out_kind == 0:
        wd = bdot
    elif out_kind == 1:
        wd = mudot
    else:
        wd = Fdot
    return x3, y3, z3, wd


@_jit
def position_chain(pk, z, V, gamma, chi, alpha, beta, mu, F):
    """(xdot, ydot, zdot, xddot, yddot, zddot) of the simplified model;
    independent of the body rates."""
    m = pk[_M]
    X, Y, Z = forces_moments(
        pk, z, V, gamma, alpha, beta, mu, F, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, True
    )[:3]
    sm_ = math.sin(mu)
    cm_ = math.cos(mu)
    cg = math.cos(gamma)
    sg = math.sin(gamma)
    cc = math.cos(chi)
    sc = math.sin(chi)
    S = Y * sm_ + Z * cm_
    C = Y * cm_ - Z * sm_
    Vd = X / m
    gd = -S / (m * V)
    cd = C / (m * V * cg)
    xd = V * cc * cg
    yd = V * sc * cg
    zd = -V * sg
    xdd = Vd * cc * cg - V * sc * cg * cd - V * cc * sg * gd
    ydd = Vd * sc * cg + V * cc * cg * cd - V * sc * sg * gd
    zdd = -Vd * sg - V * cg * gd
    return xd, yd, zd, xdd, ydd, zdd


@_jit
def moment_affine(pk, z, V, alpha, beta, p, q, r, F, eta):
    """Torque model split as (L0, M0, N0) + B_delta (dl, dm, dn)^T."""
    th = pk[THETA0:]
    rho, _ = rho_and_drho(pk, z)
    qbar = 0.5 * rho * pk[_S] * V * V
    Cl0, Cm0, Cn0 = moment_coeffs(pk, V, alpha, beta, p, q, r, 0.0, 0.0, 0.0)
    f_diff = eta * F
    L0 = -pk[_YP] * math.sin(pk[_EPS]) * f_diff + qbar * pk[_SPAN] * Cl0
    M0 = qbar * pk[_CHORD] * Cm0
    N0 = pk[_YP] * math.cos(pk[_EPS]) * f_diff + qbar * pk[_SPAN] * Cn0
    a2 = alpha * alpha
    B = np.empty((3, 3))
    B[0, 0] = qbar * pk[_SPAN] * th[26]
    B[0, 1] = 0.0
    B[0, 2] = qbar * pk[_SPAN] * th[27]
    B[1, 0] = 0.0
    B[1, 1] = qbar * pk[_CHORD] * (th[31] + th[34] * a2 + th[36] * a2 * alpha)
    B[1, 2] = 0.0
    B[2, 0] = qbar * pk[_SPAN] * th[41]
    B[2, 1] = 0.0
    B[2, 2] = qbar * pk[_SPAN] * th[42]
    return L0, M0, N0, B


def warmup(pk) -> None:
    """Trigger JIT compilation of every kernel (no-op on the numpy backend)."""
    st = np.array([0.0, 0.0, -1000.0, 50.0, 0.01, 0.1, 0.02, 0.0, 0.0, 0.0, 0.0, 0.0])
    dynamics12(pk, st, 1000.0, 0.0, 0.0, 0.0, 0.0, True, 0.0, 0.0, 0.0)
    dynamics12(pk, st, 1000.0, 0.0, 0.0, 0.0, 0.0, False, 0.0, 0.0, 1.0)
    force_jacobian(pk, -1000.0, 50.0, 0.01, 0.02, 0.0, 0.0, 1000.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, True)
    q_jacobian(pk, -1000.0, 50.0, 0.01, 0.02, 0.0, 0.0, 1000.0, True)
    q_vector(pk, -1000.0, 50.0, 0.01, 0.02, 0.0, 0.0, 1000.0, True)
    third_derivative_map(pk, 0.0, 0.0, -1000.0, 50.0, 0.01, 0.1, 0.02, 0.0, 0.0, 1000.0,
                         0.0, 0.0, 0.0, 0.0, 0)
    position_chain(pk, -1000.0, 50.0, 0.01, 0.1, 0.02, 0.0, 0.0, 1000.0)
    moment_affine(pk, -1000.0, 50.0, 0.02, 0.0, 0.0, 0.0, 0.0, 1000.0, 0.0)
    rate_solve_matrix(0.02, 0.0)
