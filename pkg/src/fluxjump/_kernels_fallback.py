"""Pure numpy edge-flux sweeps, bit-compatible with the compiled kernels.

Every arithmetic expression mirrors the compiled loop exactly: same operation
order, np.where in place of branches. np.minimum/np.maximum are avoided on
purpose (they differ from a C ternary on signed zeros).
"""

from __future__ import annotations

import numpy as np


def quad_godunov_sweep(a, b, alpha, beta, gamma, out):
    fa = (alpha * a) * a + beta * a + gamma
    fb = (alpha * b) * b + beta * b + gamma
    lo = np.where(a < b, a, b)
    hi = np.where(a < b, b, a)
    with np.errstate(divide="ignore", invalid="ignore"):
        uc = np.where(alpha != 0.0, -beta / (2.0 * alpha), lo)
    uc = np.where(uc < lo, lo, np.where(uc > hi, hi, uc))
    fc = np.where(alpha != 0.0, (alpha * uc) * uc + beta * uc + gamma, fa)
    mn = np.where(fa < fb, fa, fb)
    mx = np.where(fa > fb, fa, fb)
    out[...] = np.where(
        a <= b,
        np.where(fc < mn, fc, mn),
        np.where(fc > mx, fc, mx),
    )
    return 0


def quad_eo_sweep(a, b, alpha, beta, gamma, out):
    fa = (alpha * a) * a + beta * a + gamma
    fb = (alpha * b) * b + beta * b + gamma
    lo = np.where(a < b, a, b)
    hi = np.where(a < b, b, a)
    flo = np.where(a < b, fa, fb)
    fhi = np.where(a < b, fb, fa)
    with np.errstate(divide="ignore", invalid="ignore"):
        uc = np.where(alpha != 0.0, -beta / (2.0 * alpha), lo)
    uc = np.where(uc < lo, lo, np.where(uc > hi, hi, uc))
    fc = np.where(alpha != 0.0, (alpha * uc) * uc + beta * uc + gamma, fa)
    tv_quad = np.where(fc > flo, fc - flo, flo - fc) + np.where(fhi > fc, fhi - fc, fc - fhi)
    tv_lin = np.where(fhi > flo, fhi - flo, flo - fhi)
    tv = np.where(alpha != 0.0, tv_quad, tv_lin)
    s = np.where(b > a, 1.0, np.where(b < a, -1.0, 0.0))
    out[...] = 0.5 * (fa + fb) - (0.5 * s) * tv
    return 0


def poly_godunov_sweep(a, b, w, template, out):
    """Godunov sweep for a general polynomial template, per-edge scale w."""
    fa = w * template.g(a)
    fb = w * template.g(b)
    lo = np.where(a < b, a, b)
    hi = np.where(a < b, b, a)
    mn = np.where(fa < fb, fa, fb)
    mx = np.where(fa > fb, fa, fb)
    for c in template.crit:
        uc = np.where(c < lo, lo, np.where(c > hi, hi, c))
        fc = w * template.g(uc)
        mn = np.where(fc < mn, fc, mn)
        mx = np.where(fc > mx, fc, mx)
    out[...] = np.where(a <= b, mn, mx)
    return 0


def poly_eo_sweep(a, b, w, template, out):
    """Engquist-Osher sweep for a general polynomial template."""
    fa = w * template.g(a)
    fb = w * template.g(b)
    lo = np.where(a < b, a, b)
    hi = np.where(a < b, b, a)
    prev = w * template.g(lo)
    tv = np.zeros_like(prev)
    for c in template.crit:
        uc = np.where(c < lo, lo, np.where(c > hi, hi, c))
        fc = w * template.g(uc)
        tv = tv + np.where(fc > prev, fc - prev, prev - fc)
        prev = fc
    fhi = w * template.g(hi)
    tv = tv + np.where(fhi > prev, fhi - prev, prev - fhi)
    s = np.where(b > a, 1.0, np.where(b < a, -1.0, 0.0))
    out[...] = 0.5 * (fa + fb) - (0.5 * s) * tv
    return 0
