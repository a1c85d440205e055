# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled edge-flux sweeps for quadratic fluxes f(u) = alpha u^2 + beta u + gamma.

Operation order is mirrored exactly by the pure numpy fallback; together with
-ffp-contract=off at compile time the two backends are bit-identical.
"""


def quad_godunov_sweep(const double[::1] a, const double[::1] b,
                       const double[::1] alpha, const double[::1] beta,
                       const double[::1] gamma, double[::1] out):
    """Godunov flux per edge: exact min/max of f over [min(a,b), max(a,b)]."""
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double ai, bi, al, be, ga, fa, fb, lo, hi, uc, fc, m
    for i in range(n):
        ai = a[i]; bi = b[i]
        al = alpha[i]; be = beta[i]; ga = gamma[i]
        fa = (al * ai) * ai + be * ai + ga
        fb = (al * bi) * bi + be * bi + ga
        if ai < bi:
            lo = ai; hi = bi
        else:
            lo = bi; hi = ai
        if al != 0.0:
            uc = -be / (2.0 * al)
            if uc < lo:
                uc = lo
            elif uc > hi:
                uc = hi
            fc = (al * uc) * uc + be * uc + ga
        else:
            fc = fa
        if ai <= bi:
            m = fa if fa < fb else fb
            out[i] = fc if fc < m else m
        else:
            m = fa if fa > fb else fb
            out[i] = fc if fc > m else m
    return 0


def quad_eo_sweep(const double[::1] a, const double[::1] b,
                  const double[::1] alpha, const double[::1] beta,
                  const double[::1] gamma, double[::1] out):
    """Engquist-Osher flux per edge: mean flux minus half the signed variation."""
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double ai, bi, al, be, ga, fa, fb, lo, hi, flo, fhi, uc, fc, tv, s
    for i in range(n):
        ai = a[i]; bi = b[i]
        al = alpha[i]; be = beta[i]; ga = gamma[i]
        fa = (al * ai) * ai + be * ai + ga
        fb = (al * bi) * bi + be * bi + ga
        if ai < bi:
            lo = ai; hi = bi; flo = fa; fhi = fb
        else:
            lo = bi; hi = ai; flo = fb; fhi = fa
        if al != 0.0:
            uc = -be / (2.0 * al)
            if uc < lo:
                uc = lo
            elif uc > hi:
                uc = hi
            fc = (al * uc) * uc + be * uc + ga
            tv = (fc - flo if fc > flo else flo - fc) + (fhi - fc if fhi > fc else fc - fhi)
        else:
            tv = fhi - flo if fhi > flo else flo - fhi
        if bi > ai:
            s = 1.0
        elif bi < ai:
            s = -1.0
        else:
            s = 0.0
        out[i] = 0.5 * (fa + fb) - (0.5 * s) * tv
    return 0
