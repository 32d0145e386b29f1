# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled mode-sum kernels; behavioural twin of ``_kernels_py``.

Any change here must be mirrored in the pure-Python module and vice versa:
the test suite runs the cross-check in tests/test_greens.py and the
benchmark script compares both backends.
"""

from libc.math cimport cos, sin, sqrt, log, exp, fabs, ceil, INFINITY
from libc.stdlib cimport malloc, free

import math

DEF BIG = 1e250

cdef double LOG_BIG = log(BIG)
cdef double FOUR_PI = 12.566370614359172

OK = 0
NEED_MORE_TERMS = 1


cdef int _sph_log_jy(double z, int L, double* logj, double* sgnj,
                     double* logy, double* sgny) except -1:
    cdef int l, M
    cdef double cosz = cos(z), sinz = sin(z)
    cdef double y0, y1, prev, cur, nxt, prv, scale, cur_scale
    cdef double j0, j1, ref, refl, refs, norm_log, norm_sgn
    cdef double* fj
    cdef double* fsc

    y0 = -cosz / z
    y1 = -cosz / (z * z) - sinz / z
    logy[0] = log(fabs(y0)) if y0 != 0.0 else -INFINITY
    sgny[0] = 1.0 if y0 >= 0.0 else -1.0
    if L >= 1:
        logy[1] = log(fabs(y1)) if y1 != 0.0 else -INFINITY
        sgny[1] = 1.0 if y1 >= 0.0 else -1.0
    prev = y0
    cur = y1
    scale = 0.0
    for l in range(1, L):
        nxt = (2 * l + 1) / z * cur - prev
        prev = cur
        cur = nxt
        if fabs(cur) > BIG:
            cur /= BIG
            prev /= BIG
            scale += LOG_BIG
        logy[l + 1] = (log(fabs(cur)) if cur != 0.0 else -INFINITY) + scale
        sgny[l + 1] = 1.0 if cur >= 0.0 else -1.0

    if z > L:
        M = L + 20 + <int>z
    else:
        M = L + 20 + <int>sqrt(40.0 * (L if L > 10 else 10))
    fj = <double*>malloc((L + 1) * sizeof(double))
    fsc = <double*>malloc((L + 1) * sizeof(double))
    if fj == NULL or fsc == NULL:
        if fj != NULL:
            free(fj)
        if fsc != NULL:
            free(fsc)
        raise MemoryError()
    for l in range(L + 1):
        fj[l] = 0.0
        fsc[l] = 0.0
    nxt = 0.0
    cur = 1e-300
    cur_scale = 0.0
    for l in range(M, 0, -1):
        prv = (2 * l + 1) / z * cur - nxt
        nxt = cur
        cur = prv
        if fabs(cur) > BIG:
            cur /= BIG
            nxt /= BIG
            cur_scale += LOG_BIG
        if l - 1 <= L:
            fj[l - 1] = cur
            fsc[l - 1] = cur_scale
        if l <= L:
            fj[l] = nxt
            fsc[l] = cur_scale

    j0 = sinz / z
    j1 = sinz / (z * z) - cosz / z
    if fabs(j0) >= fabs(j1) or L == 0:
        ref = j0
        refl = fj[0]
        refs = fsc[0]
    else:
        ref = j1
        refl = fj[1]
        refs = fsc[1]
    norm_log = log(fabs(ref)) - (log(fabs(refl)) + refs)
    norm_sgn = (1.0 if ref >= 0.0 else -1.0) * (1.0 if refl >= 0.0 else -1.0)
    for l in range(L + 1):
        if fj[l] == 0.0:
            logj[l] = -INFINITY
            sgnj[l] = 1.0
        else:
            logj[l] = log(fabs(fj[l])) + fsc[l] + norm_log
            sgnj[l] = (1.0 if fj[l] >= 0.0 else -1.0) * norm_sgn
    free(fj)
    free(fsc)
    return 0


def sph_log_jy(double z, int L):
    """Python-visible wrapper (lists), matching _kernels_py.sph_log_jy."""
    if z <= 0.0:
        raise ValueError("sph_log_jy needs z > 0")
    cdef double* buf = <double*>malloc(4 * (L + 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef int l
    try:
        _sph_log_jy(z, L, buf, buf + (L + 1), buf + 2 * (L + 1),
                    buf + 3 * (L + 1))
        logj = [buf[l] for l in range(L + 1)]
        sgnj = [buf[(L + 1) + l] for l in range(L + 1)]
        logy = [buf[2 * (L + 1) + l] for l in range(L + 1)]
        sgny = [buf[3 * (L + 1) + l] for l in range(L + 1)]
    finally:
        free(buf)
    return logj, sgnj, logy, sgny


cdef inline void _comb2(double l1, double s1, double l2, double s2,
                        double* lo, double* so):
    cdef double v, base
    if l1 == -INFINITY:
        lo[0] = l2
        so[0] = s2
        return
    if l2 == -INFINITY:
        lo[0] = l1
        so[0] = s1
        return
    if l1 >= l2:
        v = s1 + s2 * exp(l2 - l1)
        base = l1
    else:
        v = s2 + s1 * exp(l1 - l2)
        base = l2
    if v == 0.0:
        lo[0] = -INFINITY
        so[0] = 1.0
    else:
        lo[0] = base + log(fabs(v))
        so[0] = 1.0 if v > 0.0 else -1.0


def convergence_ratio(double a, double rlo, double rhi):
    cdef double rs = rlo * rhi
    if a <= 0.0:
        return rs
    return max(rs, a * a / rs)


cdef int _modes(double lam, double a, double rlo, double rhi, int L,
                double* out) except -1:
    cdef int l
    cdef double k, logk, la, lrlo, lrhi, A, lam_exp, e1, e2, e3, e4
    cdef double lu_hi, su_hi, lu_1, su_1, lv_hi, sv_hi, lg, sg
    cdef double lt1, st1, lt2, st2, lc, sc
    cdef double* work
    cdef double* ljlo
    cdef double* sjlo
    cdef double* lylo
    cdef double* sylo
    cdef double* ljhi
    cdef double* sjhi
    cdef double* lyhi
    cdef double* syhi
    cdef double* lj1
    cdef double* sj1
    cdef double* ly1
    cdef double* sy1
    cdef double* lja
    cdef double* sja
    cdef double* lya
    cdef double* sya
    cdef int n = L + 1

    if lam == 0.0:
        # Annulus branch is the cancellation-free regrouping of
        # gamma_l - g_l into four geometrically decaying exponentials;
        # see _kernels_py._modes_lam0.
        lrlo = log(rlo)
        lrhi = log(rhi)
        if a <= 0.0:
            for l in range(n):
                out[l] = exp(l * (lrlo + lrhi)) / (2 * l + 1)
        else:
            la = log(a)
            for l in range(n):
                lam_exp = (2 * l + 1) * la
                A = exp(lam_exp)
                e1 = exp(l * (lrlo + lrhi))
                e2 = exp(lam_exp + l * lrlo - (l + 1) * lrhi)
                e3 = exp(lam_exp - (l + 1) * lrlo + l * lrhi)
                e4 = exp(lam_exp - (l + 1) * (lrlo + lrhi))
                out[l] = (e1 - e2 - e3 + e4) / ((2 * l + 1) * (1.0 - A))
        return 0

    k = sqrt(lam)
    logk = log(k)
    work = <double*>malloc(16 * n * sizeof(double))
    if work == NULL:
        raise MemoryError()
    ljlo = work
    sjlo = work + n
    lylo = work + 2 * n
    sylo = work + 3 * n
    ljhi = work + 4 * n
    sjhi = work + 5 * n
    lyhi = work + 6 * n
    syhi = work + 7 * n
    lj1 = work + 8 * n
    sj1 = work + 9 * n
    ly1 = work + 10 * n
    sy1 = work + 11 * n
    lja = work + 12 * n
    sja = work + 13 * n
    lya = work + 14 * n
    sya = work + 15 * n
    try:
        _sph_log_jy(k * rlo, L, ljlo, sjlo, lylo, sylo)
        if rhi != rlo:
            _sph_log_jy(k * rhi, L, ljhi, sjhi, lyhi, syhi)
        else:
            for l in range(n):
                ljhi[l] = ljlo[l]
                sjhi[l] = sjlo[l]
                lyhi[l] = lylo[l]
                syhi[l] = sylo[l]
        _sph_log_jy(k, L, lj1, sj1, ly1, sy1)
        if a <= 0.0:
            for l in range(n):
                lg = logk + ljlo[l] + ljhi[l] + ly1[l] - lj1[l]
                sg = -sjlo[l] * sjhi[l] * sy1[l] * sj1[l]
                out[l] = sg * exp(lg)
        else:
            # regrouped gamma_l - g_l; see _kernels_py._modes_bessel
            _sph_log_jy(k * a, L, lja, sja, lya, sya)
            for l in range(n):
                _comb2(ljhi[l] + lya[l], sjhi[l] * sya[l],
                       lyhi[l] + lja[l], -syhi[l] * sja[l], &lu_hi, &su_hi)
                _comb2(lj1[l] + lya[l], sj1[l] * sya[l],
                       ly1[l] + lja[l], -sy1[l] * sja[l], &lu_1, &su_1)
                _comb2(ljhi[l] + ly1[l], sjhi[l] * sy1[l],
                       lyhi[l] + lj1[l], -syhi[l] * sj1[l], &lv_hi, &sv_hi)
                lt1 = ljlo[l] + ly1[l] + lu_hi
                st1 = sjlo[l] * sy1[l] * su_hi
                lt2 = lylo[l] + lja[l] + lv_hi
                st2 = sylo[l] * sja[l] * sv_hi
                _comb2(lt1, st1, lt2, -st2, &lc, &sc)
                out[l] = -sc * su_1 * exp(logk + lc - lu_1)
    finally:
        free(work)
    return 0


def htilde_series(double lam, double a, double r, double s, double costh,
                  double tol, int lmax):
    """Same contract as _kernels_py.htilde_series."""
    cdef double rlo = r if r <= s else s
    cdef double rhi = s if r <= s else r
    cdef double rho, pref, k, h0
    cdef int L, l, used
    cdef double* modes
    cdef double pl, pprev, pcur, weight, term, tail, geo
    cdef double e0, e1, e2, env
    cdef double acc, comp, yk, tk  # Kahan accumulator
    cdef bint converged

    rho = convergence_ratio(a, rlo if rlo > 1e-300 else 1e-300, rhi)
    if rho >= 1.0 - 1e-12:
        return 0.0, 0, INFINITY, NEED_MORE_TERMS

    if a <= 0.0 and rlo < 1e-12:
        if lam == 0.0:
            return 1.0 / FOUR_PI, 0, 0.0, OK
        k = sqrt(lam)
        if rhi > 1e-12:
            h0 = k * cos(k) * sin(k * rhi) / (k * rhi * sin(k))
        else:
            h0 = k * cos(k) / sin(k)
        return h0 / FOUR_PI, 0, 0.0, OK

    pref = 1.0 / (FOUR_PI * (1.0 - rho))
    L = <int>ceil((log(tol) - log(pref)) / log(rho)) + 8
    if L < 16:
        L = 16
    geo = rho / ((1.0 - rho) * (1.0 - rho))
    while True:
        if L > lmax:
            return 0.0, L, INFINITY, NEED_MORE_TERMS
        modes = <double*>malloc((L + 1) * sizeof(double))
        if modes == NULL:
            raise MemoryError()
        try:
            _modes(lam, a, rlo, rhi, L, modes)
            acc = 0.0
            comp = 0.0
            pprev = 1.0
            pcur = costh
            e0 = e1 = e2 = INFINITY
            tail = INFINITY
            used = L
            converged = False
            for l in range(L + 1):
                if l == 0:
                    pl = 1.0
                elif l == 1:
                    pl = costh
                else:
                    pl = ((2 * l - 1) * costh * pcur - (l - 1) * pprev) / l
                    pprev = pcur
                    pcur = pl
                weight = (2 * l + 1) / FOUR_PI
                term = weight * modes[l] * pl
                # Kahan summation
                yk = term - comp
                tk = acc + yk
                comp = (tk - acc) - yk
                acc = tk
                env = weight * fabs(modes[l])
                if l % 3 == 0:
                    e0 = env
                elif l % 3 == 1:
                    e1 = env
                else:
                    e2 = env
                if l >= 4:
                    env = e0 if e0 > e1 else e1
                    if e2 > env:
                        env = e2
                    tail = env * geo
                    if tail < tol:
                        used = l
                        converged = True
                        break
            if converged:
                return acc, used, tail, OK
        finally:
            free(modes)
        L = 2 * L if 2 * L < lmax else (lmax if L < lmax else lmax + 1)
