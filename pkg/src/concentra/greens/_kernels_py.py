"""Pure-Python mode-sum kernels for the Helmholtz regular part.

This is the fallback twin of the compiled module ``_speedups``.  Both expose
exactly the same functions with the same semantics; keep them in sync.

The central object is the interior regular part

    Htilde_lambda(x, y) = sum_l (2l+1)/(4pi) h_l(r, s) P_l(cos theta)

of -Delta - lambda on the unit ball (a <= 0) or the annulus a < |x| < 1,
where h_l is built from spherical Bessel pairs (j_l, y_l) for lambda > 0 and
from the exact power-law pair (rho^l, rho^{-l-1}) for lambda = 0.  The Green
function is then  G = cos(k|x-y|)/(4pi|x-y|) - Htilde  with k = sqrt(lambda).

All Bessel products are carried in log scale with explicit signs: y_l grows
factorially in l and would overflow long before the series converges for
points near the boundary.
"""

import math

_BIG = 1e250
_LOG_BIG = math.log(_BIG)

# Status codes returned by htilde_series (kept numeric so the compiled twin
# can share them without object overhead).
OK = 0
NEED_MORE_TERMS = 1


def sph_log_jy(z, L):
    """Spherical Bessel j_l(z), y_l(z) for l = 0..L in (log|.|, sign) form.

    Returns four lists (logj, sgnj, logy, sgny).  y_l uses the upward
    recurrence (stable: y is the dominant solution), j_l uses a downward
    Miller recurrence normalized against j_0 or j_1, both with rescaling
    to dodge overflow.
    """
    if z <= 0.0:
        raise ValueError("sph_log_jy needs z > 0")
    logj = [0.0] * (L + 1)
    sgnj = [1.0] * (L + 1)
    logy = [0.0] * (L + 1)
    sgny = [1.0] * (L + 1)

    cosz = math.cos(z)
    sinz = math.sin(z)

    # --- y_l upward ---
    y0 = -cosz / z
    y1 = -cosz / (z * z) - sinz / z
    logy[0] = math.log(abs(y0)) if y0 != 0.0 else -math.inf
    sgny[0] = 1.0 if y0 >= 0.0 else -1.0
    if L >= 1:
        logy[1] = math.log(abs(y1)) if y1 != 0.0 else -math.inf
        sgny[1] = 1.0 if y1 >= 0.0 else -1.0
    prev, cur = y0, y1
    scale = 0.0
    for l in range(1, L):
        nxt = (2 * l + 1) / z * cur - prev
        prev, cur = cur, nxt
        if abs(cur) > _BIG:
            cur /= _BIG
            prev /= _BIG
            scale += _LOG_BIG
        logy[l + 1] = (math.log(abs(cur)) if cur != 0.0 else -math.inf) + scale
        sgny[l + 1] = 1.0 if cur >= 0.0 else -1.0

    # --- j_l downward (Miller) ---
    if z > L:
        M = L + 20 + int(z)
    else:
        M = L + 20 + int(math.sqrt(40.0 * max(L, 10)))
    fj = [0.0] * (L + 1)
    fsc = [0.0] * (L + 1)
    nxt, cur = 0.0, 1e-300
    cur_scale = 0.0
    for l in range(M, 0, -1):
        prv = (2 * l + 1) / z * cur - nxt
        nxt, cur = cur, prv
        if abs(cur) > _BIG:
            cur /= _BIG
            nxt /= _BIG
            cur_scale += _LOG_BIG
        if l - 1 <= L:
            fj[l - 1] = cur
            fsc[l - 1] = cur_scale
        if l <= L:
            fj[l] = nxt
            fsc[l] = cur_scale

    j0 = sinz / z
    j1 = sinz / (z * z) - cosz / z
    if abs(j0) >= abs(j1) or L == 0:
        ref, refl, refs = j0, fj[0], fsc[0]
    else:
        ref, refl, refs = j1, fj[1], fsc[1]
    norm_log = math.log(abs(ref)) - (math.log(abs(refl)) + refs)
    norm_sgn = (1.0 if ref >= 0.0 else -1.0) * (1.0 if refl >= 0.0 else -1.0)
    for l in range(L + 1):
        if fj[l] == 0.0:
            logj[l] = -math.inf
            sgnj[l] = 1.0
        else:
            logj[l] = math.log(abs(fj[l])) + fsc[l] + norm_log
            sgnj[l] = (1.0 if fj[l] >= 0.0 else -1.0) * norm_sgn
    return logj, sgnj, logy, sgny


def _comb2(l1, s1, l2, s2):
    """Signed log-sum s1*exp(l1) + s2*exp(l2) -> (log|.|, sign)."""
    if l1 == -math.inf:
        return l2, s2
    if l2 == -math.inf:
        return l1, s1
    if l1 >= l2:
        v = s1 + s2 * math.exp(l2 - l1)
        base = l1
    else:
        v = s2 + s1 * math.exp(l1 - l2)
        base = l2
    if v == 0.0:
        return -math.inf, 1.0
    return base + math.log(abs(v)), (1.0 if v > 0.0 else -1.0)


def convergence_ratio(a, rlo, rhi):
    """Geometric decay ratio of the mode series (a <= 0 for the ball)."""
    rs = rlo * rhi
    if a <= 0.0:
        return rs
    return max(rs, a * a / rs)


def _modes_lam0(a, rlo, rhi, L):
    """Exact lambda = 0 radial factors h_l, l = 0..L (power-law branch).

    The annulus form is the cancellation-free regrouping of gamma_l - g_l:
    expanding the product u(r_<) v(r_>) against gamma_l leaves four signed
    exponentials, each decaying geometrically in l, so no harmonically
    decaying pieces are ever subtracted.
    """
    out = [0.0] * (L + 1)
    lrlo = math.log(rlo) if rlo > 0.0 else -math.inf
    lrhi = math.log(rhi)
    if a <= 0.0:
        for l in range(L + 1):
            out[l] = math.exp(l * (lrlo + lrhi)) / (2 * l + 1)
    else:
        la = math.log(a)
        for l in range(L + 1):
            lam_exp = (2 * l + 1) * la
            A = math.exp(lam_exp)
            e1 = math.exp(l * (lrlo + lrhi))
            e2 = math.exp(lam_exp + l * lrlo - (l + 1) * lrhi)
            e3 = math.exp(lam_exp - (l + 1) * lrlo + l * lrhi)
            e4 = math.exp(lam_exp - (l + 1) * (lrlo + lrhi))
            out[l] = (e1 - e2 - e3 + e4) / ((2 * l + 1) * (1.0 - A))
    return out


def _modes_bessel(lam, a, rlo, rhi, L):
    """Radial factors h_l for lambda > 0, l = 0..L."""
    k = math.sqrt(lam)
    logk = math.log(k)
    out = [0.0] * (L + 1)
    ljlo, sjlo, lylo, sylo = sph_log_jy(k * rlo, L)
    if rhi != rlo:
        ljhi, sjhi, lyhi, syhi = sph_log_jy(k * rhi, L)
    else:
        ljhi, sjhi, lyhi, syhi = ljlo, sjlo, lylo, sylo
    lj1, sj1, ly1, sy1 = sph_log_jy(k, L)
    if a <= 0.0:
        # ball: h_l = -k j_l(k r) j_l(k s) y_l(k) / j_l(k)
        for l in range(L + 1):
            lg = logk + ljlo[l] + ljhi[l] + ly1[l] - lj1[l]
            sg = -sjlo[l] * sjhi[l] * sy1[l] * sj1[l]
            out[l] = sg * math.exp(lg)
    else:
        # Cancellation-free regrouping:
        #   h_l = -k [ j_l(kr<) y_l(k) u_l(r>) - y_l(kr<) j_l(ka) v_l(r>) ]
        #           / u_l(1)
        # with u_l vanishing at rho=a and v_l vanishing at rho=1.  Both
        # numerator products decay geometrically, unlike gamma_l and g_l
        # individually (which decay only like 1/l and would cancel).
        lja, sja, lya, sya = sph_log_jy(k * a, L)
        for l in range(L + 1):
            lu_hi, su_hi = _comb2(ljhi[l] + lya[l], sjhi[l] * sya[l],
                                  lyhi[l] + lja[l], -syhi[l] * sja[l])
            lu_1, su_1 = _comb2(lj1[l] + lya[l], sj1[l] * sya[l],
                                ly1[l] + lja[l], -sy1[l] * sja[l])
            lv_hi, sv_hi = _comb2(ljhi[l] + ly1[l], sjhi[l] * sy1[l],
                                  lyhi[l] + lj1[l], -syhi[l] * sj1[l])
            lt1 = ljlo[l] + ly1[l] + lu_hi
            st1 = sjlo[l] * sy1[l] * su_hi
            lt2 = lylo[l] + lja[l] + lv_hi
            st2 = sylo[l] * sja[l] * sv_hi
            lc, sc = _comb2(lt1, st1, lt2, -st2)
            out[l] = -sc * su_1 * math.exp(logk + lc - lu_1)
    return out


def _legendre_sum(modes, costh, tol, rho):
    """Sum (2l+1)/(4pi) h_l P_l(costh) with an early-exit tail bound.

    Returns (value, L_used, tail_bound, converged).
    """
    inv4pi = 1.0 / (4.0 * math.pi)
    terms = []
    pprev = 1.0
    pcur = costh
    env = [math.inf, math.inf, math.inf]  # trailing |term| envelope
    tail = math.inf
    used = len(modes) - 1
    converged = False
    geo = rho / (1.0 - rho) ** 2 if rho < 1.0 else math.inf
    for l, h in enumerate(modes):
        if l == 0:
            pl = 1.0
        elif l == 1:
            pl = costh
        else:
            pl = ((2 * l - 1) * costh * pcur - (l - 1) * pprev) / l
            pprev, pcur = pcur, pl
        weight = (2 * l + 1) * inv4pi
        terms.append(weight * h * pl)
        env[l % 3] = weight * abs(h)  # |P_l| <= 1
        if l >= 4:
            tail = max(env) * geo
            if tail < tol:
                used = l
                converged = True
                break
    return math.fsum(terms), used, tail, converged


def htilde_series(lam, a, r, s, costh, tol, lmax):
    """Htilde_lambda at radii (r, s) and angle cos(theta) = costh.

    a <= 0 selects the unit ball.  Returns (value, L_used, tail, status)
    where status is OK or NEED_MORE_TERMS (caller decides how to fail).
    """
    rlo, rhi = (r, s) if r <= s else (s, r)
    rho = convergence_ratio(a, max(rlo, 1e-300), rhi)
    if rho >= 1.0 - 1e-12:
        return 0.0, 0, math.inf, NEED_MORE_TERMS

    if a <= 0.0 and rlo < 1e-12:
        # ball center: only the l = 0 mode survives
        if lam == 0.0:
            return 1.0 / (4.0 * math.pi), 0, 0.0, OK
        k = math.sqrt(lam)
        h0 = -k * (math.sin(k * rhi) / (k * rhi)) * (-math.cos(k) / k) \
            / (math.sin(k) / k) if rhi > 1e-12 else \
            -k * (-math.cos(k) / k) / (math.sin(k) / k)
        return h0 / (4.0 * math.pi), 0, 0.0, OK

    # a-priori order estimate from the geometric ratio, then refine by
    # doubling if the computed tail bound is still above tol.
    pref = 1.0 / (4.0 * math.pi * (1.0 - rho))
    L = max(16, int(math.ceil((math.log(tol) - math.log(pref))
                              / math.log(rho))) + 8)
    while True:
        if L > lmax:
            return 0.0, L, math.inf, NEED_MORE_TERMS
        if lam == 0.0:
            modes = _modes_lam0(a, rlo, rhi, L)
        else:
            modes = _modes_bessel(lam, a, rlo, rhi, L)
        value, used, tail, ok = _legendre_sum(modes, costh, tol, rho)
        if ok:
            return value, used, tail, OK
        L = min(2 * L, lmax) if L < lmax else lmax + 1
