"""Numba @njit kernels — JIT translations of `_kernels_numpy`.

Same function names, signatures, and return conventions as the numpy
reference; see that module's docstrings for semantics.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@njit(**_JIT)
def dp_table(d_fvals, add, kmax):
    q = add.shape[0]
    T = np.zeros((kmax + 1, q), dtype=np.int64)
    T[0, 0] = 1
    for pos in range(d_fvals.shape[0]):
        v = d_fvals[pos]
        jtop = min(pos + 1, kmax)
        for j in range(jtop, 0, -1):
            src = T[j - 1]
            dst = T[j]
            for s in range(q):
                x = src[s]
                if x != 0:
                    dst[add[s, v]] += x
    return T


@njit(**_JIT)
def dp_table_zn(d_fvals, n, kmax):
    T = np.zeros((kmax + 1, n), dtype=np.int64)
    T[0, 0] = 1
    for pos in range(d_fvals.shape[0]):
        v = d_fvals[pos]
        jtop = min(pos + 1, kmax)
        for j in range(jtop, 0, -1):
            src = T[j - 1]
            dst = T[j]
            if v == 0:
                dst += src
            else:
                dst[v:] += src[: n - v]
                dst[:v] += src[n - v :]
    return T


@njit(**_JIT)
def brute_counts(d_fvals, add, kmax):
    q = add.shape[0]
    m = d_fvals.shape[0]
    out = np.zeros((kmax + 1, q), dtype=np.int64)
    out[0, 0] = 1
    if kmax == 0 or m == 0:
        return out
    stack = np.zeros(kmax, dtype=np.int64)
    psum = np.zeros(kmax + 1, dtype=np.int64)
    depth = 0
    pos = 0
    while True:
        if pos < m and depth < kmax:
            psum[depth + 1] = add[psum[depth], d_fvals[pos]]
            stack[depth] = pos
            depth += 1
            out[depth, psum[depth]] += 1
            pos += 1
        else:
            if depth == 0:
                break
            depth -= 1
            pos = stack[depth] + 1
    return out


@njit(**_JIT)
def brute_pow_hist(p1v, p2v, p3v, add, kmax):
    q = add.shape[0]
    m = p1v.shape[0]
    hist = np.zeros((kmax + 1, q, q, q), dtype=np.int64)
    hist[0, 0, 0, 0] = 1
    if kmax == 0 or m == 0:
        return hist
    stack = np.zeros(kmax, dtype=np.int64)
    s1 = np.zeros(kmax + 1, dtype=np.int64)
    s2 = np.zeros(kmax + 1, dtype=np.int64)
    s3 = np.zeros(kmax + 1, dtype=np.int64)
    depth = 0
    pos = 0
    while True:
        if pos < m and depth < kmax:
            s1[depth + 1] = add[s1[depth], p1v[pos]]
            s2[depth + 1] = add[s2[depth], p2v[pos]]
            s3[depth + 1] = add[s3[depth], p3v[pos]]
            stack[depth] = pos
            depth += 1
            hist[depth, s1[depth], s2[depth], s3[depth]] += 1
            pos += 1
        else:
            if depth == 0:
                break
            depth -= 1
            pos = stack[depth] + 1
    return hist


@njit(**_JIT)
def charsum_acc(d_fvals, W, smul, tk_off, t_coeff, t_poff, p_len, p_cnt):
    q = W.shape[0]
    kmax = tk_off.shape[0] - 2
    m = d_fvals.shape[0]
    acc = np.zeros((kmax + 1, q), dtype=np.complex128)
    rowsum = np.zeros(q, dtype=np.complex128)
    for row in range(q):
        s = 0.0 + 0.0j
        for a in range(m):
            s += W[row, d_fvals[a]]
        rowsum[row] = s
    S = np.zeros(kmax + 1, dtype=np.complex128)
    for c in range(q):
        for i in range(1, kmax + 1):
            S[i] = rowsum[smul[i, c]]
        for k in range(kmax + 1):
            tk = 0.0 + 0.0j
            for t in range(tk_off[k], tk_off[k + 1]):
                prod = t_coeff[t] + 0.0j
                for pp in range(t_poff[t], t_poff[t + 1]):
                    base = S[p_len[pp]]
                    for _ in range(p_cnt[pp]):
                        prod *= base
                tk += prod
            if tk != 0:
                for b in range(q):
                    acc[k, b] += np.conj(W[c, b]) * tk
    return acc


@njit(**_JIT)
def oracle_domain_check(
    add, mul, W, smul, xpow, d_idx, kmax_cap, dmax, charn,
    cell_k, cell_p1, cell_p2, cell_p3, cell_cnt,
    tk_off, t_coeff, t_poff, p_len, p_cnt,
    binom_m, kfact,
):
    q = add.shape[0]
    m = d_idx.shape[0]
    kmax = min(kmax_cap, m)
    tk = tk_off[: kmax + 2]
    instances = 0
    bf_dp = 0
    dp_cs = 0
    mass_bad = 0
    max_resid = 0.0
    ncells = cell_k.shape[0]
    kq = np.empty(kmax + 1, dtype=np.int64)
    for k in range(kmax + 1):
        kq[k] = kfact[k] * q
    c4 = np.zeros(4, dtype=np.int64)
    coeffs = np.zeros(dmax + 1, dtype=np.int64)
    fv = np.zeros(m, dtype=np.int64)
    nbf = np.zeros((kmax + 1, q), dtype=np.int64)
    for deg in range(1, dmax + 1):
        nreps = q**deg
        for rep in range(nreps):
            r = rep
            for j in range(deg):
                coeffs[j] = r % q
                r //= q
            coeffs[deg] = 1
            for j in range(4):
                if j <= deg:
                    c4[j] = coeffs[j]
                else:
                    c4[j] = 0
            for a in range(m):
                x = d_idx[a]
                v = coeffs[0]
                for j in range(1, deg + 1):
                    if coeffs[j] != 0:
                        v = add[v, mul[coeffs[j], xpow[x, j]]]
                fv[a] = v
            T = dp_table(fv, add, kmax)
            for k in range(kmax + 1):
                tot = 0
                for b in range(q):
                    tot += T[k, b]
                if tot != binom_m[k]:
                    mass_bad += 1
            nbf[:, :] = 0
            for ci in range(ncells):
                k = cell_k[ci]
                b = mul[k % charn, c4[0]]
                b = add[b, mul[c4[1], cell_p1[ci]]]
                b = add[b, mul[c4[2], cell_p2[ci]]]
                b = add[b, mul[c4[3], cell_p3[ci]]]
                nbf[k, b] += cell_cnt[ci]
            for k in range(kmax + 1):
                for b in range(q):
                    if nbf[k, b] != T[k, b]:
                        bf_dp += 1
            acc = charsum_acc(fv, W, smul, tk, t_coeff, t_poff, p_len, p_cnt)
            for k in range(kmax + 1):
                for b in range(q):
                    re = acc[k, b].real
                    im = acc[k, b].imag
                    est = re / q
                    r_est = np.rint(est)
                    resid = max(abs(est - r_est), abs(im) / q) / max(1.0, abs(est))
                    if resid > max_resid:
                        max_resid = resid
                    racc = np.int64(np.rint(re))
                    if racc % kq[k] != 0 or racc // kq[k] != T[k, b]:
                        dp_cs += 1
            instances += (kmax + 1) * q
    return instances, bf_dp, dp_cs, mass_bad, max_resid


@njit(**_JIT)
def hua_scan(n, W, prim, dmax, bounds, bounds2, n_a0):
    checked = 0
    viol1 = 0
    viol2 = 0
    max1 = 0.0
    max2 = 0.0
    nprim = prim.shape[0]
    fv = np.zeros(n, dtype=np.int64)
    coeffs = np.zeros(dmax + 1, dtype=np.int64)
    for deg in range(1, dmax + 1):
        nlow = n ** (deg - 1)
        for lead in range(1, n):
            for rep in range(n_a0 * nlow):
                coeffs[0] = rep % n_a0
                r = rep // n_a0
                g = _gcd(lead, n)
                for j in range(1, deg):
                    coeffs[j] = r % n
                    g = _gcd(g, coeffs[j])
                    r //= n
                if g != 1:
                    continue
                coeffs[deg] = lead
                for x in range(n):
                    v = 0
                    for j in range(deg, -1, -1):
                        v = (v * x + coeffs[j]) % n
                    fv[x] = v
                for pi in range(nprim):
                    c = prim[pi]
                    s = 0.0 + 0.0j
                    for x in range(n):
                        s += W[c, fv[x]]
                    mag = abs(s)
                    checked += 1
                    if bounds[deg] > 0:
                        ratio = mag / bounds[deg]
                        if ratio > max1:
                            max1 = ratio
                        if mag > bounds[deg] + 1e-9:
                            viol1 += 1
                    if bounds2[deg] > 0:
                        ratio = mag / bounds2[deg]
                        if ratio > max2:
                            max2 = ratio
                        if mag > bounds2[deg] + 1e-9:
                            viol2 += 1
    return checked, viol1, viol2, max1, max2


@njit(**_JIT)
def reduction_scan(n, W, divs, dmax):
    maxdiff = 0.0
    coeffs = np.zeros(dmax + 1, dtype=np.int64)
    fvn = np.zeros(n, dtype=np.int64)
    fvh = np.zeros(n, dtype=np.int64)
    for deg in range(1, dmax + 1):
        nreps = n**deg
        for rep in range(nreps):
            r = rep
            for j in range(deg):
                coeffs[j] = r % n
                r //= n
            coeffs[deg] = 1
            for x in range(n):
                v = 0
                for j in range(deg, -1, -1):
                    v = (v * x + coeffs[j]) % n
                fvn[x] = v
            for di in range(divs.shape[0]):
                h = divs[di]
                if h < 2:
                    continue
                step = n // h
                for x in range(h):
                    v = 0
                    for j in range(deg, -1, -1):
                        v = (v * x + coeffs[j] % h) % h
                    fvh[x] = v
                for cp in range(1, h):
                    if _gcd(cp, h) != 1:
                        continue
                    c = step * cp
                    s_n = 0.0 + 0.0j
                    for x in range(n):
                        s_n += W[c, fvn[x]]
                    s_h = 0.0 + 0.0j
                    for x in range(h):
                        s_h += W[c, fvh[x]]
                    diff = abs(s_n - step * s_h)
                    if diff > maxdiff:
                        maxdiff = diff
    return maxdiff


@njit(**_JIT)
def weil_scan(q, add, mul, xpow, W, deg, bound):
    checked = 0
    viol = 0
    maxr = 0.0
    fv = np.zeros(q, dtype=np.int64)
    coeffs = np.zeros(deg, dtype=np.int64)
    for lead in range(1, q):
        for rep in range(q**deg):
            r = rep
            for j in range(deg):
                coeffs[j] = r % q
                r //= q
            for x in range(q):
                v = coeffs[0]
                for j in range(1, deg):
                    if coeffs[j] != 0:
                        v = add[v, mul[coeffs[j], xpow[x, j]]]
                fv[x] = add[v, mul[lead, xpow[x, deg]]]
            for c in range(1, q):
                s = 0.0 + 0.0j
                for x in range(q):
                    s += W[c, fv[x]]
                mag = abs(s)
                checked += 1
                ratio = mag / bound
                if ratio > maxr:
                    maxr = ratio
                if mag > bound + 1e-9:
                    viol += 1
    return checked, viol, maxr
