"""Pure-numpy kernel implementations.

Reference semantics for the hot loops; `_kernels_numba` mirrors every
function here with an @njit translation. Selected via SUBSETSIEVE_BACKEND=numpy
(or automatically when numba is unavailable).

Shared conventions:

* structures are flattened to index arithmetic — ``add``/``mul`` are
  [q, q] int64 tables, ``xpow[x, j]`` is the index of x^j, ``W[c, x]`` is the
  character matrix, ``smul[i, c]`` the index of the i-fold sum of c;
* cycle types for all k <= kmax come packed as flat arrays: types of k are
  ``tk_off[k]:tk_off[k+1]``; type t has signed size ``t_coeff[t]`` and its
  nonzero (length, multiplicity) pairs sit in ``p_len/p_cnt`` at
  ``t_poff[t]:t_poff[t+1]``.
"""

from __future__ import annotations

import numpy as np


def dp_table(d_fvals: np.ndarray, add: np.ndarray, kmax: int) -> np.ndarray:
    """Subset-sum DP: out[k, b] = number of k-subsets of D with f-sum b."""
    q = add.shape[0]
    T = np.zeros((kmax + 1, q), dtype=np.int64)
    T[0, 0] = 1
    for pos, v in enumerate(d_fvals):
        perm = add[:, v]
        for j in range(min(pos + 1, kmax), 0, -1):
            T[j][perm] += T[j - 1]
    return T


def dp_table_zn(d_fvals: np.ndarray, n: int, kmax: int) -> np.ndarray:
    """Z_n specialization of dp_table: every update is a rotation by f(x)."""
    T = np.zeros((kmax + 1, n), dtype=np.int64)
    T[0, 0] = 1
    for pos, v in enumerate(d_fvals):
        for j in range(min(pos + 1, kmax), 0, -1):
            T[j] += np.roll(T[j - 1], v)
    return T


def brute_counts(d_fvals: np.ndarray, add: np.ndarray, kmax: int) -> np.ndarray:
    """Exhaustive subset enumeration (DFS), binned by (size, f-sum)."""
    q = add.shape[0]
    m = d_fvals.shape[0]
    out = np.zeros((kmax + 1, q), dtype=np.int64)
    out[0, 0] = 1
    if kmax == 0 or m == 0:
        return out
    stack = [0] * kmax
    psum = [0] * (kmax + 1)
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


def brute_pow_hist(p1v, p2v, p3v, add: np.ndarray, kmax: int) -> np.ndarray:
    """Exhaustive enumeration binned by (size, sum x, sum x^2, sum x^3).

    The joint histogram determines the brute-force count of any polynomial
    of degree <= 3 on the same domain by one linear rescan.
    """
    q = add.shape[0]
    m = p1v.shape[0]
    hist = np.zeros((kmax + 1, q, q, q), dtype=np.int64)
    hist[0, 0, 0, 0] = 1
    if kmax == 0 or m == 0:
        return hist
    stack = [0] * kmax
    s1 = [0] * (kmax + 1)
    s2 = [0] * (kmax + 1)
    s3 = [0] * (kmax + 1)
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


def charsum_acc(d_fvals, W, smul, tk_off, t_coeff, t_poff, p_len, p_cnt) -> np.ndarray:
    """Character-sum accumulator: ACC[k, b] = sum_c conj(W[c, b]) * T_k(c).

    T_k(c) sums sign * class_size * prod_i S_i(c)^{c_i} over cycle types of k,
    with power sums S_i(c) = sum_{a in D} W[i*c, f(a)] evaluated by index
    arithmetic (no repeated complex powering). The principal character's term
    reproduces the falling factorial (m)_k, so ACC[k, b] estimates
    q * k! * N(k, b).
    """
    q = W.shape[0]
    kmax = tk_off.shape[0] - 2
    rowsum = W[:, d_fvals].sum(axis=1) if d_fvals.shape[0] else np.zeros(q, dtype=np.complex128)
    # S[i, c] for i = 1..kmax
    S = rowsum[smul[1:, :]] if kmax >= 1 else np.zeros((0, q), dtype=np.complex128)
    T = np.zeros((kmax + 1, q), dtype=np.complex128)
    for k in range(kmax + 1):
        acc = np.zeros(q, dtype=np.complex128)
        for t in range(tk_off[k], tk_off[k + 1]):
            term = np.full(q, complex(t_coeff[t]), dtype=np.complex128)
            for pp in range(t_poff[t], t_poff[t + 1]):
                term = term * S[p_len[pp] - 1] ** p_cnt[pp]
            acc += term
        T[k] = acc
    return np.einsum("cb,kc->kb", W.conj(), T)


def oracle_domain_check(
    add, mul, W, smul, xpow, d_idx, kmax_cap, dmax, charn,
    cell_k, cell_p1, cell_p2, cell_p3, cell_cnt,
    tk_off, t_coeff, t_poff, p_len, p_cnt,
    binom_m, kfact,
):
    """Three-way oracle comparison over every monic f with 1 <= deg <= dmax.

    For one fixed domain (element indices ``d_idx``, power-sum histogram
    ``cell_*``): for each f compares the histogram-rescan brute-force table,
    the DP table, and the rounded character-sum table on all
    (k <= min(kmax_cap, m), b). Returns
    (instances, bf_vs_dp_mismatches, dp_vs_charsum_mismatches,
    mass_violations, max_residual).
    """
    q = add.shape[0]
    m = d_idx.shape[0]
    kmax = min(kmax_cap, m)
    tk_off = tk_off[: kmax + 2]
    instances = 0
    bf_dp = 0
    dp_cs = 0
    mass_bad = 0
    max_resid = 0.0
    kq = np.array([int(kfact[k]) * q for k in range(kmax + 1)], dtype=np.int64)
    c4 = np.zeros(4, dtype=np.int64)
    for deg in range(1, dmax + 1):
        for rep in range(q**deg):
            r = rep
            coeffs = np.empty(deg + 1, dtype=np.int64)
            for j in range(deg):
                coeffs[j] = r % q
                r //= q
            coeffs[deg] = 1  # monic; index 1 is the ring identity
            c4[:] = 0
            c4[: deg + 1] = coeffs
            # f on the domain
            fv = np.full(m, coeffs[0], dtype=np.int64)
            for j in range(1, deg + 1):
                if coeffs[j]:
                    fv = add[fv, mul[coeffs[j], xpow[d_idx, j]]]
            T = dp_table(fv, add, kmax)
            # mass conservation
            mass_bad += int(np.count_nonzero(T.sum(axis=1) != binom_m[: kmax + 1]))
            # brute force via histogram rescan
            nbf = np.zeros((kmax + 1, q), dtype=np.int64)
            b_of_cell = add[
                add[mul[cell_k % charn, c4[0]], mul[c4[1], cell_p1]],
                add[mul[c4[2], cell_p2], mul[c4[3], cell_p3]],
            ]
            np.add.at(nbf, (cell_k, b_of_cell), cell_cnt)
            bf_dp += int(np.count_nonzero(nbf != T))
            # character sum
            acc = charsum_acc(fv, W, smul, tk_off, t_coeff, t_poff, p_len, p_cnt)
            est = acc.real / q
            rint = np.rint(est)
            resid = np.maximum(np.abs(est - rint), np.abs(acc.imag) / q)
            resid /= np.maximum(1.0, np.abs(est))
            max_resid = max(max_resid, float(resid.max()))
            racc = np.rint(acc.real).astype(np.int64)
            ncs = racc // kq[:, None]
            dp_cs += int(np.count_nonzero((racc % kq[:, None] != 0) | (ncs != T)))
            instances += (kmax + 1) * q
    return instances, bf_dp, dp_cs, mass_bad, max_resid


def hua_scan(n, W, prim, dmax, bounds, bounds2, n_a0):
    """Full-ring character sums over Z_n versus per-degree bounds.

    Enumerates f = a_0 + ... + a_d x^d with a_d != 0,
    gcd(a_1, .., a_d, n) = 1, a_0 over ``n_a0`` values (n for the full grid),
    and every primitive character index in ``prim``. ``bounds[d]`` is the
    primary bound, ``bounds2[d]`` a secondary one (< 0 disables, e.g. the
    prime-power-only constant). Returns
    (sums_checked, violations_primary, violations_secondary, max_ratio_primary,
    max_ratio_secondary).
    """
    x = np.arange(n, dtype=np.int64)
    Wp = W[prim]
    checked = 0
    viol1 = 0
    viol2 = 0
    max1 = 0.0
    max2 = 0.0
    for deg in range(1, dmax + 1):
        nlow = n ** (deg - 1)
        for lead in range(1, n):
            for rep in range(n_a0 * nlow):
                a0 = rep % n_a0
                r = rep // n_a0
                coeffs = [a0]
                g = np.gcd(lead, n)
                for _ in range(deg - 1):
                    coeffs.append(r % n)
                    g = np.gcd(g, r % n)
                    r //= n
                if g != 1:
                    continue
                coeffs.append(lead)
                fv = np.zeros(n, dtype=np.int64)
                for a in reversed(coeffs):
                    fv = (fv * x + a) % n
                mags = np.abs(Wp[:, fv].sum(axis=1))
                checked += mags.shape[0]
                mx = float(mags.max()) if mags.shape[0] else 0.0
                if bounds[deg] > 0:
                    ratio = mx / bounds[deg]
                    max1 = max(max1, ratio)
                    viol1 += int(np.count_nonzero(mags > bounds[deg] + 1e-9))
                if bounds2[deg] > 0:
                    ratio = mx / bounds2[deg]
                    max2 = max(max2, ratio)
                    viol2 += int(np.count_nonzero(mags > bounds2[deg] + 1e-9))
    return checked, viol1, viol2, max1, max2


def reduction_scan(n, W, divs, dmax):
    """Order-h reduction identity on Z_n over all monic f with deg <= dmax.

    For every h | n (h >= 2) and every character of order h (index
    c = (n/h) c', gcd(c', h) = 1), compares the full Z_n sum with (n/h) times
    the induced primitive Z_h sum, where omega_h is realized inside W as
    omega_n^{(n/h) ·}. Returns the max absolute discrepancy.
    """
    x = np.arange(n, dtype=np.int64)
    maxdiff = 0.0
    for deg in range(1, dmax + 1):
        for rep in range(n**deg):
            r = rep
            coeffs = []
            for _ in range(deg):
                coeffs.append(r % n)
                r //= n
            coeffs.append(1)
            fvn = np.zeros(n, dtype=np.int64)
            for a in reversed(coeffs):
                fvn = (fvn * x + a) % n
            for h in divs:
                if h < 2:
                    continue
                step = n // h
                xh = np.arange(h, dtype=np.int64)
                fvh = np.zeros(h, dtype=np.int64)
                for a in reversed(coeffs):
                    fvh = (fvh * xh + (a % h)) % h
                for cp in range(1, h):
                    if np.gcd(cp, h) != 1:
                        continue
                    c = step * cp
                    s_n = W[c][fvn].sum()
                    s_h = W[c][fvh].sum()
                    diff = abs(s_n - step * s_h)
                    if diff > maxdiff:
                        maxdiff = float(diff)
    return maxdiff


def weil_scan(q, add, mul, xpow, W, deg, bound):
    """Full-field character sums over F_q for every f of exact degree ``deg``.

    All coefficients range over the field (leading nonzero); every nontrivial
    character is checked against ``bound``. Returns
    (sums_checked, violations, max_ratio).
    """
    checked = 0
    viol = 0
    maxr = 0.0
    allx = np.arange(q, dtype=np.int64)
    for lead in range(1, q):
        base_lead = mul[lead, xpow[:, deg]]
        for rep in range(q**deg):
            r = rep
            fv = base_lead.copy()
            a0 = r % q
            r //= q
            fv = add[fv, a0]
            for j in range(1, deg):
                aj = r % q
                r //= q
                if aj:
                    fv = add[fv, mul[aj, xpow[allx, j]]]
            mags = np.abs(W[1:, fv].sum(axis=1))
            checked += q - 1
            mx = float(mags.max())
            if mx / bound > maxr:
                maxr = mx / bound
            viol += int(np.count_nonzero(mags > bound + 1e-9))
    return checked, viol, maxr
