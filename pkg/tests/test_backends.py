"""Kernel backend equivalence: every numba kernel agrees with the numpy
reference on randomized instances, and the env flag selects the backend."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from subsetsieve import backend
from subsetsieve import _kernels_numba as knb
from subsetsieve import _kernels_numpy as knp
from subsetsieve.algebra import Zn, add_table, build_field, char_matrix, mul_table, power_table, scalar_table
from subsetsieve.counting import cycle_type_pack
from subsetsieve.numtheory import binomial, divisors


def _ring(seed):
    rng = np.random.default_rng(seed)
    if seed % 2:
        s = Zn(int(rng.integers(3, 13)))
    else:
        s = build_field([2, 3, 5, 7][seed % 4], 2 if seed % 3 == 0 else 1)
    return s, rng


@pytest.mark.parametrize("seed", range(6))
def test_dp_and_brute_kernels_agree(seed):
    s, rng = _ring(seed)
    q = s.order
    m = int(rng.integers(0, q + 1))
    d_fvals = rng.integers(0, q, size=m).astype(np.int64)
    add = add_table(s)
    kmax = int(rng.integers(0, 7))
    assert np.array_equal(knb.dp_table(d_fvals, add, kmax), knp.dp_table(d_fvals, add, kmax))
    assert np.array_equal(knb.brute_counts(d_fvals, add, kmax), knp.brute_counts(d_fvals, add, kmax))
    if isinstance(s, Zn):
        assert np.array_equal(knb.dp_table_zn(d_fvals, q, kmax), knp.dp_table_zn(d_fvals, q, kmax))
        assert np.array_equal(knb.dp_table_zn(d_fvals, q, kmax), knb.dp_table(d_fvals, add, kmax))


@pytest.mark.parametrize("seed", range(4))
def test_hist_kernels_agree(seed):
    s, rng = _ring(seed)
    q = s.order
    keep = np.sort(rng.permutation(q)[: int(rng.integers(1, q + 1))]).astype(np.int64)
    xpow = power_table(s, 3)
    add = add_table(s)
    kmax = min(5, len(keep))
    a = knb.brute_pow_hist(xpow[keep, 1], xpow[keep, 2], xpow[keep, 3], add, kmax)
    b = knp.brute_pow_hist(xpow[keep, 1], xpow[keep, 2], xpow[keep, 3], add, kmax)
    assert np.array_equal(a, b)
    # total mass: one entry per subset of size k
    for k in range(kmax + 1):
        assert a[k].sum() == binomial(len(keep), k)


@pytest.mark.parametrize("seed", range(5))
def test_charsum_kernels_agree(seed):
    s, rng = _ring(seed)
    q = s.order
    m = int(rng.integers(1, q + 1))
    d_fvals = rng.integers(0, q, size=m).astype(np.int64)
    kmax = 6
    W = char_matrix(s)
    smul = scalar_table(s, kmax)
    pack = cycle_type_pack(kmax)
    a = knb.charsum_acc(d_fvals, W, smul, *pack)
    b = knp.charsum_acc(d_fvals, W, smul, *pack)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize("kind,param", [("zn", 6), ("zn", 9), ("fq", 4), ("fq", 5)])
def test_oracle_kernels_agree(kind, param, monkeypatch):
    from subsetsieve import sweeps

    stats = {}
    for name, mod in [("numba", knb), ("numpy", knp)]:
        monkeypatch.setattr(backend, "_active", (name, mod))
        stats[name] = sweeps._oracle_ring(kind, param, 2, 1, 4)
    assert stats["numba"][:4] == stats["numpy"][:4]
    assert abs(stats["numba"][4] - stats["numpy"][4]) < 1e-9
    assert stats["numba"][1] == stats["numba"][2] == stats["numba"][3] == 0


def test_scan_kernels_agree():
    n = 9
    s = Zn(n)
    W = char_matrix(s)
    prim = np.array([c for c in range(1, n) if math.gcd(c, n) == 1], dtype=np.int64)
    bounds = np.array([0.0, 50.0, 50.0])
    bounds2 = np.array([-1.0, 9.0, 9.0])
    a = knb.hua_scan(n, W, prim, 2, bounds, bounds2, n)
    b = knp.hua_scan(n, W, prim, 2, bounds, bounds2, n)
    assert a[:3] == b[:3]
    assert abs(a[3] - b[3]) < 1e-12 and abs(a[4] - b[4]) < 1e-12

    divs = np.array(divisors(n), dtype=np.int64)
    ra = knb.reduction_scan(n, W, divs, 2)
    rb = knp.reduction_scan(n, W, divs, 2)
    assert abs(ra - rb) < 1e-12 and ra < 1e-9

    f5 = build_field(5, 1)
    args = (5, add_table(f5), mul_table(f5), power_table(f5, 3), char_matrix(f5), 2, math.sqrt(5))
    wa = knb.weil_scan(*args)
    wb = knp.weil_scan(*args)
    assert wa[:2] == wb[:2] and abs(wa[2] - wb[2]) < 1e-12


def test_env_flag_selects_backend():
    code = "from subsetsieve import backend; print(backend.backend_name())"
    for name in ("numpy", "numba"):
        out = subprocess.run(
            [sys.executable, "-c", code],
            env={**os.environ, "SUBSETSIEVE_BACKEND": name},
            capture_output=True,
            text=True,
            check=True,
        )
        assert out.stdout.strip() == name


def test_set_backend_roundtrip():
    try:
        assert backend.set_backend("numpy") == "numpy"
        assert backend.kernels() is knp
        assert backend.set_backend("numba") == "numba"
        assert backend.kernels() is knb
        with pytest.raises(ValueError):
            backend.set_backend("cuda")
    finally:
        backend.set_backend("auto")
