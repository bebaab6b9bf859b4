import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudospec import kernels
from pseudospec._jit import HAVE_NUMBA, backend_name, env_budget, jit_enabled
from pseudospec.ads3 import standard_presentation
from pseudospec.errors import InputError

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


@pytest.mark.parametrize("flag, expect", [("", True), ("0", True), ("off", True), ("1", False), ("yes", False)])
def test_env_flag(monkeypatch, flag, expect):
    monkeypatch.setenv("PSEUDOSPEC_DISABLE_JIT", flag)
    assert jit_enabled() is (expect and HAVE_NUMBA)
    assert backend_name() == ("numba" if jit_enabled() else "numpy")


def test_env_budget(monkeypatch):
    assert env_budget(7) == 7
    monkeypatch.setenv("PSEUDOSPEC_BUDGET", "1e3")
    assert env_budget(7) == 1000
    monkeypatch.setenv("PSEUDOSPEC_BUDGET", "lots")
    with pytest.raises(InputError):
        env_budget(7)
    monkeypatch.setenv("PSEUDOSPEC_BUDGET", "0")
    with pytest.raises(InputError):
        env_budget(7)


def test_dispatch_follows_flag(monkeypatch):
    calls = []
    monkeypatch.setattr(kernels, "top_log_sv2_numpy", lambda m: calls.append("numpy") or np.zeros(1))
    monkeypatch.setattr(kernels, "top_log_sv2_numba", lambda m: calls.append("numba") or np.zeros(1))
    monkeypatch.setenv("PSEUDOSPEC_DISABLE_JIT", "1")
    kernels.top_log_sv2(np.eye(2)[None])
    monkeypatch.setenv("PSEUDOSPEC_DISABLE_JIT", "0")
    kernels.top_log_sv2(np.eye(2)[None])
    assert calls == ["numpy", "numba" if HAVE_NUMBA else "numpy"]


def _symmetric(seed, n):
    r = np.random.default_rng(seed)
    A = r.standard_normal((n, n))
    return A + A.T


@needs_numba
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 2**32 - 1), st.floats(-50, 0), st.floats(0, 50))
def test_scan_box_parity(n, M, seed, lo, hi):
    S = _symmetric(seed, n)
    va, pa = kernels.scan_box_numpy(S, M, lo, hi, -1.0)
    vb, pb = kernels.scan_box_numba(S, M, lo, hi, -1.0)
    # points within rounding of a window edge may fall on either side
    edge = 1e-12 * (1 + np.abs(S).sum() * M * M)
    keep_a = (va > lo + edge) & (va < hi - edge)
    keep_b = (vb > lo + edge) & (vb < hi - edge)
    assert np.array_equal(pa[keep_a], pb[keep_b])
    np.testing.assert_allclose(va[keep_a], vb[keep_b], rtol=1e-12, atol=edge)


def test_scan_box_lexicographic():
    v, p = kernels.scan_box_numpy(np.eye(2), 2, -100, 100, 1.0)
    assert [tuple(x) for x in p] == sorted(tuple(x) for x in p)
    assert len(p) == 25


@needs_numba
def test_extend_words_parity():
    gens = standard_presentation().letters()
    ea = eb = np.eye(2)[None, None].repeat(2, axis=1)
    la = lb = np.array([-1])
    for _ in range(5):
        ea, la, pa = kernels.extend_words_numpy(ea, la, gens)
        eb, lb, pb = kernels.extend_words_numba(eb, lb, gens)
        assert np.array_equal(la, lb) and np.array_equal(pa, pb)
        np.testing.assert_allclose(ea, eb, rtol=1e-14, atol=0)


@needs_numba
def test_top_log_sv2_parity(rng):
    mats = rng.standard_normal((1000, 2, 2, 2)) * 5
    mats /= np.sqrt(np.abs(np.linalg.det(mats)))[..., None, None]
    np.testing.assert_allclose(kernels.top_log_sv2_numba(mats), kernels.top_log_sv2_numpy(mats), rtol=0, atol=1e-14)
