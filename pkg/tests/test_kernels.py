import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchlab import _pykernels

try:
    from matchlab import _ckernels
except ImportError:  # pragma: no cover - compiled extension missing
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


def brute(allowed):
    k = allowed.shape[0]
    return [p for p in itertools.permutations(range(k)) if all(allowed[i, p[i]] for i in range(k))]


matrices = st.integers(1, 6).flatmap(
    lambda k: st.lists(st.lists(st.booleans(), min_size=k, max_size=k), min_size=k, max_size=k)
).map(lambda rows: np.array(rows, dtype=np.uint8))


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@settings(max_examples=200, deadline=None)
@given(allowed=matrices)
def test_enumeration_matches_brute_force(impl, allowed):
    perms, exhaustive = impl.enumerate_perfect(allowed, 10_000)
    assert exhaustive
    assert [tuple(int(x) for x in r) for r in perms] == brute(allowed)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
@settings(max_examples=200, deadline=None)
@given(allowed=matrices)
def test_find_perfect_is_valid(impl, allowed):
    p = impl.find_perfect(allowed)
    if brute(allowed):
        assert p is not None
        assert sorted(p) == list(range(len(p)))
        assert all(allowed[i, p[i]] for i in range(len(p)))
    else:
        assert p is None


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_cap_flag(impl):
    allowed = np.ones((5, 5), dtype=np.uint8)
    perms, exhaustive = impl.enumerate_perfect(allowed, 100)
    assert not exhaustive
    perms, exhaustive = impl.enumerate_perfect(allowed, 120)
    assert exhaustive and len(perms) == 120


@pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")
def test_backends_agree_on_random_matrices():
    rng = np.random.default_rng(3)
    for _ in range(300):
        k = int(rng.integers(1, 8))
        allowed = (rng.random((k, k)) < 0.6).astype(np.uint8)
        a, fa = _pykernels.enumerate_perfect(allowed, 500)
        b, fb = _ckernels.enumerate_perfect(allowed, 500)
        assert fa == fb and np.array_equal(np.asarray(a), np.asarray(b))
        assert _pykernels.find_perfect(allowed) == _ckernels.find_perfect(allowed)


def test_pure_fallback_env(monkeypatch):
    import importlib

    import matchlab.kernels as kernels

    monkeypatch.setenv("MATCHLAB_PURE", "1")
    reloaded = importlib.reload(kernels)
    try:
        assert reloaded.BACKEND == "python"
    finally:
        monkeypatch.delenv("MATCHLAB_PURE")
        importlib.reload(kernels)
