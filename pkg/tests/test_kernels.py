import itertools

import numpy as np
import pytest

from acougrad import kernels
from acougrad.forward import Scheme

SCHEMES = [Scheme(*s) for s in itertools.product(("explicit", "hat"), ("taylor", "first"), ("mirror", "onesided"))]

needs_ext = pytest.mark.skipif("cython" not in kernels.BACKENDS, reason="compiled kernels not built")


def _problem(N=30, M=120):
    x = np.linspace(0, 1, N + 1)
    p = np.exp(-50 * (x - 0.4) ** 2) + 0.3 * np.sin(7 * x)
    src = np.zeros(M + 3)
    src[1:M + 1] = np.cos(np.arange(M) * 0.3)
    return p, src, M


def test_active_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.forward_march is kernels.BACKENDS[kernels.BACKEND].forward_march


@needs_ext
@pytest.mark.parametrize("scheme", SCHEMES, ids=str)
def test_backends_bit_identical(scheme):
    p, src, M = _problem()
    args = (M, 0.3, (2.0 / M) ** 2, scheme.hat, scheme.taylor, scheme.mirror)
    a = [kernels.BACKENDS[b].forward_march(p, p, *args, 64) for b in ("python", "cython")]
    assert a[0][1] == a[1][1] == -1
    assert np.array_equal(a[0][0], a[1][0])
    for rule in (True, False):
        c = [kernels.BACKENDS[b].backward_march(p, src, M + 3, *args[1:], rule, 64) for b in ("python", "cython")]
        assert c[0][1] == c[1][1] == -1
        assert np.array_equal(c[0][0], c[1][0])


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
def test_blowup_flagged(backend):
    x = np.linspace(0, 1, 101)
    p = np.exp(-50 * (x - 0.4) ** 2)
    y, bad = kernels.BACKENDS[backend].forward_march(p, p, 5000, 1.05 ** 2, (1.05 / 100) ** 2,
                                                     False, True, True, 64)
    assert bad > 0 and bad % 64 == 0
    assert not np.all(np.isfinite(y[bad]))


def test_pure_python_switch(monkeypatch):
    import importlib

    monkeypatch.setenv("ACOUGRAD_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("ACOUGRAD_PURE_PYTHON")
        importlib.reload(kernels)
