"""Compiled and pure-Python kernels must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from holonomy_lab import _kernels

BACKENDS = _kernels.backends()


def random_states(rng, m, n):
    s = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    return s / np.linalg.norm(s, axis=1)[:, None]


def test_compiled_backend_is_built():
    # The package is meant to ship with its extension; the fallback is a safety net.
    assert "compiled" in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_eigh2_batch(name, rng):
    k = BACKENDS[name]
    H = rng.normal(size=(200, 2, 2)) + 1j * rng.normal(size=(200, 2, 2))
    H = H + np.conj(np.swapaxes(H, 1, 2))
    H[0] = np.eye(2)  # degenerate
    H[1] = [[0, 0], [0, 0]]
    w, V = k.eigh2_batch(H)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(H), atol=1e-13)
    np.testing.assert_allclose(H @ V, V * w[:, None, :], atol=1e-13)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_jacobi(name, n, rng):
    k = BACKENDS[name]
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    A = A + A.conj().T
    w, V, ok = k.jacobi_eigh(A)
    assert ok
    np.testing.assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-12)
    np.testing.assert_allclose(A @ V, V * w, atol=1e-12)


def test_backends_agree(rng):
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    c, p = BACKENDS["compiled"], BACKENDS["python"]
    H = rng.normal(size=(50, 2, 2)) + 1j * rng.normal(size=(50, 2, 2))
    H = H + np.conj(np.swapaxes(H, 1, 2))
    for a, b in zip(c.eigh2_batch(H), p.eigh2_batch(H)):
        np.testing.assert_allclose(a, b, atol=1e-14)
    A = H[0] if False else (lambda M: M + M.conj().T)(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
    wc, Vc, _ = c.jacobi_eigh(A)
    wp, Vp, _ = p.jacobi_eigh(A)
    np.testing.assert_allclose(wc, wp, atol=1e-12)
    np.testing.assert_allclose(Vc, Vp, atol=1e-10)
    s = random_states(rng, 100, 3)
    for closed in (True, False):
        np.testing.assert_allclose(c.link_overlaps(s, closed), p.link_overlaps(s, closed), atol=1e-15)
    links = c.link_overlaps(s, True)
    assert c.unit_product_angle(links) == pytest.approx(p.unit_product_angle(links), abs=1e-13)
    np.testing.assert_allclose(c.transport(s), p.transport(s), atol=1e-13)
    xy = rng.normal(size=(40, 2))
    for closed in (True, False):
        tc, dc, kc = c.segment_angle_sum(xy, 0.1, -0.2, closed)
        tp, dp, kp = p.segment_angle_sum(xy, 0.1, -0.2, closed)
        assert tc == pytest.approx(tp, abs=1e-12)
        assert dc == pytest.approx(dp, abs=1e-15)
        assert kc == kp


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_transport_links_real_positive(name, rng):
    k = BACKENDS[name]
    s = random_states(rng, 30, 4)
    t = k.transport(s)
    links = np.einsum("ij,ij->i", t[:-1].conj(), t[1:])
    assert np.max(np.abs(links.imag)) < 1e-15
    assert np.all(links.real > 0)
    np.testing.assert_array_equal(t[0], s[0])


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_unit_product_angle_no_underflow(name):
    k = BACKENDS[name]
    links = np.full(5000, 0.5 * np.exp(1e-4j))
    assert k.unit_product_angle(links) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_kernels_accept_readonly_input(name, rng):
    k = BACKENDS[name]
    s = random_states(rng, 5, 2)
    s.setflags(write=False)
    k.link_overlaps(s, True)
    k.transport(s)
    xy = rng.normal(size=(5, 2))
    xy.setflags(write=False)
    k.segment_angle_sum(xy, 0.0, 0.0, True)


def test_environment_variable_forces_fallback():
    code = "import holonomy_lab._kernels as k; print(k.BACKEND)"
    env = dict(os.environ, HOLONOMY_LAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
