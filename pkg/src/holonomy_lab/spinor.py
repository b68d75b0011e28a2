"""Closed-form branches of the real two-level family ``r [[cos phi, sin phi], [sin phi, -cos phi]]``.

These serve as analytic references for the numerical engines.
"""
import numpy as np


def chi_plus(phi):
    """Eigenvector of eigenvalue ``+r``: ``(cos phi/2, sin phi/2)``."""
    return np.array([np.cos(phi / 2), np.sin(phi / 2)], dtype=complex)


def chi_minus(phi):
    """Eigenvector of eigenvalue ``-r``: ``(-sin phi/2, cos phi/2)``. Changes sign over one circuit."""
    return np.array([-np.sin(phi / 2), np.cos(phi / 2)], dtype=complex)


def d_chi_plus(phi):
    return 0.5 * chi_minus(phi)


def d_chi_minus(phi):
    return -0.5 * chi_plus(phi)


def gauged_minus(phi):
    """``chi_minus(phi) * exp(i phi / 2)``: single-valued on the circle."""
    return chi_minus(phi) * np.exp(0.5j * phi)


def gauged_minus_connection(phi) -> float:
    """``Im<X|dX/dphi>`` for the gauged lower branch, in closed form.

    ``dX = (dchi + i/2 chi) exp(i phi/2)``, so the connection is
    ``Im<chi|dchi> + 1/2``; the first term is exactly zero for real kets.
    """
    return float(np.vdot(chi_minus(phi), d_chi_minus(phi)).imag) + 0.5
