"""Area-integral reference values for Dirichlet integrals of polynomials.

Independent of the closed form in :mod:`dbr.tuples`; used to validate it.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad


def poisson_extension(mu, z: np.ndarray) -> np.ndarray:
    """Poisson extension of a circle distribution inside the disk.

    Uses ``sum_k C(k, j) x^k = x^j / (1 - x)^(j+1)`` per Newton term, so no
    Fourier series is truncated.
    """
    z = np.asarray(z, dtype=complex)
    analytic = np.zeros_like(z)
    for lam, d in mu.terms:
        x = np.conj(complex(lam)) * z
        for j, dj in enumerate(d):
            analytic += complex(dj) * x**j / (1 - x) ** (j + 1)
    # P = 2 Re(sum_{k>=0} mu_hat(k) z^k) - Re mu_hat(0) for the atomic part
    atomic0 = sum(complex(d[0]) for _, d in mu.terms)
    return 2 * analytic.real - atomic0.real + mu.lebesgue_weight


def area_dirichlet(mu, i: int, coeffs, radius: float = 0.999, rtol: float = 1e-9) -> float:
    """``(1 / (pi i! (i-1)!)) * int_{|z|<radius} |f^(i)|^2 P_mu (1-|z|^2)^(i-1) dA``.

    Outer radial integral by adaptive quadrature, inner angular integral by
    the periodic trapezoid rule on a grid fine enough for the Poisson peak.
    """
    deriv = np.polynomial.polynomial.polyder(np.asarray(coeffs, dtype=complex), i)
    const = 1.0 / (math.pi * math.factorial(i) * math.factorial(i - 1))

    def ring(rho: float) -> float:
        n = int(max(256, 40.0 / (1.0 - rho)))
        theta = 2 * math.pi * np.arange(n) / n
        z = rho * np.exp(1j * theta)
        fz = np.polynomial.polynomial.polyval(z, deriv)
        vals = np.abs(fz) ** 2 * poisson_extension(mu, z)
        return float(vals.mean() * 2 * math.pi * rho * (1 - rho * rho) ** (i - 1))

    breaks = [radius * (1 - 10.0**-e) for e in (1, 2) if radius * (1 - 10.0**-e) > 0]
    val, _ = quad(ring, 0.0, radius, limit=400, epsrel=rtol, epsabs=0.0, points=breaks)
    return const * val
