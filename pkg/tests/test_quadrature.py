import math

import numpy as np

from dbr.quadrature import area_dirichlet, poisson_extension
from dbr.suite import oracle_validation
from dbr.tuples import CircleDistribution, CirclePoint, dirichlet_integral, dirichlet_weights


def test_poisson_extension_of_point_mass():
    lam = np.exp(0.7j)
    z = np.array([0.2, 0.5j, -0.3 + 0.4j])
    want = (1 - np.abs(z) ** 2) / np.abs(lam - z) ** 2
    assert np.allclose(poisson_extension(CircleDistribution.point(lam), z), want)


def test_poisson_extension_matches_fourier_series():
    mu = CircleDistribution(((CirclePoint.root_of_unity(5, 2), [2, 1, 1]),), 0.5)
    z = 0.6 * np.exp(1.1j)
    series = sum(complex(mu.fourier(k)) * (z ** k if k >= 0 else np.conj(z) ** (-k)) for k in range(-300, 301))
    assert abs(poisson_extension(mu, np.array([z]))[0] - series.real) < 1e-10


def test_closed_form_against_quadrature_twenty_instances():
    assert oracle_validation(instances=20) <= 1e-4


def test_named_example_second_order():
    mu = CircleDistribution.point(1, [1, 1])
    f = [0, 0, 1]
    closed = dirichlet_integral(mu, 2, f, radius=0.999)
    quad = area_dirichlet(mu, 2, f)
    assert abs(closed - quad) <= 1e-4 * abs(quad)


def test_min_argument_variant_disagrees_with_quadrature():
    # the Beta factor must use max(j, j'); with min the off-diagonal terms are wrong
    mu = CircleDistribution.point(np.exp(0.4j))
    f = np.array([0.3, 1.0, -0.7, 0.5, 0.2j])
    i, r = 1, 0.999
    n = len(f)
    W = np.zeros((n, n))
    for j in range(i, n):
        for jp in range(i, n):
            M = min(j, jp)
            W[j, jp] = math.comb(j, i) * math.comb(jp, i) / math.comb(M, i)
    F = np.array([[complex(mu.fourier(b - a)) for b in range(n)] for a in range(n)])
    wrong = (f @ (F * W) @ f.conj()).real
    quad = area_dirichlet(mu, i, f, radius=r)
    right = dirichlet_integral(mu, i, f)
    assert abs(right - quad) / quad < 0.05
    assert abs(wrong - right) / right > 0.05


def test_truncated_weights_increase_to_full():
    W1 = dirichlet_weights(2, 6, radius=0.9)
    W2 = dirichlet_weights(2, 6, radius=0.999)
    W = dirichlet_weights(2, 6)
    assert np.all(W1 <= W2 + 1e-15) and np.all(W2 <= W + 1e-15)
