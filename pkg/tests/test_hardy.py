import numpy as np
import pytest

from dbr.hardy import (
    AtomicMeasure,
    StableRational,
    difference_quotient,
    dmu_inner,
    h2_inner,
    h2_inner_bound,
    local_dirichlet,
    local_dirichlet_m,
)
from dbr.poly import ComplexPoly, DivisionError


def rnd_poly(rng, deg):
    return ComplexPoly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))


def rnd_rational(rng):
    den = ComplexPoly([1.0])
    for _ in range(int(rng.integers(0, 3))):
        zeta = rng.uniform(1.2, 3) * np.exp(2j * np.pi * rng.uniform())
        den = den * ComplexPoly([1, -1 / zeta])
    return StableRational(rnd_poly(rng, int(rng.integers(0, 5))), den)


def test_rejects_pole_in_disk():
    with pytest.raises(ValueError):
        StableRational(ComplexPoly([1]), ComplexPoly([0.5, -1]))


def test_h2_geometric_series():
    # 1/(2 - z) = sum z^k / 2^(k+1), norm^2 = 1/3
    val, bound = h2_inner_bound(StableRational(ComplexPoly([1]), ComplexPoly([2, -1])), 1 / (1.0))
    assert abs(val - 0.5) < 1e-15
    f = StableRational(ComplexPoly([1]), ComplexPoly([2, -1]))
    val, bound = h2_inner_bound(f, f)
    assert abs(val - 1 / 3) < 1e-14 and bound < 1e-13


def test_h2_tail_bound_is_honest():
    rng = np.random.default_rng(7)
    for _ in range(20):
        f, g = rnd_rational(rng), rnd_rational(rng)
        if f.is_polynomial or g.is_polynomial:
            continue
        val, bound = h2_inner_bound(f, g)
        K = 1 << 14
        exact = np.vdot(g.taylor(K), f.taylor(K))
        assert abs(val - exact) <= bound + 1e-13 * (1 + abs(exact))


def test_difference_quotient_exact_and_error():
    f = ComplexPoly([0, 0, 1])
    assert difference_quotient(f, 1).num.allclose(ComplexPoly([1, 1]))
    g = StableRational(ComplexPoly([1, 1]), ComplexPoly([3, -1]))
    q = difference_quotient(g, 0.4)
    z = 0.1 + 0.2j
    assert abs(q(z) - (g(z) - g(0.4)) / (z - 0.4)) < 1e-13


def test_local_dirichlet_of_monomial():
    for k in range(6):
        assert abs(local_dirichlet(ComplexPoly.monomial(k), ComplexPoly.monomial(k), np.exp(0.3j)) - k) < 1e-12


def test_local_dirichlet_m_example():
    res = local_dirichlet_m(ComplexPoly([0, 0, 1]), 1, 2)
    assert res.taylor.allclose(ComplexPoly([-1, 2]))
    assert abs(res.value - 1) < 1e-14
    with pytest.raises(ValueError):
        local_dirichlet_m(ComplexPoly([1]), 0.5, 2)


def test_local_dirichlet_m1_matches_order_one():
    rng = np.random.default_rng(8)
    for _ in range(30):
        f = rnd_rational(rng)
        lam = np.exp(2j * np.pi * rng.uniform())
        assert abs(local_dirichlet_m(f, lam, 1).value - local_dirichlet(f, f, lam).real) <= 1e-12 * max(1, abs(local_dirichlet(f, f, lam)))


def test_local_dirichlet_m_decomposition():
    rng = np.random.default_rng(9)
    for _ in range(20):
        f = rnd_rational(rng)
        lam, m = np.exp(2j * np.pi * rng.uniform()), int(rng.integers(1, 4))
        res = local_dirichlet_m(f, lam, m)
        z = 0.3 * np.exp(2j * np.pi * rng.uniform())
        assert abs(f(z) - res.taylor(z) - (z - lam) ** m * res.h(z)) < 1e-10 * max(1, abs(f(z)))
        assert res.taylor.degree <= m - 1


def test_dmu_examples():
    mu = AtomicMeasure((1, 0), (1, 1))
    q = ComplexPoly([2, -1])
    f1 = StableRational(ComplexPoly([0, 1]), q)
    f2 = StableRational(ComplexPoly([2, -2]), q)
    assert abs(dmu_inner(f1, f1, mu) - 2) < 1e-12
    assert abs(dmu_inner(f2, f2, mu) - 3) < 1e-12
    # f1 + f2 = 1 has norm 1, which forces Re<f1, f2> = (1 - 2 - 3) / 2
    one = dmu_inner(f1 + f2, f1 + f2, mu)
    assert abs(one - 1) < 1e-12
    assert abs(dmu_inner(f1, f2, mu) - (-2)) < 1e-12


def test_dmu_delta0_monomials():
    mu = AtomicMeasure((0,), (1,))
    assert abs(dmu_inner(ComplexPoly([1]), ComplexPoly([1]), mu) - 1) < 1e-15
    for k in range(1, 5):
        assert abs(dmu_inner(ComplexPoly.monomial(k), ComplexPoly.monomial(k), mu) - 2) < 1e-15


def test_measure_validation():
    with pytest.raises(ValueError):
        AtomicMeasure((1.1,), (1,))
    with pytest.raises(ValueError):
        AtomicMeasure((0.5, 0.5), (1, 1))
    with pytest.raises(ValueError):
        AtomicMeasure((0.5,), (-1,))
    mu = AtomicMeasure((1 + 1e-13,), (1,))
    assert abs(mu.atoms[0]) == 1


def test_sesquilinear_and_shift_identity():
    rng = np.random.default_rng(10)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        atoms = []
        while len(atoms) < n:
            a = np.exp(2j * np.pi * rng.uniform()) * (1 if rng.uniform() < 0.5 else rng.uniform(0, 0.9))
            if all(abs(a - b) > 0.1 for b in atoms):
                atoms.append(a)
        mu = AtomicMeasure(tuple(atoms), tuple(rng.uniform(0.1, 3, size=n)))
        f, g, h = rnd_rational(rng), rnd_rational(rng), rnd_rational(rng)
        a = complex(rng.normal(), rng.normal())
        lhs = dmu_inner(f * a + g, h, mu)
        rhs = a * dmu_inner(f, h, mu) + dmu_inner(g, h, mu)
        assert abs(lhs - rhs) <= 1e-10 * max(1, abs(lhs))
        assert abs(dmu_inner(f, g, mu) - np.conj(dmu_inner(g, f, mu))) <= 1e-12 * max(1, abs(dmu_inner(f, g, mu)))
        p = rnd_poly(rng, int(rng.integers(0, 11)))
        zp = p * ComplexPoly([0, 1])
        diff = dmu_inner(zp, zp, mu).real - dmu_inner(p, p, mu).real
        assert abs(diff - mu.integrate_abs2(p)) <= 1e-9 * dmu_inner(zp, zp, mu).real
