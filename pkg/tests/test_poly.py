import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dbr.poly import (
    ComplexPoly,
    DivisionError,
    FactorizationError,
    HermitianLaurent,
    divide_exact,
    fejer_riesz,
    fejer_riesz_residual,
    laurent_modulus_product,
    poly_arith,
    poly_roots,
    taylor_shift,
)


def test_trailing_zeros_stripped_and_degree():
    p = ComplexPoly([1, 2, 0, 0])
    assert p.degree == 1
    assert ComplexPoly([0, 0]).is_zero()


def test_arith_examples():
    z1 = ComplexPoly([-1, 1])
    assert poly_arith(z1, z1, "mul").allclose(ComplexPoly([1, -2, 1]))
    assert poly_arith(ComplexPoly([0, 1]), ComplexPoly([0, 0, 1]), "mul").allclose(ComplexPoly.monomial(3))
    assert poly_arith(z1, z1, "sub").is_zero()


def test_horner_matches_power_sum():
    rng = np.random.default_rng(3)
    c = rng.normal(size=7) + 1j * rng.normal(size=7)
    z = 0.3 - 0.8j
    assert abs(ComplexPoly(c)(z) - sum(ck * z**k for k, ck in enumerate(c))) < 1e-12


def test_taylor_shift_examples():
    assert taylor_shift(ComplexPoly([0, 0, 1]), 1).allclose(ComplexPoly([1, 2, 1]))
    assert taylor_shift(ComplexPoly([3]), 0.2j).allclose(ComplexPoly([3]))
    # (w-1)^3 - (w-1) = w^3 - 3w^2 + 2w
    assert taylor_shift(ComplexPoly([0, -1, 0, 1]), -1).allclose(ComplexPoly([0, 2, -3, 1]))


def test_taylor_shift_round_trip():
    rng = np.random.default_rng(4)
    for _ in range(50):
        p = ComplexPoly(rng.normal(size=9) + 1j * rng.normal(size=9))
        lam = complex(rng.normal(), rng.normal())
        back = taylor_shift(taylor_shift(p, lam), -lam)
        assert np.linalg.norm(back.coeffs - p.coeffs) <= 1e-12 * (1 + abs(lam)) ** 8 * p.norm()


def test_divide_exact_and_rejection():
    num = ComplexPoly.from_roots([0.5, 2j, -1])
    q = divide_exact(num, ComplexPoly([-0.5, 1]))
    assert q.allclose(ComplexPoly.from_roots([2j, -1]))
    with pytest.raises(DivisionError):
        divide_exact(ComplexPoly([1, 0, 1]), ComplexPoly([-1, 1]))


def test_roots_examples():
    r = poly_roots(ComplexPoly([1, -2, 1]))
    assert np.allclose(r.roots, [1, 1], atol=1e-7)
    assert np.allclose(poly_roots(ComplexPoly([2, -1])).roots, [2])
    cube = poly_roots(ComplexPoly([-1, 0, 0, 1])).roots
    want = sorted([cmath.exp(2j * cmath.pi * k / 3) for k in range(3)], key=lambda z: cmath.phase(z) % (2 * cmath.pi))
    assert np.allclose(cube, want)


def test_roots_residual_and_ordering():
    rng = np.random.default_rng(5)
    for _ in range(40):
        deg = int(rng.integers(1, 15))
        p = ComplexPoly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        rs = poly_roots(p)
        assert len(rs) == p.degree
        absval = np.abs(rs.roots)
        scaled = np.abs(p(rs.roots)) / sum(abs(c) * absval**j for j, c in enumerate(p.coeffs))
        assert scaled.max() <= 1e-8 and rs.residual <= 1e-8
        mods = np.round(np.abs(rs.roots), 10)
        assert np.all(np.diff(mods) >= 0)


def test_laurent_examples():
    R = laurent_modulus_product([1, 0], [1, 1])
    z = np.exp(1j * np.linspace(0, 6, 17))
    want = np.abs(z - 1) ** 2 * np.abs(z) ** 2 + np.abs(z) ** 2 + np.abs(z - 1) ** 2
    assert np.allclose(R(z).real, want)
    R0 = laurent_modulus_product([0], [1]).trimmed()
    assert R0.n == 0 and R0.r(0) == 2
    lam, c = 0.3 + 0.4j, 0.7
    R1 = laurent_modulus_product([lam], [c])
    assert np.isclose(R1.r(0), 1 + abs(lam) ** 2 + c) and np.isclose(R1.r(1), -np.conj(lam))


def test_laurent_rejects_bad_input():
    with pytest.raises(ValueError):
        laurent_modulus_product([0.5, 0.5], [1, 1])
    with pytest.raises(ValueError):
        laurent_modulus_product([0.5], [0])


def test_fejer_riesz_examples():
    assert fejer_riesz(laurent_modulus_product([1, 0], [1, 1])).allclose(ComplexPoly([2, -1]))
    assert fejer_riesz(HermitianLaurent.from_nonnegative([2])).allclose(ComplexPoly([2**0.5]))
    assert fejer_riesz(HermitianLaurent.from_nonnegative([1])).allclose(ComplexPoly([1]))


def test_fejer_riesz_rejects_circle_zero():
    # |z - 1|^2 vanishes at z = 1
    with pytest.raises(FactorizationError):
        fejer_riesz(HermitianLaurent.from_nonnegative([2, -1]))


@settings(max_examples=200, deadline=None, derandomize=True)
@given(
    st.lists(
        st.tuples(st.floats(0, 1), st.floats(0, 2 * np.pi), st.floats(0.05, 5)),
        min_size=1,
        max_size=6,
        unique_by=lambda t: (round(t[0], 3), round(t[1], 3)),
    )
)
def test_fejer_riesz_invariants(data):
    atoms = [r * cmath.exp(1j * t) for r, t, _ in data]
    if min((abs(a - b) for i, a in enumerate(atoms) for b in atoms[i + 1:]), default=1) < 1e-3:
        return
    R = laurent_modulus_product(atoms, [c for *_, c in data])
    assert all(R.r(-k) == np.conj(R.r(k)) for k in range(R.n + 1))
    q = fejer_riesz(R)
    assert q.coeffs[0].real > 0 and q.coeffs[0].imag == 0
    if q.degree:
        assert np.abs(poly_roots(q).roots).min() > 1 + 1e-8
    assert fejer_riesz_residual(R, q) <= 1e-10 * R.on_circle(256).max()
