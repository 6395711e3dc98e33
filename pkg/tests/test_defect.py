import math

import numpy as np
import pytest

from dbr.defect import (
    InnerProduct,
    annihilation_check,
    atomic_defect_identity,
    classify,
    defect_form,
    defect_matrix,
    dmu_product,
    h2_product,
    local_order_product,
    rank_growth,
    summarize,
)
from dbr.hardy import AtomicMeasure
from dbr.poly import ComplexPoly

Z = ComplexPoly([0, 1])


def rnd_poly(rng, deg):
    return ComplexPoly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))


def test_defect_form_examples():
    d1 = dmu_product(AtomicMeasure((1,), (1,)))
    rng = np.random.default_rng(0)
    for _ in range(5):
        p = rnd_poly(rng, 6)
        assert abs(defect_form(d1, 2, p, p)) < 1e-10 * p.norm() ** 2 * 10
    d0 = dmu_product(AtomicMeasure((0,), (1,)))
    assert abs(defect_form(d0, 2, [1], [1]) - (-1)) < 1e-14
    p, r = rnd_poly(rng, 3), rnd_poly(rng, 4)
    assert defect_form(d0, 0, p, r) == d0(p, r)


def test_atomic_identity_examples():
    assert atomic_defect_identity(AtomicMeasure((0,), (1,)), 2, [1]) == pytest.approx((-1, -1), abs=1e-14)
    lhs, rhs = atomic_defect_identity(AtomicMeasure((np.exp(0.4j),), (2,)), 3, [1, 2, 3])
    assert rhs == 0 and abs(lhs) < 1e-10
    lhs, rhs = atomic_defect_identity(AtomicMeasure((0.5,), (0.5,)), 3, Z)
    assert rhs == pytest.approx(-0.5 * 0.75**2 * 0.25, abs=1e-15)
    assert lhs == pytest.approx(rhs, abs=1e-14)
    with pytest.raises(ValueError):
        atomic_defect_identity(AtomicMeasure((0,), (1,)), 1, [1])


def test_fast_gram_matches_generic():
    for ip in (
        dmu_product(AtomicMeasure((1, 0.4j, -0.2), (1.0, 0.3, 2.0))),
        local_order_product(np.exp(0.9j), ComplexPoly([1, 2j]), 2),
        local_order_product(-1, ComplexPoly([0, 0, 1]), 3),
    ):
        slow = InnerProduct(ip.fn, "slow")
        assert np.allclose(slow.gram(7), ip.gram(7), atol=1e-12)


def test_telescoping():
    rng = np.random.default_rng(11)
    mu = AtomicMeasure((1, 0.5j), (1.0, 2.0))
    ip = dmu_product(mu)
    sh = ip.shifted()
    for _ in range(10):
        p = rnd_poly(rng, int(rng.integers(0, 6)))
        for n in range(1, 6):
            lhs = defect_form(ip, n, p, p)
            rhs = defect_form(sh, n - 1, p, p) - defect_form(ip, n - 1, p, p)
            assert abs(lhs - rhs) <= 1e-9 * max(1, abs(lhs))


def test_matrices_hermitian():
    ip = dmu_product(AtomicMeasure((1, 0.3 + 0.3j), (1.0, 1.0)))
    for r in classify(ip, 15, 4):
        assert r.hermitian_residual <= 1e-12 * r.scale


def test_two_point_classification():
    reps = classify(dmu_product(AtomicMeasure((1, 0), (1, 1))), 20, 4)
    s = summarize(reps)
    assert s["defect_rank"] == 2 and s["expansive"] and s["dirichlet_type"]
    assert s["isometry_order"] is None
    assert not reps[2].flags["vanishes"]


def test_local_order_two_is_strict_four_isometry():
    s = summarize(classify(local_order_product(1, Z, 2), 20, 4))
    assert s["isometry_order"] == 4 and s["strict_isometry_order"] == 4


def test_h2_is_isometry():
    reps = classify(h2_product(), 10, 1)
    assert reps[1].flags["vanishes"] and reps[1].rank == 0


def test_circle_atoms_two_isometry_and_rank():
    rng = np.random.default_rng(12)
    for n in range(1, 5):
        atoms = np.exp(2j * np.pi * (np.arange(n) / n + 0.1 * rng.uniform()))
        reps = classify(dmu_product(AtomicMeasure(tuple(atoms), tuple(rng.uniform(0.5, 2, n)))), 25, 2)
        assert reps[2].flags["vanishes"]
        assert reps[1].rank == n


def test_interior_atom_matches_identity_entrywise():
    lam, c = 0.4 - 0.3j, 1.5
    mu = AtomicMeasure((lam, 1), (c, 0.5))
    ip = dmu_product(mu)
    G = ip.gram(20)
    for n in range(2, 5):
        D = defect_matrix(G, n, 12)
        # (-1)^n <Delta^(n) z^i, z^j> = -c (1-|lam|^2)^(n-1) lam^i conj(lam)^j
        i, j = np.meshgrid(np.arange(13), np.arange(13), indexing="ij")
        want = -c * (1 - abs(lam) ** 2) ** (n - 1) * lam**i * np.conj(lam) ** j
        assert np.allclose((-1) ** n * D, want, atol=1e-10)
        assert np.max(np.abs(D)) > 1e-8
        assert np.linalg.eigvalsh((-1) ** n * D).max() <= 1e-10


def test_annihilation_examples():
    d1 = dmu_product(AtomicMeasure((1,), (1,)))
    assert annihilation_check(d1, [-1, 1], 20) < 1e-12
    d10 = dmu_product(AtomicMeasure((1, 0), (1, 1)))
    assert annihilation_check(d10, [0, -1, 1], 20) < 1e-12
    assert annihilation_check(d10, [-1, 1], 20) > 0.5


def test_rank_growth_is_flat_for_finite_rank():
    ranks = rank_growth(dmu_product(AtomicMeasure((1, -1, 0.2), (1, 1, 1))), Ns=(5, 10, 20))
    assert set(ranks.values()) == {3}


def test_requires_n_at_least_nmax():
    with pytest.raises(ValueError):
        classify(h2_product(), 2, 4)
