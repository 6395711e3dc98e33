"""Reproducing kernels and rational Schur functions of finitely atomic
weighted Dirichlet spaces.

Pipeline for ``mu = sum c_i delta_{lam_i}``:

1. ``|q|^2 = prod|z-lam_i|^2 + sum_i c_i prod_{j!=i}|z-lam_j|^2`` on the
   circle, factored with ``q`` outer and ``q(0) > 0``.
2. ``phi = prod(z-lam_i)/q`` spans the isometric part, ``a = prod(1-conj(lam_i) z)/q``
   is the mate.
3. ``f_i = d_i prod_{j!=i}(z-lam_j)/q`` is the basis dual to the atom kernels;
   the atom kernels follow from the Gram system ``f_j = sum_i <f_j,f_i> K_i``.
4. ``K_w(z) = sum_i f_i(z) conj(K_i(w)) + phi(z) conj(phi(w))/(1 - z conj(w))``.
5. ``q(z) conj(q(w)) (1 - (1 - z conj(w)) K_w(z)) = <M X(z), X(w)>`` with
   ``X(z) = (z, ..., z^n)``; a pivoted Cholesky factor of ``M`` gives the
   Schur numerators ``p_i``, so that ``B = (p_1, ..., p_n)/q``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .hardy import AtomicMeasure, StableRational, dmu_inner
from .poly import ComplexPoly, fejer_riesz, fejer_riesz_residual, laurent_modulus_product

__all__ = [
    "KernelModel",
    "VerificationReport",
    "ModelError",
    "build_model",
    "kernel_eval",
    "kernel_function",
    "schur_extract",
    "schur_psd_matrix",
    "pivoted_cholesky",
    "kernel_bivariate",
    "verify_model",
    "degree_one_parameters",
]

logger = logging.getLogger(__name__)

GRAM_COND_WARN = 1e8
CHOL_DROP_RTOL = 1e-10
PSD_NEG_RTOL = 1e-8


class ModelError(ArithmeticError):
    """Numerical breakdown while building a kernel model."""


@dataclass(frozen=True, eq=False)
class KernelModel:
    measure: AtomicMeasure
    q: ComplexPoly
    phi: StableRational
    mate: StableRational
    dual_basis: tuple
    gram: np.ndarray
    atom_kernels: tuple
    psd: np.ndarray
    schur_numerators: tuple
    gram_cond: float = math.nan
    schur_rank: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.measure)

    def schur(self, z) -> np.ndarray:
        """Components ``p_i(z)/q(z)`` of the extracted Schur function."""
        qz = self.q(z)
        return np.array([p(z) / qz for p in self.schur_numerators])


def _atom_product(atoms, skip=None) -> ComplexPoly:
    return ComplexPoly.from_roots([a for i, a in enumerate(atoms) if i != skip])


def build_model(mu: AtomicMeasure, *, extract: bool = True) -> KernelModel:
    """Run the full construction for an atomic measure.

    Raises
    ------
    ModelError
        If the Gram matrix of the dual basis is not positive definite.
    """
    atoms = mu.atoms
    n = len(atoms)
    R = laurent_modulus_product(atoms, mu.weights)
    q = fejer_riesz(R)
    phi = StableRational(_atom_product(atoms), q)
    mate = _mate(atoms, q)

    dual = []
    for i, lam in enumerate(atoms):
        base = _atom_product(atoms, skip=i)
        d = q(lam) / base(lam)
        dual.append(StableRational(base * d, q))

    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = dmu_inner(dual[j], dual[i], mu)
            G[j, i] = np.conj(G[i, j])
    eig = np.linalg.eigvalsh(G)
    if eig[0] <= 1e-12 * max(eig[-1], 1.0):
        raise ModelError(f"Gram matrix not positive definite (smallest eigenvalue {eig[0]:.3e})")
    cond = float(eig[-1] / eig[0])
    if cond > GRAM_COND_WARN:
        logger.warning("Gram condition number %.3e; atoms may be too close", cond)

    # numerators of the f_j over the shared denominator q, one column each
    F = np.column_stack([f.num.padded(n) / f.den.coeffs[0] * q.coeffs[0] for f in dual])
    # f_j = sum_i G[i, j] K_i  =>  F = Kc @ G
    Kc = np.linalg.solve(G.T, F.T).T
    kernels = tuple(StableRational(ComplexPoly(Kc[:, i]), q) for i in range(n))

    model = KernelModel(
        measure=mu,
        q=q,
        phi=phi,
        mate=mate,
        dual_basis=tuple(dual),
        gram=G,
        atom_kernels=kernels,
        psd=np.zeros((n, n), dtype=complex),
        schur_numerators=(),
        gram_cond=cond,
        diagnostics={"fejer_riesz_residual": fejer_riesz_residual(R, q)},
    )
    if not extract:
        return model
    M, boundary = schur_psd_matrix(model)
    P, rank = pivoted_cholesky(M)
    if rank < n:
        logger.warning("Schur matrix has numerical rank %d < %d atoms", rank, n)
    nums = tuple(ComplexPoly(np.concatenate([[0.0], row])) for row in P)
    diag = dict(model.diagnostics)
    diag["schur_boundary_residual"] = boundary
    return KernelModel(
        measure=mu, q=q, phi=phi, mate=mate, dual_basis=tuple(dual), gram=G,
        atom_kernels=kernels, psd=M, schur_numerators=nums, gram_cond=cond,
        schur_rank=rank, diagnostics=diag,
    )


def _mate(atoms, q: ComplexPoly) -> StableRational:
    top = ComplexPoly([1.0])
    for a in atoms:
        top = top * ComplexPoly([1.0, -a.conjugate()])
    return StableRational(top, q)


def kernel_function(model: KernelModel, w: complex) -> StableRational:
    """``z -> K_w(z)`` as a rational function (``|w| < 1``)."""
    w = complex(w)
    if abs(w) >= 1:
        raise ValueError("kernel point must lie in the open disk")
    q = model.q
    n = model.n
    top = ComplexPoly([0.0])
    line = ComplexPoly([1.0, -w.conjugate()])
    for f, K in zip(model.dual_basis, model.atom_kernels):
        top = top + ComplexPoly(f.num.padded(n)) * (np.conj(K(w)) * q.coeffs[0] / f.den.coeffs[0])
    top = top * line + model.phi.num * np.conj(model.phi(w))
    return StableRational(top, q * line)


def kernel_eval(model: KernelModel, z: complex, w: complex) -> complex:
    """Reproducing kernel ``K_w(z)`` of the space at two points of the open disk."""
    z, w = complex(z), complex(w)
    if abs(z) >= 1 or abs(w) >= 1:
        raise ValueError("kernel arguments must lie in the open disk")
    total = sum(f(z) * np.conj(K(w)) for f, K in zip(model.dual_basis, model.atom_kernels))
    total += model.phi(z) * np.conj(model.phi(w)) / (1.0 - z * w.conjugate())
    return complex(total)


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # coefficient matrix of conj(a(w)) * b(z): rows are powers of conj(w)
    return np.outer(np.conj(a), b)


def kernel_bivariate(model: KernelModel) -> dict:
    """Closed form ``K_w(z) = N(z, conj w) / (q(z) conj(q(w)) (1 - z conj w))``.

    Returns the coefficient matrices of numerator ``N`` and of ``S``, where
    ``S = q(z) conj(q(w)) <B(z), B(w)>``; entry ``[a, b]`` multiplies
    ``conj(w)**a * z**b``.
    """
    n = model.n
    q = model.q.padded(n + 1)
    phi_top = model.phi.num.padded(n + 1)
    scale = model.q.coeffs[0]
    T = np.zeros((n + 1, n + 1), dtype=complex)
    for f, K in zip(model.dual_basis, model.atom_kernels):
        fn = f.num.padded(n + 1) * scale / f.den.coeffs[0]
        kn = K.num.padded(n + 1) * scale / K.den.coeffs[0]
        T += _outer(kn, fn)
    # multiply by (1 - z conj(w))
    T1 = T.copy()
    T1[1:, 1:] -= T[:-1, :-1]
    qq = _outer(q, q)
    N = T1 + _outer(phi_top, phi_top)
    S = qq - N
    return {"numerator": N, "schur_pairing": S, "q": model.q.coeffs}


def schur_psd_matrix(model: KernelModel) -> tuple[np.ndarray, float]:
    """Hermitian matrix ``M`` with ``<M X(z), X(w)> = q(z) conj(q(w)) <B(z),B(w)>``.

    Also returns the largest coefficient of ``S`` in the row/column of
    degree zero, which must vanish because ``B(0) = 0``.
    """
    S = kernel_bivariate(model)["schur_pairing"]
    boundary = float(max(np.max(np.abs(S[0, :])), np.max(np.abs(S[:, 0]))))
    M = S[1:, 1:]
    M = 0.5 * (M + M.conj().T)
    scale = max(np.max(np.abs(S)), 1e-300)
    if boundary > 1e-9 * scale:
        raise ModelError(f"B(0) != 0 in extracted pairing (residual {boundary:.3e})")
    return M, boundary


def pivoted_cholesky(M: np.ndarray, drop_rtol: float = CHOL_DROP_RTOL) -> tuple[np.ndarray, int]:
    """Rank-revealing Cholesky with diagonal pivoting: ``P^H P = M``.

    Returns ``P`` of shape ``(rank, n)`` (upper triangular up to a column
    permutation) and the numerical rank.  Pivots below ``drop_rtol * trace(M)``
    are dropped.

    Raises
    ------
    ModelError
        If ``M`` has an eigenvalue below ``-1e-8 * ||M||``.
    """
    M = np.array(M, dtype=complex)
    n = M.shape[0]
    eig = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    norm = max(np.max(np.abs(eig)), 1e-300)
    if eig[0] < -PSD_NEG_RTOL * norm:
        raise ModelError(f"matrix is not positive semidefinite (eigenvalue {eig[0]:.3e})")
    A = M.copy()
    tol = drop_rtol * max(np.trace(M).real, 1e-300)
    perm = np.arange(n)
    rows = []
    for k in range(n):
        d = np.real(np.diag(A))[k:]
        j = k + int(np.argmax(d))
        if d[j - k] <= tol:
            break
        # symmetric swap k <-> j
        A[[k, j], :] = A[[j, k], :]
        A[:, [k, j]] = A[:, [j, k]]
        perm[[k, j]] = perm[[j, k]]
        for r in rows:
            r[[k, j]] = r[[j, k]]
        piv = math.sqrt(A[k, k].real)
        row = np.zeros(n, dtype=complex)
        row[k] = piv
        row[k + 1:] = A[k, k + 1:] / piv
        A[k + 1:, k + 1:] -= np.outer(row[k + 1:].conj(), row[k + 1:])
        rows.append(row)
    rank = len(rows)
    U = np.array(rows).reshape(rank, n)
    P = np.zeros_like(U)
    P[:, perm] = U
    return P, rank


def schur_extract(model: KernelModel) -> tuple:
    """Schur numerators ``p_1..p_n``; ``B = (p_1, ..., p_n)/q`` up to a left unitary."""
    if model.schur_numerators:
        return model.schur_numerators
    M, _ = schur_psd_matrix(model)
    P, _ = pivoted_cholesky(M)
    return tuple(ComplexPoly(np.concatenate([[0.0], row])) for row in P)


def degree_one_parameters(model: KernelModel) -> tuple[complex, complex]:
    """``(beta, gamma)`` with ``b(z) = gamma z/(1 - beta z)`` for a one-atom model."""
    if model.n != 1:
        raise ValueError("degree-one parameters need a single atom")
    p = model.schur_numerators[0]
    q = model.q
    q0 = q.coeffs[0]
    q1 = q.coeffs[1] if q.degree >= 1 else 0.0
    beta = complex(-q1 / q0)
    gamma = complex(p.coeffs[1] / q0) if p.degree >= 1 else 0j
    return beta, gamma


@dataclass
class VerificationReport:
    residuals: dict
    tolerances: dict
    trials: int

    @property
    def failures(self) -> list:
        return [k for k, v in self.residuals.items() if not (v <= self.tolerances.get(k, math.inf))]

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_model(model: KernelModel, trials: int = 100, seed: int = 0, tol: float = 1e-9) -> VerificationReport:
    """Spot-check the identities a built model must satisfy.

    * reproducing property ``<f, K_w> = f(w)`` for random polynomials ``f``;
    * dual basis ``<f_j, K_{lam_i}> = delta_ij``;
    * Hermitian symmetry and positivity of the kernel on random points;
    * Schur bound ``||B(z)|| <= 1`` on a disk grid;
    * mate identity ``|a|^2 + ||B||^2 = 1`` on the circle;
    * ``<B(z), B(w)> = 1 - (1 - z conj w) K_w(z)``.
    """
    rng = np.random.default_rng(seed)
    mu = model.measure
    n = model.n
    res = {}

    worst = 0.0
    for _ in range(trials):
        deg = int(rng.integers(0, 6))
        f = ComplexPoly(rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        w = _random_disk_point(rng, 0.9)
        Kw = kernel_function(model, w)
        lhs = dmu_inner(f, Kw, mu)
        worst = max(worst, abs(lhs - f(w)) / max(1.0, f.norm()))
    res["reproducing"] = worst

    worst = 0.0
    for j, f in enumerate(model.dual_basis):
        for i, K in enumerate(model.atom_kernels):
            worst = max(worst, abs(dmu_inner(f, K, mu) - (1.0 if i == j else 0.0)))
    res["dual_basis"] = worst

    pts = [_random_disk_point(rng, 0.95) for _ in range(8)]
    Km = np.array([[kernel_eval(model, z, w) for w in pts] for z in pts])
    res["hermitian"] = float(np.max(np.abs(Km - Km.conj().T)))
    eig = np.linalg.eigvalsh(0.5 * (Km + Km.conj().T))
    res["kernel_psd"] = float(max(0.0, -eig[0] / max(np.trace(Km).real, 1e-300)))

    rr, tt = np.meshgrid(np.linspace(0, 0.999, 25), np.linspace(0, 2 * np.pi, 64, endpoint=False))
    zs = (rr * np.exp(1j * tt)).ravel()
    b2 = np.sum(np.abs(model.schur(zs)) ** 2, axis=0)
    res["schur_bound"] = float(max(0.0, np.max(b2) - 1.0))

    circ = np.exp(2j * np.pi * np.arange(256) / 256)
    mate = np.abs(model.mate(circ)) ** 2 + np.sum(np.abs(model.schur(circ)) ** 2, axis=0)
    res["mate_identity"] = float(np.max(np.abs(mate - 1.0)))

    worst = 0.0
    for _ in range(trials):
        z, w = _random_disk_point(rng, 0.95), _random_disk_point(rng, 0.95)
        pair = np.vdot(model.schur(w), model.schur(z))
        worst = max(worst, abs(pair - (1 - (1 - z * np.conj(w)) * kernel_eval(model, z, w))))
    res["schur_pairing"] = worst

    res["mate_positive_at_0"] = 0.0 if model.mate(0).real > 0 and abs(model.mate(0).imag) < 1e-14 else 1.0
    tols = {k: tol for k in res}
    tols["schur_bound"] = 1e-9
    tols["kernel_psd"] = 1e-8
    tols["mate_positive_at_0"] = 0.0
    if n == 1:
        beta, gamma = degree_one_parameters(model)
        lam = mu.atoms[0]
        gap = (1 - abs(beta)) - abs(gamma)
        if abs(abs(lam) - 1) < 1e-12:
            res["sarason_boundary"] = abs(gap)
            tols["sarason_boundary"] = 1e-8
        else:
            # interior atom: strict inequality 0 < |gamma| < 1 - |beta|
            res["interior_strict"] = 0.0 if (gap > 0 and abs(gamma) > 0) else 1.0
            tols["interior_strict"] = 0.0
    return VerificationReport(res, tols, trials)


def _random_disk_point(rng, rmax: float) -> complex:
    r = rmax * math.sqrt(rng.uniform())
    return complex(r * np.exp(2j * np.pi * rng.uniform()))
