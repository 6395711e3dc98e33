"""Higher-order defect forms of the forward shift on polynomial subspaces.

``<Delta^(n) p, r> = sum_{j=0}^{n} (-1)^(n-j) C(n, j) <z^j p, z^j r>`` holds
exactly for polynomials, so no matrix of the shift itself is ever formed.
All flags refer to polynomials of degree at most ``N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hardy import AtomicMeasure, dmu_inner, h2_inner, local_dirichlet_m
from .poly import ComplexPoly

__all__ = [
    "InnerProduct",
    "DefectReport",
    "h2_product",
    "dmu_product",
    "local_order_product",
    "defect_form",
    "atomic_defect_identity",
    "defect_matrix",
    "classify",
    "summarize",
    "annihilation_check",
    "rank_growth",
]

PSD_RTOL = 1e-8
RANK_RTOL = 1e-8
DEFAULT_N = 30


@dataclass(frozen=True)
class InnerProduct:
    """A sesquilinear form on polynomials, linear in the first slot.

    ``gram_fn``, when given, returns the monomial Gram matrix
    ``G[i, j] = <z^i, z^j>`` for ``0 <= i, j <= N`` directly, which is much
    faster than ``(N+1)**2`` calls to ``fn``.
    """

    fn: Callable
    tag: str
    gram_fn: Callable | None = None

    def __call__(self, f, g) -> complex:
        return complex(self.fn(f, g))

    def gram(self, N: int) -> np.ndarray:
        if self.gram_fn is not None:
            return np.asarray(self.gram_fn(N), dtype=complex)
        mono = [ComplexPoly.monomial(k) for k in range(N + 1)]
        G = np.empty((N + 1, N + 1), dtype=complex)
        for i in range(N + 1):
            for j in range(i, N + 1):
                G[i, j] = self(mono[i], mono[j])
                G[j, i] = np.conj(G[i, j])
        return G

    def shifted(self) -> "InnerProduct":
        """``(f, g) -> <z f, z g>``."""
        z = ComplexPoly([0, 1])
        gram_fn = None
        if self.gram_fn is not None:
            gram_fn = lambda N: self.gram(N + 1)[1:, 1:]
        return InnerProduct(lambda f, g: self(z * f, z * g), f"shift({self.tag})", gram_fn)


def h2_product() -> InnerProduct:
    return InnerProduct(h2_inner, "h2", lambda N: np.eye(N + 1, dtype=complex))


def dmu_product(mu: AtomicMeasure) -> InnerProduct:
    """Inner product of the weighted Dirichlet space of an atomic measure."""

    def gram(N):
        G = np.eye(N + 1, dtype=complex)
        for lam, c in zip(mu.atoms, mu.weights):
            # difference quotient of z^i at lam: sum_{t<i} lam^(i-1-t) z^t
            Q = np.zeros((N + 1, N + 1), dtype=complex)
            for i in range(1, N + 1):
                t = np.arange(i)
                Q[i, :i] = lam ** (i - 1 - t)
            G += c * (Q @ Q.conj().T)
        return G

    return InnerProduct(lambda f, g: dmu_inner(f, g, mu), "atomic", gram)


def local_order_product(lam: complex, p: ComplexPoly, m: int) -> InnerProduct:
    """``<f, g> = <f, g>_{H2} + <h_{pf}, h_{pg}>_{H2}`` with ``pf = T_{m-1} + (z-lam)^m h``."""
    p = p if isinstance(p, ComplexPoly) else ComplexPoly(p)

    def fn(f, g):
        hf = local_dirichlet_m(p * _poly(f), lam, m).h
        hg = local_dirichlet_m(p * _poly(g), lam, m).h
        return h2_inner(f, g) + h2_inner(hf, hg)

    def gram(N):
        H = []
        width = N + p.degree + 1
        for k in range(N + 1):
            h = local_dirichlet_m(p * ComplexPoly.monomial(k), lam, m).h
            H.append(h.num.padded(width) / h.den.coeffs[0])
        H = np.array(H)
        return np.eye(N + 1, dtype=complex) + H @ H.conj().T

    return InnerProduct(fn, f"local_order(lam={complex(lam)}, m={m})", gram)


def _poly(f) -> ComplexPoly:
    return f if isinstance(f, ComplexPoly) else ComplexPoly(f)


def defect_form(ip: InnerProduct, n: int, p, r) -> complex:
    """``<Delta^(n) p, r>`` through the binomial expansion."""
    if n < 0:
        raise ValueError("defect order must be >= 0")
    p, r = _poly(p), _poly(r)
    total = 0j
    zj = ComplexPoly([1.0])
    z = ComplexPoly([0, 1])
    for j in range(n + 1):
        total += (-1) ** (n - j) * math.comb(n, j) * ip(zj * p, zj * r)
        zj = zj * z
    return total


def atomic_defect_identity(mu: AtomicMeasure, n: int, p) -> tuple[float, float]:
    """Both sides of ``sum_j (-1)^j C(n,j) ||z^j p||^2 = -sum_i c_i (1-|lam_i|^2)^(n-1) |p(lam_i)|^2``."""
    if n < 2:
        raise ValueError("identity is stated for n >= 2")
    p = _poly(p)
    ip = dmu_product(mu)
    lhs = (-1) ** n * defect_form(ip, n, p, p)
    rhs = -sum(c * (1 - abs(lam) ** 2) ** (n - 1) * abs(p(lam)) ** 2 for lam, c in zip(mu.atoms, mu.weights))
    return float(lhs.real), float(rhs)


def defect_matrix(G: np.ndarray, n: int, N: int) -> np.ndarray:
    """``D[i, j] = <Delta^(n) z^i, z^j>`` for ``i, j <= N`` from a Gram matrix of size ``N+n+1``."""
    if G.shape[0] < N + n + 1:
        raise ValueError("Gram matrix too small for the requested order")
    D = np.zeros((N + 1, N + 1), dtype=complex)
    for j in range(n + 1):
        D += (-1) ** (n - j) * math.comb(n, j) * G[j : j + N + 1, j : j + N + 1]
    return D


@dataclass
class DefectReport:
    """Defect form of one order on polynomials of degree ``<= N``."""

    order: int
    N: int
    matrix: np.ndarray
    eigenvalues: np.ndarray
    rank: int
    scale: float
    hermitian_residual: float
    flags: dict = field(default_factory=dict)


def classify(ip: InnerProduct, N: int = DEFAULT_N, n_max: int = 4) -> list[DefectReport]:
    """Defect matrices of orders ``0..n_max`` and their sign/rank flags.

    Per-order flags: ``vanishes`` (matrix norm below ``1e-8 * scale``),
    ``alternating`` (``(-1)^n Delta^(n) <= 0`` within tolerance) and, for
    order one, ``expansive``.  ``scale`` is the largest entry of the monomial
    Gram matrix that enters.
    """
    if N < n_max:
        raise ValueError("N must be at least n_max")
    G = ip.gram(N + n_max)
    scale = float(np.max(np.abs(G)))
    reports = []
    for n in range(n_max + 1):
        D = defect_matrix(G, n, N)
        # <Delta f, f> = v^H D v with v = conj(f), so the spectrum of D decides the sign
        herm = float(np.max(np.abs(D - D.conj().T)))
        eig = np.linalg.eigvalsh(0.5 * (D + D.conj().T))
        top = float(np.max(np.abs(eig))) if eig.size else 0.0
        rank = int(np.sum(np.abs(eig) > RANK_RTOL * top)) if top > PSD_RTOL * scale else 0
        tol = PSD_RTOL * scale
        flags = {
            "vanishes": bool(np.max(np.abs(D)) <= tol),
            "alternating": bool(n == 0 or ((-1) ** n * eig <= tol).all()),
        }
        if n == 1:
            flags["expansive"] = bool(eig.min() >= -tol)
        reports.append(DefectReport(n, N, D, eig, rank, scale, herm, flags))
    return reports


def summarize(reports: list[DefectReport]) -> dict:
    """Collapse per-order reports into the classification on the truncation."""
    by = {r.order: r for r in reports}
    out = {"N": reports[0].N, "n_max": max(by)}
    if 1 in by:
        out["expansive"] = by[1].flags["expansive"]
        out["defect_rank"] = by[1].rank
    out["dirichlet_type"] = all(r.flags["alternating"] for r in reports if r.order >= 1)
    iso = [r.order for r in reports if r.order >= 1 and r.flags["vanishes"]]
    out["isometry_order"] = min(iso) if iso else None
    out["strict_isometry_order"] = (
        out["isometry_order"] if iso and not by[min(iso) - 1].flags["vanishes"] else None
    )
    return out


def annihilation_check(ip: InnerProduct, p, N: int = DEFAULT_N) -> float:
    """``max_{k<=N} |<Delta (p z^k), p z^k>|``.

    For an expansive shift this vanishes exactly when ``Delta^{1/2} p(T)``
    kills every monomial of degree ``<= N``.
    """
    p = _poly(p)
    G = ip.gram(N + p.degree + 1)
    D = defect_matrix(G, 1, N + p.degree)
    worst = 0.0
    for k in range(N + 1):
        v = (p * ComplexPoly.monomial(k)).padded(N + p.degree + 1)
        # <Delta f, f> = sum_{i,j} f_i conj(f_j) D[i, j]
        worst = max(worst, abs(v @ D @ v.conj()))
    return float(worst)


def rank_growth(ip: InnerProduct, Ns=(5, 10, 15, 20, 25)) -> dict:
    """Numerical rank of ``Delta`` on nested truncations (informational)."""
    out = {}
    for N in Ns:
        out[N] = classify(ip, N, 1)[1].rank
    return out
