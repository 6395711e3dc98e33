"""Circle distributions ``P(D) delta_lam``, shift-invariant tuples built from
them, and the Dirichlet-integral norms they define on polynomials.

A distribution is stored through its Fourier generator
``mu_hat(k) = w delta_{k,0} + sum_t P_t(k) conj(lam_t)**k`` for ``k >= 0``
(negative ``k`` by Hermitian symmetry).  Each ``P_t`` is kept in the Newton
basis ``P(k) = sum_j d_j C(k, j)``; with integer or Gaussian-integer data every
value is computed exactly.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from typing import Sequence

import numpy as np
from scipy.linalg import eigh
from scipy.special import betainc

from .defect import InnerProduct
from .hardy import h2_inner, local_dirichlet_m
from .poly import ComplexPoly

__all__ = [
    "CirclePoint",
    "CircleDistribution",
    "TupleSpec",
    "HMatrix",
    "TupleError",
    "hmatrix",
    "newton_fit",
    "rank_one_generator",
    "rank_one_tuple",
    "multi_tuple",
    "dlambda_closed_form",
    "binomial_identity_check",
    "dirichlet_integral",
    "dirichlet_weights",
    "vecmu_gram",
    "vecmu_norm",
    "tuple_product",
    "norm_crosscheck",
    "AllowabilityCertificate",
    "allowability_certificate",
]


class TupleError(ValueError):
    pass


# --------------------------------------------------------------------------- points


_QUARTER = {0: 1, 1: 1j, 2: -1, 3: -1j}


@dataclass(frozen=True)
class CirclePoint:
    """A point of the unit circle, optionally tagged as ``exp(2 pi i k / n)``.

    Tagged points raise to integer powers by reducing the exponent modulo ``n``,
    and the four quarter turns give exact results (``int`` for ``+-1``).
    """

    value: complex
    root: tuple[int, int] | None = None

    @classmethod
    def of(cls, lam) -> "CirclePoint":
        if isinstance(lam, CirclePoint):
            return lam
        if isinstance(lam, Integral) and lam in (1, -1):
            return cls.root_of_unity(2, 0 if lam == 1 else 1)
        lam = complex(lam)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise TupleError(f"{lam} is not on the unit circle")
        for z, (n, k) in ((1, (1, 0)), (-1, (2, 1)), (1j, (4, 1)), (-1j, (4, 3))):
            if lam == z:
                return cls.root_of_unity(n, k)
        return cls(lam / abs(lam))

    @classmethod
    def root_of_unity(cls, n: int, k: int) -> "CirclePoint":
        if n < 1:
            raise TupleError("root of unity order must be >= 1")
        g = math.gcd(k % n, n) or n
        n, k = n // g, (k % n) // g
        return cls(cls._unit(n, k), (n, k))

    @staticmethod
    def _unit(n: int, k: int):
        if (4 * k) % n == 0:
            return _QUARTER[(4 * k // n) % 4]
        return cmath.exp(2j * math.pi * k / n)

    def __pow__(self, e: int):
        if self.root is not None:
            n, k = self.root
            return self._unit(n, (k * e) % n)
        return self.value**e

    def conj(self) -> "CirclePoint":
        if self.root is not None:
            n, k = self.root
            return CirclePoint.root_of_unity(n, -k)
        return CirclePoint(self.value.conjugate())

    def __complex__(self):
        return complex(self.value)

    def same(self, other: "CirclePoint") -> bool:
        if self.root is not None and other.root is not None:
            return self.root == other.root
        return abs(complex(self) - complex(other)) <= 1e-14


# --------------------------------------------------------------------------- Newton basis


def _conj(x):
    return x.conjugate() if hasattr(x, "conjugate") else complex(x).conjugate()


def newton_fit(values: Sequence) -> list:
    """Forward differences ``Delta^j P(0)`` of the sample list, trailing zeros removed."""
    row = list(values)
    out = []
    while row:
        out.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    while out and out[-1] == 0:
        out.pop()
    return out


def _newton_eval(d: Sequence, k: int):
    total = 0
    for j, dj in enumerate(d):
        total += dj * math.comb(k, j)
    return total


def _newton_to_monomial(d: Sequence) -> list:
    """Coefficients of ``P`` in powers of ``k`` (Fractions when ``d`` is rational)."""
    exact = all(isinstance(x, Rational) for x in d)
    one = Fraction(1) if exact else 1.0
    out = [0 * one] * max(len(d), 1)
    # C(k, j) = k (k-1) ... (k-j+1) / j!
    basis = [one]
    for j, dj in enumerate(d):
        if j > 0:
            basis = [0 * one] + basis
            for t in range(len(basis) - 1):
                basis[t] -= (j - 1) * basis[t + 1]
        fact = math.factorial(j)
        for t, b in enumerate(basis):
            out[t] += dj * b / fact
    return out


def _clean(x):
    """Collapse exact complex values with zero imaginary part to ints."""
    if isinstance(x, complex) and x.imag == 0 and x.real.is_integer() and abs(x.real) < 2**52:
        return int(x.real)
    return x


# --------------------------------------------------------------------------- distributions


@dataclass(frozen=True)
class CircleDistribution:
    """``lebesgue_weight * dm + sum_t P_t(D) delta_{lam_t}`` on the circle.

    ``terms`` holds ``(CirclePoint, newton_coefficients)`` pairs.
    """

    terms: tuple = ()
    lebesgue_weight: float = 0

    def __post_init__(self):
        merged: list[list] = []
        for lam, d in self.terms:
            lam = CirclePoint.of(lam)
            for slot in merged:
                if slot[0].same(lam):
                    n = max(len(slot[1]), len(d))
                    a = list(slot[1]) + [0] * (n - len(slot[1]))
                    b = list(d) + [0] * (n - len(d))
                    slot[1] = [x + y for x, y in zip(a, b)]
                    break
            else:
                merged.append([lam, [_clean(x) for x in d]])
        terms = []
        for lam, d in merged:
            d = [_clean(x) for x in d]
            while d and d[-1] == 0:
                d.pop()
            if d:
                terms.append((lam, tuple(d)))
        object.__setattr__(self, "terms", tuple(terms))

    @classmethod
    def lebesgue(cls, weight=1) -> "CircleDistribution":
        return cls((), weight)

    @classmethod
    def point(cls, lam, poly_in_k: Sequence = (1,)) -> "CircleDistribution":
        """``P(D) delta_lam`` with ``P`` given by monomial coefficients in ``k``."""
        samples = [sum(c * k**j for j, c in enumerate(poly_in_k)) for k in range(len(poly_in_k))]
        return cls(((lam, newton_fit(samples)),))

    def fourier(self, k: int):
        if k < 0:
            return _conj(self.fourier(-k))
        total = self.lebesgue_weight if k == 0 else 0
        for lam, d in self.terms:
            total += _newton_eval(d, k) * (lam.conj() ** k)
        return _clean(total)

    @property
    def order(self) -> int:
        """Largest degree among the ``P_t`` (0 for a measure, -1 for zero)."""
        if not self.terms:
            return 0 if self.lebesgue_weight else -1
        return max(len(d) - 1 for _, d in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms and not self.lebesgue_weight

    @property
    def is_lebesgue(self) -> bool:
        return not self.terms

    def monomial_terms(self) -> list[tuple[complex, list]]:
        """``(lam, coefficients of P in powers of D)`` per atom."""
        return [(complex(lam), _newton_to_monomial(d)) for lam, d in self.terms]

    def is_positive_measure(self, tol: float = 0.0) -> bool:
        if self.lebesgue_weight < 0:
            return False
        for _, d in self.terms:
            if len(d) > 1:
                return False
            c = complex(d[0])
            if abs(c.imag) > tol or c.real < -tol:
                return False
        return True

    def describe(self) -> str:
        parts = []
        if self.lebesgue_weight:
            parts.append(f"{self.lebesgue_weight}*m")
        for lam, coeffs in self.monomial_terms():
            poly = " + ".join(f"{c}*D^{j}" if j else f"{c}" for j, c in enumerate(coeffs) if c != 0)
            parts.append(f"({poly}) delta[{lam}]")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class TupleSpec:
    """``(m, mu_1, ..., mu_{n-1})`` with ``m`` normalized Lebesgue measure."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise TupleError("empty tuple")
        first = entries[0]
        if not first.is_lebesgue or first.lebesgue_weight != 1:
            raise TupleError("first entry must be normalized Lebesgue measure")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.entries)

    def table(self, kmax: int) -> list[list]:
        """``table[i][k] = mu_hat_i(k)`` for ``0 <= k <= kmax``."""
        return [[mu.fourier(k) for k in range(kmax + 1)] for mu in self.entries]


# --------------------------------------------------------------------------- H matrices


@dataclass(frozen=True)
class HMatrix:
    N: int
    k: int
    m: int
    entries: tuple  # m x m nested tuples of ints

    def pairing(self, v: Sequence):
        """``sum_{a,b} H[a, b] v_a conj(v_b)``."""
        total = 0
        for a in range(self.m):
            for b in range(self.m):
                total += self.entries[a][b] * v[a] * _conj(v[b])
        return _clean(total)


def hmatrix(N: int, k: int, m: int) -> HMatrix:
    """``H[a, b] = sum_{l<N} (-1)^(N-1-l) C(N-1, l) C(l+a, m-1) C(l+k+b, m-1)``."""
    if N < 1 or k < 0 or m < 1:
        raise TupleError("need N >= 1, k >= 0, m >= 1")
    weights = [(-1) ** (N - 1 - l) * math.comb(N - 1, l) for l in range(N)]
    rows = []
    for a in range(m):
        row = []
        for b in range(m):
            row.append(sum(w * math.comb(l + a, m - 1) * math.comb(l + k + b, m - 1) for l, w in enumerate(weights)))
        rows.append(tuple(row))
    return HMatrix(N, k, m, tuple(rows))


def _coeff_list(c) -> list:
    if isinstance(c, ComplexPoly):
        c = list(c.coeffs)
    out = [_clean(x) if isinstance(x, complex) else x for x in c]
    out = [complex(x) if isinstance(x, np.complexfloating) else x for x in out]
    out = [float(x) if isinstance(x, np.floating) else x for x in out]
    out = [int(x) if isinstance(x, np.integer) else x for x in out]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _eval_at(c: list, lam: CirclePoint):
    return _clean(sum(cj * lam**j for j, cj in enumerate(c)))


def rank_one_generator(lam, c, m: int) -> list[list]:
    """Newton coefficients of ``P_i`` for ``i = 1..2m-1`` in the rank-one tuple.

    ``mu_hat_i(k) = conj(lam)^k * sum_{a,b} H_i(k)[a, b] v_a conj(v_b)`` with
    ``v_a = c_a lam^a``.
    """
    lam = CirclePoint.of(lam)
    c = _coeff_list(c)
    if m < 1:
        raise TupleError("m must be >= 1")
    if len(c) > m:
        raise TupleError(f"degree of p exceeds m - 1 = {m - 1}")
    if abs(complex(_eval_at(c, lam))) <= 1e-12 * max(1.0, max(abs(complex(x)) for x in c)):
        raise TupleError("p vanishes at lam")
    v = [_clean(cj * lam**j) for j, cj in enumerate(c)] + [0] * (m - len(c))
    fit_pts = 2 * m - 1
    check_pts = fit_pts + 6
    out = []
    for i in range(1, 2 * m):
        samples = [hmatrix(i, k, m).pairing(v) for k in range(check_pts)]
        d = newton_fit(samples[:fit_pts])
        for k in range(fit_pts, check_pts):
            got = _newton_eval(d, k)
            err = abs(complex(got) - complex(samples[k]))
            if err > 1e-9 * max(1.0, abs(complex(samples[k]))):
                raise TupleError(f"generator of entry {i} is not polynomial of degree <= {2 * m - 2}")
        out.append(d)
    return out


def rank_one_tuple(lam, c, m: int) -> TupleSpec:
    """Tuple of length ``2m`` attached to one circle point and one polynomial ``p``."""
    lam = CirclePoint.of(lam)
    gens = rank_one_generator(lam, c, m)
    return TupleSpec((CircleDistribution.lebesgue(1),) + tuple(CircleDistribution(((lam, d),)) for d in gens))


def multi_tuple(atoms: Sequence) -> TupleSpec:
    """Sum of rank-one generators over ``(lam_j, m_j, [p_1j, ..., p_nj])``.

    Each atom uses its own ``m_j``; shorter contributions are padded with zero
    entries up to length ``2 max(m_j)``.
    """
    if not atoms:
        raise TupleError("need at least one atom")
    m = max(int(a[1]) for a in atoms)
    terms: list[list] = [[] for _ in range(2 * m - 1)]
    seen = []
    for lam, mj, polys in atoms:
        lam = CirclePoint.of(lam)
        if any(lam.same(s) for s in seen):
            raise TupleError("atoms must be distinct")
        seen.append(lam)
        if not 1 <= len(polys) <= mj:
            raise TupleError("need 1 <= number of polynomials <= m_j")
        for idx, p in enumerate(polys):
            c = _coeff_list(p)
            if idx > 0 and len(c) > mj:
                raise TupleError(f"degree of p exceeds m_j - 1 = {mj - 1}")
            if idx == 0:
                gens = rank_one_generator(lam, c, mj)
            else:
                gens = _rank_one_unchecked(lam, c, mj)
            for i, d in enumerate(gens):
                terms[i].append((lam, d))
    return TupleSpec((CircleDistribution.lebesgue(1),) + tuple(CircleDistribution(tuple(t)) for t in terms))


def _rank_one_unchecked(lam: CirclePoint, c: list, m: int) -> list[list]:
    # secondary polynomials may vanish at lam
    v = [_clean(cj * lam**j) for j, cj in enumerate(c)] + [0] * (m - len(c))
    return [newton_fit([hmatrix(i, k, m).pairing(v) for k in range(2 * m - 1)]) for i in range(1, 2 * m)]


def dlambda_closed_form(lam, m: int) -> TupleSpec:
    """Closed-form tuple of the order-``m`` local Dirichlet space at ``lam``.

    ``mu_i = C(i-1, m-1) prod_{j=i+1-m}^{m-1} (D+j) / (2m-1-i)! delta_lam``.
    """
    if m < 1:
        raise TupleError("m must be >= 1")
    lam = CirclePoint.of(lam)
    entries = [CircleDistribution.lebesgue(1)]
    for i in range(1, 2 * m):
        npts = max(2 * m - i, 1)
        samples = []
        for k in range(npts):
            num = math.comb(i - 1, m - 1) * math.prod(k + j for j in range(i + 1 - m, m))
            q, r = divmod(num, math.factorial(2 * m - 1 - i))
            assert r == 0
            samples.append(q)
        entries.append(CircleDistribution(((lam, newton_fit(samples)),)))
    return TupleSpec(tuple(entries))


def binomial_identity_check(m: int, i: int, k_max: int) -> bool:
    """Exact check of ``sum_{l=m-1}^{i-1} (-1)^(i-1-l) C(i-m, i-1-l) C(l+k, m-1) = C(m+k-1, 2m-1-i)``."""
    if not m <= i <= 2 * m - 1:
        raise TupleError("need m <= i <= 2m - 1")
    for k in range(k_max + 1):
        lhs = sum(
            (-1) ** (i - 1 - l) * math.comb(i - m, i - 1 - l) * math.comb(l + k, m - 1) for l in range(m - 1, i)
        )
        if lhs != math.comb(m + k - 1, 2 * m - 1 - i):
            return False
    return True


# --------------------------------------------------------------------------- Dirichlet integrals


def dirichlet_weights(i: int, n: int, radius: float | None = None) -> np.ndarray:
    """``W[j, j'] = C(j,i) C(j',i) / C(max(j,j'), i)`` for ``j, j' < n``.

    With ``radius`` the radial integral is cut at ``|z| = radius``, which
    multiplies each entry by ``I_{radius^2}(max(j,j') - i + 1, i)``.
    """
    W = np.zeros((n, n))
    for j in range(i, n):
        for jp in range(i, n):
            M = max(j, jp)
            W[j, jp] = math.comb(j, i) * math.comb(jp, i) / math.comb(M, i)
            if radius is not None:
                W[j, jp] *= betainc(M - i + 1, i, radius**2)
    return W


def _fourier_matrix(mu: CircleDistribution, n: int) -> np.ndarray:
    F = np.empty((n, n), dtype=complex)
    vals = {k: complex(mu.fourier(k)) for k in range(-(n - 1), n)}
    for j in range(n):
        for jp in range(n):
            F[j, jp] = vals[jp - j]
    return F


def _sesq_matrix(mu: CircleDistribution, i: int, n: int, radius=None) -> np.ndarray:
    """``B[j, j']`` with ``D_{mu,i}(f, g) = sum f_j conj(g_j') B[j, j']``."""
    if i == 0:
        if not mu.is_lebesgue:
            raise TupleError("order-0 integral is only supported for Lebesgue measure")
        return mu.lebesgue_weight * np.eye(n, dtype=complex)
    if mu.is_zero:
        return np.zeros((n, n), dtype=complex)
    return _fourier_matrix(mu, n) * dirichlet_weights(i, n, radius)


def dirichlet_integral(mu: CircleDistribution, i: int, f, radius: float | None = None) -> float:
    """Order-``i`` Dirichlet integral of a polynomial against ``mu``."""
    if i < 0:
        raise TupleError("order must be >= 0")
    c = np.asarray(f.coeffs if isinstance(f, ComplexPoly) else ComplexPoly(f).coeffs, dtype=complex)
    B = _sesq_matrix(mu, i, len(c), radius)
    val = complex(c @ B @ c.conj())
    scale = float(np.abs(c) @ np.abs(B) @ np.abs(c))
    if mu.is_positive_measure() and val.real < -1e-10 * max(scale, 1.0):
        raise ArithmeticError(f"negative Dirichlet integral {val.real} for a positive measure")
    return float(val.real)


def vecmu_gram(t: TupleSpec, N: int) -> np.ndarray:
    """``G[a, b] = <z^a, z^b>`` for ``a, b <= N`` in the tuple norm."""
    G = np.zeros((N + 1, N + 1), dtype=complex)
    for i, mu in enumerate(t.entries):
        G += _sesq_matrix(mu, i, N + 1)
    return G


def vecmu_norm(t: TupleSpec, f) -> float:
    """``sum_i D_{mu_i, i}(f)``."""
    return float(sum(dirichlet_integral(mu, i, f) for i, mu in enumerate(t.entries)))


def tuple_product(t: TupleSpec) -> InnerProduct:
    """Polarized tuple norm as an :class:`~dbr.defect.InnerProduct`."""

    def fn(f, g):
        f = f if isinstance(f, ComplexPoly) else ComplexPoly(f)
        g = g if isinstance(g, ComplexPoly) else ComplexPoly(g)
        n = max(len(f.coeffs), len(g.coeffs))
        return complex(f.padded(n) @ vecmu_gram(t, n - 1) @ g.padded(n).conj())

    return InnerProduct(fn, "tuple", lambda N: vecmu_gram(t, N))


def norm_crosscheck(lam, p, m: int, f) -> tuple[float, float]:
    """Tuple norm of the rank-one tuple versus ``||f||^2 + D^m_lam(p f)``."""
    lam = CirclePoint.of(lam)
    p = p if isinstance(p, ComplexPoly) else ComplexPoly(p)
    f = f if isinstance(f, ComplexPoly) else ComplexPoly(f)
    lhs = vecmu_norm(rank_one_tuple(lam, p, m), f)
    rhs = float(h2_inner(f, f).real) + local_dirichlet_m(p * f, complex(lam), m).value
    return lhs, rhs


# --------------------------------------------------------------------------- allowability


@dataclass
class AllowabilityCertificate:
    """Truncation-level evidence that a tuple defines a bounded shift.

    ``min_eig`` is the smallest Gram eigenvalue over ``scale``; ``shift_bound``
    is the largest generalized eigenvalue of ``(G_shift, G)``.
    """

    N: int
    scale: float
    min_eig: float
    positive: bool
    shift_bound: float | None
    details: dict = field(default_factory=dict)


def allowability_certificate(t: TupleSpec, N: int = 30, tol: float = 1e-8) -> AllowabilityCertificate:
    G = vecmu_gram(t, N + 1)
    G = 0.5 * (G + G.conj().T)
    base, shifted = G[: N + 1, : N + 1], G[1:, 1:]
    scale = float(np.max(np.abs(base)))
    eig = np.linalg.eigvalsh(base)
    min_rel = float(eig.min() / scale)
    positive = min_rel >= -tol
    bound = None
    if eig.min() > tol * scale:
        bound = float(eigh(shifted, base, eigvals_only=True).max())
    return AllowabilityCertificate(N, scale, min_rel, positive, bound, {"gram_cond": float(eig.max() / max(eig.min(), 1e-300))})
