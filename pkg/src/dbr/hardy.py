"""Hardy-space inner products and local Dirichlet forms for rational functions.

Everything here acts on :class:`StableRational`, a quotient ``num/den`` whose
denominator has no zeros in the closed unit disk, so that the function is
analytic across the circle and every point value ``f(lam)``, ``|lam| <= 1``,
exists.  Local Dirichlet integrals are therefore always finite for this type.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.signal import lfilter

from .poly import ComplexPoly, divide_exact, poly_roots, taylor_shift

__all__ = [
    "StableRational",
    "AtomicMeasure",
    "as_rational",
    "h2_inner",
    "h2_inner_bound",
    "difference_quotient",
    "local_dirichlet",
    "local_dirichlet_m",
    "LocalDirichletM",
    "dmu_inner",
]

H2_TAIL_RTOL = 1e-14
MAX_TERMS = 1 << 22


@dataclass(frozen=True, eq=False)
class StableRational:
    """``num/den`` with ``den`` zero-free on the closed unit disk.

    The pair is rescaled on construction so that ``den(0)`` is a positive real.
    """

    num: ComplexPoly
    den: ComplexPoly

    def __post_init__(self):
        num = self.num if isinstance(self.num, ComplexPoly) else ComplexPoly(self.num)
        den = self.den if isinstance(self.den, ComplexPoly) else ComplexPoly(self.den)
        d0 = den.coeffs[0]
        if d0 == 0:
            raise ValueError("denominator vanishes at 0")
        phase = abs(d0) / d0
        num, den = num * phase, den * phase
        if den.degree >= 1:
            roots = poly_roots(den).roots
            rho = float(np.min(np.abs(roots)))
            if rho <= 1.0:
                raise ValueError(f"denominator has a zero in the closed disk (|root| = {rho:.6g})")
        else:
            roots = np.zeros(0, dtype=complex)
            rho = math.inf
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_roots", roots)
        object.__setattr__(self, "_rho", rho)

    @classmethod
    def poly(cls, p) -> "StableRational":
        p = p if isinstance(p, ComplexPoly) else ComplexPoly(p)
        return cls(p, ComplexPoly([1.0]))

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @property
    def min_pole_modulus(self) -> float:
        return self._rho

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def __add__(self, other):
        other = as_rational(other)
        if _same_poly(self.den, other.den):
            return StableRational(self.num + other.num, self.den)
        return StableRational(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return StableRational(-self.num, self.den)

    def __sub__(self, other):
        return self + (-as_rational(other))

    def __mul__(self, other):
        if isinstance(other, StableRational):
            return StableRational(self.num * other.num, self.den * other.den)
        if isinstance(other, ComplexPoly):
            return StableRational(self.num * other, self.den)
        return StableRational(self.num * complex(other), self.den)

    __rmul__ = __mul__

    def __repr__(self):
        return f"StableRational(num={self.num.coeffs!r}, den={self.den.coeffs!r})"

    def taylor(self, K: int) -> np.ndarray:
        """First ``K`` Taylor coefficients at the origin."""
        if self.is_polynomial:
            out = np.zeros(K, dtype=complex)
            c = self.num.coeffs[:K] / self.den.coeffs[0]
            out[: len(c)] = c
            return out
        impulse = np.zeros(K, dtype=complex)
        impulse[0] = 1.0
        return lfilter(self.num.coeffs, self.den.coeffs, impulse)

    def _tail_sq(self, K: int) -> float:
        """Certified bound on ``sum_{k>=K} |f_k|**2`` via Cauchy estimates."""
        if self.is_polynomial:
            return 0.0 if K > self.num.degree else math.inf
        rho = self._rho
        lead = abs(self.den.lead)
        anum = np.abs(self.num.coeffs)
        best = math.inf
        for t in (0.25, 0.5, 0.75, 0.9):
            r = rho**t
            # |num| <= sum |a_j| r^j ; |den| >= |lead| prod(|zeta| - r)
            top = float(np.sum(anum * r ** np.arange(len(anum))))
            bottom = lead * float(np.prod(np.abs(self._roots) - r))
            M = top / bottom
            with np.errstate(over="ignore", under="ignore"):
                val = M * M * r ** (-2.0 * K) / (1.0 - r**-2)
            best = min(best, val)
        return best

    def _terms_for(self, tail_sq: float) -> int:
        if self.is_polynomial:
            return self.num.degree + 1
        K = 16
        while self._tail_sq(K) > tail_sq:
            K *= 2
            if K > MAX_TERMS:
                raise ArithmeticError("H2 series truncation exceeds the term cap; pole too close to the circle")
        return K


def _same_poly(a: ComplexPoly, b: ComplexPoly) -> bool:
    return a.degree == b.degree and np.array_equal(a.coeffs, b.coeffs)


def as_rational(x) -> StableRational:
    """Coerce a scalar, coefficient list, polynomial or rational."""
    if isinstance(x, StableRational):
        return x
    if isinstance(x, ComplexPoly):
        return StableRational.poly(x)
    if np.isscalar(x):
        return StableRational.poly([x])
    return StableRational.poly(ComplexPoly(x))


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely atomic measure ``sum c_i delta_{lam_i}`` on the closed disk."""

    atoms: tuple
    weights: tuple

    def __post_init__(self):
        atoms = []
        for a in self.atoms:
            a = complex(a)
            r = abs(a)
            if r > 1.0 + 1e-12:
                raise ValueError(f"atom {a} lies outside the closed disk")
            if r > 1.0:
                a = a / r
            atoms.append(a)
        weights = tuple(float(c) for c in self.weights)
        if len(atoms) != len(weights):
            raise ValueError("atoms and weights differ in length")
        if not atoms:
            raise ValueError("measure needs at least one atom")
        if any(not (c > 0) for c in weights):
            raise ValueError("weights must be strictly positive")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atoms must be distinct")
        object.__setattr__(self, "atoms", tuple(atoms))
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return len(self.atoms)

    def integrate_abs2(self, f) -> float:
        """``sum c_i |f(lam_i)|**2``."""
        return float(sum(c * abs(f(a)) ** 2 for a, c in zip(self.atoms, self.weights)))


def h2_inner_bound(f, g) -> tuple[complex, float]:
    """H2 inner product ``sum f_k conj(g_k)`` and a bound on the truncation error."""
    f, g = as_rational(f), as_rational(g)
    if f.is_polynomial and g.is_polynomial:
        n = min(f.num.degree, g.num.degree) + 1
        val = np.vdot(g.taylor(n), f.taylor(n))
        return complex(val), 0.0
    # coarse pass to estimate the norms, then tighten against them
    K = max(f._terms_for(1e-16 * _cauchy_scale(f)), g._terms_for(1e-16 * _cauchy_scale(g)))
    while True:
        fk, gk = f.taylor(K), g.taylor(K)
        nf, ng = np.linalg.norm(fk), np.linalg.norm(gk)
        bound = math.sqrt(f._tail_sq(K) * g._tail_sq(K)) if not (f.is_polynomial or g.is_polynomial) else 0.0
        if bound <= H2_TAIL_RTOL * (1.0 + nf * ng):
            return complex(np.vdot(gk, fk)), bound
        K *= 2
        if K > MAX_TERMS:
            raise ArithmeticError("H2 truncation did not reach the requested accuracy")


def _cauchy_scale(f: StableRational) -> float:
    return max(1.0, f._tail_sq(0))


def h2_inner(f, g) -> complex:
    """``<f, g>`` in H2, linear in ``f`` and conjugate-linear in ``g``."""
    return h2_inner_bound(f, g)[0]


def difference_quotient(f, lam: complex, rtol: float = 1e-9) -> StableRational:
    """``(f(z) - f(lam)) / (z - lam)`` as a rational function.

    Raises :class:`~dbr.poly.DivisionError` when the polynomial division is
    not exact to ``rtol`` relative to the numerator.
    """
    f = as_rational(f)
    lam = complex(lam)
    value = f(lam)
    top = f.num - f.den * value
    if top.norm() <= 1e-15 * max(f.num.norm(), 1e-300):
        return StableRational.poly([0])
    quot = divide_exact(top, ComplexPoly([-lam, 1.0]), rtol=rtol)
    return StableRational(quot, f.den)


def local_dirichlet(f, g, lam: complex) -> complex:
    """Polarized local Dirichlet form ``<F, G>_{H2}`` of the difference quotients at ``lam``."""
    return h2_inner(difference_quotient(f, lam), difference_quotient(g, lam))


class LocalDirichletM(NamedTuple):
    taylor: ComplexPoly  # T_{m-1}(f, lam) in powers of z
    h: StableRational
    value: float


def _series_div(num: np.ndarray, den: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(m, dtype=complex)
    for k in range(m):
        acc = num[k] if k < len(num) else 0.0
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out[k] = acc / den[0]
    return out


def local_dirichlet_m(f, lam: complex, m: int, rtol: float = 1e-9) -> LocalDirichletM:
    """Order-``m`` local Dirichlet integral at a circle point.

    Writes ``f = T_{m-1}(f, lam) + (z - lam)**m h`` and returns the Taylor
    polynomial, ``h`` and ``||h||**2``.
    """
    if m < 1:
        raise ValueError("order m must be >= 1")
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError("higher order local Dirichlet integrals need |lam| = 1")
    f = as_rational(f)
    t = _series_div(taylor_shift(f.num, lam).coeffs, taylor_shift(f.den, lam).coeffs, m)
    taylor = taylor_shift(ComplexPoly(t), -lam)
    top = f.num - taylor * f.den
    if top.norm() <= 1e-15 * max(f.num.norm(), 1e-300):
        h = StableRational.poly([0])
    else:
        h_num = divide_exact(top, ComplexPoly.from_roots([lam] * m), rtol=rtol)
        h = StableRational(h_num, f.den)
    return LocalDirichletM(taylor, h, float(h2_inner(h, h).real))


def dmu_inner(f, g, mu: AtomicMeasure) -> complex:
    """Inner product of the weighted Dirichlet space of an atomic measure."""
    f, g = as_rational(f), as_rational(g)
    total = h2_inner(f, g)
    for lam, c in zip(mu.atoms, mu.weights):
        total += c * local_dirichlet(f, g, lam)
    return complex(total)
