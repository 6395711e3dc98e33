"""Complex polynomials, Hermitian Laurent polynomials on the circle, root
finding and Fejér–Riesz factorization.

Coefficient arrays are always ascending: ``coeffs[j]`` multiplies ``z**j``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ComplexPoly",
    "HermitianLaurent",
    "RootSet",
    "RootFindingError",
    "FactorizationError",
    "poly_arith",
    "taylor_shift",
    "laurent_modulus_product",
    "poly_roots",
    "fejer_riesz",
    "fejer_riesz_residual",
    "divide_exact",
    "DivisionError",
]


class RootFindingError(ArithmeticError):
    """Raised when no root finder reaches the requested residual."""


class FactorizationError(ArithmeticError):
    """Raised when a trigonometric polynomial cannot be written as ``|q|**2``."""


class DivisionError(ArithmeticError):
    """Raised when a division that should be exact leaves a remainder."""


def _as_coeffs(values) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=complex)).ravel()
    if arr.size == 0:
        arr = np.zeros(1, dtype=complex)
    nz = np.flatnonzero(arr)
    top = nz[-1] + 1 if nz.size else 1
    out = arr[:top].copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ComplexPoly:
    """Polynomial with complex coefficients.

    Exact zeros at the top are stripped on construction, so ``degree`` is the
    index of the last nonzero coefficient (``0`` for the zero polynomial).
    """

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @classmethod
    def constant(cls, c) -> "ComplexPoly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "ComplexPoly":
        arr = np.zeros(k + 1, dtype=complex)
        arr[k] = c
        return cls(arr)

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead=1.0) -> "ComplexPoly":
        out = np.array([lead], dtype=complex)
        for r in roots:
            out = np.convolve(out, [-r, 1.0])
        return cls(out)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> complex:
        return complex(self.coeffs[-1])

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc if acc.ndim else complex(acc)

    def __add__(self, other):
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros(n, dtype=complex)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return ComplexPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            return ComplexPoly(np.convolve(self.coeffs, other.coeffs))
        return ComplexPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return ComplexPoly(self.coeffs / complex(scalar))

    def __repr__(self):
        return f"ComplexPoly({np.array2string(self.coeffs, precision=6)})"

    def conj(self) -> "ComplexPoly":
        """Polynomial with conjugated coefficients, ``z -> conj(p(conj(z)))``."""
        return ComplexPoly(np.conj(self.coeffs))

    def reflect(self, n: int | None = None) -> "ComplexPoly":
        """``z**n * conj(p(1/conj(z)))`` (reversed conjugate coefficients)."""
        n = self.degree if n is None else n
        if n < self.degree:
            raise ValueError("reflection degree below polynomial degree")
        out = np.zeros(n + 1, dtype=complex)
        out[: len(self.coeffs)] = np.conj(self.coeffs)
        return ComplexPoly(out[::-1])

    def deriv(self, k: int = 1) -> "ComplexPoly":
        c = self.coeffs
        for _ in range(k):
            if len(c) <= 1:
                return ComplexPoly([0])
            c = c[1:] * np.arange(1, len(c))
        return ComplexPoly(c)

    def padded(self, length: int) -> np.ndarray:
        """Coefficients zero-padded (or checked) to ``length`` entries."""
        if length < len(self.coeffs):
            raise ValueError(f"degree {self.degree} does not fit in {length} coefficients")
        out = np.zeros(length, dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def trimmed(self, tol: float) -> "ComplexPoly":
        """Drop top coefficients below ``tol * max|coeff|``."""
        scale = np.max(np.abs(self.coeffs))
        keep = np.flatnonzero(np.abs(self.coeffs) > tol * scale)
        if keep.size == 0:
            return ComplexPoly([0])
        return ComplexPoly(self.coeffs[: keep[-1] + 1])

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector (the H2 norm)."""
        return float(np.linalg.norm(self.coeffs))

    def allclose(self, other, atol=1e-12) -> bool:
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return bool(np.allclose(self.padded(n), other.padded(n), rtol=0, atol=atol))


def _coerce(x) -> ComplexPoly:
    return x if isinstance(x, ComplexPoly) else ComplexPoly([x])


def poly_arith(a: ComplexPoly, b: ComplexPoly, op: str) -> ComplexPoly:
    """Add, subtract or multiply two polynomials (``op`` in add/sub/mul)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def taylor_shift(p: ComplexPoly, lam: complex) -> ComplexPoly:
    """Coefficients of ``w -> p(w + lam)``, i.e. the Taylor coefficients at ``lam``."""
    c = np.array(p.coeffs, dtype=complex)
    n = len(c)
    # repeated synthetic division by (z - lam)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += lam * c[j + 1]
    return ComplexPoly(c)


def divide_exact(num: ComplexPoly, den: ComplexPoly, rtol: float = 1e-9) -> ComplexPoly:
    """Quotient ``num / den`` for a division known to be exact.

    Raises
    ------
    DivisionError
        If the remainder exceeds ``rtol * ||num||``.
    """
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.degree < den.degree:
        if not num.is_zero():
            raise DivisionError("numerator degree below denominator degree")
        return ComplexPoly([0])
    r = np.array(num.coeffs, dtype=complex)
    d = den.coeffs
    dn = len(d) - 1
    q = np.zeros(len(r) - dn, dtype=complex)
    for k in range(len(q) - 1, -1, -1):
        q[k] = r[k + dn] / d[-1]
        r[k : k + dn + 1] -= q[k] * d
    rem = np.max(np.abs(r[:dn])) if dn else 0.0
    scale = max(num.norm(), 1e-300)
    if rem > rtol * scale:
        raise DivisionError(f"remainder {rem:.3e} exceeds {rtol:.1e} * {scale:.3e}")
    return ComplexPoly(q)


# --------------------------------------------------------------------------
# Laurent polynomials on the circle
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HermitianLaurent:
    """Laurent polynomial ``sum_{k=-n}^{n} r_k z**k`` with ``r_{-k} = conj(r_k)``.

    Stored as the full length ``2n+1`` array with ``coeffs[n + k] = r_k``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex).ravel()
        if arr.size % 2 != 1:
            raise ValueError("Laurent coefficient array must have odd length")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        if not self.is_hermitian():
            raise ValueError("coefficients are not Hermitian: r[-k] != conj(r[k])")

    @classmethod
    def from_nonnegative(cls, pos: Sequence[complex]) -> "HermitianLaurent":
        """Build from ``r_0, r_1, ..., r_n``; ``r_0`` must be real."""
        pos = np.asarray(pos, dtype=complex)
        full = np.concatenate([np.conj(pos[:0:-1]), [pos[0].real], pos[1:]])
        return cls(full)

    @property
    def n(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def r(self, k: int) -> complex:
        if abs(k) > self.n:
            return 0j
        return complex(self.coeffs[self.n + k])

    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.coeffs, np.conj(self.coeffs[::-1])))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        k = np.arange(-self.n, self.n + 1)
        return np.sum(self.coeffs * z[..., None] ** k, axis=-1)

    def on_circle(self, m: int = 256) -> np.ndarray:
        """Real values at the ``m`` equispaced points ``exp(2 pi i j/m)``."""
        z = np.exp(2j * np.pi * np.arange(m) / m)
        return self(z).real

    def trimmed(self, tol: float = 1e-14) -> "HermitianLaurent":
        """Drop outer coefficient pairs below ``tol * max|r_k|``."""
        mag = np.abs(self.coeffs[self.n :])
        keep = np.flatnonzero(mag > tol * mag.max())
        top = keep[-1] if keep.size else 0
        return HermitianLaurent(self.coeffs[self.n - top : self.n + top + 1])

    def as_polynomial(self) -> ComplexPoly:
        """``z**n * R(z)`` as an ordinary polynomial of degree ``2n``."""
        return ComplexPoly(self.coeffs)


def _circle_factor(lam: complex) -> np.ndarray:
    # |z - lam|^2 on the circle = (1+|lam|^2) - lam*conj(z) - conj(lam)*z
    lam = complex(lam)
    return np.array([-lam, 1 + abs(lam) ** 2, -lam.conjugate()], dtype=complex)


def laurent_modulus_product(atoms: Sequence[complex], weights: Sequence[float]) -> HermitianLaurent:
    """Laurent form of ``prod|z-l_i|^2 + sum_i c_i prod_{j!=i}|z-l_j|^2`` on the circle."""
    atoms = [complex(a) for a in atoms]
    weights = [float(c) for c in weights]
    if len(atoms) != len(weights):
        raise ValueError("atoms and weights differ in length")
    if not atoms:
        raise ValueError("at least one atom is required")
    if any(c <= 0 for c in weights):
        raise ValueError("weights must be strictly positive")
    for i in range(len(atoms)):
        for j in range(i):
            if atoms[i] == atoms[j]:
                raise ValueError(f"duplicate atom {atoms[i]}")
    n = len(atoms)
    factors = [_circle_factor(a) for a in atoms]

    def prod(skip=None):
        acc = np.array([1.0 + 0j])
        for i, f in enumerate(factors):
            if i != skip:
                acc = np.convolve(acc, f)
        return acc

    total = prod()  # length 2n+1
    for i, c in enumerate(weights):
        total[1:-1] += c * prod(skip=i)
    # rebuild from the nonnegative side so that Hermitian symmetry is exact
    return HermitianLaurent.from_nonnegative(total[n:])


# --------------------------------------------------------------------------
# roots
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RootSet:
    """Roots of a polynomial, with the worst scaled residual."""

    roots: np.ndarray
    residual: float
    method: str = "aberth"

    def __len__(self):
        return len(self.roots)


def _scaled_residuals(p: ComplexPoly, roots: np.ndarray) -> np.ndarray:
    # backward error |p(r)| / sum |c_j| |r|^j; stays meaningful when the
    # leading coefficient is tiny compared with the others
    vals = np.abs(p(roots))
    scale = ComplexPoly(np.abs(p.coeffs))(np.abs(roots)).real
    return vals / np.maximum(scale, 1e-300)


def _order_roots(roots: np.ndarray) -> np.ndarray:
    # modulus rounded so that roots on a common circle sort by argument
    keys = sorted(
        range(len(roots)),
        key=lambda i: (round(abs(roots[i]), 10), cmath.phase(roots[i]) % (2 * math.pi)),
    )
    return roots[keys]


def _aberth(c: np.ndarray, maxiter: int = 500) -> tuple[np.ndarray, bool]:
    n = len(c) - 1
    dc = c[1:] * np.arange(1, n + 1)
    # initial guesses on a circle of radius from the constant/leading ratio
    radius = abs(c[0] / c[-1]) ** (1.0 / n) if c[0] != 0 else 1.0
    radius = max(radius, 1e-3)
    centre = -c[-2] / (n * c[-1])
    z = centre + radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))

    def horner(coeffs, x):
        acc = np.zeros_like(x)
        for a in coeffs[::-1]:
            acc = acc * x + a
        return acc

    for _ in range(maxiter):
        pv = horner(c, z)
        dv = horner(dc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= 4 * np.finfo(float).eps * np.maximum(np.abs(z), 1e-300)):
            return z, True
    return z, False


def poly_roots(p: ComplexPoly, tol: float = 1e-8, maxiter: int = 500) -> RootSet:
    """All roots of ``p`` (degree >= 1), ordered by modulus then argument.

    Aberth–Ehrlich simultaneous iteration is tried first; the companion
    matrix eigenvalues are the fallback.  The residual reported is the
    backward error ``max |p(r)| / sum_j |c_j| |r|**j``.
    """
    if p.degree < 1:
        raise ValueError("polynomial degree must be at least 1")
    c = np.array(p.coeffs, dtype=complex)
    # zero roots are exact; deflate them away
    nzero = int(np.flatnonzero(c)[0])
    core = c[nzero:]
    attempts = []
    if len(core) > 1:
        z, _ = _aberth(core, maxiter)
        attempts.append(("aberth", z))
        comp = np.roots(core[::-1]).astype(complex)
        attempts.append(("companion", comp))
    else:
        attempts.append(("trivial", np.zeros(0, dtype=complex)))

    best = None
    for method, z in attempts:
        roots = np.concatenate([np.zeros(nzero, dtype=complex), z])
        res = float(np.max(_scaled_residuals(p, roots))) if roots.size else 0.0
        if best is None or res < best[1]:
            best = (method, res, roots)
        if res <= tol:
            return RootSet(_order_roots(roots), res, method)
    method, res, roots = best
    raise RootFindingError(
        f"root residual {res:.3e} above tolerance {tol:.1e} (degree {p.degree}, best method {method})"
    )


# --------------------------------------------------------------------------
# Fejér–Riesz
# --------------------------------------------------------------------------


def fejer_riesz(R: HermitianLaurent, margin: float = 1e-8, grid: int = 256,
                rtol: float = 1e-10) -> ComplexPoly:
    """Outer factor ``q`` with ``|q|**2 = R`` on the circle and ``q(0) > 0``.

    The roots of ``z**n R(z)`` come in pairs ``(zeta, 1/conj(zeta))``; the
    ones outside the closed disk are kept.

    Raises
    ------
    FactorizationError
        If ``R`` is not strictly positive on the circle, if the roots do not
        split evenly across the circle, or if the final residual on the
        sampling grid exceeds ``rtol * max R``.
    """
    vals = R.on_circle(grid)
    if np.min(vals) <= 0:
        raise FactorizationError(f"R is not strictly positive on the circle (min {np.min(vals):.3e})")
    R = R.trimmed()
    n = R.n
    if n == 0:
        q = ComplexPoly([math.sqrt(R.r(0).real)])
        return q
    rs = poly_roots(R.as_polynomial())
    mods = np.abs(rs.roots)
    if np.any(np.abs(mods - 1.0) <= margin):
        raise FactorizationError("R has roots on the unit circle")
    outside = rs.roots[mods > 1.0]
    inside = rs.roots[mods < 1.0]
    if len(outside) != n or len(inside) != n:
        raise FactorizationError(
            f"root pairing failed: {len(outside)} outside, {len(inside)} inside, expected {n} each"
        )
    # average each outside root with the reflection of its partner
    refl = 1.0 / np.conj(inside)
    paired = np.empty(n, dtype=complex)
    used = np.zeros(n, dtype=bool)
    for i, zeta in enumerate(outside):
        d = np.abs(refl - zeta)
        d[used] = np.inf
        j = int(np.argmin(d))
        used[j] = True
        paired[i] = 0.5 * (zeta + refl[j])
    # q(z) = s * prod(1 - z/zeta), so q(0) = s > 0
    monic = ComplexPoly([1.0])
    for zeta in paired:
        monic = monic * ComplexPoly([1.0, -1.0 / zeta])
    z = np.exp(2j * np.pi * np.arange(grid) / grid)
    s2 = np.mean(vals) / np.mean(np.abs(monic(z)) ** 2)
    q = monic * math.sqrt(s2)
    resid = np.max(np.abs(np.abs(q(z)) ** 2 - vals))
    if resid > rtol * np.max(np.abs(vals)):
        raise FactorizationError(f"factorization residual {resid:.3e} too large")
    return q


def fejer_riesz_residual(R: HermitianLaurent, q: ComplexPoly, grid: int = 256) -> float:
    """``max | |q|**2 - R |`` over ``grid`` points of the circle."""
    z = np.exp(2j * np.pi * np.arange(grid) / grid)
    return float(np.max(np.abs(np.abs(q(z)) ** 2 - R(z).real)))
