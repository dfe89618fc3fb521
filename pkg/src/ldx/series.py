"""Polynomial and graded-series algebra plus closed-form moment integrals.

Coefficients stay complex through the whole assembly; realness is enforced
only when a series is demoted to a real polynomial (``PolynomialR.from_complex``),
because the powers of i cancel only in the final sums.  Everything is plain
binary64, no arbitrary precision.

A graded series lives on a rectangular grid: ``coeffs[k][j]`` multiplies
``eps**k * s**j`` where ``eps`` plays the role of ``n**-0.5``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

_TWO_PI = 2.0 * math.pi

# Practical order bound for the closed-form moment integrals.
_MAX_MOMENT = 40


def _trim(coeffs) -> tuple:
    """Strip exactly-zero trailing coefficients."""
    n = len(coeffs)
    while n > 0 and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True)
class PolynomialC:
    """Polynomial in s with complex coefficients, ascending powers."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(tuple(complex(c) for c in self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "PolynomialC") -> "PolynomialC":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return PolynomialC(out)

    def scaled(self, c: complex) -> "PolynomialC":
        return PolynomialC([c * x for x in self.coeffs])

    def shifted(self, j: int) -> "PolynomialC":
        """Multiply by s**j."""
        if self.is_zero():
            return self
        return PolynomialC((0,) * j + self.coeffs)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs)) if self.coeffs else np.zeros_like(x)


def poly_mul(p: PolynomialC, q: PolynomialC) -> PolynomialC:
    """Convolution product."""
    if p.is_zero() or q.is_zero():
        return PolynomialC(())
    out = np.convolve(np.asarray(p.coeffs), np.asarray(q.coeffs))
    return PolynomialC(out.tolist())


@dataclass(frozen=True)
class PolynomialR:
    """Polynomial in x with real coefficients, ascending powers."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(tuple(float(c) for c in self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_complex(cls, p: PolynomialC, rel_tol: float = 1e-8) -> "PolynomialR":
        """Demote a complex polynomial whose imaginary parts are residue.

        The tolerance is relative to the largest coefficient magnitude.
        """
        if p.is_zero():
            return cls(())
        scale = max(abs(c) for c in p.coeffs)
        worst = max(abs(c.imag) for c in p.coeffs)
        if worst > rel_tol * scale:
            raise NumericalError(
                f"imaginary residue {worst:.3e} exceeds {rel_tol:.1e} x scale {scale:.3e}"
            )
        return cls(tuple(c.real for c in p.coeffs))

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs)) if self.coeffs else np.zeros_like(np.asarray(x, dtype=float))


class GradedSeries:
    """Truncated bivariate series: ``coeffs[k, j]`` multiplies eps**k * s**j."""

    __slots__ = ("order_eps", "order_s", "coeffs")

    def __init__(self, order_eps: int, order_s: int, coeffs=None):
        self.order_eps = int(order_eps)
        self.order_s = int(order_s)
        if coeffs is None:
            self.coeffs = np.zeros((self.order_eps + 1, self.order_s + 1), dtype=complex)
        else:
            c = np.asarray(coeffs, dtype=complex)
            if c.shape != (self.order_eps + 1, self.order_s + 1):
                raise ValueError(f"coefficient grid shape {c.shape} does not match orders")
            self.coeffs = c.copy()

    @classmethod
    def one(cls, order_eps: int, order_s: int) -> "GradedSeries":
        g = cls(order_eps, order_s)
        g.coeffs[0, 0] = 1.0
        return g

    def copy(self) -> "GradedSeries":
        return GradedSeries(self.order_eps, self.order_s, self.coeffs)

    def set_term(self, k: int, j: int, value: complex) -> None:
        if k <= self.order_eps and j <= self.order_s:
            self.coeffs[k, j] = value

    def eps_slice(self, k: int) -> PolynomialC:
        """The polynomial in s multiplying eps**k."""
        return PolynomialC(self.coeffs[k].tolist())

    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        _check_orders(self, other)
        return GradedSeries(self.order_eps, self.order_s, self.coeffs + other.coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedSeries)
            and self.order_eps == other.order_eps
            and self.order_s == other.order_s
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max())

    def __repr__(self) -> str:
        nz = int(np.count_nonzero(self.coeffs))
        return f"GradedSeries(order_eps={self.order_eps}, order_s={self.order_s}, nonzero={nz})"


def _check_orders(g: GradedSeries, h: GradedSeries) -> None:
    if g.order_eps != h.order_eps or g.order_s != h.order_s:
        raise ValueError("graded operands must share truncation orders")


def graded_mul(g: GradedSeries, h: GradedSeries) -> GradedSeries:
    """Product truncated to the common grid."""
    _check_orders(g, h)
    out = GradedSeries(g.order_eps, g.order_s)
    ncol = g.order_s + 1
    for k1 in range(g.order_eps + 1):
        row1 = g.coeffs[k1]
        if not row1.any():
            continue
        for k2 in range(g.order_eps + 1 - k1):
            row2 = h.coeffs[k2]
            if not row2.any():
                continue
            out.coeffs[k1 + k2, :] += np.convolve(row1, row2)[:ncol]
    return out


def graded_exp(g: GradedSeries) -> GradedSeries:
    """Formal exponential, truncated to the grid of ``g``.

    The constant term must vanish; a unit factor is the caller's business.
    """
    if g.coeffs[0, 0] != 0:
        raise ValueError("graded_exp requires a zero constant term")
    out = GradedSeries.one(g.order_eps, g.order_s)
    term = GradedSeries.one(g.order_eps, g.order_s)
    # every monomial of g has total degree >= 1, so powers beyond the grid vanish
    for m in range(1, g.order_eps + g.order_s + 2):
        term = graded_mul(term, g)
        term.coeffs /= m
        if not term.coeffs.any():
            break
        out.coeffs += term.coeffs
    return out


def validate_a_expansion(g: GradedSeries, tol: float = 0.0) -> None:
    """Assert the structure of a valid A-expansion on the coefficient grid.

    For every k the slice multiplying eps**k must vanish for s-powers above
    3k and for s-powers of parity opposite to k.
    """
    scale = max(g.max_abs(), 1.0)
    for k in range(g.order_eps + 1):
        for j in range(g.order_s + 1):
            if j > 3 * k or (j - k) % 2 != 0:
                if abs(g.coeffs[k, j]) > tol * scale:
                    raise NumericalError(
                        f"A-expansion structure violated at eps^{k} s^{j}: {g.coeffs[k, j]!r}"
                    )


def double_factorial(m: int) -> int:
    """(m)!! in exact integer arithmetic; (-1)!! = 0!! = 1."""
    if m < -1:
        raise ValueError("double factorial undefined below -1")
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def gaussian_moment(m: int, sigma2: float) -> float:
    """Closed form of ``integral of s**m * exp(-sigma2*s**2/2) over R``."""
    if sigma2 <= 0:
        raise ValueError("gaussian_moment requires sigma2 > 0")
    if m < 0 or m != int(m):
        raise ValueError("moment order must be a nonnegative integer")
    if m > _MAX_MOMENT:
        raise ValueError(f"moment order {m} exceeds the practical bound {_MAX_MOMENT}")
    if m % 2 == 1:
        return 0.0
    return math.sqrt(_TWO_PI / sigma2) * double_factorial(m - 1) / sigma2 ** (m // 2)


def exp_moment(j: int, theta: float) -> float:
    """Closed form of ``integral of x**j * exp(-theta*x) over (0, inf)``."""
    if theta <= 0:
        raise ValueError("exp_moment requires theta > 0")
    if j < 0 or j != int(j):
        raise ValueError("moment order must be a nonnegative integer")
    return math.factorial(j) / theta ** (j + 1)


def integrate_against_gaussian(p: PolynomialC, sigma2: float) -> complex:
    """``integral of p(s) * exp(-sigma2*s**2/2)``, exact via gaussian_moment."""
    return sum(
        (c * gaussian_moment(j, sigma2) for j, c in enumerate(p.coeffs) if c != 0),
        complex(0.0),
    )
