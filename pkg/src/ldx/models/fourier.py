"""Twisted transfer operators of analytic expanding circle maps, in a Fourier basis.

The operator  (L_z u)(x) = sum over branches f(y)=x of e^{z g(y)} u(y) / f'(y)
is discretized by collocation: evaluate L_z e_n on a uniform grid and read off
Fourier modes by FFT, keeping |m|, |n| <= m_max.  The complex-exponential
matrix is then conjugated into the real trigonometric basis
(1, cos, sin, cos 2, sin 2, ...) so that the family is entrywise real on the
real axis, like every other backend.

The functional is integration against the initial density and the vector is
the constant function, so the amplitude ell(Pi_theta v) matches the
rho-weighted eigenfunction average; with the uniform density this coincides
with the plain transfer-operator encoding.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError, ModelError
from ..spectral import OperatorTriple
from .base import AnalyticFamily

_TWO_PI = 2.0 * math.pi


class TrigPoly:
    """Real trigonometric polynomial c0 + sum_j (c_j cos 2*pi*j*x + s_j sin 2*pi*j*x)."""

    def __init__(self, cos=(0.0,), sin=()):
        cos = [float(c) for c in cos] or [0.0]
        sin = [float(s) for s in sin]
        # pad so both carry the same number of harmonics
        order = max(len(cos) - 1, len(sin))
        cos += [0.0] * (order + 1 - len(cos))
        sin += [0.0] * (order - len(sin))
        self.cos = np.asarray(cos)
        self.sin = np.asarray([0.0] + sin)  # index j >= 1 meaningful
        self.order = order

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, self.cos[0])
        for j in range(1, self.order + 1):
            out = out + self.cos[j] * np.cos(_TWO_PI * j * x) + self.sin[j] * np.sin(_TWO_PI * j * x)
        return out

    def deriv_bound(self) -> float:
        """Upper bound on max |g'|."""
        j = np.arange(self.order + 1)
        return float(_TWO_PI * np.sum(j * (np.abs(self.cos) + np.abs(self.sin))))

    def osc_bound(self) -> float:
        """Upper bound on max g - min g."""
        return float(2.0 * np.sum(np.abs(self.cos[1:]) + np.abs(self.sin[1:])))

    def antiderivative(self, x):
        """Integral from 0 to x (not periodic unless the mean vanishes)."""
        x = np.asarray(x, dtype=float)
        out = self.cos[0] * x
        for j in range(1, self.order + 1):
            w = _TWO_PI * j
            out = out + self.cos[j] * np.sin(w * x) / w + self.sin[j] * (1.0 - np.cos(w * x)) / w
        return out

    def mean(self) -> float:
        return float(self.cos[0])


class DoublingMap:
    """x -> 2x mod 1."""

    n_branches = 2
    expansion_min = 2.0
    expansion_max = 2.0

    def apply(self, x):
        return np.mod(2.0 * np.asarray(x, dtype=float), 1.0)

    def branches(self, x):
        x = np.asarray(x, dtype=float)
        out = []
        for b in range(2):
            y = 0.5 * (x + b)
            out.append((y, np.full_like(y, 2.0)))
        return out


class PerturbedDoublingMap:
    """x -> 2x + eps*sin(2*pi*x)/(2*pi) mod 1, expanding for |eps| < 1."""

    n_branches = 2

    def __init__(self, eps: float):
        if abs(eps) >= 1.0:
            raise ModelError("perturbation must satisfy |eps| < 1 to keep the map expanding")
        self.eps = float(eps)
        self.expansion_min = 2.0 - abs(self.eps)
        self.expansion_max = 2.0 + abs(self.eps)

    def _lift(self, y):
        return 2.0 * y + self.eps * np.sin(_TWO_PI * y) / _TWO_PI

    def _dlift(self, y):
        return 2.0 + self.eps * np.cos(_TWO_PI * y)

    def apply(self, x):
        return np.mod(self._lift(np.asarray(x, dtype=float)), 1.0)

    def branches(self, x):
        x = np.asarray(x, dtype=float)
        out = []
        for b in range(2):
            target = x + b
            y = 0.5 * target
            for _ in range(60):
                step = (self._lift(y) - target) / self._dlift(y)
                y = y - step
                if np.max(np.abs(step)) < 1e-15:
                    break
            out.append((y, self._dlift(y)))
        return out


def make_map(name: str, params: dict | None = None):
    params = params or {}
    if name == "doubling":
        return DoublingMap()
    if name == "perturbed_doubling":
        return PerturbedDoublingMap(params.get("eps", 0.1))
    raise ConfigError(f"unknown circle map {name!r}")


class FourierTransferModel(AnalyticFamily):
    """Galerkin family for Birkhoff sums of g over an expanding circle map."""

    def __init__(self, circle_map, g: TrigPoly, rho: TrigPoly, m_max: int, K: int | None = None):
        if m_max < 1:
            raise ConfigError("m_max must be at least 1")
        K = 4 * m_max if K is None else int(K)
        if K < 4 * m_max:
            raise ConfigError(f"collocation grid K={K} violates the aliasing guard K >= 4*m_max")
        if rho.mean() <= 0:
            raise ModelError("initial density must have positive mean (it integrates to rho mean)")
        if abs(rho.mean() - 1.0) > 1e-12:
            raise ModelError("initial density must integrate to 1 (constant coefficient 1)")
        # crude positivity screen on a fine grid
        if np.min(rho(np.arange(8 * (rho.order + 1)) / (8.0 * (rho.order + 1)))) < -1e-12:
            raise ModelError("initial density is negative somewhere")

        self.map = circle_map
        self.g = g
        self.rho = rho
        self.m_max = int(m_max)
        self.K = K
        self.dim = 2 * m_max + 1

        grid = np.arange(K) / K
        self._branch_data = []
        for y, fp in circle_map.branches(grid):
            gy = g(y)
            # modes ordered [0, 1, -1, 2, -2, ...] to match the real basis
            n_list = self._n_list()
            E = np.exp(2j * math.pi * np.outer(y, n_list))
            self._branch_data.append((gy, fp, E))

        self._row_idx = np.array([n % K for n in self._n_list()])
        T, Tinv = self._basis_change()
        self._T = T
        self._Tinv = Tinv
        self._ell = self._real_functional()
        self._v = np.zeros(self.dim, dtype=complex)
        self._v[0] = 1.0

    def _n_list(self):
        out = [0]
        for j in range(1, self.m_max + 1):
            out.extend((j, -j))
        return np.array(out)

    def _basis_change(self):
        d = self.dim
        T = np.zeros((d, d), dtype=complex)
        Tinv = np.zeros((d, d), dtype=complex)
        T[0, 0] = 1.0
        Tinv[0, 0] = 1.0
        for j in range(1, self.m_max + 1):
            ip, im = 2 * j - 1, 2 * j          # complex slots for +j, -j
            rc, rs = 2 * j - 1, 2 * j          # real slots for cos j, sin j
            T[rc, ip] = 1.0
            T[rc, im] = 1.0
            T[rs, ip] = 1j
            T[rs, im] = -1j
            Tinv[ip, rc] = 0.5
            Tinv[ip, rs] = -0.5j
            Tinv[im, rc] = 0.5
            Tinv[im, rs] = 0.5j
        return T, Tinv

    def _real_functional(self):
        ell = np.zeros(self.dim, dtype=complex)
        ell[0] = self.rho.cos[0]
        for j in range(1, self.m_max + 1):
            if j <= self.rho.order:
                ell[2 * j - 1] = 0.5 * self.rho.cos[j]
                ell[2 * j] = 0.5 * self.rho.sin[j]
        return ell

    def evaluate(self, z: complex) -> OperatorTriple:
        z = complex(z)
        C = None
        for gy, fp, E in self._branch_data:
            amp = np.exp(z * gy) / fp
            contrib = amp[:, None] * E
            C = contrib if C is None else C + contrib
        modes = np.fft.fft(C, axis=0) / self.K
        Mc = modes[self._row_idx, :]
        M = self._T @ Mc @ self._Tinv
        return OperatorTriple(M, self._ell, self._v)

    def ldp_range(self):
        gmax = max(abs(self.g(np.arange(4096) / 4096.0).max()),
                   abs(self.g(np.arange(4096) / 4096.0).min()), 1e-9)
        return self.ldp_range_proxy(min(32.0, 500.0 / gmax))
