"""Concrete model backends: iid laws, finite Markov chains, Nystrom kernels.

Each backend realizes the moment-generating encoding E(e^{z S_N}) = ell(M(z)^N v):

* iid law on d atoms         -> 1x1 matrix [sum p_j e^{z a_j}], ell = v = [1]
* named analytic MGF          -> 1x1 matrix [M(z)]
* finite chain (P, h, mu0)    -> M_jk = p_jk e^{z h_jk}, ell = mu0, v = ones
* kernel chain on [0, 1]      -> Nystrom matrix M_ij = p(x_i, x_j) e^{z h(x_i, x_j)} w_j
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..errors import DomainError, ModelError
from ..spectral import OperatorTriple
from .base import AnalyticFamily

_ONE = np.ones(1, dtype=complex)


class IIDFiniteModel(AnalyticFamily):
    """iid increments on finitely many atoms."""

    def __init__(self, atoms, probs):
        atoms = np.asarray(atoms, dtype=float)
        probs = np.asarray(probs, dtype=float)
        if atoms.ndim != 1 or atoms.size < 2:
            raise ModelError("need at least 2 atoms")
        if probs.shape != atoms.shape:
            raise ModelError("atoms and probs must have equal length")
        if np.any(probs <= 0):
            raise ModelError("all probabilities must be positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ModelError(f"probabilities sum to {probs.sum()!r}, not 1")
        if len(set(atoms.tolist())) != atoms.size:
            raise ModelError("atoms must be distinct")
        self.atoms = atoms
        self.probs = probs
        self.dim = 1

    def evaluate(self, z: complex) -> OperatorTriple:
        self.check_domain(z)
        m = np.dot(self.probs, np.exp(complex(z) * self.atoms))
        return OperatorTriple(np.array([[m]]), _ONE, _ONE)

    def ldp_range(self):
        return float(self.atoms.min()), float(self.atoms.max())


class IIDMgfModel(AnalyticFamily):
    """iid increments given by an analytic moment generating function."""

    def __init__(self, mgf: Callable[[complex], complex], domain_halfwidth: float = math.inf,
                 name: str = "mgf"):
        self.mgf = mgf
        self.domain_halfwidth = float(domain_halfwidth)
        self.name = name
        self.dim = 1
        lam0 = complex(mgf(0.0))
        if abs(lam0 - 1.0) > 1e-8:
            raise ModelError(f"mgf(0) = {lam0!r}, expected 1 (not a probability law)")

    @classmethod
    def gaussian(cls, mu: float = 0.0, sigma2: float = 1.0) -> "IIDMgfModel":
        if sigma2 <= 0:
            raise ModelError("gaussian needs sigma2 > 0")
        return cls(lambda z: np.exp(mu * z + 0.5 * sigma2 * z * z), name="gaussian")

    @classmethod
    def tabulated_density(cls, x, density, nq: int = 256,
                          domain_halfwidth: float = math.inf) -> "IIDMgfModel":
        """Quadrature-backed MGF of a tabulated compactly supported density.

        The density is interpolated linearly between the samples and
        renormalized; the MGF is then entire, evaluated by Gauss-Legendre.
        """
        x = np.asarray(x, dtype=float)
        density = np.asarray(density, dtype=float)
        if x.ndim != 1 or x.size < 2 or density.shape != x.shape:
            raise ModelError("need matching 1-d sample arrays for the density")
        if np.any(np.diff(x) <= 0):
            raise ModelError("density grid must be strictly increasing")
        if np.any(density < 0):
            raise ModelError("density values must be nonnegative")
        nodes, weights = np.polynomial.legendre.leggauss(nq)
        half = 0.5 * (x[-1] - x[0])
        nodes = x[0] + half * (nodes + 1.0)
        weights = half * weights
        vals = np.interp(nodes, x, density)
        mass = float(np.dot(weights, vals))
        if abs(mass - 1.0) > 1e-6:
            raise ModelError(f"tabulated density integrates to {mass!r}, not 1")
        vals = vals / mass

        def mgf(z, _n=nodes, _w=weights * vals):
            return np.dot(_w, np.exp(z * _n))

        model = cls(mgf, domain_halfwidth=domain_halfwidth, name="tabulated")
        model.support = (float(x[0]), float(x[-1]))
        return model

    def evaluate(self, z: complex) -> OperatorTriple:
        self.check_domain(z)
        return OperatorTriple(np.array([[complex(self.mgf(complex(z)))]]), _ONE, _ONE)

    def ldp_range(self):
        if getattr(self, "support", None) is not None:
            return self.support
        return self.ldp_range_proxy()


class ScalarFamily(AnalyticFamily):
    """Thin wrapper turning an analytic scalar function into a family.

    Unlike IIDMgfModel this puts no probabilistic constraint on the value at
    zero; it exists for closed-form test families.
    """

    def __init__(self, fn: Callable[[complex], complex], domain_halfwidth: float = math.inf):
        self.fn = fn
        self.domain_halfwidth = float(domain_halfwidth)
        self.dim = 1

    def evaluate(self, z: complex) -> OperatorTriple:
        self.check_domain(z)
        return OperatorTriple(np.array([[complex(self.fn(complex(z)))]]), _ONE, _ONE)


class FiniteMarkovModel(AnalyticFamily):
    """Positive finite-state chain with an edge observable h."""

    def __init__(self, P, h, mu0):
        P = np.asarray(P, dtype=float)
        h = np.asarray(h, dtype=float)
        mu0 = np.asarray(mu0, dtype=float)
        d = P.shape[0]
        if P.ndim != 2 or P.shape != (d, d) or d < 1:
            raise ModelError("P must be a square matrix")
        if np.any(P <= 0):
            raise ModelError("all transition probabilities must be positive")
        if np.max(np.abs(P.sum(axis=1) - 1.0)) > 1e-12:
            raise ModelError("row sums of P must equal 1")
        if h.shape != (d, d):
            raise ModelError("h must match the shape of P")
        if mu0.shape != (d,) or np.any(mu0 < 0) or abs(mu0.sum() - 1.0) > 1e-12:
            raise ModelError("mu0 must be a probability vector of matching length")
        self.P = P
        self.h = h
        self.mu0 = mu0
        self.dim = d

    def evaluate(self, z: complex) -> OperatorTriple:
        M = self.P * np.exp(complex(z) * self.h)
        return OperatorTriple(M, self.mu0.astype(complex), np.ones(self.dim, dtype=complex))

    def ldp_range(self):
        from .diagnostics import max_mean_cycle
        return -max_mean_cycle(-self.h), max_mean_cycle(self.h)


class NystromKernelModel(AnalyticFamily):
    """Markov chain on [0, 1] with smooth transition density, discretized by quadrature.

    ``kernel(x, y)`` is the transition density (positive on the grid),
    ``h(x, y)`` the additive observable and ``rho(x)`` the initial density.
    Callables must accept numpy arrays.
    """

    def __init__(self, kernel, h, rho, nodes, weights):
        nodes = np.asarray(nodes, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise ModelError("nodes and weights must be matching 1-d arrays")
        if abs(weights.sum() - 1.0) > 1e-8:
            raise ModelError(f"quadrature weights sum to {weights.sum()!r}, not 1")
        X, Y = np.meshgrid(nodes, nodes, indexing="ij")
        K = np.asarray(kernel(X, Y), dtype=float)
        if np.any(K <= 0):
            raise ModelError("kernel must be positive on the quadrature grid")
        H = np.asarray(h(X, Y), dtype=float)
        r = np.asarray(rho(nodes), dtype=float)
        if np.any(r < 0):
            raise ModelError("initial density must be nonnegative")
        mass = float(np.dot(weights, r))
        if abs(mass - 1.0) > 1e-6:
            raise ModelError(f"initial density integrates to {mass!r}, not 1")
        self._kw = K * weights[None, :]
        self._H = H
        self._ell = (r * weights).astype(complex)
        self.nodes = nodes
        self.weights = weights
        self.dim = nodes.size

    @classmethod
    def gauss_legendre(cls, kernel, h, rho, nq: int = 64) -> "NystromKernelModel":
        x, w = np.polynomial.legendre.leggauss(nq)
        return cls(kernel, h, rho, 0.5 * (x + 1.0), 0.5 * w)

    @classmethod
    def periodic_trapezoid(cls, kernel, h, rho, nq: int = 64) -> "NystromKernelModel":
        return cls(kernel, h, rho, np.arange(nq) / nq, np.full(nq, 1.0 / nq))

    @classmethod
    def per_cell_gauss(cls, kernel, h, rho, breaks, nq_per_cell: int = 8) -> "NystromKernelModel":
        """Gauss-Legendre nodes placed cell by cell between the break points.

        Exact for integrands that are constant on each cell, which is what
        the piecewise-constant reduction to a finite chain needs.
        """
        edges = np.concatenate(([0.0], np.asarray(breaks, dtype=float), [1.0]))
        if np.any(np.diff(edges) <= 0):
            raise ModelError("cell breaks must be increasing and interior to (0, 1)")
        x0, w0 = np.polynomial.legendre.leggauss(nq_per_cell)
        nodes, weights = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            nodes.append(lo + half * (x0 + 1.0))
            weights.append(half * w0)
        return cls(kernel, h, rho, np.concatenate(nodes), np.concatenate(weights))

    def evaluate(self, z: complex) -> OperatorTriple:
        M = self._kw * np.exp(complex(z) * self._H)
        return OperatorTriple(M, self._ell, np.ones(self.dim, dtype=complex))

    def ldp_range(self):
        hmax = float(np.abs(self._H).max())
        theta_big = 32.0 if hmax == 0 else min(32.0, 500.0 / hmax)
        return self.ldp_range_proxy(theta_big)
