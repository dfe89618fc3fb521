"""Structural diagnostics: lattice detection, Diophantine scans, LD range.

These are numeric evidence, not proofs: a finite grid cannot certify a
quantitative non-lattice condition, it can only exhibit how the distance
d(s) to lattice resonance behaves over the scanned window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import ModelError
from .families import FiniteMarkovModel, IIDFiniteModel

_TWO_PI = 2.0 * math.pi


def max_mean_cycle(weights: np.ndarray) -> float:
    """Maximum mean cycle weight of a complete digraph, by Karp's algorithm.

    ``weights[j, k]`` is the weight of edge j -> k.  Exact dynamic program
    (up to float addition); runs in O(d^3).
    """
    w = np.asarray(weights, dtype=float)
    d = w.shape[0]
    if w.ndim != 2 or w.shape != (d, d):
        raise ValueError("weights must be a square matrix")
    if d == 1:
        return float(w[0, 0])
    # D[k][v] = max weight of a k-edge walk ending at v, any start
    D = np.zeros((d + 1, d))
    for k in range(1, d + 1):
        D[k] = np.max(D[k - 1][:, None] + w, axis=0)
    best = -math.inf
    for v in range(d):
        worst = min((D[d, v] - D[k, v]) / (d - k) for k in range(d))
        best = max(best, worst)
    return float(best)


def _difference_set(model) -> np.ndarray:
    """The numbers whose s-multiples must avoid 2*pi*Z for non-lattice behavior."""
    if isinstance(model, IIDFiniteModel):
        a = model.atoms
        return a[1:] - a[0]
    if isinstance(model, FiniteMarkovModel):
        h = model.h
        d = h.shape[0]
        vals = []
        for l in range(d):
            for j in range(d):
                for k in range(d):
                    # b_{ljk} - b_{l1k} with b_{ljk} = h_lj + h_jk
                    vals.append(h[l, j] + h[j, k] - h[l, 0] - h[0, k])
        return np.asarray(vals)
    raise ModelError("Diophantine scan applies to finite iid and finite Markov models")


def _dist_to_lattice(b: np.ndarray, s: np.ndarray) -> np.ndarray:
    """d(s) = max_j dist(b_j * s, 2*pi*Z) over the difference set."""
    prod = np.outer(s, b)
    frac = np.abs(prod - _TWO_PI * np.round(prod / _TWO_PI))
    return frac.max(axis=1)


@dataclass(frozen=True)
class DiophantineReport:
    s: np.ndarray
    d: np.ndarray
    min_d: float
    lattice: bool
    lattice_s: float | None
    beta_grid: np.ndarray
    min_d_s_beta: np.ndarray       # min over the grid of d(s) * s^beta, per beta
    beta_hat: float
    lemma_c: float | None          # largest c with 1 - |E e^{isX}| >= c d(s)^2, iid only

    def summary(self) -> dict:
        return {
            "min_d": self.min_d,
            "lattice": self.lattice,
            "lattice_s": self.lattice_s,
            "beta_hat": self.beta_hat,
            "lemma_c": self.lemma_c,
        }


def diophantine_scan(model, s_max: float = 100.0, grid: int = 4000) -> DiophantineReport:
    """Tabulate d(s) on a log grid of |s| in (1, s_max] and fit its decay.

    For iid atom models the scan also verifies the characteristic-function
    inequality 1 - |E e^{isX}| >= c d(s)^2 at every grid point and reports
    the largest admissible c.
    """
    if s_max <= 1:
        raise ValueError("s_max must exceed 1")
    b = _difference_set(model)
    b = b[np.abs(b) > 0]
    s = np.geomspace(1.0 + 1e-9, s_max, grid)
    # include exact resonance candidates of each difference so lattices are caught
    extras = []
    for bj in np.unique(np.abs(b)):
        mult = _TWO_PI / bj
        extras.append(mult * np.arange(1, max(2, int(s_max / mult)) + 1))
    s = np.unique(np.concatenate([s] + extras))
    s = s[(s > 1.0) & (s <= s_max)]
    d = _dist_to_lattice(b, s)

    imin = int(np.argmin(d))
    min_d = float(d[imin])
    lattice = min_d < 1e-9
    lattice_s = float(s[imin]) if lattice else None

    beta_grid = np.linspace(0.0, 4.0, 81)
    min_d_s_beta = np.array([float(np.min(d * s**beta)) for beta in beta_grid])

    # fit the lower envelope: running minima of d as s grows
    if lattice:
        beta_hat = math.inf
    else:
        rec_s, rec_d = [], []
        cur = math.inf
        for si, di in zip(s, d):
            if di < cur:
                cur = di
                rec_s.append(si)
                rec_d.append(di)
        if len(rec_s) >= 2:
            slope = np.polyfit(np.log(rec_s), np.log(rec_d), 1)[0]
            beta_hat = float(max(-slope, 0.0))
        else:
            beta_hat = 0.0

    lemma_c = None
    if isinstance(model, IIDFiniteModel):
        phi = np.abs(np.exp(1j * np.outer(s, model.atoms)) @ model.probs)
        ok = d > 1e-9
        if ok.any():
            lemma_c = float(np.min((1.0 - phi[ok]) / d[ok] ** 2))

    return DiophantineReport(
        s=s, d=d, min_d=min_d, lattice=lattice, lattice_s=lattice_s,
        beta_grid=beta_grid, min_d_s_beta=min_d_s_beta, beta_hat=beta_hat,
        lemma_c=lemma_c,
    )


def _rationalize(x: float, tol: float = 1e-9, max_den: int = 10**6):
    """Best fraction p/q with |x - p/q| <= tol, or None."""
    f = Fraction(x).limit_denominator(max_den)
    if abs(x - f.numerator / f.denominator) <= tol * max(1.0, abs(x)):
        return f
    return None


def nonlattice_check(model: IIDFiniteModel):
    """True when the atom differences are incommensurable.

    Returns ``(True, None)`` for non-lattice atoms, else ``(False, step)``
    where ``step`` generates the lattice of pairwise differences.
    """
    b = np.abs(_difference_set(model))
    b = np.sort(b[b > 0])
    base = b[0]
    fracs = []
    for bj in b:
        f = _rationalize(bj / base)
        if f is None:
            return True, None
        fracs.append(f)
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    ints = [f.numerator * (lcm // f.denominator) for f in fracs]
    g = 0
    for i in ints:
        g = math.gcd(g, i)
    return False, float(base * g / lcm)


def ldp_range(model):
    """Raw-unit endpoints (B_lower, B_upper) of the large-deviation range.

    Exact for finite models (max atom; max mean cycle via Karp).  Other
    backends report the numeric proxy log lambda(theta)/theta at the largest
    safe theta.  Subtract the asymptotic mean to get bounds for the excess.
    """
    if hasattr(model, "ldp_range"):
        lo, hi = model.ldp_range()
        return float(lo), float(hi)
    lo, hi = model.ldp_range_proxy()
    return float(lo), float(hi)
