"""Perron eigendata and Cauchy-integral Taylor coefficients of eigencurves.

All matrices here are small and dense, so every operation works from the full
spectrum; gap diagnostics come for free.  Differentiation of the analytic
maps ``z -> log lambda(z)`` and ``z -> Z(z) = ell(Pi_z v)`` is done with the
discrete Cauchy formula on a circle, which converges spectrally in the node
count and loses roughly one digit per two derivative orders in binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContinuationError, DomainError, GapViolation, NumericalError

# Near-defective threshold for |u.w| relative to |u||w|.
_DEFECT_TOL = 1e-10
# Relative tie threshold for two top eigenvalues.
_TIE_TOL = 1e-10


@dataclass(frozen=True)
class OperatorTriple:
    """Dense encoding of one member of an analytic operator family.

    ``M`` is d x d, ``ell`` a row functional and ``v`` a vector, so the
    moment generating function of the encoded sum is ell(M^N v).
    """

    M: np.ndarray
    ell: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=complex)
        ell = np.asarray(self.ell, dtype=complex)
        v = np.asarray(self.v, dtype=complex)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
            raise ValueError(f"operator matrix must be square and nonempty, got {M.shape}")
        if ell.shape != (M.shape[0],) or v.shape != (M.shape[0],):
            raise ValueError("functional/vector dimensions inconsistent with the matrix")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "v", v)

    @property
    def dim(self) -> int:
        return self.M.shape[0]


@dataclass(frozen=True)
class PerronData:
    """Top eigendata and the rank-one amplitude Z = ell(Pi v)."""

    lam: complex
    w: np.ndarray          # right eigenvector
    u: np.ndarray          # left eigenvector
    Z: complex
    gap: float             # |lambda_2| / |lambda_1|, 0 for dimension 1


def _rank_one_amplitude(u, w, ell, v) -> complex:
    den = u @ w
    if abs(den) < _DEFECT_TOL * np.linalg.norm(u) * np.linalg.norm(w):
        raise NumericalError("top eigenvalue is numerically defective; eigenprojection undefined")
    return (u @ v) * (ell @ w) / den


def perron(t: OperatorTriple) -> PerronData:
    """Eigenvalue of maximal modulus with right/left eigenvectors and Z.

    Z is invariant under independent rescaling of the eigenvectors.  Raises
    GapViolation when two eigenvalues tie for maximal modulus within 1e-10
    relative, which is how a numerical spectral-gap failure surfaces.
    """
    d = t.dim
    if d == 1:
        lam = complex(t.M[0, 0])
        one = np.ones(1, dtype=complex)
        return PerronData(lam=lam, w=one, u=one, Z=complex(t.ell[0] * t.v[0]), gap=0.0)

    lams, W = np.linalg.eig(t.M)
    order = np.argsort(-np.abs(lams))
    top = order[0]
    lam = lams[top]
    gap = abs(lams[order[1]]) / abs(lam) if abs(lam) > 0 else 1.0
    if abs(lam) - abs(lams[order[1]]) < _TIE_TOL * abs(lam):
        raise GapViolation(
            f"two eigenvalues of maximal modulus within tolerance: {lam!r} vs {lams[order[1]]!r}"
        )
    w = W[:, top]

    lams_t, U = np.linalg.eig(t.M.T)
    left = int(np.argmin(np.abs(lams_t - lam)))
    u = U[:, left]

    return PerronData(lam=lam, w=w, u=u, Z=_rank_one_amplitude(u, w, t.ell, t.v), gap=gap)


def spectral_radius(M: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvals(M)).max())


def eigencurve(family, center: float, radius: float, points: int):
    """Sample ``(z, lambda(z), Z(z))`` on the circle around ``center``.

    The branch is continued node to node by nearest-eigenvalue matching; if a
    second candidate comes within a factor 2 of the nearest distance the
    continuation is ambiguous and the caller should shrink the radius.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if points < 8:
        raise ValueError("need at least 8 circle nodes")

    lam_prev = perron(family.evaluate(complex(center))).lam
    out = []
    for k in range(points):
        z = center + radius * np.exp(2j * math.pi * k / points)
        trip = family.evaluate(z)
        if trip.dim == 1:
            lam = complex(trip.M[0, 0])
            Z = complex(trip.ell[0] * trip.v[0])
        else:
            lams, W = np.linalg.eig(trip.M)
            dist = np.abs(lams - lam_prev)
            order = np.argsort(dist)
            if dist[order[1]] < 2.0 * dist[order[0]]:
                raise ContinuationError(
                    f"eigenvalue continuation ambiguous at z={z:.6g} "
                    f"(candidates {lams[order[0]]!r}, {lams[order[1]]!r}); shrink the radius"
                )
            idx = int(order[0])
            lam = lams[idx]
            w = W[:, idx]
            e = np.zeros(trip.dim, dtype=complex)
            e[idx] = 1.0
            try:
                u = np.linalg.solve(W.T, e)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(f"eigenvector matrix singular at z={z:.6g}") from exc
            Z = _rank_one_amplitude(u, w, trip.ell, trip.v)
        out.append((complex(z), complex(lam), complex(Z)))
        lam_prev = lam
    return out


@dataclass(frozen=True)
class TaylorData:
    """Per-derivative data at a real point theta.

    ``L[j]`` is the j-th derivative of log lambda, ``F[j]`` the j-th
    derivative of Z = ell(Pi_z v), both along the real axis.
    """

    L: np.ndarray
    F: np.ndarray
    radius: float
    J: int
    max_imag_discarded: float = 0.0


def default_radius(family, theta: float) -> float:
    """0.25 x distance to the declared boundary; 1.0 for entire families."""
    delta = family.domain_halfwidth
    if math.isinf(delta):
        return 1.0
    dist = delta - abs(theta)
    if dist <= 0:
        raise DomainError(f"theta={theta} is not interior to the strip |Re z| < {delta}")
    return 0.25 * dist


def taylor_via_cauchy(family, theta: float, J: int, radius: float | None = None,
                      points: int | None = None, max_halvings: int = 6) -> TaylorData:
    """Derivatives of log lambda and Z at ``theta`` via the circle trapezoid rule.

    The log branch is fixed by continuous unwrapping starting from the real
    positive value at angle 0.  On a ContinuationError the radius is halved,
    up to ``max_halvings`` times.
    """
    if J < 0:
        raise ValueError("J must be nonnegative")
    r = default_radius(family, theta) if radius is None else float(radius)
    n = max(64, 4 * J) if points is None else int(points)

    curve = None
    last_exc = None
    for _ in range(max_halvings + 1):
        try:
            curve = eigencurve(family, theta, r, n)
            break
        except ContinuationError as exc:
            last_exc = exc
            r *= 0.5
    if curve is None:
        raise last_exc

    lams = np.array([c[1] for c in curve])
    zs = np.array([c[2] for c in curve])
    logs = np.log(np.abs(lams)) + 1j * np.unwrap(np.angle(lams))

    # c_j = (1/n) sum_k g(z_k) e^{-2 pi i jk/n};  g^(j)(theta) = j! c_j / r^j
    cL = np.fft.fft(logs) / n
    cF = np.fft.fft(zs) / n
    facts = np.array([math.factorial(j) for j in range(J + 1)], dtype=float)
    powers = r ** np.arange(J + 1)
    L = facts * cL[: J + 1] / powers
    F = facts * cF[: J + 1] / powers

    max_imag = 0.0
    if getattr(family, "real_on_real_axis", True):
        # roundoff floor of the Cauchy sum, per derivative order
        gmax = max(float(np.abs(logs).max()), float(np.abs(zs).max()), 1.0)
        floors = 1e-13 * gmax * facts / powers
        for name, arr in (("log lambda", L), ("Z", F)):
            bad = np.abs(arr.imag) > np.maximum.reduce(
                [floors, 1e-8 * np.abs(arr), np.full(J + 1, 1e-12)]
            )
            if bad.any():
                j = int(np.nonzero(bad)[0][0])
                raise NumericalError(
                    f"imaginary part of d^{j} {name} at theta={theta:.6g} "
                    f"exceeds tolerance: {arr[j]!r} (family declared real-symmetric)"
                )
            scale = max(1.0, float(np.abs(arr).max()))
            max_imag = max(max_imag, float(np.abs(arr.imag).max()) / scale)

    return TaylorData(L=L, F=F, radius=r, J=J, max_imag_discarded=max_imag)


@dataclass(frozen=True)
class GapScanReport:
    """Evidence (not proof) for the off-axis spectral bound.

    Tabulates max |lambda(theta+is)| / lambda(theta) on a user grid of s.
    The bound over all s is an analytic fact that a finite scan cannot
    certify; a ratio reaching 1 flags a violation (lattice resonance).
    """

    theta: float
    s: np.ndarray
    ratio: np.ndarray
    flagged: list = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return float(self.ratio.max())


def gap_scan(family, theta: float, s_values) -> GapScanReport:
    """Spectral radius ratio of the twisted operator along theta + i s."""
    s_values = np.asarray(s_values, dtype=float)
    base = perron(family.evaluate(complex(theta))).lam.real
    ratios = np.empty_like(s_values)
    for i, s in enumerate(s_values):
        ratios[i] = spectral_radius(family.evaluate(complex(theta, s)).M) / base
    flagged = [float(s) for s, rho in zip(s_values, ratios) if rho >= 1.0 - 1e-9]
    return GapScanReport(theta=theta, s=s_values, ratio=ratios, flagged=flagged)
