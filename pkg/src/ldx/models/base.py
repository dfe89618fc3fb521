"""Interface contract shared by every model backend.

A family must be analytic on the strip |Re z| < delta and real-symmetric
(evaluate(conj z) = conj(evaluate(z)) entrywise).  Models are immutable after
construction and evaluate is pure, so concurrent evaluation is safe.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..spectral import OperatorTriple, perron

# The engine never evaluates closer to the boundary than this.
BOUNDARY_MARGIN = 1e-3


class AnalyticFamily:
    """Base class: an evaluable family z -> (M(z), ell, v)."""

    dim: int = 1
    domain_halfwidth: float = math.inf
    real_on_real_axis: bool = True

    def evaluate(self, z: complex) -> OperatorTriple:
        raise NotImplementedError

    def check_domain(self, z: complex) -> None:
        delta = self.domain_halfwidth
        if math.isinf(delta):
            return
        if abs(complex(z).real) > delta - BOUNDARY_MARGIN:
            raise DomainError(
                f"Re z = {complex(z).real:.6g} too close to the domain boundary +-{delta:.6g}"
            )

    def theta_max(self) -> float:
        """Largest tilt the engine will probe on the real axis."""
        delta = self.domain_halfwidth
        if math.isinf(delta):
            return math.inf
        return delta - BOUNDARY_MARGIN

    def ldp_range_proxy(self, theta_big: float = 32.0):
        """Numeric stand-in for the large-deviation range endpoints.

        Uses log lambda(theta)/theta at the largest safe tilt; halves the
        probe when the evaluation overflows.
        """
        cap = min(theta_big, self.theta_max())
        out = []
        for sign in (-1.0, 1.0):
            t = sign * cap
            for _ in range(8):
                with np.errstate(over="ignore"):
                    lam = perron(self.evaluate(complex(t))).lam.real
                if np.isfinite(lam) and lam > 0:
                    out.append(math.log(lam) / t)
                    break
                t *= 0.5
            else:
                out.append(math.copysign(math.inf, sign))
        return out[0], out[1]
