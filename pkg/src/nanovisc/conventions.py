"""Variance bookkeeping for isotropic Brownian displacements.

Two conventions are in circulation for how a scalar diffusion
coefficient D maps onto coordinate-wise Gaussian increments over a time
step tau:

* ``paper-3d-total``: the full three dimensional mean squared
  displacement equals 2*D*tau, so each coordinate carries variance
  2*D*tau/3.
* ``per-coordinate-standard``: each coordinate carries variance
  2*D*tau, so the three dimensional mean squared displacement is
  6*D*tau.

The choice changes simulated step sizes and estimator denominators
together, so a path generated and analysed under the same convention
returns the same D either way. Every report records which convention
produced it. The default everywhere is ``paper-3d-total``.
"""

from __future__ import annotations

from enum import Enum


class Convention(str, Enum):
    PAPER_3D_TOTAL = "paper-3d-total"
    PER_COORDINATE_STANDARD = "per-coordinate-standard"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


DEFAULT_CONVENTION = Convention.PAPER_3D_TOTAL


def resolve_convention(value: "str | Convention") -> Convention:
    if isinstance(value, Convention):
        return value
    try:
        return Convention(value)
    except ValueError:
        allowed = ", ".join(c.value for c in Convention)
        raise ValueError(f"unknown convention {value!r}; expected one of: {allowed}") from None


def msd_coefficient_3d(convention: "str | Convention") -> float:
    """Coefficient c such that the 3D mean squared displacement is c * D * tau."""
    convention = resolve_convention(convention)
    return 2.0 if convention is Convention.PAPER_3D_TOTAL else 6.0


def per_coordinate_variance(diffusion_m2s: float, tau_s: float, convention: "str | Convention") -> float:
    """Variance of a single coordinate's Gaussian increment over tau_s."""
    return msd_coefficient_3d(convention) * diffusion_m2s * tau_s / 3.0
