"""Limiting spectral densities: semicircle, Kesten-McKay and its dilation.

All three densities have square-root edges; cumulative distributions without
a closed form integrate in the substituted variable x = s*sin(theta), which
removes the edge singularity so adaptive Gauss-Kronrod quadrature converges
to the requested absolute error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from scipy.integrate import quad

_CDF_ABS_TOL = 1e-9


def semicircle_density(x: float) -> float:
    """Density sqrt(4 - x^2) / (2 pi) on [-2, 2]."""
    if abs(x) >= 2.0:
        return 0.0
    return math.sqrt(4.0 - x * x) / (2.0 * math.pi)


def semicircle_cdf(x: float) -> float:
    """Closed-form CDF: 1/2 + x sqrt(4-x^2)/(4 pi) + arcsin(x/2)/pi."""
    if x <= -2.0:
        return 0.0
    if x >= 2.0:
        return 1.0
    return 0.5 + x * math.sqrt(4.0 - x * x) / (4.0 * math.pi) + math.asin(x / 2.0) / math.pi


def km_support(d: float) -> float:
    """Half-width 2 sqrt(d-1) of the Kesten-McKay support."""
    _check_km_parameter(d)
    return 2.0 * math.sqrt(d - 1.0)


def km_dilated_support(d: float) -> float:
    """Half-width 2 sqrt(1 - 1/d) of the dilated Kesten-McKay support."""
    _check_km_parameter(d)
    return 2.0 * math.sqrt(1.0 - 1.0 / d)


def _check_km_parameter(d: float) -> None:
    if d < 2:
        raise ValueError(f"Kesten-McKay parameter must be >= 2, got {d}")


def km_density(d: float, x: float) -> float:
    """Kesten-McKay density (d/2pi) sqrt(4(d-1) - x^2) / (d^2 - x^2)."""
    s = km_support(d)
    if abs(x) >= s:
        return 0.0
    return d * math.sqrt(4.0 * (d - 1.0) - x * x) / (2.0 * math.pi * (d * d - x * x))


def km_dilated_density(d: float, x: float) -> float:
    """Kesten-McKay density after the x -> x/sqrt(d) dilation.

    (d/2pi) sqrt(4(1 - 1/d) - x^2) / (d - x^2); second moment 1 for every d,
    and it converges pointwise to the semicircle density as d grows.
    """
    s = km_dilated_support(d)
    if abs(x) >= s:
        return 0.0
    return d * math.sqrt(4.0 * (1.0 - 1.0 / d) - x * x) / (2.0 * math.pi * (d - x * x))


def _edge_free_cdf(density, s: float, x: float) -> float:
    """CDF of a density supported on [-s, s] via the x = s sin(theta) substitution."""
    if x <= -s:
        return 0.0
    if x >= s:
        return 1.0
    theta = math.asin(max(-1.0, min(1.0, x / s)))

    def integrand(t: float) -> float:
        return density(s * math.sin(t)) * s * math.cos(t)

    value, _ = quad(integrand, -math.pi / 2.0, theta, epsabs=_CDF_ABS_TOL / 10.0, limit=200)
    return min(1.0, max(0.0, value))


def km_cdf(d: float, x: float) -> float:
    """Kesten-McKay CDF by adaptive quadrature (absolute error <= 1e-9)."""
    return _edge_free_cdf(lambda y: km_density(d, y), km_support(d), x)


def km_dilated_cdf(d: float, x: float) -> float:
    """Dilated Kesten-McKay CDF by adaptive quadrature (absolute error <= 1e-9)."""
    return _edge_free_cdf(lambda y: km_dilated_density(d, y), km_dilated_support(d), x)


def density_moment(density, s: float, p: int) -> float:
    """p-th moment of a density on [-s, s] by edge-free quadrature."""

    def integrand(t: float) -> float:
        x = s * math.sin(t)
        return x**p * density(x) * s * math.cos(t)

    value, _ = quad(integrand, -math.pi / 2.0, math.pi / 2.0, epsabs=1e-10, limit=200)
    return value


@dataclass(frozen=True)
class DensitySpec:
    """A limiting density usable as a goodness-of-fit target.

    ``kind`` is one of ``semicircle``, ``kesten-mckay``,
    ``dilated-kesten-mckay``; the latter two need the parameter ``d``.
    """

    kind: str
    d: Optional[float] = None

    _KINDS = ("semicircle", "kesten-mckay", "dilated-kesten-mckay")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}; expected {self._KINDS}")
        if self.kind == "semicircle":
            if self.d is not None:
                raise ValueError("the semicircle law takes no parameter")
        else:
            if self.d is None:
                raise ValueError(f"{self.kind} needs the parameter d")
            _check_km_parameter(self.d)

    @property
    def support(self) -> "tuple[float, float]":
        if self.kind == "semicircle":
            return (-2.0, 2.0)
        if self.kind == "kesten-mckay":
            s = km_support(self.d)
        else:
            s = km_dilated_support(self.d)
        return (-s, s)

    def density(self, x: float) -> float:
        if self.kind == "semicircle":
            return semicircle_density(x)
        if self.kind == "kesten-mckay":
            return km_density(self.d, x)
        return km_dilated_density(self.d, x)

    def cdf(self, x: float) -> float:
        if self.kind == "semicircle":
            return semicircle_cdf(x)
        if self.kind == "kesten-mckay":
            return km_cdf(self.d, x)
        return km_dilated_cdf(self.d, x)

    def label(self) -> str:
        if self.kind == "semicircle":
            return "semicircle"
        d = self.d
        d_txt = f"{int(d)}" if float(d).is_integer() else f"{d}"
        return f"{self.kind}({d_txt})"
