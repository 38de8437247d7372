"""Module for the spatial profile beta of the Carleman weights."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from heatrecon.errors import ConfigError, DegenerateOmega, OmegaOutsideDomain

BUMP_DEGREE = 5


@dataclass(frozen=True)
class BetaProfile:
    """beta(x) = K1 (exp(K2) - exp(beta0(x))) with beta0 = K2 (1 - m psi).

    psi is a C1 bump equal to 0 at both ends of the domain and to 1 at the midpoint of omega; on each
    side of the midpoint it is 1 - (1 - s)^5 with s the normalized distance from the domain end.

    Attributes:
        K1: outer amplitude.
        K2: inner amplitude.
        omega: observation subinterval (a, b).
        m: bump height in (0, 1).
        domain: spatial domain (x_min, x_max).
    """

    K1: float
    K2: float
    omega: tuple[float, float]
    m: float
    domain: tuple[float, float]

    @property
    def peak(self) -> float:
        """Midpoint of omega, where beta is maximal."""
        return 0.5 * (self.omega[0] + self.omega[1])

    def psi(self, x: np.ndarray) -> np.ndarray:
        """The bump."""

        x = np.asarray(x, dtype=float)
        s = self.__distance(x)
        return 1.0 - (1.0 - s) ** BUMP_DEGREE

    def dpsi(self, x: np.ndarray) -> np.ndarray:
        """Derivative of the bump."""

        x = np.asarray(x, dtype=float)
        x_min, x_max = self.domain
        s = self.__distance(x)
        slope = np.where(x <= self.peak, 1.0 / (self.peak - x_min), -1.0 / (x_max - self.peak))
        return BUMP_DEGREE * (1.0 - s) ** (BUMP_DEGREE - 1) * slope

    def beta0(self, x: np.ndarray) -> np.ndarray:
        """Inner profile, equal to K2 on the boundary."""
        return self.K2 * (1.0 - self.m * self.psi(x))

    def beta(self, x: np.ndarray) -> np.ndarray:
        """The profile: zero on the boundary, positive inside, maximal at the midpoint of omega."""
        return self.K1 * (math.exp(self.K2) - np.exp(self.beta0(x)))

    def dbeta(self, x: np.ndarray) -> np.ndarray:
        """Derivative of the profile; it vanishes only at the midpoint of omega."""
        return self.K1 * np.exp(self.beta0(x)) * self.K2 * self.m * self.dpsi(x)

    @property
    def maximum(self) -> float:
        """Value of beta at the midpoint of omega."""
        return float(self.K1 * (math.exp(self.K2) - math.exp(self.K2 * (1.0 - self.m))))

    def __distance(self, x: np.ndarray) -> np.ndarray:
        x_min, x_max = self.domain
        left = (x - x_min) / (self.peak - x_min)
        right = (x_max - x) / (x_max - self.peak)
        return np.clip(np.where(x <= self.peak, left, right), 0.0, 1.0)


def check_omega(omega: tuple[float, float], domain: tuple[float, float]) -> None:
    """Validates an observation interval against the spatial domain.

    Raises:
        DegenerateOmega: if a >= b.
        OmegaOutsideDomain: if omega is not strictly inside the domain.
    """
    a, b = omega
    if not a < b:
        raise DegenerateOmega(f"omega must satisfy a < b, got ({a}, {b})")
    if not (domain[0] < a and b < domain[1]):
        raise OmegaOutsideDomain(f"omega ({a}, {b}) must lie strictly inside ({domain[0]}, {domain[1]})")


def build_beta(
    K1: float, K2: float, omega: tuple[float, float], m: float, domain: tuple[float, float]
) -> BetaProfile:
    """Builds the beta profile of the Carleman weights.

    Args:
        K1: positive outer amplitude.
        K2: positive inner amplitude.
        omega: observation subinterval, strictly inside the domain.
        m: bump height in (0, 1).
        domain: spatial domain (x_min, x_max).

    Raises:
        DegenerateOmega: if omega is empty.
        OmegaOutsideDomain: if omega touches or leaves the domain.
        ConfigError: if K1, K2 or m are out of range.
    """
    if K1 <= 0 or K2 <= 0:
        raise ConfigError(f"K1 and K2 must be positive, got K1={K1}, K2={K2}")
    if not 0.0 < m < 1.0:
        raise ConfigError(f"m must lie in (0, 1), got {m}")
    check_omega(omega, domain)
    return BetaProfile(float(K1), float(K2), (float(omega[0]), float(omega[1])), float(m), tuple(domain))
