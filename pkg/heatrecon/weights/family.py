"""Module for the weight families and their evaluation through inverses in log space."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from heatrecon.enums.weights import Member, WeightKind
from heatrecon.errors import ConfigError, MemberMismatch, NonPositiveTime
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.weights.beta import BetaProfile, build_beta

ROLES = (Member.RHO, Member.RHO0, Member.RHO1)

# role -> raw member of each Carleman family
ROLE_MEMBERS = {
    WeightKind.CARLEMAN_C: {Member.RHO: Member.BASE, Member.RHO0: Member.BASE0, Member.RHO1: Member.BASE1},
    WeightKind.CARLEMAN_P: {Member.RHO: Member.BASE2, Member.RHO0: Member.BASE0, Member.RHO1: Member.BASE1},
}

# raw member -> exponent of t multiplying exp(-beta/t^n) in the inverse
_CARLEMAN_MEMBERS = {
    WeightKind.CARLEMAN_C: {Member.BASE: 0.0, Member.BASE0: -1.5, Member.BASE1: -0.5},
    WeightKind.CARLEMAN_P: {Member.BASE: 0.0, Member.BASE0: -1.0, Member.BASE1: 1.0, Member.BASE2: 2.0},
}
_EXPONENT_POWER = {WeightKind.CARLEMAN_C: 1, WeightKind.CARLEMAN_P: 2}


def members_of(kind: WeightKind) -> tuple[Member, ...]:
    """Members a family of the given kind can evaluate."""

    if kind in _CARLEMAN_MEMBERS:
        return ROLES + tuple(_CARLEMAN_MEMBERS[kind])
    return ROLES + (Member.BASE,)


def carleman_log_inverse(kind: WeightKind, member: Member, beta: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Logarithm of the inverse of a raw Carleman member, without floor or cap.

    For CARLEMAN_C, rho_c = exp(beta/t), rho_c0 = t^{3/2} rho_c and rho_c1 = t^{1/2} rho_c.
    For CARLEMAN_P, rho_p = exp(beta/t^2), rho_p0 = t rho_p, rho_p1 = rho_p / t and rho_p2 = rho_p / t^2.

    Args:
        kind: CARLEMAN_C or CARLEMAN_P.
        member: one of the BASE members of that family.
        beta: profile values.
        t: times, strictly positive.

    Raises:
        MemberMismatch: if the member does not exist in the family.
        NonPositiveTime: if some t <= 0.
    """
    table = _CARLEMAN_MEMBERS.get(kind)
    if table is None or member not in table:
        raise MemberMismatch(f"{kind.value} has no raw member {member.value}")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise NonPositiveTime(f"weights are only defined for t > 0, got min t = {t.min()}")
    return -np.asarray(beta, dtype=float) / t ** _EXPONENT_POWER[kind] + table[member] * np.log(t)


@dataclass(frozen=True)
class WeightFamily:
    """A coherent set of weights, evaluated through their inverses.

    Role members (RHO, RHO0, RHO1) are capped by M = exp(log_cap); every member is floored at rho_star.

    Attributes:
        kind: the family.
        beta: the spatial profile, for the Carleman kinds.
        rho_star: floor of every member.
        log_cap: logarithm of the cap M, possibly infinite.
        power: exponent k of the POWER family.
        T: time horizon, used by the POWER family.
    """

    kind: WeightKind
    beta: BetaProfile | None = None
    rho_star: float = 1e-3
    log_cap: float = 40.0
    power: float = 1.0
    T: float = 1.0

    def __post_init__(self) -> None:
        if self.kind in _CARLEMAN_MEMBERS and self.beta is None:
            raise ConfigError(f"{self.kind.value} weights need a beta profile")
        if not self.rho_star > 0:
            raise ConfigError(f"rho_star must be positive, got {self.rho_star}")
        if math.isnan(self.log_cap) or self.log_cap < math.log(self.rho_star):
            raise ConfigError(f"the cap exp({self.log_cap}) must not be below rho_star")

    @classmethod
    def build(
        cls,
        kind: WeightKind,
        T: float,
        domain: tuple[float, float],
        omega: tuple[float, float],
        K1: float = 1.0,
        K2: float = 1.0,
        m: float = 0.5,
        rho_star: float = 1e-3,
        log_cap: float = 40.0,
        power: float = 1.0,
    ) -> WeightFamily:
        """Builds a family, with the beta profile of the Carleman kinds.

        Args:
            kind: the family to build.
            T: time horizon.
            domain: spatial domain.
            omega: observation interval, the support of the beta bump.
            K1, K2, m: parameters of beta.
            rho_star, log_cap, power: floor, log of the cap and exponent of the power family.
        """
        beta = build_beta(K1, K2, omega, m, domain) if kind in _CARLEMAN_MEMBERS else None
        return cls(
            kind=kind, beta=beta, rho_star=float(rho_star), log_cap=float(log_cap), power=float(power), T=float(T)
        )

    @property
    def cap(self) -> float:
        """The cap M of the role members."""
        return math.exp(self.log_cap) if math.isfinite(self.log_cap) else math.inf

    def uncapped(self) -> WeightFamily:
        """The same family without a cap on the role members."""
        return replace(self, log_cap=math.inf)

    def log_inverse(self, member: Member, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Logarithm of the evaluated inverse weight, floor and cap included.

        Raises:
            NonPositiveTime: if some t <= 0.
            MemberMismatch: if the member does not exist in this family.
        """
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0.0):
            raise NonPositiveTime(f"weights are only defined for t > 0, got min t = {t.min()}")
        if member not in members_of(self.kind):
            raise MemberMismatch(f"{self.kind.value} has no member {member.value}")

        if self.kind is WeightKind.UNIT:
            raw = np.zeros(np.broadcast(x, t).shape)
        elif self.kind is WeightKind.POWER:
            raw = self.power * np.log(t / self.T) + np.zeros_like(x)
        else:
            base = ROLE_MEMBERS[self.kind].get(member, member)
            raw = carleman_log_inverse(self.kind, base, self.beta.beta(x), t)

        raw = np.minimum(raw, -math.log(self.rho_star))
        if member in ROLES:
            raw = np.maximum(raw, -self.log_cap)
        return raw

    def inverse(self, member: Member, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """The evaluated inverse weight; exp underflow returns exactly 0."""
        return np.exp(self.log_inverse(member, x, t))

    def at_quadrature(self, member: Member, quadrature: QuadratureSet, power: int = 1) -> np.ndarray:
        """Samples w^{-power} at every quadrature point, shape (n_cells, nq)."""
        return np.exp(power * self.log_inverse(member, quadrature.x, quadrature.t))

    def sup(self, member: Member, quadrature: QuadratureSet) -> float:
        """Maximum of a member over the quadrature points."""
        return float(np.exp(-np.min(self.log_inverse(member, quadrature.x, quadrature.t))))


def eval_inverse_weight(family: WeightFamily, member: Member, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Evaluates w(x, t)^{-1} for one member of a family.

    Args:
        family: the weight family.
        member: a role or raw member.
        x: spatial coordinates.
        t: times, strictly positive.

    Returns:
        The inverse weight, max(w^{-1}, 1/M) for role members, never above 1/rho_star.

    Raises:
        NonPositiveTime: if t <= 0.
        MemberMismatch: if the family has no such member.
    """
    return family.inverse(member, x, t)
