"""Module for checking that a weight family is dominated by a Carleman family."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from heatrecon.config import get_cfg
from heatrecon.enums.weights import Member, WeightKind
from heatrecon.errors import MemberMismatch
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet, quadrature_points
from heatrecon.weights.family import WeightFamily, members_of

DEFAULT_PAIRS = {
    WeightKind.CARLEMAN_C: ((Member.RHO0, Member.BASE0), (Member.RHO, Member.BASE)),
    WeightKind.CARLEMAN_P: ((Member.RHO0, Member.BASE0), (Member.RHO1, Member.BASE1), (Member.RHO, Member.BASE2)),
}


@dataclass(frozen=True)
class PairDomination:
    """Domination constant of one candidate member by one reference member.

    Attributes:
        candidate: member of the candidate family.
        reference: member of the reference family.
        K: max of candidate / reference over the grid quadrature.
        K_refined: the same on the twice-refined grid.
        passed: both are finite and K does not grow under refinement.
    """

    candidate: Member
    reference: Member
    K: float
    K_refined: float
    passed: bool


@dataclass
class DominationReport:
    """Outcome of a domination check."""

    pairs: list[PairDomination] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Whether every pair passed."""
        return all(pair.passed for pair in self.pairs)

    @property
    def K(self) -> float:
        """The largest constant over the pairs."""
        return max((pair.K for pair in self.pairs), default=1.0)


def _max_ratio(
    candidate: WeightFamily, cand_member: Member, reference: WeightFamily, ref_member: Member, quad: QuadratureSet
) -> float:
    log_ratio = reference.log_inverse(ref_member, quad.x, quad.t) - candidate.log_inverse(
        cand_member, quad.x, quad.t
    )
    peak = float(np.max(log_ratio))
    return math.exp(peak) if peak < 709.0 else math.inf


def check_domination(
    candidate: WeightFamily,
    reference: WeightFamily,
    grid: SpaceTimeGrid,
    quadrature: QuadratureSet,
    pairs: tuple[tuple[Member, Member], ...] | None = None,
    growth_tolerance: float | None = None,
) -> DominationReport:
    """Measures the constants K with candidate <= K * reference, member by member.

    The ratio is evaluated at the quadrature points of the grid and of the twice-refined grid; a
    constant that keeps growing under refinement is reported as a failure.

    Args:
        candidate: the family used by a formulation.
        reference: the Carleman family of the stability estimate.
        grid: the grid.
        quadrature: the quadrature of the grid.
        pairs: (candidate member, reference member) pairs, by default the roles against the raw
            Carleman members of the reference kind.
        growth_tolerance: allowed ratio between the refined and coarse constants, by default from
            the configuration.

    Raises:
        MemberMismatch: if a member of a pair does not exist in its family, or no default pairs exist.
    """
    if growth_tolerance is None:
        growth_tolerance = float(get_cfg("weights", "growth_tolerance"))
    if pairs is None:
        if reference.kind not in DEFAULT_PAIRS:
            raise MemberMismatch(f"no default members to compare against a {reference.kind.value} family")
        pairs = DEFAULT_PAIRS[reference.kind]
    for cand_member, ref_member in pairs:
        if cand_member not in members_of(candidate.kind) or ref_member not in members_of(reference.kind):
            raise MemberMismatch(
                f"cannot compare {candidate.kind.value}.{cand_member.value} "
                f"with {reference.kind.value}.{ref_member.value}"
            )

    fine = quadrature_points(grid.refined(2), quadrature.order)
    report = DominationReport()
    for cand_member, ref_member in pairs:
        K = _max_ratio(candidate, cand_member, reference, ref_member, quadrature)
        K_refined = _max_ratio(candidate, cand_member, reference, ref_member, fine)
        passed = math.isfinite(K) and math.isfinite(K_refined) and K_refined <= growth_tolerance * K
        report.pairs.append(PairDomination(cand_member, ref_member, K, K_refined, passed))
        logger.debug(
            f"Domination {cand_member.value} <= K {ref_member.value}: "
            f"K={K:.6g}, refined K={K_refined:.6g}, passed={passed}"
        )
    return report
