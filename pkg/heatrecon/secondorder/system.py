"""Module for assembled saddle-point systems and the reports built from their solutions."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sps

from heatrecon.enums.formulations import Formulation
from heatrecon.enums.weights import Member
from heatrecon.forward.field import Field
from heatrecon.grid.assembly import mirror
from heatrecon.grid.spaces import FemSpace
from heatrecon.secondorder.forms import FormContext


@dataclass(frozen=True, eq=False)
class Penalty:
    """An augmentation term r * integral of w^{-2} (G y - g)^2.

    Attributes:
        name: parameter name, "r", "r1" or "r2".
        r: the penalty parameter.
        matrix: the Gram matrix of G on the free primal DOFs.
        rhs: the vector of the integral of w^{-2} g G phi_i.
        constant: the integral of w^{-2} g^2.
    """

    name: str
    r: float
    matrix: sps.csr_matrix
    rhs: np.ndarray
    constant: float = 0.0

    def residual(self, y: np.ndarray) -> float:
        """||w^{-1} (G y - g)||."""
        value = float(y @ (self.matrix @ y) - 2.0 * self.rhs @ y + self.constant)
        return math.sqrt(max(value, 0.0))


@dataclass(frozen=True, eq=False)
class SaddleSystem:
    """The system [[A, B^T], [B, -C]] [y; lambda] = [l1; l2] on free DOFs.

    A = obs_scale * obs_gram + sum of r * P over the penalties (+ shift), so that the penalties can be
    rescaled without reassembly.

    Attributes:
        formulation: the formulation tag.
        context: the sampled weights, coefficients and observations.
        primal_spaces: spaces of the primal unknowns (y, or y and p).
        multiplier_spaces: spaces of the multipliers.
        multiplier_members: per multiplier space, None when the DOFs are the multiplier itself, else the
            weight w with multiplier = w * field.
        obs_gram: Gram matrix of the observation term.
        obs_rhs: observation right-hand side.
        obs_scale: factor of the observation term in A and l1 (1 - alpha for the stabilized variants).
        penalties: augmentation terms.
        B: the constraint block, (n_multiplier, n_primal).
        C: the stabilization block, or None.
        l2: multiplier right-hand side.
        primal_gram: Gram matrix of the primal norm.
        multiplier_gram: Gram matrix of the multiplier space norm.
        multiplier_l2_gram: Gram matrix of the L2 norm of the multipliers.
        shift: extra SPD term of A, used by quasi-reversibility.
        extra_rhs: extra primal right-hand side.
        parameters: parameters of the assembly, for reports.
    """

    formulation: Formulation
    context: FormContext
    primal_spaces: tuple[FemSpace, ...]
    multiplier_spaces: tuple[FemSpace, ...]
    multiplier_members: tuple[Member | None, ...]
    obs_gram: sps.csr_matrix
    obs_rhs: np.ndarray
    obs_scale: float
    penalties: tuple[Penalty, ...]
    B: sps.csr_matrix
    C: sps.csr_matrix | None
    l2: np.ndarray
    primal_gram: sps.csr_matrix
    multiplier_gram: sps.csr_matrix
    multiplier_l2_gram: sps.csr_matrix
    shift: sps.csr_matrix | None = None
    extra_rhs: np.ndarray | None = None
    parameters: dict = field(default_factory=dict)

    @property
    def n_primal(self) -> int:
        return self.obs_gram.shape[0]

    @property
    def n_multiplier(self) -> int:
        return self.B.shape[0]

    @property
    def observation_norm(self) -> float:
        return self.context.observation_norm

    def primal_block(self) -> sps.csr_matrix:
        """A_r, exactly symmetric."""

        block = self.obs_scale * self.obs_gram
        for penalty in self.penalties:
            block = block + penalty.r * penalty.matrix
        if self.shift is not None:
            block = block + self.shift
        return mirror(sps.csr_matrix(block))

    def primal_rhs(self) -> np.ndarray:
        rhs = self.obs_scale * self.obs_rhs
        for penalty in self.penalties:
            rhs = rhs + penalty.r * penalty.rhs
        if self.extra_rhs is not None:
            rhs = rhs + self.extra_rhs
        return rhs

    def stabilization(self) -> sps.csr_matrix:
        if self.C is None:
            return sps.csr_matrix((self.n_multiplier, self.n_multiplier))
        return self.C

    def matrix(self) -> sps.csr_matrix:
        """The full symmetric saddle-point matrix."""
        if self.n_multiplier == 0:
            return self.primal_block()
        return sps.bmat([[self.primal_block(), self.B.T], [self.B, -self.stabilization()]], format="csr")

    def rhs(self) -> np.ndarray:
        return np.concatenate([self.primal_rhs(), self.l2])

    def split(self, solution: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return solution[: self.n_primal], solution[self.n_primal :]

    def with_penalties(self, update: Callable[[float], float]) -> SaddleSystem:
        """The same system with every penalty parameter r replaced by update(r)."""

        penalties = tuple(replace(penalty, r=update(penalty.r)) for penalty in self.penalties)
        parameters = dict(self.parameters, **{penalty.name: penalty.r for penalty in penalties})
        return replace(self, penalties=penalties, parameters=parameters)

    def fields(self, spaces: tuple[FemSpace, ...], values: np.ndarray) -> tuple[Field, ...]:
        """Splits a free DOF vector over a tuple of spaces."""

        out, start = [], 0
        for space in spaces:
            out.append(Field.from_free(space, values[start : start + space.n_free]))
            start += space.n_free
        return tuple(out)


@dataclass
class ReconstructionReport:
    """Reconstructed fields and their diagnostics.

    Attributes:
        formulation: the formulation solved.
        y: the reconstructed state.
        p: the reconstructed flux, for the first-order formulations.
        multipliers: multiplier fields in their own spaces; see `multiplier_members`.
        multiplier_members: how each multiplier field maps to the physical multiplier.
        primal: free primal DOF vector.
        multiplier: free multiplier DOF vector.
        cost: J_r(y).
        misfit: ||rho0^{-1}(y - y_obs)||_{L2(q_T)}.
        observed_norm: ||rho0^{-1} y||_{L2(q_T)}.
        observation_norm: ||rho0^{-1} y_obs||_{L2(q_T)}.
        residuals: equation residual norms by penalty name.
        primal_norm: ||y||_Y (or ||(y, p)||_U).
        multiplier_norm: L2 norm of the multipliers.
        multiplier_space_norm: multiplier norm in the multiplier space.
        stats: solver statistics.
        history: per-iteration rows (iteration, dual functional, relative residual) of an iterative solve.
    """

    formulation: Formulation
    y: Field
    p: Field | None
    multipliers: tuple[Field, ...]
    multiplier_members: tuple[Member | None, ...]
    primal: np.ndarray
    multiplier: np.ndarray
    cost: float
    misfit: float
    observed_norm: float
    observation_norm: float
    residuals: dict[str, float]
    primal_norm: float
    multiplier_norm: float
    multiplier_space_norm: float
    stats: dict = field(default_factory=dict)
    history: np.ndarray | None = None

    def as_dict(self) -> dict:
        """Scalar entries for the run report."""

        entries = {
            "formulation": self.formulation.value,
            "cost": self.cost,
            "misfit": self.misfit,
            "observed_norm": self.observed_norm,
            "observation_norm": self.observation_norm,
            "primal_norm": self.primal_norm,
            "multiplier_norm": self.multiplier_norm,
            "multiplier_space_norm": self.multiplier_space_norm,
        }
        entries.update({f"residual_{name}": value for name, value in self.residuals.items()})
        entries.update(self.stats)
        return entries


def _quadratic(matrix: sps.spmatrix, x: np.ndarray) -> float:
    return float(x @ (matrix @ x)) if x.size else 0.0


def build_report(
    system: SaddleSystem, primal: np.ndarray, multiplier: np.ndarray, stats: dict | None = None
) -> ReconstructionReport:
    """Evaluates the fields and norms of a solution of `system`."""

    primal_fields = system.fields(system.primal_spaces, primal)
    multiplier_fields = system.fields(system.multiplier_spaces, multiplier)

    observed_sq = _quadratic(system.obs_gram, primal)
    misfit_sq = observed_sq - 2.0 * float(system.obs_rhs @ primal) + system.observation_norm**2
    misfit = math.sqrt(max(misfit_sq, 0.0))
    residuals = {penalty.name: penalty.residual(primal) for penalty in system.penalties}
    cost = 0.5 * misfit**2 + sum(0.5 * penalty.r * residuals[penalty.name] ** 2 for penalty in system.penalties)

    return ReconstructionReport(
        formulation=system.formulation,
        y=primal_fields[0],
        p=primal_fields[1] if len(primal_fields) > 1 else None,
        multipliers=multiplier_fields,
        multiplier_members=system.multiplier_members,
        primal=primal,
        multiplier=multiplier,
        cost=cost,
        misfit=misfit,
        observed_norm=math.sqrt(max(observed_sq, 0.0)),
        observation_norm=system.observation_norm,
        residuals=residuals,
        primal_norm=math.sqrt(max(_quadratic(system.primal_gram, primal), 0.0)),
        multiplier_norm=math.sqrt(max(_quadratic(system.multiplier_l2_gram, multiplier), 0.0)),
        multiplier_space_norm=math.sqrt(max(_quadratic(system.multiplier_gram, multiplier), 0.0)),
        stats=dict(stats or {}),
    )
