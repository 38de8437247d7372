"""Module for weight vocabulary."""

from enum import Enum


class WeightKind(Enum):
    """Weight families.

    Attributes:
        UNIT: every member is 1.
        POWER: every member is (T/t)^k, its inverse vanishes like a power at t = 0.
        CARLEMAN_C: exp(beta/t) family and its t^{3/2}, t^{1/2} companions.
        CARLEMAN_P: exp(beta/t^2) family and its t, 1/t, 1/t^2 companions.
    """

    UNIT = "unit"
    POWER = "power"
    CARLEMAN_C = "carleman_c"
    CARLEMAN_P = "carleman_p"


class Member(Enum):
    """Members of a weight family.

    RHO, RHO0 and RHO1 are the roles used by the formulations (multiplier, observation and flux
    weights); they are capped. The BASE members are the raw, uncapped family members.
    """

    RHO = "rho"
    RHO0 = "rho0"
    RHO1 = "rho1"
    BASE = "base"
    BASE0 = "base0"
    BASE1 = "base1"
    BASE2 = "base2"
