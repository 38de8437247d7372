"""First-order formulations on the pair (y, p)."""

from heatrecon.firstorder.formulations import assemble_mf4, assemble_mf4_alpha
from heatrecon.firstorder.operators import (
    PairField,
    apply_IJ,
    cell_jump_gram,
    equation_tables,
    flux_tables,
    multiplier_pair_spaces,
    pair_spaces,
)

__all__ = [
    "PairField",
    "apply_IJ",
    "assemble_mf4",
    "assemble_mf4_alpha",
    "cell_jump_gram",
    "equation_tables",
    "flux_tables",
    "multiplier_pair_spaces",
    "pair_spaces",
]
