from .counting import (
    count_noncompletion_embeddings,
    count_partite_embeddings,
    count_poor_embeddings,
    predicted_partite_count,
)
from .pairs import PairAssessment, as_fraction, assess_pair, p_density
from .partition import Partition, equalize, moved_vertices
from .selection import NoMonochromaticClique, PartSelection, select_colour_and_parts
from .srl import (
    IterationBudgetExceeded,
    RegularityDecomposition,
    defect_cauchy_schwarz,
    density_deviations,
    energy,
    srl_partition,
    strengthened_srl,
)

__all__ = [
    "IterationBudgetExceeded", "NoMonochromaticClique", "PairAssessment", "PartSelection",
    "Partition", "RegularityDecomposition", "as_fraction", "assess_pair",
    "count_noncompletion_embeddings", "count_partite_embeddings", "count_poor_embeddings",
    "defect_cauchy_schwarz", "density_deviations", "energy", "equalize", "moved_vertices",
    "p_density", "predicted_partite_count", "select_colour_and_parts", "srl_partition",
    "strengthened_srl",
]
