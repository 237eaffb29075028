"""momentvar: moment-map energy and critical points on algebra varieties.

The variety of n-dimensional complex algebras carries a natural energy, the
squared norm of the moment map for the basis-change action.  This package
computes the moment-map matrix, the energy and its gradient, runs the
gradient flow on the unit sphere of structure tensors, tests and classifies
critical points by their coprime integer type, and reproduces the full
dimension-2 and dimension-3 classification tables for associative algebras.
"""

from .algebra import (
    AlgebraJSONError,
    AlgebraTensor,
    act_group,
    act_lie,
    direct_sum,
    inner_product,
    is_associative,
)
from .catalog import CatalogEntry, catalog_get, catalog_names, table_entries
from .flow import FlowConfig, FlowTrace, detect_degeneration, flow_to_critical, orbit_invariants
from .linalg import HermEig, hermitian_eig, lstsq_min_norm, nullspace
from .moment import (
    CriticalReport,
    MomentMatrix,
    RationalReconstructionError,
    critical_test,
    critical_type,
    euclidean_gradient,
    f_value,
    moment_matrix,
    value_from_type,
)
from .structure import (
    DerivationBasis,
    GammaPair,
    NikolayevskyResult,
    SubstructureReport,
    derivation_algebra,
    eigenspace_split,
    gamma_structure,
    nikolayevsky,
    semidirect_sum,
    structure_checks,
    substructures,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraJSONError",
    "AlgebraTensor",
    "CatalogEntry",
    "CriticalReport",
    "DerivationBasis",
    "FlowConfig",
    "FlowTrace",
    "GammaPair",
    "HermEig",
    "MomentMatrix",
    "NikolayevskyResult",
    "RationalReconstructionError",
    "SubstructureReport",
    "act_group",
    "act_lie",
    "catalog_get",
    "catalog_names",
    "critical_test",
    "critical_type",
    "derivation_algebra",
    "detect_degeneration",
    "direct_sum",
    "eigenspace_split",
    "euclidean_gradient",
    "f_value",
    "flow_to_critical",
    "gamma_structure",
    "hermitian_eig",
    "inner_product",
    "is_associative",
    "lstsq_min_norm",
    "moment_matrix",
    "nikolayevsky",
    "nullspace",
    "orbit_invariants",
    "semidirect_sum",
    "structure_checks",
    "substructures",
    "table_entries",
    "value_from_type",
]
