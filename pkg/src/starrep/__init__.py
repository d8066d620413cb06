"""starrep: finite-dimensional C*-algebra representations and their model theory.

Subspace calculus, matrix *-algebras with Wedderburn block structure, cyclic
subspaces and closures, the forking independence calculus with non-forking
extensions and canonical bases, positive linear functionals with GNS
representations, and a randomized verification harness.
"""

from .linalg import (
    DEFAULT_TOL,
    Subspace,
    ToleranceBreach,
    Tolerances,
    full_subspace,
    haar_unitary,
    hermitian_eig,
    is_psd,
    orthonormalize,
    project,
    psd_sqrt,
    subspace_intersection,
    subspace_sum,
    zero_subspace,
)
from .algebra import (
    BlockDecomposition,
    DecompositionError,
    StarAlgebra,
    commutant,
    conditional_expectation,
    double_commutant_check,
    generate_algebra,
    wedderburn_decompose,
)
from .representation import (
    Structure,
    acl,
    cyclic_subspace,
    cyclic_substructure,
    direct_sum,
    essential_discrete_parts,
)
from .independence import (
    FiniteBase,
    IndependenceReport,
    MorleyCheck,
    TypeDescriptor,
    canonical_base,
    descriptor_distance,
    descriptors_close,
    finite_base,
    is_independent,
    morley_average_check,
    nonforking_extension,
    type_of,
)
from .functionals import (
    GnsRep,
    OrthogonalityWitness,
    PositiveFunctional,
    RadonNikodym,
    difference_norm,
    embeds_as_subrepresentation,
    functional_norm,
    gns,
    gns_intertwiner,
    is_dominated,
    is_orthogonal,
    orthogonality_witness,
    radon_nikodym_operator,
    types_dominated,
    types_orthogonal,
    vector_state,
)
from .harness import (
    InstanceSpec,
    SuiteReport,
    random_structure,
    run_freeness_suite,
    run_functional_suite,
)

__all__ = [
    "DEFAULT_TOL", "Subspace", "ToleranceBreach", "Tolerances", "full_subspace",
    "haar_unitary", "hermitian_eig", "is_psd", "orthonormalize", "project",
    "psd_sqrt", "subspace_intersection", "subspace_sum", "zero_subspace",
    "BlockDecomposition", "DecompositionError", "StarAlgebra", "commutant",
    "conditional_expectation", "double_commutant_check", "generate_algebra",
    "wedderburn_decompose",
    "Structure", "acl", "cyclic_subspace", "cyclic_substructure", "direct_sum",
    "essential_discrete_parts",
    "FiniteBase", "IndependenceReport", "MorleyCheck", "TypeDescriptor",
    "canonical_base", "descriptor_distance", "descriptors_close", "finite_base",
    "is_independent", "morley_average_check", "nonforking_extension", "type_of",
    "GnsRep", "OrthogonalityWitness", "PositiveFunctional", "RadonNikodym",
    "difference_norm", "embeds_as_subrepresentation", "functional_norm", "gns",
    "gns_intertwiner", "is_dominated", "is_orthogonal", "orthogonality_witness",
    "radon_nikodym_operator", "types_dominated", "types_orthogonal", "vector_state",
    "InstanceSpec", "SuiteReport", "random_structure", "run_freeness_suite",
    "run_functional_suite",
]

__version__ = "0.1.0"
