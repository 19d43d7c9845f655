"""Gradient flows on projective space and flag manifolds, their Smale orders and attractor lattices."""

from .attractors import (
    AttractorRealization,
    FlagContext,
    LatticeIsomorphismReport,
    PointClass,
    ProjectiveContext,
    attractor_from_upper,
    attractor_lattice,
    classify_point,
    lattice_isomorphism_check,
)
from .coxeter import (
    DimensionSignature,
    bruhat_leq,
    coset_poset,
    length,
    longest_element,
    minimal_coset_reps,
)
from .errors import *  # noqa: F401,F403
from .flag import (
    FixedFlag,
    FlagPoint,
    SmaleWitness,
    SpecialFlowGenerator,
    cell_of,
    cell_partition_check,
    default_diag,
    fixed_flags,
    flag_height,
    flow_flag,
    limits,
    smale_relation,
    smale_witness_search,
    transversality_probe,
    validate_special,
    verify_smale_equals_bruhat,
)
from .numerics import (
    HermitianSpectrum,
    hermitian_eigendecompose,
    numerical_rank,
    orthonormalize,
    singular_values,
)
from .poset import AttractorLattice, FinitePoset, enumerate_upper_sets, hasse_export, make_poset
from .projective import (
    FixedComponent,
    ProjectivePoint,
    component_smale_order,
    fixed_components,
    flow,
    gradient_field,
    height,
    limit_map,
    projective_attractor_pairs,
    stable_membership,
)

__version__ = "0.1.0"
