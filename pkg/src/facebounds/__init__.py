"""Face numbers of polytopes: exact formulas, exact projection checks and
Monte Carlo angle estimators."""

__version__ = "0.1.0"

from .facecount import (  # noqa: F401
    FVector, BoundReport, binom, rho, cyclic_fk, cyclic_facets, cyclic_fvector,
    lemma31_residual, tightness_table, barnette_bound, hinman_bounds, gubc_values,
)
from .polytope import (  # noqa: F401
    CyclicSpec, PolytopeModel, FaceLattice, build_cyclic, cyclic, gale_facets,
    face_lattice, cube, simplex, regular_simplex, crosspolytope, tangent_cone,
    facet_intrinsic, dual_fvector,
)
