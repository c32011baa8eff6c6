"""normhom: exact computation of covering-based cochain complexes, cone
homology over injective resolutions, and derived-limit checks for towers of
finitely generated abelian groups."""

from .abelian import (
    FGAbelianGroup,
    InjectiveResolution,
    MixedModuleElement,
    SmithDecomposition,
    cokernel,
    ext,
    hom,
    is_isomorphic,
    resolve_injective,
    smith_normal_form,
)
from .complexes import (
    CochainHomotopy,
    CochainMap,
    CohomologyData,
    IntegerCochainComplex,
    cohomology,
    cohomology_all,
    validate_complex,
)
from .cone import (
    ConeComplex,
    ConeElement,
    ConeHomologyEngine,
    cone_boundary_apply,
    cone_homology,
    dualize,
    induced_cone_map,
    homotopy_lift,
)
from .intlinalg import IntMatrix
from .les import (
    CochainSES,
    GroupSES,
    LongExactSequenceReport,
    coefficient_les,
    connecting_sequence,
)

__version__ = "0.1.0"
