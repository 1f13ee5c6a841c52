"""Finite-dimensional Hopf C*-algebras, their coactions, and numerical checks of
freeness, canonical invariant states, Frobenius structure and the
Morita-Galois criterion."""

from .coaction import (CoAction, canonical_state, comultiplication_coaction, freeness_oracles,
                       is_free_galois, restrict, spectral_subspace, trivial_coaction, validate_coaction)
from .csalg import (CStarAlgebra, Functional, check_functional, dual_basis, from_structure_constants,
                    frobenius_report, matrix_algebra, multimatrix_algebra, subalgebra, tensor_product,
                    wedderburn_decompose)
from .errors import QGaloisError
from .examples import crossed_product, heisenberg_cocycle, projective_cocycle_algebra
from .fqgroup import (FiniteQuantumGroup, build_function_algebra, build_group_algebra, dual_quantum_group,
                      haar_state, irreps, standard_solution, validate_hopf)
from .morita import (BiActionAlgebra, cotensor, equivariant_isomorphism, exchange_map,
                     joint_canonical_state, mkey_report, onesided_report, validate_biaction)

__version__ = "0.1.0"

__all__ = [
    "BiActionAlgebra", "CStarAlgebra", "CoAction", "FiniteQuantumGroup", "Functional", "QGaloisError",
    "build_function_algebra", "build_group_algebra", "canonical_state", "check_functional",
    "comultiplication_coaction", "cotensor", "crossed_product", "dual_basis", "dual_quantum_group",
    "equivariant_isomorphism", "exchange_map", "freeness_oracles", "from_structure_constants",
    "frobenius_report", "haar_state", "heisenberg_cocycle", "irreps", "is_free_galois",
    "joint_canonical_state", "matrix_algebra", "mkey_report", "multimatrix_algebra", "onesided_report",
    "projective_cocycle_algebra", "restrict", "spectral_subspace", "standard_solution", "subalgebra",
    "tensor_product", "trivial_coaction", "validate_biaction", "validate_coaction", "validate_hopf",
    "wedderburn_decompose",
]
