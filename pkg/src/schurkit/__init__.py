"""Structure analysis of Schur-product preservers on matrix spaces.

The package decides whether a linear map on matrices preserves disjoint
entry supports or the entrywise product itself, reconstructs the weighted
permutation and permutation-conjugation canonical forms with certificates
or counterexample witnesses, computes two-sided certified estimates of
Schur multiplier norms, and simulates the truncation limits behind the
infinite-dimensional statements at finite size.
"""

from .errors import (
    DimensionTooSmall,
    ImageNotMonomial,
    IndexOutOfRange,
    MalformedInput,
    NonFiniteEntry,
    NotBijective,
    NotHermitian,
    NotMultiplicative,
    NotNullPreserving,
    SchurKitError,
    ShapeMismatch,
)
from .matrices import (
    all_ones,
    as_matrix,
    kronecker,
    matrix_from_json,
    matrix_to_json,
    matrix_unit,
    permutation_unitary,
    psd_project,
    schur_product,
    spectral_norm,
)
from .linmaps import (
    EntryPermutation,
    LinearMatrixMap,
    from_conjugation,
    from_weighted_permutation,
    identity_map,
    map_from_json,
    map_to_json,
    operator_norm_lower_bound,
    random_map,
    transpose_map,
)
from .structure import (
    CanonicalForm,
    Conjugation,
    NotCanonical,
    WeightedPermutation,
    Witness,
    amplification_lower_bound,
    analysis_report,
    classify_contraction,
    is_schur_multiplicative,
    is_schur_null_preserving,
    recover_weighted_permutation,
    row_column_deletion_map,
    verify_isometry,
)
from .multiplier import (
    MultiplierNormEstimate,
    certified_upper_bound,
    chain_check,
    evaluation_ratio,
    haagerup_feasible,
    multiplier_lower_bound,
    multiplier_norm,
    triangular_truncation_symbol,
)
from .truncation import (
    TruncationScheme,
    corner_project,
    diagonal_row_swap,
    pointwise_convergence_check,
    rearrangement_growth_probe,
    scheme_from_json,
    scheme_to_json,
    truncated_image,
)

__version__ = "0.1.0"

__all__ = [
    "SchurKitError",
    "ShapeMismatch",
    "IndexOutOfRange",
    "NonFiniteEntry",
    "NotHermitian",
    "NotBijective",
    "NotNullPreserving",
    "ImageNotMonomial",
    "NotMultiplicative",
    "DimensionTooSmall",
    "MalformedInput",
    "as_matrix",
    "all_ones",
    "schur_product",
    "matrix_unit",
    "spectral_norm",
    "psd_project",
    "kronecker",
    "permutation_unitary",
    "matrix_to_json",
    "matrix_from_json",
    "EntryPermutation",
    "LinearMatrixMap",
    "identity_map",
    "transpose_map",
    "from_weighted_permutation",
    "from_conjugation",
    "operator_norm_lower_bound",
    "random_map",
    "map_to_json",
    "map_from_json",
    "Witness",
    "WeightedPermutation",
    "Conjugation",
    "NotCanonical",
    "CanonicalForm",
    "is_schur_null_preserving",
    "is_schur_multiplicative",
    "recover_weighted_permutation",
    "classify_contraction",
    "verify_isometry",
    "amplification_lower_bound",
    "row_column_deletion_map",
    "analysis_report",
    "MultiplierNormEstimate",
    "multiplier_norm",
    "multiplier_lower_bound",
    "haagerup_feasible",
    "certified_upper_bound",
    "evaluation_ratio",
    "triangular_truncation_symbol",
    "chain_check",
    "TruncationScheme",
    "corner_project",
    "truncated_image",
    "pointwise_convergence_check",
    "rearrangement_growth_probe",
    "diagonal_row_swap",
    "scheme_to_json",
    "scheme_from_json",
]
