"""prodlab: exact-arithmetic laboratory for product sets, shifts, and
multiplicative energies of finite rational sets."""

from .errors import (
    BudgetError,
    ProdlabError,
    RegimeError,
    ZeroValueError,
)
from .rationals import (
    FactoredRational,
    add_shift,
    coprime,
    factor,
    inv,
    mul,
    valuation,
)
from .sets import (
    DoublingReport,
    RationalSet,
    SumsetResult,
    dilate,
    doubling,
    ggp,
    k_fold_product,
    k_fold_sumset,
    product_set,
    read_set_file,
    shift,
    sumset,
    write_set_file,
)
from .structure import (
    AffineCanonicalForm,
    SignPatternDecomposition,
    ValuationImage,
    canonical_affine_form,
    check_collision_claim,
    mult_dimension,
    sign_pattern_decompose,
    valuation_image,
)
from .energy import (
    GammaTable,
    WeightVector,
    additive_energy_k,
    energy_bruteforce,
    energy_k,
    gamma_k,
    weighted_energy,
)
from .bounds import (
    BoundReport,
    LambdaEstimate,
    lambda_lower_estimate,
    subset_stability_check,
    theorem_upper_bound,
    verify_bounds,
)
from .dirichlet import (
    DirichletPolynomial,
    build,
    convergence_report,
    exact_mean_value,
    mean_value_2k,
)
from .sunit import (
    SolutionSet,
    SUnitInstance,
    bound_diagnostic,
    generate_units,
    solve,
)

__version__ = "0.1.0"
