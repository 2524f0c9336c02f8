"""Sumset, sum-free and prime-product computations in finite abelian groups."""

from .errors import (
    DomainError,
    HypothesisError,
    InvariantViolation,
    LimitError,
    PrimeCoverError,
    StructuralError,
    TheoremViolation,
    UnsupportedModulus,
)
from .groups import (
    FiniteAbelianGroup,
    GroupSubset,
    Subgroup,
    enumerate_subgroups_of_index,
    make_group,
    quotient_map,
    rational_density,
    unit_group,
)
from .sumsets import (
    cosets_met,
    is_coset_union,
    iterated_sumset,
    kneser_audit,
    lambda_threshold,
    stabilizer,
    sumset,
)
from .exceptional import (
    classify_exceptional,
    feasible_indices,
    search_exceptional,
    trouble_index_report,
    verify_certificate,
)
from .hypotheses import apply_cover_theorem, check_hypotheses, covers, four_prime_gate
from .sieve import sieve_primes
from .cover import min_cover_exponent, prime_residues, verify_product_cover
from .subgroup_primes import least_P2_in_cosets, least_prime_in_subgroup
from .density import density_probe, exponent_ratio
from .convolution import convolution_identity_check

__version__ = "0.1.0"
