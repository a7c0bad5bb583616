"""Policy-driven random password generation with executable verification tools."""

from .checker import correctness_experiment, satisfies, satisfies_bounds, satisfies_length
from .generator import generate, generate_character, permute
from .oracle import (
    DomainTooLarge,
    ExactDistribution,
    SatisfyingSet,
    count_satisfying,
    enumerate_satisfying,
    exact_distribution,
    ideal_sample,
)
from .policy import CharSetSpec, Policy, PolicyError, PolicyErrorKind, default_charset, parse_policy, validate
from .rng import (
    RejectionLimitExceeded,
    make_choice_source,
    sample_chrome,
    sample_keepass,
    seeded_choice_source,
    system_choice_source,
)

__version__ = "0.1.0"
