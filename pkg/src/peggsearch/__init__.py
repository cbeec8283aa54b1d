"""Search for high Pegg Value solutions of A^x + B^y = C^z."""

from .equations import (
    Exponents,
    NoSolution,
    OriginalEquation,
    ParseError,
    PeggReport,
    Permutation,
    ResultantEquation,
    convert_to_resultant,
    cvt,
    generate_identity,
    parse_equation,
    pegg_report,
    pegg_value,
    prime_power_profile,
    reassociate_min,
    smallest_multiplier,
    validate_original,
)
from .search import (
    EmptyRange,
    Exhausted,
    SearchConfig,
    SearchRecord,
    a_range,
    base_minimums,
    c_range,
    coefficient_candidates,
    ladder,
    search_all,
    search_once,
)

__version__ = "0.1.0"

# the estimator wrappers pull in scikit-learn, so load them on first use
_LAZY = {"PeggSearch", "PeggConverter"}


def __getattr__(name):
    if name in _LAZY:
        from . import estimator
        return getattr(estimator, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "EmptyRange", "Exhausted", "Exponents", "NoSolution", "OriginalEquation",
    "ParseError", "PeggConverter", "PeggReport", "PeggSearch", "Permutation",
    "ResultantEquation", "SearchConfig", "SearchRecord", "a_range",
    "base_minimums", "c_range", "coefficient_candidates", "convert_to_resultant",
    "cvt", "generate_identity", "ladder", "parse_equation", "pegg_report",
    "pegg_value", "prime_power_profile", "reassociate_min", "search_all",
    "search_once", "smallest_multiplier", "validate_original",
]
