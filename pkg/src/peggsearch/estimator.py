"""scikit-learn style wrappers around the search and the converter.

These follow the estimator conventions (constructor only stores
parameters, ``fit`` does the work and sets trailing-underscore attributes)
so they work with ``get_params``/``clone``. Nothing here is a learner.
"""

from __future__ import annotations

from typing import List, Optional

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .equations import (
    OriginalEquation,
    convert_to_resultant,
    parse_equation,
    pegg_report,
    reassociate_min,
    validate_original,
)
from .search import (
    Exhausted,
    SearchConfig,
    SearchEngine,
    SearchRecord,
    ladder,
    search_all,
    search_once,
)
from .validation import (
    check_coefficients,
    check_equation_list,
    check_exponents,
    check_permutations,
    check_positive_int,
)


class PeggSearch(BaseEstimator):
    """Search one exponent set for high Pegg Value equations.

    ``fit`` prepares tables, filters and coefficient ranges; the search
    methods reuse them.
    """

    def __init__(self, exps=(3, 3, 4), s_min: int = 1, s_max: int = 1 << 28,
                 min_pegg: int = 2, permutations=None, coefficients=None,
                 workers: int = 1, reassociate: bool = True, tables_dir=None):
        self.exps = exps
        self.s_min = s_min
        self.s_max = s_max
        self.min_pegg = min_pegg
        self.permutations = permutations
        self.coefficients = coefficients
        self.workers = workers
        self.reassociate = reassociate
        self.tables_dir = tables_dir

    def _config(self) -> SearchConfig:
        kw = dict(
            exps=check_exponents(self.exps),
            s_min=check_positive_int(self.s_min, "s_min"),
            s_max=check_positive_int(self.s_max, "s_max"),
            min_pegg=check_positive_int(self.min_pegg, "min_pegg"),
            coefficients=check_coefficients(self.coefficients),
            workers=check_positive_int(self.workers, "workers"),
            reassociate=bool(self.reassociate),
            tables_dir=self.tables_dir,
        )
        perms = check_permutations(self.permutations)
        if perms:
            kw["permutations"] = perms
        return SearchConfig(**kw)

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        self.engine_ = SearchEngine(self.config_)
        self.coefficients_ = {p.perm.value: [row[0] for row in p.coeffs]
                              for p in self.engine_.plans}
        return self

    def search(self):
        check_is_fitted(self, "config_")
        if self.config_.workers > 1:
            return search_once(self.config_)
        for _, rec in self.engine_.iter_records():
            return rec
        return Exhausted(dict(self.engine_.stats))

    def search_all(self) -> List[SearchRecord]:
        check_is_fitted(self, "config_")
        if self.config_.workers > 1:
            return search_all(self.config_)
        recs = [rec for _, rec in self.engine_.iter_records()]
        return sorted(recs, key=SearchRecord.sort_key)

    def ladder(self, progress=None):
        check_is_fitted(self, "config_")
        return ladder(self.config_, progress=progress)


class PeggConverter(TransformerMixin, BaseEstimator):
    """Map original equations (text or :class:`OriginalEquation`) to Pegg reports."""

    def __init__(self, reassociate: bool = False, s_max: Optional[int] = None):
        self.reassociate = reassociate
        self.s_max = s_max

    def fit(self, X=None, y=None):
        self.n_seen_ = 0 if X is None else len(check_equation_list(X))
        return self

    def _one(self, item) -> dict:
        eq = parse_equation(item) if isinstance(item, str) else item
        if not isinstance(eq, OriginalEquation):
            raise TypeError(f"cannot convert {type(item).__name__}")
        check = validate_original(eq)
        res = convert_to_resultant(eq)
        if self.reassociate:
            if self.s_max is None:
                raise ValueError("reassociate=True needs an s_max bound")
            res = reassociate_min(res, self.s_max)
        return {
            "original": eq,
            "violations": list(check.violations),
            "resultant": res,
            "report": pegg_report(res),
        }

    def transform(self, X) -> List[dict]:
        return [self._one(item) for item in check_equation_list(X)]
