"""Bounded search for single-coefficient original equations.

The loop nest is permutation -> c -> f -> a. For every (f, c) pair the
elimination table may skip the whole ``a`` loop; otherwise the skipahead
table yields only ``a`` values compatible with a y-th power residue, the
remaining filter moduli prune further, and survivors get the exact root
test. Coprimality is checked only after a hit, because a hit is rare and
the power test is cheaper than a gcd on the common path.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple


from .equations import (
    Exponents,
    OriginalEquation,
    PeggReport,
    Permutation,
    ResultantEquation,
    convert_to_resultant,
    pegg_report,
    prime_power_profile,
    reassociate_min,
    smallest_multiplier,
)
from .numtheory import (
    WORD_MAX,
    ceil_root_of_ratio,
    factorize,
    floor_root_of_ratio,
    integer_kth_root,
    is_k_free,
)
from .powerfilter import (
    AX_MINUS_FC,
    FC_MINUS_AX,
    ResidueFilterSet,
    build_filter,
    diff_mask,
    fc_residues,
)
from .residue_tables import (
    DEFAULT_BUDGET,
    EliminationTable,
    SkipaheadTable,
    TableSpec,
    admissible_a_array,
    default_spec,
    load_or_build,
    single_coefficient_list,
)

SEARCH_PERMUTATIONS = (Permutation.AX_MINUS_CZ, Permutation.CZ_MINUS_AX)

# coefficient allowed on each exponent of {3,4,5} when no re-association is possible
LEMMA_COEFFICIENTS = {3: 2, 4: 2, 5: 8}
# base minimums for those cases, as (numerator, denominator) of V per exponent
_LEMMA_MINIMUMS = {
    3: {3: (1, 8), 4: (1, 2), 5: (1, 1)},
    4: {3: (1, 4), 4: (1, 2), 5: (1, 1)},
    5: {3: (1, 2), 4: (1, 1), 5: (1, 1)},
}


class EmptyRange(ValueError):
    def __init__(self, lo: int, hi: int, what: str = "c"):
        self.lo = lo
        self.hi = hi
        super().__init__(f"empty {what} range: {what}_min={lo} > {what}_max={hi}")


@dataclass(frozen=True)
class SearchConfig:
    exps: Tuple[int, int, int]
    permutations: Tuple[Permutation, ...] = SEARCH_PERMUTATIONS
    s_min: int = 1
    s_max: int = 1 << 28
    min_pegg: int = 2
    coefficients: Optional[Tuple[int, ...]] = None
    workers: int = 1
    single_coefficients: bool = True
    reassociate: bool = True
    reassociate_limit: int = 25
    reassociate_s_max: Optional[int] = None
    lemma_mode: bool = False
    table_specs: Optional[Tuple[TableSpec, ...]] = None
    filter_moduli: Optional[Tuple[int, ...]] = None
    budget_bytes: int = DEFAULT_BUDGET
    tables_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "exps", Exponents(*self.exps))
        perms = tuple(Permutation(p) for p in self.permutations)
        object.__setattr__(self, "permutations", perms)
        if self.coefficients is not None:
            object.__setattr__(self, "coefficients", tuple(int(f) for f in self.coefficients))
        if min(self.exps) < 3:
            raise ValueError("exponents must be >= 3")
        if not perms or any(p not in SEARCH_PERMUTATIONS for p in perms):
            raise ValueError("permutations must be a non-empty subset of ax_minus_cz, cz_minus_ax")
        if self.s_min < 1 or self.s_min > self.s_max:
            raise ValueError("need 1 <= s_min <= s_max")
        if self.min_pegg < 1:
            raise ValueError("min_pegg must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        x, y, z = self.exps
        if math.gcd(x, z) != 1 or math.gcd(y, z) != 1:
            raise ValueError("the coefficient exponent z must be coprime to x and y")
        if self.lemma_mode and sorted(self.exps) != [3, 4, 5]:
            raise ValueError("lemma_mode applies only to the {3,4,5} exponent set")

    @property
    def V(self) -> int:
        return self.min_pegg

    def spec_for(self, perm: Permutation, coefficient: int = 0) -> TableSpec:
        if self.table_specs:
            for spec in self.table_specs:
                if spec.permutation == perm and spec.coefficient == coefficient:
                    if tuple(spec.exps) != tuple(self.exps):
                        raise ValueError(
                            f"table spec for {tuple(spec.exps)} does not match search "
                            f"exponents {tuple(self.exps)}"
                        )
                    return spec
            if coefficient:
                raise KeyError(coefficient)
            raise ValueError(f"no table spec given for {perm.value}")
        return default_spec(self.exps, perm, coefficient, self.budget_bytes)


@dataclass(frozen=True)
class BaseMinimums:
    a_min1: int
    b_min1: int
    c_min1: int


@dataclass(frozen=True)
class SearchRecord:
    original: OriginalEquation
    resultant: ResultantEquation
    report: PeggReport
    base: ResultantEquation = field(compare=False)

    @property
    def size(self) -> int:
        return self.resultant.size

    def sort_key(self):
        return (self.size, self.original.a, self.original.c)

    def to_dict(self) -> dict:
        o, r = self.original, self.resultant
        return {
            "exponents": list(o.exps),
            "permutation": o.permutation.value,
            "f": str(o.f), "a": str(o.a), "b": str(o.b), "c": str(o.c),
            "N": str(r.N), "A": str(r.A), "B": str(r.B), "C": str(r.C),
            "pegg_value": str(self.report.pegg_value),
            "pegg_power": round(self.report.pegg_power, 6),
            "log2_size": round(self.report.log2_size, 6),
            "stolen": self.report.stolen,
            "equation": str(o),
            "resultant": str(r),
        }


@dataclass
class Exhausted:
    """The whole range was searched without a qualifying equation."""

    stats: Dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


def _highest(exps) -> List[int]:
    h = max(exps)
    return [i for i in range(3) if exps[i] == h]


def base_minimums(config: SearchConfig) -> BaseMinimums:
    """Smallest original bases that can still reach Pegg Value ``V``.

    The base(s) on the highest exponent must be at least V; nothing else is
    forced when the minimum may later be re-associated. In ``lemma_mode``
    (no re-association) the {3,4,5} minimums scale V by the ratio of
    resultant coefficients.
    """
    V = config.V
    exps = config.exps
    if config.lemma_mode:
        placement = exps.z
        table = _LEMMA_MINIMUMS[placement]
        mins = [-(-V * table[e][0] // table[e][1]) for e in exps]
        return BaseMinimums(*mins)
    hi = _highest(exps)
    mins = [V if i in hi else 1 for i in range(3)]
    return BaseMinimums(*mins)


def multiplier_for(exps, f: int) -> int:
    return smallest_multiplier(OriginalEquation(exps, 1, 1, f, 1, 1, 1))


def _highest_profile_ratio(exps) -> Fraction:
    """T: the largest v_p(f) / (power of p in the highest-exponent coefficient)."""
    hi = _highest(exps)[0]
    best = Fraction(0)
    for v in range(1, exps[2]):
        prof = prime_power_profile(exps, 2, v)
        best = max(best, Fraction(v, prof[hi]))
    return best


def highest_coefficient(exps, f: int) -> int:
    """Resultant coefficient R carried by the highest-exponent base."""
    hi = _highest(exps)[0]
    R = 1
    for p, v in factorize(f).items():
        R *= p ** prime_power_profile(exps, 2, v)[hi]
    return R


def r_max(config: SearchConfig) -> int:
    H = max(config.exps)
    return integer_kth_root(config.s_max, H) // config.V


def coefficient_limit(config: SearchConfig) -> int:
    """Largest coefficient worth considering: floor(R_max ** T)."""
    R = r_max(config)
    if R < 1:
        return 0
    T = _highest_profile_ratio(config.exps)
    return integer_kth_root(R**T.numerator, T.denominator)


def coefficient_candidates(config: SearchConfig,
                           permutation: Optional[Permutation] = None) -> List[int]:
    """Coefficients surviving the three pruning steps.

    1. f must be z-th power free.
    2. ``(R(f) * V)^H <= S_max`` where R(f) is the resultant coefficient on
       the highest-exponent base.
    3. the c-range for the permutation must be non-empty.
    """
    perms = [Permutation(permutation)] if permutation else list(config.permutations)
    x, y, z = config.exps
    H = max(config.exps)
    if config.coefficients is not None:
        pool = sorted(set(f for f in config.coefficients if f >= 2))
    elif config.lemma_mode:
        pool = [LEMMA_COEFFICIENTS[z]]
    else:
        pool = range(2, coefficient_limit(config) + 1)
    out = []
    for f in pool:
        if not is_k_free(f, z):
            continue
        if (highest_coefficient(config.exps, f) * config.V) ** H > config.s_max:
            continue
        N = multiplier_for(config.exps, f)
        for perm in perms:
            try:
                c_range(f, perm, config, N=N)
            except EmptyRange:
                continue
            out.append(f)
            break
    return out


def c_range(f: int, permutation, config: SearchConfig,
            N: Optional[int] = None, mins: Optional[BaseMinimums] = None) -> Tuple[int, int]:
    perm = Permutation(permutation)
    x, y, z = config.exps
    N = N or multiplier_for(config.exps, f)
    mins = mins or base_minimums(config)
    if perm == Permutation.AX_MINUS_CZ:
        c_min = mins.c_min1
        c_max = floor_root_of_ratio(config.s_max // N - mins.b_min1**y, f, z)
    elif perm == Permutation.CZ_MINUS_AX:
        c_min = max(
            mins.c_min1,
            ceil_root_of_ratio(config.s_min, N * f, z),
            ceil_root_of_ratio(mins.a_min1**x + mins.b_min1**y, f, z),
        )
        c_max = floor_root_of_ratio(config.s_max, N * f, z)
    else:
        raise ValueError("c_range is defined for ax_minus_cz and cz_minus_ax only")
    if c_min > c_max:
        raise EmptyRange(c_min, c_max)
    if c_max > WORD_MAX:
        raise OverflowError(f"c_max={c_max} exceeds the 64-bit base limit")
    return c_min, c_max


def a_range(f: int, c: int, permutation, config: SearchConfig,
            N: Optional[int] = None, mins: Optional[BaseMinimums] = None) -> Tuple[int, int]:
    perm = Permutation(permutation)
    x, y, z = config.exps
    N = N or multiplier_for(config.exps, f)
    mins = mins or base_minimums(config)
    fcz = f * c**z
    if perm == Permutation.AX_MINUS_CZ:
        a_min = max(
            mins.a_min1,
            ceil_root_of_ratio(config.s_min, N, x),
            ceil_root_of_ratio(fcz + mins.b_min1**y, 1, x),
        )
        a_max = integer_kth_root(config.s_max // N, x)
    elif perm == Permutation.CZ_MINUS_AX:
        a_min = mins.a_min1
        if x == y:
            a_min = max(a_min, ceil_root_of_ratio(fcz, 2, x))
        a_max = floor_root_of_ratio(fcz - mins.b_min1**y, 1, x)
    else:
        raise ValueError("a_range is defined for ax_minus_cz and cz_minus_ax only")
    if a_min > a_max:
        raise EmptyRange(a_min, a_max, "a")
    if a_max > WORD_MAX:
        raise OverflowError(f"a_max={a_max} exceeds the 64-bit base limit")
    return a_min, a_max


@dataclass
class _PermPlan:
    perm: Permutation
    elim: EliminationTable
    skip: SkipaheadTable
    single: Dict[int, SkipaheadTable]
    yfilter: ResidueFilterSet
    single_filters: Dict[int, ResidueFilterSet]
    coeffs: List[Tuple[int, int, int, int]]  # (f, N, c_min, c_max)


class SearchEngine:
    """Prepared tables, filters and coefficient ranges for one configuration."""

    def __init__(self, config: SearchConfig):
        self.config = config
        self.mins = base_minimums(config)
        x, y, z = config.exps
        base_filter = build_filter(y, config.filter_moduli or (), exponents=(x, z))
        self.plans: List[_PermPlan] = []
        for perm in config.permutations:
            spec = config.spec_for(perm)
            elim = load_or_build(spec, "elim", config.tables_dir)
            skip = load_or_build(spec, "skip", config.tables_dir)
            single, single_filters = {}, {}
            coeffs = []
            for f in coefficient_candidates(config, perm):
                N = multiplier_for(config.exps, f)
                try:
                    lo, hi = c_range(f, perm, config, N=N, mins=self.mins)
                except EmptyRange:
                    continue
                coeffs.append((f, N, lo, hi))
            if config.single_coefficients:
                for f in single_coefficient_list(config.exps):
                    if not any(f == row[0] for row in coeffs):
                        continue
                    try:
                        sspec = config.spec_for(perm, f)
                    except KeyError:
                        continue
                    single[f] = load_or_build(sspec, "skip", config.tables_dir)
                    single_filters[f] = base_filter.without(sspec.skip_modulus)
            yfilter = base_filter.without(spec.skip_modulus)
            self.plans.append(_PermPlan(perm, elim, skip, single, yfilter, single_filters, coeffs))
        self.stats = {"pairs": 0, "eliminated": 0, "candidates": 0, "tested": 0, "hits": 0}

    def iter_records(self, part: int = 0, parts: int = 1) -> Iterator[Tuple[tuple, SearchRecord]]:
        """Yield ``(loop_key, record)`` in loop order for c values with c = part (mod parts)."""
        for pidx, plan in enumerate(self.plans):
            if not plan.coeffs:
                continue
            c_lo = min(row[2] for row in plan.coeffs)
            c_hi = max(row[3] for row in plan.coeffs)
            start = c_lo + ((part - c_lo) % parts)
            active = sorted(plan.coeffs, key=lambda row: row[2])
            for c in range(start, c_hi + 1, parts):
                for f, N, lo, hi in active:
                    if lo > c:
                        break
                    if c > hi:
                        continue
                    for rec in self._pair(plan, f, N, c):
                        yield (pidx, c, f, rec.original.a), rec

    def _pair(self, plan: _PermPlan, f: int, N: int, c: int) -> Iterator[SearchRecord]:
        cfg = self.config
        x, y, z = cfg.exps
        self.stats["pairs"] += 1
        R = f * c**z
        if plan.elim.eliminated(R):
            self.stats["eliminated"] += 1
            return
        try:
            a_lo, a_hi = a_range(f, c, plan.perm, cfg, N=N, mins=self.mins)
        except EmptyRange:
            return
        table = plan.single.get(f, plan.skip)
        yfilter = plan.single_filters.get(f, plan.yfilter)
        cand = admissible_a_array(table, table.reducer.reduce(R), a_lo, a_hi)
        if not cand.size:
            return
        self.stats["candidates"] += int(cand.size)
        cz_first = plan.perm == Permutation.CZ_MINUS_AX
        direction = FC_MINUS_AX if cz_first else AX_MINUS_FC
        if yfilter.moduli:
            cand = cand[diff_mask(yfilter, fc_residues(yfilter, f, c, z), cand, x, direction)]
        s_cap = cfg.reassociate_s_max or cfg.s_max
        for a in cand.tolist():
            self.stats["tested"] += 1
            ax = a**x
            D = R - ax if cz_first else ax - R
            if D <= 0:
                continue
            b = integer_kth_root(D, y)
            if b**y != D:
                continue
            if math.gcd(a, f * c) != 1:
                continue
            rec = self._record(plan.perm, f, a, b, c, s_cap)
            if rec is not None:
                self.stats["hits"] += 1
                yield rec

    def _record(self, perm, f, a, b, c, s_cap) -> Optional[SearchRecord]:
        cfg = self.config
        orig = OriginalEquation(cfg.exps, 1, 1, f, a, b, c, perm)
        base = convert_to_resultant(orig)
        res = base
        if cfg.reassociate and not cfg.lemma_mode:
            res = reassociate_min(base, s_cap, cfg.reassociate_limit)
        rep = pegg_report(res)
        if rep.pegg_value < cfg.V:
            return None
        return SearchRecord(orig, res, rep, base)


def _worker_first(args):
    config, part, parts = args
    eng = SearchEngine(config)
    for key, rec in eng.iter_records(part, parts):
        return key, rec, eng.stats
    return None, None, eng.stats


def _worker_all(args):
    config, part, parts = args
    eng = SearchEngine(config)
    return [rec for _, rec in eng.iter_records(part, parts)], eng.stats


def _merge_stats(stats_list) -> Dict[str, int]:
    out: Dict[str, int] = {}
    for st in stats_list:
        for k, v in st.items():
            out[k] = out.get(k, 0) + v
    return out


def search_once(config: SearchConfig):
    """First qualifying record in loop order, or :class:`Exhausted`.

    With several workers each takes a stride of c values; the record with
    the smallest loop key wins, which is the one a single worker finds.
    """
    if config.workers == 1:
        eng = SearchEngine(config)
        for _, rec in eng.iter_records():
            return rec
        return Exhausted(eng.stats)
    n = config.workers
    with ProcessPoolExecutor(max_workers=n) as pool:
        results = list(pool.map(_worker_first, [(config, i, n) for i in range(n)]))
    hits = [(key, rec) for key, rec, _ in results if rec is not None]
    if hits:
        return min(hits, key=lambda kr: kr[0])[1]
    return Exhausted(_merge_stats(st for _, _, st in results))


def search_all(config: SearchConfig, stats: Optional[dict] = None) -> List[SearchRecord]:
    """Every qualifying record in range, sorted by (size, a, c)."""
    if config.workers == 1:
        eng = SearchEngine(config)
        recs = [rec for _, rec in eng.iter_records()]
        all_stats = eng.stats
    else:
        n = config.workers
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_worker_all, [(config, i, n) for i in range(n)]))
        recs = [r for part, _ in results for r in part]
        all_stats = _merge_stats(st for _, st in results)
    if stats is not None:
        stats.update(all_stats)
    return sorted(recs, key=SearchRecord.sort_key)


@dataclass(frozen=True)
class LadderRow:
    log2_size: float
    pegg_value: int
    pegg_power: float
    record: SearchRecord

    def to_dict(self) -> dict:
        out = self.record.to_dict()
        out.update(log2_size=round(self.log2_size, 6), pegg_value=str(self.pegg_value),
                   pegg_power=round(self.pegg_power, 6))
        return out


def _points(rec: SearchRecord) -> List[SearchRecord]:
    """The record itself plus, when re-association moved it, the plain conversion."""
    pts = [rec]
    if rec.base is not rec.resultant and rec.base != rec.resultant:
        rep = pegg_report(rec.base)
        pts.append(SearchRecord(rec.original, rec.base, rep, rec.base))
    return pts


def ladder(config: SearchConfig, progress=None) -> List[LadderRow]:
    """Smallest equations with strictly increasing Pegg Values.

    The size range is cut at powers of two. Each chunk is searched for
    everything above the best value so far; the chunk's hits are then swept
    in size order, keeping each one that beats the running best.
    """
    rows: List[LadderRow] = []
    best = config.min_pegg - 1
    pool: List[SearchRecord] = []
    lo = config.s_min
    while lo <= config.s_max:
        hi = min(config.s_max, (1 << lo.bit_length()) - 1)
        cfg = replace(config, s_min=lo, s_max=hi, min_pegg=best + 1,
                      reassociate_s_max=config.reassociate_s_max or config.s_max)
        for rec in search_all(cfg):
            pool.extend(p for p in _points(rec) if p.report.pegg_value > best)
        ready = sorted((p for p in pool if p.size <= hi), key=SearchRecord.sort_key)
        pool = [p for p in pool if p.size > hi]
        for p in ready:
            if p.report.pegg_value > best:
                best = p.report.pegg_value
                rows.append(LadderRow(p.report.log2_size, best, p.report.pegg_power, p))
                if progress:
                    progress(rows[-1])
        pool = [p for p in pool if p.report.pegg_value > best]
        lo = hi + 1
    return rows


def reorder_for_distinct_exponents(exps, coefficient_exponent: int) -> List[Tuple[Exponents, Permutation]]:
    """Search orderings that cover all three sign arrangements when the
    coefficient sits on ``coefficient_exponent``.

    Returns (ordering, permutation) pairs: ``a^x - f c^z = b^y`` with the
    larger free exponent as x, ``f c^z - a^x = b^y`` with the larger free
    exponent as x, and ``a^x + f c^z = b^y`` run as ax_minus_cz with the
    free exponents swapped.
    """
    exps = tuple(int(e) for e in exps)
    if len(set(exps)) != 3:
        raise ValueError("reordering needs three distinct exponents")
    if coefficient_exponent not in exps:
        raise ValueError(f"{coefficient_exponent} is not one of {exps}")
    free = sorted((e for e in exps if e != coefficient_exponent), reverse=True)
    hi, lo = free
    z = coefficient_exponent
    return [
        (Exponents(hi, lo, z), Permutation.AX_MINUS_CZ),
        (Exponents(hi, lo, z), Permutation.CZ_MINUS_AX),
        (Exponents(lo, hi, z), Permutation.AX_MINUS_CZ),
    ]
