"""Lookup tables that prune the ``a`` loop of the search.

For a fixed value ``r = f*c^z mod M`` the *elimination* table says whether
any ``a`` can make ``+/-(r - a^x)`` a y-th power residue mod M; the
*skipahead* table lists exactly which ``a mod M`` can, stored as gaps.

Admissibility factorizes over the coprime prime-power factors of M, so
everything is derived from small per-factor tables:

* an elimination flag is the OR of the per-factor flags,
* a skipahead class is the CRT combination of per-factor admissible sets,
* table sizes and elimination rates can be computed exactly per factor.

Classes are generated on demand and cached; the full gap array is only
materialized for saving or when it is small.
"""

from __future__ import annotations

import hashlib
import math
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .equations import Exponents, Permutation
from .fastmod import ConstantModulus
from .numtheory import factorize
from .powerfilter import kth_residue_flags, power_table

GIB = 1 << 30
DEFAULT_BUDGET = 4 * GIB
DEFAULT_COTABLE_CAP = 1 << 22
MAGIC = b"PGGT"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sI3HBQQBQ")
_PERM_CODES = {Permutation.AX_MINUS_CZ: 0, Permutation.CZ_MINUS_AX: 1, Permutation.AX_PLUS_CZ: 2}

QUERY_TIME = ("admissible_a_iterator",)


class BudgetExceeded(MemoryError):
    def __init__(self, projected: int, budget: int):
        self.projected = projected
        self.budget = budget
        super().__init__(
            f"skipahead table would need {projected / GIB:.2f} GiB, "
            f"over the {budget / GIB:.2f} GiB budget; pick a smaller modulus"
        )


class TableFileError(ValueError):
    pass


class CorruptFile(TableFileError):
    pass


class VersionMismatch(TableFileError):
    pass


class SpecMismatch(TableFileError):
    pass


def _sign(permutation) -> int:
    perm = Permutation(permutation)
    if perm == Permutation.CZ_MINUS_AX:
        return 1
    if perm == Permutation.AX_MINUS_CZ:
        return -1
    raise ValueError("tables exist only for ax_minus_cz and cz_minus_ax")


@dataclass(frozen=True)
class TableSpec:
    exps: Exponents
    permutation: Permutation
    elimination: Tuple[int, ...]
    skipahead: Tuple[int, ...]
    budget_bytes: int = DEFAULT_BUDGET
    coefficient: int = 0
    cotable_cap: int = DEFAULT_COTABLE_CAP

    def __post_init__(self):
        object.__setattr__(self, "exps", Exponents(*self.exps))
        object.__setattr__(self, "permutation", Permutation(self.permutation))
        _sign(self.permutation)
        for name in ("elimination", "skipahead"):
            factors = tuple(int(q) for q in getattr(self, name))
            object.__setattr__(self, name, factors)
            for i, q in enumerate(factors):
                if q < 2 or len(factorize(q)) != 1:
                    raise ValueError(f"{name} factor {q} is not a prime power")
                for q2 in factors[i + 1:]:
                    if math.gcd(q, q2) != 1:
                        raise ValueError(f"{name} factors {q} and {q2} are not coprime")
        if not self.skipahead:
            raise ValueError("skipahead modulus needs at least one factor")

    @property
    def skip_modulus(self) -> int:
        return math.prod(self.skipahead)

    @property
    def elim_modulus(self) -> int:
        return math.prod(self.elimination)

    def elimination_groups(self) -> List[Tuple[int, ...]]:
        """Greedy split of the elimination factors into co-tables under the cap."""
        groups: List[Tuple[int, ...]] = []
        cur: List[int] = []
        for q in self.elimination:
            if cur and math.prod(cur) * q > self.cotable_cap:
                groups.append(tuple(cur))
                cur = []
            cur.append(q)
        if cur:
            groups.append(tuple(cur))
        return groups


# (x, y, z) -> {permutation or None: (elimination factors, skipahead factors)}
_TABLE_ROWS: Dict[Tuple[int, int, int], Dict[Optional[str], Tuple[Tuple[int, ...], Tuple[int, ...]]]] = {
    (3, 3, 4): {None: ((7, 9), (13, 19, 31, 37))},
    (3, 3, 5): {None: ((7, 9), (13, 19, 31, 37))},
    (4, 4, 3): {
        "ax_minus_cz": ((5, 16, 17), (9, 13, 29, 37)),
        "cz_minus_ax": ((5, 13, 16, 17, 27, 29, 49, 121, 1849), (9, 13, 29, 37)),
    },
    (4, 4, 5): {
        "ax_minus_cz": ((5, 16, 17), (9, 13, 29, 37)),
        "cz_minus_ax": ((5, 13, 16, 17, 27, 29, 49, 121, 1849), (37, 41, 53)),
    },
    (5, 5, 3): {None: ((11, 25, 31, 41, 61), (61, 71, 101))},
    (5, 5, 4): {None: ((11, 25, 31, 41, 61), (41, 61, 71))},
    (4, 3, 5): {None: ((13,), (7, 9, 19, 31))},
    (5, 3, 4): {None: ((31,), (7, 9, 13, 19))},
    (3, 4, 5): {None: ((13,), (5, 9, 16, 17, 29))},
    (5, 4, 3): {None: ((11, 41), (5, 9, 13, 16))},
    (3, 5, 4): {None: ((31,), (11, 25, 41, 61))},
    (4, 5, 3): {None: ((11, 41), (25, 31, 61))},
}

# single-coefficient skipahead moduli and the coefficients worth a table of their own
_SINGLE_ROWS: Dict[Tuple[int, int, int], Tuple[Tuple[int, ...], Tuple[int, ...]]] = {
    (3, 3, 4): ((7, 13, 19, 31, 37), (3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13)),
    (4, 4, 3): ((5, 9, 13, 29, 37), (4, 2, 9, 25, 3, 36, 49, 18, 100)),
    # no table is listed for {3,3,5}; the enlarged modulus is the natural one
    # and it is only ever used to show that it does not fit the budget
    (3, 3, 5): ((7, 13, 19, 31, 37), ()),
}

TABLE_EXPONENTS = tuple(_TABLE_ROWS)


def single_coefficient_list(exps) -> Tuple[int, ...]:
    row = _SINGLE_ROWS.get(tuple(exps))
    return row[1] if row else ()


def default_spec(exps, permutation, single_coefficient: int = 0,
                 budget_bytes: int = DEFAULT_BUDGET) -> TableSpec:
    key = tuple(int(e) for e in exps)
    rows = _TABLE_ROWS.get(key)
    if rows is None:
        raise ValueError(f"no default tables for exponent set {key}")
    perm = Permutation(permutation)
    elim, skip = rows.get(perm.value) or rows[None]
    if single_coefficient:
        if key in _SINGLE_ROWS:
            skip = _SINGLE_ROWS[key][0]
    return TableSpec(key, perm, elim, skip, budget_bytes=budget_bytes,
                     coefficient=int(single_coefficient))


class _Component:
    """Admissibility data for one prime-power factor q."""

    def __init__(self, q: int, x: int, y: int, sign: int):
        self.q = q
        ypow = kth_residue_flags(y, q).astype(bool)
        ax = power_table(q, x)
        r = np.arange(q, dtype=np.int64)[:, None]
        diff = (r - ax[None, :]) % q if sign > 0 else (ax[None, :] - r) % q
        self.adm = ypow[diff]  # adm[r, s]
        self.counts = self.adm.sum(axis=1).astype(np.int64)
        self.flags = self.counts == 0
        self.sets = [np.flatnonzero(row).astype(np.int64) for row in self.adm]


_COMPONENT_CACHE: Dict[Tuple[int, int, int, int], _Component] = {}


def component(q: int, x: int, y: int, sign: int) -> _Component:
    key = (q, x, y, sign)
    comp = _COMPONENT_CACHE.get(key)
    if comp is None:
        comp = _COMPONENT_CACHE[key] = _Component(q, x, y, sign)
    return comp


def _crt_basis(factors: Sequence[int]) -> List[int]:
    M = math.prod(factors)
    out = []
    for q in factors:
        Mi = M // q
        out.append(Mi * pow(Mi, -1, q) % M)
    return out


def _reachable(q: int, z: int, coefficient: int) -> np.ndarray:
    """Residues mod q taken by ``f*c^z`` (all residues when f is generic)."""
    if not coefficient:
        return np.ones(q, dtype=bool)
    reach = np.zeros(q, dtype=bool)
    reach[(coefficient % q) * power_table(q, z) % q] = True
    return reach


@dataclass
class EliminationTable:
    spec: TableSpec
    groups: List[Tuple[int, ...]]
    flags: List[np.ndarray] = field(repr=False)

    def __post_init__(self):
        self.moduli = [math.prod(g) for g in self.groups]
        self.reducers = [ConstantModulus(m) for m in self.moduli]

    def eliminated(self, value: int) -> bool:
        """True when no ``a`` can work for ``f*c^z = value``."""
        for red, flags in zip(self.reducers, self.flags):
            if flags[red.reduce(value)]:
                return True
        return False

    def flagged_fraction(self) -> float:
        keep = 1.0
        for fl in self.flags:
            keep *= 1.0 - float(fl.mean())
        return 1.0 - keep


def build_elimination_table(spec: TableSpec) -> EliminationTable:
    x, y, _ = spec.exps
    sign = _sign(spec.permutation)
    groups = spec.elimination_groups()
    flags = []
    for g in groups:
        m = math.prod(g)
        r = np.arange(m, dtype=np.int64)
        fl = np.zeros(m, dtype=bool)
        for q in g:
            fl |= component(q, x, y, sign).flags[r % q]
        flags.append(fl.astype(np.uint8))
    return EliminationTable(spec, groups, flags)


class SkipaheadTable:
    """Per-class admissible ``a`` residues modulo M, served as gap lists.

    Classes are computed from the per-factor tables on first use and kept in
    a bounded LRU cache, unless the table was materialized, in which case
    gaps are read from the flat ``offsets``/``deltas`` arrays.
    """

    def __init__(self, spec: TableSpec, cache_size: int = 4096):
        self.spec = spec
        x, y, z = spec.exps
        self.sign = _sign(spec.permutation)
        self.factors = spec.skipahead
        self.modulus = spec.skip_modulus
        self.coefficient = spec.coefficient
        self.components = [component(q, x, y, self.sign) for q in self.factors]
        self._basis = np.array(_crt_basis(self.factors), dtype=np.int64)
        self._reach = [_reachable(q, z, self.coefficient) for q in self.factors]
        self.reducer = ConstantModulus(self.modulus)
        self._cache: "OrderedDict[int, np.ndarray]" = OrderedDict()
        self._cache_size = cache_size
        self.entry_width = 2
        self.offsets: Optional[np.ndarray] = None
        self.deltas: Optional[np.ndarray] = None

    def __repr__(self) -> str:
        return (f"SkipaheadTable(exps={tuple(self.spec.exps)}, "
                f"perm={self.spec.permutation.value}, M={self.modulus}, "
                f"coefficient={self.coefficient})")

    @property
    def materialized(self) -> bool:
        return self.deltas is not None

    def reachable(self, r: int) -> bool:
        return all(reach[r % q] for reach, q in zip(self._reach, self.factors))

    def class_size(self, r: int) -> int:
        n = 1
        for comp in self.components:
            n *= int(comp.counts[r % comp.q])
        return n

    def admissible(self, r: int) -> np.ndarray:
        """Sorted admissible residues ``s`` in [0, M) for class ``r``."""
        if self.materialized:
            g = self.gaps(r)
            return np.cumsum(g[:-1], dtype=np.int64) if g.size else g.astype(np.int64)
        hit = self._cache.get(r)
        if hit is not None:
            self._cache.move_to_end(r)
            return hit
        acc = np.zeros(1, dtype=np.int64)
        for comp, e in zip(self.components, self._basis):
            s = comp.sets[r % comp.q]
            if not s.size:
                acc = s
                break
            acc = (acc[:, None] + (s * e)[None, :]).ravel() % self.modulus
        acc = np.sort(acc)
        self._cache[r] = acc
        if len(self._cache) > self._cache_size:
            self._cache.popitem(last=False)
        return acc

    def gaps(self, r: int) -> np.ndarray:
        """Gap list ``[s0, s1-s0, ..., M-s_last]``; empty when eliminated."""
        if self.materialized:
            lo, hi = int(self.offsets[r]), int(self.offsets[r + 1])
            return self.deltas[lo:hi].astype(np.int64)
        s = self.admissible(r)
        if not s.size:
            return s
        return np.diff(s, prepend=0, append=self.modulus)

    def eliminated(self, r: int) -> bool:
        return self.class_size(r) == 0

    def projected_entries(self) -> int:
        total, nonempty = 1, 1
        for comp, reach in zip(self.components, self._reach):
            total *= int(comp.counts[reach].sum())
            nonempty *= int(((comp.counts > 0) & reach).sum())
        return total + nonempty

    def projected_bytes(self, entry_width: Optional[int] = None) -> int:
        width = entry_width or self.entry_width
        return self.projected_entries() * width + 8 * (self.modulus + 1)

    def eliminated_fraction(self) -> Fraction:
        """Share of (class, a-residue) pairs rejected, over reachable classes."""
        keep = Fraction(1)
        for comp, reach in zip(self.components, self._reach):
            keep *= Fraction(int(comp.counts[reach].sum()), int(reach.sum()) * comp.q)
        return 1 - keep

    def iter_classes(self) -> Iterator[int]:
        """Reachable residue classes in ascending order."""
        reach = np.ones(self.modulus, dtype=bool)
        r = np.arange(self.modulus, dtype=np.int64)
        for q, rq in zip(self.factors, self._reach):
            reach &= rq[r % q]
        return (int(v) for v in np.flatnonzero(reach))

    def max_gap(self) -> int:
        best = 0
        for r in self.iter_classes():
            g = self.gaps(r)
            if g.size:
                best = max(best, int(g.max()))
        return best

    def class_sizes(self) -> np.ndarray:
        """Admissible-residue count of every class (0 for unreachable ones)."""
        r = np.arange(self.modulus, dtype=np.int64)
        sizes = np.ones(self.modulus, dtype=np.int64)
        for comp, q, rq in zip(self.components, self.factors, self._reach):
            idx = r % q
            sizes *= comp.counts[idx] * rq[idx]
        return sizes

    def class_offsets(self) -> np.ndarray:
        sizes = self.class_sizes()
        counts = np.where(sizes > 0, sizes + 1, 0)
        offsets = np.zeros(self.modulus + 1, dtype=np.uint64)
        np.cumsum(counts, out=offsets[1:])
        return offsets

    def materialize(self) -> "SkipaheadTable":
        """Build the flat gap arrays for every reachable class."""
        if self.materialized:
            return self
        offsets = self.class_offsets()
        chunks = [self.gaps(r) for r in self.iter_classes()]
        chunks = [g for g in chunks if g.size]
        deltas = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)
        width = 2 if not deltas.size or deltas.max() <= 0xFFFF else 4
        self.entry_width = width
        self.offsets = offsets
        self.deltas = deltas.astype(np.uint16 if width == 2 else np.uint32)
        self._cache.clear()
        return self


def build_skipahead_table(spec: TableSpec, materialize: bool = False,
                          check_budget: bool = True) -> SkipaheadTable:
    table = SkipaheadTable(spec)
    if check_budget:
        projected = table.projected_bytes()
        if projected > spec.budget_bytes:
            raise BudgetExceeded(projected, spec.budget_bytes)
    if materialize:
        table.materialize()
    return table


def admissible_a_array(table: SkipaheadTable, r: int, a_lo: int, a_hi: int) -> np.ndarray:
    """All ``a`` in [a_lo, a_hi] whose residue is admissible for class ``r``."""
    if a_hi < a_lo:
        return np.zeros(0, dtype=np.int64)
    if not table.materialized and r not in table._cache \
            and (a_hi - a_lo + 1) * 4 < table.class_size(r):
        # short range: test each a against the factor tables directly
        a = np.arange(a_lo, a_hi + 1, dtype=np.int64)
        ok = np.ones(a.shape[0], dtype=bool)
        for comp in table.components:
            ok &= comp.adm[r % comp.q][a % comp.q]
        return a[ok]
    s = table.admissible(r)
    if not s.size:
        return s
    M = table.modulus
    start = a_lo - table.reducer.reduce(a_lo)
    if a_hi - start < M:
        lo = np.searchsorted(s, a_lo - start, side="left")
        hi = np.searchsorted(s, a_hi - start, side="right")
        return s[lo:hi] + start
    periods = np.arange(start, a_hi + 1, M, dtype=np.int64)
    out = (periods[:, None] + s[None, :]).ravel()
    return out[(out >= a_lo) & (out <= a_hi)]


def admissible_a_iterator(table: SkipaheadTable, r: int, a_start: int, a_max: int) -> Iterator[int]:
    """Yield admissible ``a`` in [a_start, a_max] by walking the gap list.

    One linear pass over the class aligns to ``a_start``; after that every
    step is a single gap addition.
    """
    g = table.gaps(r)
    n = len(g)
    if not n or a_start > a_max:
        return
    gaps = [int(v) for v in g]
    pos = a_start - table.reducer.reduce(a_start)
    last = n - 1
    i = 0
    while True:
        pos += gaps[i]
        if i == last:
            i = 0
            continue
        i += 1
        if pos > a_max:
            return
        if pos >= a_start:
            yield pos


def _z_free_coefficients(f_limit: int, z: int) -> np.ndarray:
    fs = np.arange(2, f_limit + 1, dtype=np.int64)
    ok = np.ones(fs.shape[0], dtype=bool)
    p = 2
    while p**z <= f_limit:
        if all(p % d for d in range(2, math.isqrt(p) + 1)):
            ok &= fs % p**z != 0
        p += 1
    return fs[ok]


def measure_rates(spec: TableSpec, f_limit: int = 100000,
                  weighting: str = "coefficients") -> Tuple[float, float, float]:
    """Percent of (f, c, a) combinations rejected by the elimination table,
    by the skipahead table, and by both.

    ``weighting='coefficients'`` averages over every z-th-power-free
    f in [2, f_limit] with c uniform over residues; ``'residues'`` lets the
    coefficient range over all residues instead. The computation is exact:
    the two tables factor over primes, so each prime is handled on its own
    and the per-prime survival ratios multiply.
    """
    x, y, z = spec.exps
    sign = _sign(spec.permutation)
    by_prime: Dict[int, Dict[str, int]] = {}
    for q in spec.elimination:
        by_prime.setdefault(min(factorize(q)), {})["e"] = q
    for q in spec.skipahead:
        by_prime.setdefault(min(factorize(q)), {})["s"] = q

    if weighting == "coefficients":
        fs = _z_free_coefficients(f_limit, z)
    elif weighting != "residues":
        raise ValueError("weighting must be 'coefficients' or 'residues'")

    keep_e = keep_s = keep_c = None
    for p, roles in sorted(by_prime.items()):
        L = max(roles.values())
        if weighting == "residues":
            fvals = np.arange(L, dtype=np.int64)
        else:
            fvals = fs % L
        # work on distinct coefficient residues, then map back to every f
        uniq, inv = np.unique(fvals, return_inverse=True)
        cz = power_table(L, z)
        r = (uniq[:, None] * cz[None, :]) % L
        ne = np.ones(r.shape)
        ns = np.ones(r.shape)
        if "e" in roles:
            q = roles["e"]
            ne = (~component(q, x, y, sign).flags[r % q]).astype(float)
        if "s" in roles:
            q = roles["s"]
            ns = component(q, x, y, sign).counts[r % q] / q
        e = ne.mean(axis=1)[inv]
        s = ns.mean(axis=1)[inv]
        cmb = (ne * ns).mean(axis=1)[inv]
        keep_e = e if keep_e is None else keep_e * e
        keep_s = s if keep_s is None else keep_s * s
        keep_c = cmb if keep_c is None else keep_c * cmb
    return (
        100.0 * (1.0 - float(np.mean(keep_e))),
        100.0 * (1.0 - float(np.mean(keep_s))),
        100.0 * (1.0 - float(np.mean(keep_c))),
    )


# -- cache files -------------------------------------------------------------

def _header(spec: TableSpec, modulus: int, width: int, count: int) -> bytes:
    x, y, z = spec.exps
    return _HEADER.pack(MAGIC, FORMAT_VERSION, x, y, z, _PERM_CODES[spec.permutation],
                        spec.coefficient, modulus, width, count)


def _checksum(payload) -> bytes:
    return hashlib.blake2b(payload, digest_size=8).digest()


class _HashingWriter:
    def __init__(self, fh):
        self.fh = fh
        self.h = hashlib.blake2b(digest_size=8)
        self.n = 0

    def write(self, data: bytes) -> None:
        self.fh.write(data)
        self.h.update(data)
        self.n += len(data)


def save_table(table, path) -> int:
    """Write an elimination or skipahead table; returns the byte count.

    Skipahead tables that were never materialized are streamed class by
    class, so saving does not need the whole gap array in memory.
    """
    with open(path, "wb") as fh:
        out = _HashingWriter(fh)
        if isinstance(table, EliminationTable):
            bounds = np.zeros(len(table.flags) + 1, dtype="<u8")
            np.cumsum([fl.size for fl in table.flags], out=bounds[1:])
            out.write(_header(table.spec, table.spec.elim_modulus, 1, len(table.flags)))
            out.write(bounds.tobytes())
            for fl in table.flags:
                out.write(fl.astype(np.uint8).tobytes())
        elif isinstance(table, SkipaheadTable):
            _write_skipahead(table, out)
        else:
            raise TypeError(f"cannot save {type(table).__name__}")
        fh.write(out.h.digest())
        return out.n + 8


def _write_skipahead(table: "SkipaheadTable", out: _HashingWriter) -> None:
    if table.materialized:
        width = table.entry_width
        offsets = table.offsets
        blocks = [table.deltas]
    else:
        width = 2 if table.max_gap() <= 0xFFFF else 4
        offsets = table.class_offsets()
        blocks = None
    dtype = "<u2" if width == 2 else "<u4"
    out.write(_header(table.spec, table.modulus, width, table.modulus))
    out.write(np.asarray(offsets, dtype="<u8").tobytes())
    if blocks is not None:
        for b in blocks:
            out.write(np.asarray(b).astype(dtype).tobytes())
        return
    pending: List[bytes] = []
    size = 0
    for r in table.iter_classes():
        g = table.gaps(r)
        if g.size:
            chunk = g.astype(dtype).tobytes()
            pending.append(chunk)
            size += len(chunk)
            if size > 1 << 24:
                out.write(b"".join(pending))
                pending, size = [], 0
    out.write(b"".join(pending))
    table.entry_width = width


def load_table(path, expect: Optional[TableSpec] = None):
    """Read a table written by :func:`save_table`.

    With ``expect`` given, the stored exponents, permutation, coefficient and
    modulus must match it.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size + 8:
        raise CorruptFile(f"{path}: file too short")
    payload, check = data[:-8], data[-8:]
    magic, version, x, y, z, perm, coeff, modulus, width, count = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise CorruptFile(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    if _checksum(payload) != check:
        raise CorruptFile(f"{path}: checksum mismatch")
    perm_tag = {v: k for k, v in _PERM_CODES.items()}.get(perm)
    if perm_tag is None:
        raise CorruptFile(f"{path}: unknown permutation code {perm}")
    if expect is not None:
        got = ((x, y, z), perm_tag, coeff)
        want = (tuple(expect.exps), expect.permutation, expect.coefficient)
        want_mod = expect.elim_modulus if width == 1 else expect.skip_modulus
        if got != want or modulus != want_mod:
            raise SpecMismatch(
                f"{path}: built for exps={got[0]} perm={got[1].value} coefficient={coeff} "
                f"modulus={modulus}, expected exps={want[0]} perm={want[1].value} "
                f"coefficient={want[2]} modulus={want_mod}"
            )
    body = memoryview(payload)[_HEADER.size:]
    try:
        if width == 1:
            bounds = np.frombuffer(body[: 8 * (count + 1)], dtype="<u8").astype(np.int64)
            flat = np.frombuffer(body[8 * (count + 1):], dtype=np.uint8)
            if flat.size != bounds[-1]:
                raise CorruptFile(f"{path}: flag block length mismatch")
            flags = [flat[bounds[i]:bounds[i + 1]].copy() for i in range(count)]
            moduli = [int(bounds[i + 1] - bounds[i]) for i in range(count)]
            spec = expect or _spec_from_header((x, y, z), perm_tag, coeff, (), ())
            groups = _regroup(spec, moduli)
            return EliminationTable(spec, groups, flags)
        if width not in (2, 4):
            raise CorruptFile(f"{path}: bad entry width {width}")
        offsets = np.frombuffer(body[: 8 * (count + 1)], dtype="<u8").astype(np.uint64)
        deltas = np.frombuffer(body[8 * (count + 1):], dtype="<u2" if width == 2 else "<u4")
        if offsets.size != count + 1 or deltas.size != int(offsets[-1]):
            raise CorruptFile(f"{path}: delta block length mismatch")
    except ValueError as exc:
        if isinstance(exc, TableFileError):
            raise
        raise CorruptFile(f"{path}: {exc}") from exc
    spec = expect or _spec_from_header((x, y, z), perm_tag, coeff, (), _prime_powers(modulus))
    table = SkipaheadTable(spec)
    table.entry_width = width
    table.offsets = offsets
    table.deltas = deltas.astype(np.uint16 if width == 2 else np.uint32)
    return table


def table_path(directory, spec: TableSpec, kind: str) -> Path:
    """Cache file name for one table; ``kind`` is ``elim`` or ``skip``."""
    if kind not in ("elim", "skip"):
        raise ValueError("kind must be 'elim' or 'skip'")
    x, y, z = spec.exps
    name = f"{x}{y}{z}_{spec.permutation.value}_f{spec.coefficient}_{kind}.pgt"
    return Path(directory) / name


def load_or_build(spec: TableSpec, kind: str, directory=None):
    """Load a cached table when one exists under ``directory``, else build it in memory."""
    if directory is not None:
        path = table_path(directory, spec, kind)
        if path.exists():
            return load_table(path, expect=spec)
    if kind == "elim":
        return build_elimination_table(spec)
    return build_skipahead_table(spec)


def _prime_powers(n: int) -> Tuple[int, ...]:
    return tuple(p**e for p, e in sorted(factorize(n).items()))


def _spec_from_header(exps, perm, coeff, elim, skip) -> TableSpec:
    try:
        base = default_spec(exps, perm)
        elim = elim or base.elimination
        skip = skip or base.skipahead
    except ValueError:
        pass
    return TableSpec(tuple(exps), perm, tuple(elim), tuple(skip) or (2,), coefficient=coeff)


def _regroup(spec: TableSpec, moduli: List[int]) -> List[Tuple[int, ...]]:
    groups = spec.elimination_groups()
    if [math.prod(g) for g in groups] == moduli:
        return groups
    return [_prime_powers(m) for m in moduli]
