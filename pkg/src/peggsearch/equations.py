"""Original and resultant Pegg equations and the algebra between them.

An original equation ``d*a^x (+/-) e*b^y (+/-) f*c^z = 0`` has exactly one
term on its own side of the equals sign; the permutation tag says which:

===============  ==========================
tag              equation
===============  ==========================
``ax_minus_cz``  ``d*a^x - f*c^z = e*b^y``
``cz_minus_ax``  ``f*c^z - d*a^x = e*b^y``
``ax_plus_cz``   ``d*a^x + f*c^z = e*b^y``
===============  ==========================

Multiplying by the smallest ``N`` that makes ``N*d``, ``N*e``, ``N*f``
perfect x-th, y-th and z-th powers gives the resultant equation
``A^x + B^y = C^z`` (up to which term stands alone), with ``A = D*a`` and so on.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Optional, Tuple

from .numtheory import (
    factorize,
    first_primes,
    integer_kth_root,
    is_k_free,
    smallest_q,
)

TERMS = ("a", "b", "c")
REASSOCIATION_PRIME_LIMIT = 25


class Permutation(str, enum.Enum):
    AX_MINUS_CZ = "ax_minus_cz"
    CZ_MINUS_AX = "cz_minus_ax"
    AX_PLUS_CZ = "ax_plus_cz"

    @property
    def lone_term(self) -> int:
        """Index (0=a, 1=b, 2=c) of the term standing alone."""
        return _LONE_TERM[self]

    def __str__(self) -> str:
        return self.value


_LONE_TERM = {
    Permutation.AX_MINUS_CZ: 0,
    Permutation.AX_PLUS_CZ: 1,
    Permutation.CZ_MINUS_AX: 2,
}


class NoSolution(ArithmeticError):
    """No multiplier converts the original equation to resultant form."""


class Exponents(NamedTuple):
    x: int
    y: int
    z: int

    def __str__(self) -> str:
        return "{%d,%d,%d}" % self


def _term_index(which) -> int:
    if isinstance(which, int):
        if which in (0, 1, 2):
            return which
    elif which in TERMS:
        return TERMS.index(which)
    elif which in ("d", "e", "f"):
        return "def".index(which)
    elif which in ("x", "y", "z"):
        return "xyz".index(which)
    raise ValueError(f"unknown term tag {which!r}")


def _render_term(coef: int, base: int, exp: int) -> str:
    if coef == 1:
        return f"{base}^{exp}"
    return f"{coef}*{base}^{exp}"


def _render(coefs, bases, exps, lone: int) -> str:
    parts = [_render_term(coefs[i], bases[i], exps[i]) for i in range(3)]
    addends = [parts[i] for i in range(3) if i != lone]
    return f"{addends[0]} + {addends[1]} = {parts[lone]}"


@dataclass(frozen=True)
class OriginalEquation:
    exps: Exponents
    d: int
    e: int
    f: int
    a: int
    b: int
    c: int
    permutation: Permutation = Permutation.CZ_MINUS_AX

    def __post_init__(self):
        object.__setattr__(self, "exps", Exponents(*self.exps))
        object.__setattr__(self, "permutation", Permutation(self.permutation))

    @property
    def coefficients(self) -> Tuple[int, int, int]:
        return (self.d, self.e, self.f)

    @property
    def bases(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def term_values(self) -> Tuple[int, int, int]:
        x, y, z = self.exps
        return (self.d * self.a**x, self.e * self.b**y, self.f * self.c**z)

    def holds(self) -> bool:
        vals = self.term_values()
        lone = self.permutation.lone_term
        return sum(vals) == 2 * vals[lone]

    def __str__(self) -> str:
        return _render(self.coefficients, self.bases, self.exps, self.permutation.lone_term)

    def to_dict(self) -> dict:
        return {
            "exponents": list(self.exps),
            "permutation": self.permutation.value,
            "d": str(self.d), "e": str(self.e), "f": str(self.f),
            "a": str(self.a), "b": str(self.b), "c": str(self.c),
        }


@dataclass(frozen=True)
class ResultantEquation:
    exps: Exponents
    A: int
    B: int
    C: int
    D: int
    E: int
    F: int
    N: int
    permutation: Permutation
    source: Optional[OriginalEquation] = field(default=None, compare=False)

    @property
    def bases(self) -> Tuple[int, int, int]:
        return (self.A, self.B, self.C)

    @property
    def resultant_coefficients(self) -> Tuple[int, int, int]:
        return (self.D, self.E, self.F)

    def term_values(self) -> Tuple[int, int, int]:
        x, y, z = self.exps
        return (self.A**x, self.B**y, self.C**z)

    @property
    def size(self) -> int:
        """Value of the lone term, i.e. of ``C^z`` in ``A^x + B^y = C^z`` form."""
        return self.term_values()[self.permutation.lone_term]

    def holds(self) -> bool:
        vals = self.term_values()
        return sum(vals) == 2 * vals[self.permutation.lone_term]

    def scaled(self, p: int) -> "ResultantEquation":
        """Multiply the whole equation by ``p ** lcm(x, y, z)``."""
        L = math.lcm(*self.exps)
        fx, fy, fz = (p ** (L // k) for k in self.exps)
        return replace(
            self,
            A=self.A * fx, B=self.B * fy, C=self.C * fz,
            D=self.D * fx, E=self.E * fy, F=self.F * fz,
            N=self.N * p**L,
        )

    def __str__(self) -> str:
        return _render((1, 1, 1), self.bases, self.exps, self.permutation.lone_term)

    def to_dict(self) -> dict:
        return {
            "exponents": list(self.exps),
            "permutation": self.permutation.value,
            "N": str(self.N),
            "A": str(self.A), "B": str(self.B), "C": str(self.C),
            "D": str(self.D), "E": str(self.E), "F": str(self.F),
        }


@dataclass(frozen=True)
class PeggReport:
    pegg_value: int
    pegg_power: float
    gcd: int
    min_base: int
    log2_size: float
    stolen: bool

    def to_dict(self) -> dict:
        return {
            "pegg_value": str(self.pegg_value),
            "pegg_power": round(self.pegg_power, 6),
            "gcd": str(self.gcd),
            "min_base": str(self.min_base),
            "log2_size": round(self.log2_size, 6),
            "stolen": self.stolen,
        }


@dataclass(frozen=True)
class ValidationResult:
    violations: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_original(eq: OriginalEquation) -> ValidationResult:
    """Check every condition an Original Pegg Equation must meet.

    Never raises for well-typed input; failures come back as a list of
    human-readable violation strings.
    """
    out: List[str] = []
    exps, coefs, bases = eq.exps, eq.coefficients, eq.bases
    if min(exps) < 3:
        out.append("every exponent must be >= 3")
    if min(coefs) < 1 or min(bases) < 1:
        out.append("coefficients and bases must be >= 1")
        return ValidationResult(tuple(out))
    if math.gcd(*exps) != 1:
        out.append(f"gcd(x,y,z)=1 required, got gcd{tuple(exps)}={math.gcd(*exps)}")
    if max(coefs) == 1:
        out.append("at least one of d,e,f > 1 required")
    g = math.gcd(eq.d * eq.a, eq.e * eq.b, eq.f * eq.c)
    if g != 1:
        out.append(f"gcd(d*a, e*b, f*c)=1 required, got {g}")
    for name, coef, k in zip("def", coefs, exps):
        if k >= 2 and coef > 1 and not is_k_free(coef, k):
            out.append(f"{name}={coef} must be {k}-th power free")
    for i in range(3):
        for j in range(i + 1, 3):
            if math.gcd(exps[i], exps[j]) != 1 and (coefs[i] > 1 or coefs[j] > 1):
                out.append(
                    f"bases {TERMS[i]},{TERMS[j]} have non-coprime exponents "
                    f"{exps[i]},{exps[j]} so both coefficients must be 1"
                )
    if not eq.holds():
        out.append(f"equation identity does not hold: {eq}")
    return ValidationResult(tuple(out))


def _prime_exponent(exps, idx: int, v: int, p: int = 0) -> int:
    """Smallest q making ``p**q`` spread a coefficient with valuation v on term idx."""
    others = [exps[i] for i in range(3) if i != idx]
    k = exps[idx]
    q = smallest_q(math.lcm(*others), k, (-v) % k)
    if q is None:
        raise NoSolution(
            f"no q with q = 0 (mod lcm({others[0]},{others[1]})={math.lcm(*others)}) "
            f"and q = -{v} (mod {k})"
            + (f" for prime {p} of the {'def'[idx]} coefficient" if p else "")
        )
    return q


def smallest_multiplier(eq: OriginalEquation) -> int:
    """Smallest N making ``N*d``, ``N*e``, ``N*f`` x-th, y-th, z-th powers.

    Raises:
        NoSolution: when one of the per-prime congruence systems is unsolvable.
    """
    N = 1
    for idx, coef in enumerate(eq.coefficients):
        if coef == 1:
            continue
        for p, v in factorize(coef).items():
            N *= p ** _prime_exponent(eq.exps, idx, v, p)
    return N


def prime_power_profile(exps, which, v: int) -> Tuple[int, int, int]:
    """Powers of p in (D, E, F) for one prime p with ``v_p(coefficient) = v``."""
    exps = Exponents(*exps)
    idx = _term_index(which)
    q = _prime_exponent(exps, idx, v)
    out = []
    for i, k in enumerate(exps):
        total = q + (v if i == idx else 0)
        assert total % k == 0
        out.append(total // k)
    return tuple(out)


def cvt(x: int, z: int, v: int) -> int:
    """Power of a coefficient prime in the resultant coefficient of the
    highest-exponent base(s), for exponent sets {x, x, z} with the
    coefficient on z."""
    if x < 3 or z < 3:
        raise ValueError("exponents must be >= 3")
    if not 0 < v < z:
        raise ValueError(f"valuation must satisfy 0 < v < z, got v={v}, z={z}")
    if math.gcd(x, z) != 1:
        raise ValueError("gcd(x, z) must be 1")
    q = smallest_q(x, z, (-v) % z)
    h = max(x, z)
    num = q if z < x else q + v
    assert num % h == 0
    return num // h


def convert_to_resultant(eq: OriginalEquation) -> ResultantEquation:
    N = smallest_multiplier(eq)
    spread = []
    for coef, k in zip(eq.coefficients, eq.exps):
        t = N * coef
        r = integer_kth_root(t, k)
        if r**k != t:
            raise NoSolution(f"N*{coef} is not a perfect {k}-th power")
        spread.append(r)
    D, E, F = spread
    return ResultantEquation(
        exps=eq.exps,
        A=D * eq.a, B=E * eq.b, C=F * eq.c,
        D=D, E=E, F=F, N=N,
        permutation=eq.permutation,
        source=eq,
    )


def _min_term(res: ResultantEquation) -> int:
    """Index of the smallest base, preferring the highest exponent on ties."""
    bases = res.bases
    m = min(bases)
    cands = [i for i in range(3) if bases[i] == m]
    return max(cands, key=lambda i: res.exps[i])


def _log2(n: int) -> float:
    return math.log2(n)


def pegg_report(res: ResultantEquation) -> PeggReport:
    A, B, C = res.bases
    g = math.gcd(A, B, C)
    m = min(A, B, C)
    assert m % g == 0, "gcd(A,B,C) must divide min(A,B,C)"
    value = m // g
    size = res.size
    log2_size = _log2(size)
    power = math.log(value) / math.log(size) if value > 1 else 0.0
    idx = _min_term(res)
    stolen = (
        res.exps[idx] == max(res.exps)
        and g > res.resultant_coefficients[idx]
    )
    return PeggReport(
        pegg_value=value, pegg_power=power, gcd=g, min_base=m,
        log2_size=log2_size, stolen=stolen,
    )


def pegg_value(res: ResultantEquation) -> int:
    A, B, C = res.bases
    return min(A, B, C) // math.gcd(A, B, C)


def _target_term(res: ResultantEquation) -> int:
    h = max(res.exps)
    tops = [i for i in range(3) if res.exps[i] == h]
    return min(tops, key=lambda i: res.bases[i])


def reassociate_min(
    res: ResultantEquation,
    s_max: int,
    max_primes: int = REASSOCIATION_PRIME_LIMIT,
) -> ResultantEquation:
    """Move ``min(A,B,C)`` onto a highest-exponent base when it pays off.

    Tries ``p ** lcm(x,y,z)`` for primes in increasing order, skipping primes
    that divide the original base that should end up carrying the minimum.
    Returns the first multiplied equation that fits ``s_max`` and has a
    strictly larger Pegg Value, otherwise ``res`` itself.
    """
    h = max(res.exps)
    if res.exps[_min_term(res)] == h:
        return res
    target = _target_term(res)
    if res.source is not None:
        guard = res.source.bases[target]
    else:
        guard = res.bases[target]
    current = pegg_value(res)
    size = res.size
    L = math.lcm(*res.exps)
    for p in first_primes(max_primes):
        if guard % p == 0:
            continue
        if size * p**L > s_max:
            break
        cand = res.scaled(p)
        if pegg_value(cand) > current:
            return cand
    return res


def generate_identity(V: int, x: int) -> ResultantEquation:
    """Resultant equation with exponents {x, x+1, x+2} and Pegg Value V.

    Uses ``(W^(x+2))^x + (W^(x+1))^(x+1) = (W^x V)^(x+2)`` with
    ``W = V^(x+2) - 1``.
    """
    if V < 2:
        raise ValueError("V must be >= 2")
    if x < 3:
        raise ValueError("x must be >= 3")
    W = V ** (x + 2) - 1
    exps = Exponents(x, x + 1, x + 2)
    src = OriginalEquation(exps, 1, W, 1, 1, 1, V, Permutation.CZ_MINUS_AX)
    D, E, F = W ** (x + 2), W ** (x + 1), W**x
    return ResultantEquation(
        exps=exps, A=D, B=E, C=F * V, D=D, E=E, F=F,
        N=W ** (x * (x + 2)), permutation=Permutation.CZ_MINUS_AX, source=src,
    )


_TERM_RE = re.compile(r"^\s*(?:(\d+)\s*\*\s*)?(\d+)\s*\^\s*(\d+)\s*$")


class ParseError(ValueError):
    pass


def _parse_term(text: str) -> Tuple[int, int, int]:
    m = _TERM_RE.match(text)
    if not m:
        raise ParseError(f"cannot parse term {text!r}; expected [coef*]base^exp")
    coef = int(m.group(1)) if m.group(1) else 1
    return coef, int(m.group(2)), int(m.group(3))


def parse_equation(text: str) -> OriginalEquation:
    """Parse ``d*a^x + e*b^y = f*c^z`` (coefficients optional).

    A single coefficient > 1 is mapped to the c term. When it sits on the
    left, the right-hand term becomes ``a`` and the permutation is
    ``ax_minus_cz``; otherwise the left-hand terms are ``a`` and ``b``.
    """
    text = text.replace(" ", "")
    if text.count("=") != 1:
        raise ParseError("equation must contain exactly one '='")
    lhs, rhs = text.split("=")
    left = lhs.split("+")
    if len(left) != 2:
        raise ParseError("left side must be a sum of two terms")
    t1, t2 = (_parse_term(t) for t in left)
    t3 = _parse_term(rhs)
    big = [t for t in (t1, t2, t3) if t[0] > 1]
    if len(big) == 1 and big[0] is not t3:
        cterm = big[0]
        other = t2 if cterm is t1 else t1
        aterm, bterm, perm = t3, other, Permutation.AX_MINUS_CZ
    else:
        cterm, perm = t3, Permutation.CZ_MINUS_AX
        aterm, bterm = t1, t2
        if t1[2] == t2[2] and t1[0] == t2[0] == 1 and t2[1] > t1[1]:
            aterm, bterm = t2, t1
    exps = Exponents(aterm[2], bterm[2], cterm[2])
    return OriginalEquation(
        exps, aterm[0], bterm[0], cterm[0], aterm[1], bterm[1], cterm[1], perm
    )


def parse_resultant(text: str) -> Tuple[Tuple[int, int, int], Tuple[int, int, int], int]:
    """Parse a coefficient-free ``A^x + B^y = C^z``; returns (bases, exps, lone index)."""
    eq = parse_equation(text)
    if max(eq.coefficients) > 1:
        raise ParseError("resultant equations carry no coefficients")
    return eq.bases, tuple(eq.exps), eq.permutation.lone_term
