"""Argument checks shared by the estimators and the CLI."""

from typing import Iterable, Optional, Sequence, Tuple

from .equations import Exponents, Permutation


def check_exponents(exps) -> Exponents:
    if isinstance(exps, str):
        parts = [p for p in exps.replace(" ", "").split(",") if p]
        try:
            exps = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"exponents must be integers, got {exps!r}") from None
    exps = tuple(exps)
    if len(exps) != 3:
        raise ValueError(f"need three exponents, got {len(exps)}")
    if any(not isinstance(e, int) or e < 3 for e in exps):
        raise ValueError(f"exponents must be integers >= 3, got {exps}")
    return Exponents(*exps)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def size_bound(log2: Optional[float] = None, exact: Optional[int] = None,
               name: str = "size") -> Optional[int]:
    """Exact size bound from a log2 value (2**floor(log2)) or an exact integer."""
    if exact is not None:
        return check_positive_int(exact, name)
    if log2 is None:
        return None
    if log2 < 0:
        raise ValueError(f"{name} log2 must be >= 0, got {log2}")
    return 1 << int(log2)


def check_permutations(perms: Optional[Iterable]) -> Optional[Tuple[Permutation, ...]]:
    if perms is None:
        return None
    if isinstance(perms, str):
        perms = [p for p in perms.split(",") if p]
    try:
        return tuple(Permutation(p) for p in perms)
    except ValueError as exc:
        raise ValueError(f"unknown permutation: {exc}") from None


def check_coefficients(coeffs) -> Optional[Tuple[int, ...]]:
    if coeffs is None:
        return None
    if isinstance(coeffs, str):
        coeffs = [c for c in coeffs.split(",") if c]
    out = []
    for c in coeffs:
        c = int(c)
        if c < 2:
            raise ValueError(f"coefficients must be >= 2, got {c}")
        out.append(c)
    return tuple(out)


def check_equation_list(X) -> Sequence:
    if isinstance(X, (str, bytes)):
        raise TypeError("expected a sequence of equations, not a single string")
    return list(X)
