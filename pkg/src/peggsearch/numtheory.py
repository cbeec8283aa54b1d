"""Exact integer primitives shared by the rest of the package.

Everything here works on Python ints, so quantities far beyond the 64-bit
word (``f * c**z`` for bases near ``2**64`` reaches ``2**192`` and more) are
handled exactly.
"""

from __future__ import annotations

import math
from typing import Dict, Iterator, List, Optional

WORD_BITS = 64
WORD_MAX = (1 << WORD_BITS) - 1


def check_word(value: int, name: str = "value") -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if value < 0 or value > WORD_MAX:
        raise ValueError(f"{name}={value} does not fit an unsigned 64-bit word")
    return value


def padic_valuation(p: int, n: int) -> int:
    """Largest r such that ``p**r`` divides ``n``."""
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")
    if n <= 0:
        raise ValueError("valuation is undefined for n <= 0")
    r = 0
    while n % p == 0:
        n //= p
        r += 1
    return r


def _trial_divisors() -> Iterator[int]:
    yield 2
    yield 3
    d = 5
    while True:
        yield d
        yield d + 2
        d += 6


def factorize(n: int) -> Dict[int, int]:
    """Trial-division factorization, meant for coefficient-sized inputs."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out: Dict[int, int] = {}
    for p in _trial_divisors():
        if p * p > n:
            break
        if n % p == 0:
            r = 0
            while n % p == 0:
                n //= p
                r += 1
            out[p] = r
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_k_free(n: int, k: int) -> bool:
    """True when no prime divides ``n`` to the k-th power or higher."""
    if n < 1 or k < 2:
        raise ValueError("is_k_free expects n >= 1 and k >= 2")
    for p in _trial_divisors():
        if p**k > n:
            return True
        if n % p == 0:
            r = 0
            while n % p == 0:
                n //= p
                r += 1
            if r >= k:
                return False
    return True  # pragma: no cover


def _root_estimate(n: int, k: int) -> int:
    bits = n.bit_length()
    # keep the float argument well inside double range
    e = max(0, (bits - 960) // k)
    top = n >> (e * k)
    return int(float(top) ** (1.0 / k)) << e


def integer_kth_root(n: int, k: int) -> int:
    """Return ``floor(n ** (1/k))`` exactly.

    A floating-point estimate is pushed above the true root and then refined
    by integer Newton steps, which decrease monotonically onto the floor
    root. The result is confirmed by multiplying back.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 0:
        raise ValueError("n must be non-negative")
    if k == 1 or n < 2:
        return n
    if n.bit_length() <= k:
        return 1
    x = _root_estimate(n, k)
    x += (x >> 40) + 2
    k1 = k - 1
    while True:
        y = (k1 * x + n // x**k1) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def is_perfect_kth_power(n: int, k: int) -> bool:
    if n < 0:
        return False
    r = integer_kth_root(n, k)
    return r**k == n


def ceil_kth_root(n: int, k: int) -> int:
    """Smallest r >= 0 with ``r**k >= n``."""
    if n <= 0:
        return 0
    r = integer_kth_root(n, k)
    return r if r**k == n else r + 1


def floor_root_of_ratio(num: int, den: int, k: int) -> int:
    """Largest r >= 0 with ``den * r**k <= num``, or -1 when none exists."""
    if den <= 0:
        raise ValueError("den must be positive")
    if num < 0:
        return -1
    return integer_kth_root(num // den, k)


def ceil_root_of_ratio(num: int, den: int, k: int) -> int:
    """Smallest r >= 0 with ``den * r**k >= num``."""
    if den <= 0:
        raise ValueError("den must be positive")
    if num <= 0:
        return 0
    q = -(-num // den)
    return ceil_kth_root(q, k)


def smallest_q(m1: int, m2: int, r2: int) -> Optional[int]:
    """Smallest q >= 0 with ``q = 0 (mod m1)`` and ``q = r2 (mod m2)``.

    Returns None when the system has no solution, i.e. when
    ``gcd(m1, m2)`` does not divide ``r2``.
    """
    if m1 < 1 or m2 < 1:
        raise ValueError("moduli must be >= 1")
    if not 0 <= r2 < m2:
        raise ValueError(f"residue {r2} out of range for modulus {m2}")
    for q in range(0, math.lcm(m1, m2), m1):
        if q % m2 == r2:
            return q
    return None


def primes_up_to(n: int) -> List[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i, flag in enumerate(sieve) if flag]


def first_primes(count: int) -> List[int]:
    limit = 32
    while True:
        ps = primes_up_to(limit)
        if len(ps) >= count:
            return ps[:count]
        limit *= 2
