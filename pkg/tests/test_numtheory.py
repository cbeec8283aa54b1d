import math

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peggsearch.numtheory import (
    WORD_MAX,
    ceil_kth_root,
    ceil_root_of_ratio,
    check_word,
    factorize,
    first_primes,
    floor_root_of_ratio,
    integer_kth_root,
    is_k_free,
    is_perfect_kth_power,
    padic_valuation,
    primes_up_to,
    smallest_q,
)


@settings(max_examples=400, deadline=None)
@given(st.integers(min_value=0, max_value=1 << 400), st.integers(min_value=1, max_value=9))
def test_kth_root_matches_gmpy2(n, k):
    assert integer_kth_root(n, k) == int(gmpy2.iroot(gmpy2.mpz(n), k)[0])


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=1 << 80), st.integers(min_value=2, max_value=7))
def test_exact_powers_and_neighbours(b, k):
    n = b**k
    assert integer_kth_root(n, k) == b
    assert integer_kth_root(n - 1, k) == b - 1
    assert is_perfect_kth_power(n, k)
    assert not is_perfect_kth_power(n + 1, k)
    assert ceil_kth_root(n, k) == b
    assert ceil_kth_root(n + 1, k) == b + 1


def test_root_rejects_bad_input():
    with pytest.raises(ValueError):
        integer_kth_root(-1, 3)
    with pytest.raises(ValueError):
        integer_kth_root(8, 0)
    assert not is_perfect_kth_power(-8, 3)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=-(1 << 60), max_value=1 << 90),
       st.integers(min_value=1, max_value=1 << 40), st.integers(min_value=2, max_value=5))
def test_ratio_roots_are_exact_bounds(num, den, k):
    lo = floor_root_of_ratio(num, den, k)
    if num < 0:
        assert lo == -1
    else:
        assert den * lo**k <= num < den * (lo + 1) ** k
    hi = ceil_root_of_ratio(num, den, k)
    if num <= 0:
        assert hi == 0
    else:
        assert den * hi**k >= num and (hi == 0 or den * (hi - 1) ** k < num)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=10**12))
def test_factorize_round_trip(n):
    fac = factorize(n)
    assert math.prod(p**e for p, e in fac.items()) == n
    assert all(gmpy2.is_prime(p) for p in fac)
    for p, e in fac.items():
        assert padic_valuation(p, n) == e


def test_k_free():
    assert is_k_free(12, 3)
    assert not is_k_free(24, 3)
    assert is_k_free(4, 3) and not is_k_free(16, 4)
    with pytest.raises(ValueError):
        is_k_free(0, 3)


def test_smallest_q_matches_brute_force():
    for m1 in range(1, 8):
        for m2 in range(1, 8):
            for r2 in range(m2):
                want = next((q for q in range(0, m1 * m2)
                             if q % m1 == 0 and q % m2 == r2), None)
                assert smallest_q(m1, m2, r2) == want, (m1, m2, r2)


def test_primes():
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert first_primes(25)[-1] == 97
    assert primes_up_to(1) == []


def test_check_word():
    assert check_word(WORD_MAX) == WORD_MAX
    with pytest.raises(ValueError):
        check_word(WORD_MAX + 1)
    with pytest.raises(TypeError):
        check_word(1.5)
