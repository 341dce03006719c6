"""Prime generation, primality testing, and integer factorization.

The prime table is a process-wide cache that only ever grows.  Reads are
lock-free; growth is serialized behind a lock and replaces the table
atomically, so concurrent readers always see a valid prefix.
"""

from __future__ import annotations

import threading

# Deterministic Miller-Rabin witness set, valid for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Trial division hands off to Pollard rho past this prime (configurable per call).
DEFAULT_TRIAL_CAP = 10**7

# Once trial primes pass this, probe the cofactor for primality after each hit.
_PRIMALITY_PROBE_FLOOR = 10**4


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    p = 2
    while p * p <= limit:
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
        p += 1
    return [i for i, f in enumerate(flags) if f]


class _PrimeCache:
    def __init__(self, limit: int = 1 << 12):
        self._lock = threading.Lock()
        self.limit = limit
        self.primes = _sieve(limit)

    def ensure_limit(self, limit: int) -> None:
        if limit <= self.limit:
            return
        with self._lock:
            if limit <= self.limit:
                return
            new_limit = max(limit, self.limit * 2)
            # Rebuild and swap atomically; readers keep a valid prefix.
            self.primes = _sieve(new_limit)
            self.limit = new_limit

    def ensure_count(self, count: int) -> None:
        while len(self.primes) < count:
            self.ensure_limit(self.limit * 2)


_cache = _PrimeCache()


def iter_primes():
    """Yield 2, 3, 5, ... indefinitely, growing the shared table as needed."""
    i = 0
    while True:
        primes = _cache.primes
        if i >= len(primes):
            _cache.ensure_limit(_cache.limit * 2)
            continue
        yield primes[i]
        i += 1


def primes_up_to(n: int) -> list[int]:
    _cache.ensure_limit(max(n, 2))
    primes = _cache.primes
    # primes is sorted; bisect by hand to avoid importing for one call
    lo, hi = 0, len(primes)
    while lo < hi:
        mid = (lo + hi) // 2
        if primes[mid] <= n:
            lo = mid + 1
        else:
            hi = mid
    return primes[:lo]


def first_primes(count: int) -> list[int]:
    _cache.ensure_count(count)
    return _cache.primes[:count]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3e24, far beyond desk scale)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of composite n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    from math import gcd

    for c in range(1, 1000):
        y, m = 2, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"failed to split {n}")


def _rho_split(n: int, out: dict[int, int]) -> None:
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _rho_split(d, out)
    _rho_split(n // d, out)


def factorize(n: int, trial_cap: int = DEFAULT_TRIAL_CAP) -> dict[int, int]:
    """Factor n >= 1 into a prime -> exponent map.

    Trial division by the cached prime table up to ``trial_cap``; any
    cofactor whose factors all exceed the cap is split by Pollard rho.
    """
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    m = n
    capped = False
    for p in iter_primes():
        if p * p > m:
            break
        if p > trial_cap:
            capped = True
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
            if m == 1:
                break
            if p > _PRIMALITY_PROBE_FLOOR and is_prime(m):
                break
    if m > 1:
        if not capped or is_prime(m):
            out[m] = out.get(m, 0) + 1
        else:
            _rho_split(m, out)
    return out
