"""Prime-field helpers."""

from __future__ import annotations

DEFAULT_PRIME = 11863279
MAX_PRIME = 2**31


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit inputs."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p) or p >= MAX_PRIME:
        raise ValueError(f"{p} is not a prime below 2^31")
    return p


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse modulo p")
    return pow(a, -1, p)


def reduce_fraction(num: int, den: int, p: int) -> int:
    """Image of ``num/den`` in F_p."""
    return num % p * inv_mod(den, p) % p
