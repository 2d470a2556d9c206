"""Independent brute-force oracles for the test suite.

Nothing here touches the package's sieves, character tables, or kernel
routines: factorizations come from raw trial division, characters from
exhaustive homomorphism search, conductors from the definitional divisor
scan, and root-of-unity sums from exact cyclotomic polynomial division.
"""

import itertools
import math
from fractions import Fraction
from functools import lru_cache


# ---------------------------------------------------------------------------
# factorization / smoothness by trial division


def trial_division_factor(n):
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def largest_prime_factor(n):
    if n == 1:
        return 1
    return trial_division_factor(n)[-1][0]


def is_prime(n):
    if n < 2:
        return False
    return trial_division_factor(n) == [(n, 1)]


def smooth_flags(x, y):
    """flags[n] for 0..x: n >= 1 and y-smooth, by trial division."""
    flags = [False] * (x + 1)
    for n in range(1, x + 1):
        flags[n] = largest_prime_factor(n) <= y
    return flags


def psi_count(flags, x, q=None, a=None, coprime_to=None):
    total = 0
    for n in range(1, x + 1):
        if not flags[n]:
            continue
        if q is not None and n % q != a:
            continue
        if coprime_to is not None and math.gcd(n, coprime_to) != 1:
            continue
        total += 1
    return total


# ---------------------------------------------------------------------------
# characters by exhaustive homomorphism search (tiny q only)


def brute_force_characters(q):
    """All multiplicative maps units(q) -> mu_M as {unit: Fraction k/M} dicts."""
    units = [n for n in range(1, q + 1) if math.gcd(n, q) == 1]
    units = [u % q for u in units]
    if q == 1:
        units = [0]
    M = 1
    for u in units:
        # order of u in the unit group
        t, k = u, 1
        while t % q != 1 % q:
            t = (t * u) % q
            k += 1
        M = math.lcm(M, k)
    chars = []
    for assignment in itertools.product(range(M), repeat=len(units)):
        vals = dict(zip(units, assignment))
        ok = True
        for a in units:
            for b in units:
                if (vals[a] + vals[b]) % M != vals[(a * b) % q]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            chars.append({u: Fraction(k, M) for u, k in vals.items()})
    return chars


def conductor_by_scan(chi):
    """Spec-definition conductor: smallest r | q with chi = 1 on units = 1 mod r."""
    q = chi.q
    for r in sorted(d for d in range(1, q + 1) if q % d == 0):
        good = True
        for n in range(1, q + 1):
            if math.gcd(n, q) == 1 and n % r == 1 % r:
                if chi.value(n) != 0:
                    good = False
                    break
        if good:
            return r
    return q


# ---------------------------------------------------------------------------
# exact cyclotomic-arithmetic root sums (small orders)


def _poly_divmod_int(num, den):
    """Exact division of integer polynomials (den monic); returns (quot, rem)."""
    num = list(num)
    dd = len(den) - 1
    quot = [0] * max(1, len(num) - dd)
    for i in range(len(num) - 1 - dd, -1, -1):
        c = num[i + dd]
        if c:
            quot[i] = c
            for j, dc in enumerate(den):
                num[i + j] -= c * dc
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


@lru_cache(maxsize=None)
def cyclotomic_poly(M):
    """Coefficients of the M-th cyclotomic polynomial, ascending."""
    if M == 1:
        return (-1, 1)
    num = [-1] + [0] * (M - 1) + [1]  # x^M - 1
    for d in range(1, M):
        if M % d == 0:
            num, rem = _poly_divmod_int(num, cyclotomic_poly(d))
            assert all(c == 0 for c in rem)
    return tuple(num)


def exact_root_sum_is(fractions, expected_integer):
    """True iff sum of e^{2 pi i k/m} equals the integer, by division mod Phi_M."""
    fracs = [Fraction(f) for f in fractions]
    M = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    coeffs = [0] * max(M, 1)
    for f in fracs:
        coeffs[int(f * M) % M] += 1
    coeffs[0] -= expected_integer
    _, rem = _poly_divmod_int(coeffs, list(cyclotomic_poly(M)))
    return all(c == 0 for c in rem)


# ---------------------------------------------------------------------------
# high-precision saddle point (mpmath-free: Fraction bisection on a fine grid)


def alpha_saddle_highprec(x, y, digits=30):
    """Independent bisection of the saddle equation with mpmath."""
    import mpmath

    mpmath.mp.dps = digits
    primes = [p for p in range(2, y + 1) if is_prime(p)]
    target = mpmath.log(x)

    def h(alpha):
        return sum(mpmath.log(p) / (mpmath.power(p, alpha) - 1) for p in primes) - target

    lo, hi = mpmath.mpf("1e-8"), mpmath.mpf(4)
    for _ in range(200):
        mid = (lo + hi) / 2
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2
