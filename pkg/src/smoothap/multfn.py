"""Multiplicative functions given by prime-power oracles.

A MultFnSpec is a label, an oracle (p, k) -> f(p^k), and an optional
smoothness bound y; the function it denotes vanishes at every n with a
prime factor above y (enforced at evaluation on integers, never by
rewriting oracle values).  Log-derivative coefficients Lambda_f are kept
as multiples of log p so the class test |Lambda_f(p^k)| <= log p is a
plain |c| <= 1 comparison.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OracleError, RangeError
from .sieve import SieveTable, primes_upto

CLASS_C_SLACK = 1e-12


class MultFnSpec:
    """A multiplicative function f with f(1) = 1, defined on prime powers.

    The label plus the sampled oracle values form the cache identity, so a
    label should name its function uniquely (the library constructors bake
    their parameters in).
    """

    __slots__ = ("label", "oracle", "smooth_bound", "_fingerprint")

    def __init__(self, label: str, oracle, smooth_bound: int | None = None):
        self.label = label
        self.oracle = oracle  # (p, k) -> complex
        self.smooth_bound = smooth_bound
        self._fingerprint = None

    def at(self, p: int, k: int) -> complex:
        """Oracle value f(p^k); smoothness is NOT applied here."""
        return self.oracle(p, k)

    def fingerprint(self) -> str:
        """Stable digest of (label, y, values at prime powers <= 64); cache key."""
        if self._fingerprint is None:
            parts = [self.label, str(self.smooth_bound)]
            for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61):
                k = 1
                while p**k <= 64:
                    if self.smooth_bound is not None and p > self.smooth_bound:
                        v = 0j
                    else:
                        try:
                            v = complex(self.oracle(p, k))
                        except OracleError:
                            v = complex("nan")
                    parts.append(f"{p}^{k}:{v.real:.12g},{v.imag:.12g}")
                    k += 1
            digest = hashlib.blake2b("|".join(parts).encode(), digest_size=12)
            self._fingerprint = digest.hexdigest()
        return self._fingerprint

    def to_record(self) -> dict:
        """Serializable spec: label, bound, and sample (p, k, value) triples."""
        triples = []
        for p in (2, 3, 5, 7, 11, 13):
            if self.smooth_bound is not None and p > self.smooth_bound:
                continue
            for k in (1, 2):
                try:
                    v = complex(self.oracle(p, k))
                except OracleError:
                    continue
                triples.append([p, k, f"{v.real:.12g}", f"{v.imag:.12g}"])
        return {"label": self.label, "smooth_bound": self.smooth_bound,
                "prime_powers": triples}

    def __repr__(self):
        return f"MultFnSpec({self.label!r}, y={self.smooth_bound})"


def from_prime_powers(label: str, values: dict, smooth_bound: int | None = None) -> MultFnSpec:
    """Oracle backed by an explicit {(p, k): value} dict.

    A missing (p, k) falls back to the completely multiplicative extension
    f(p)^k when (p, 1) is present, and errors otherwise.
    """

    def oracle(p, k):
        if (p, k) in values:
            return values[(p, k)]
        if (p, 1) in values:
            return values[(p, 1)] ** k
        raise OracleError(f"{label}: no oracle value at (p={p}, k={k})")

    return MultFnSpec(label, oracle, smooth_bound)


def completely_multiplicative(label: str, prime_value, smooth_bound: int | None = None) -> MultFnSpec:
    """f(p^k) = prime_value(p)^k."""
    return MultFnSpec(label, lambda p, k: prime_value(p) ** k, smooth_bound)


# ---------------------------------------------------------------------------
# built-in function library


def one() -> MultFnSpec:
    return MultFnSpec("one", lambda p, k: 1.0)


def smooth_indicator(y: int) -> MultFnSpec:
    """Indicator of y-smooth integers."""
    return MultFnSpec(f"smooth_indicator[y={y}]", lambda p, k: 1.0, smooth_bound=y)


def moebius_smooth(y: int) -> MultFnSpec:
    """mu(n) restricted to y-smooth integers."""
    return MultFnSpec(
        f"moebius_smooth[y={y}]",
        lambda p, k: -1.0 if k == 1 else 0.0,
        smooth_bound=y,
    )


def _unit_angle(seed: int, p: int) -> float:
    h = hashlib.blake2b(f"{seed}:{p}".encode(), digest_size=8).digest()
    return int.from_bytes(h, "big") / 2**64


def random_unit_circle(seed: int, smooth_bound: int | None = None) -> MultFnSpec:
    """Completely multiplicative with f(p) uniform on the unit circle.

    Values are a deterministic hash of (seed, p), so they do not depend on
    evaluation order or on which primes get queried first.
    """

    def fp(p):
        return complex(np.exp(2j * np.pi * _unit_angle(seed, p)))

    return completely_multiplicative(f"random_unit[seed={seed}]", fp, smooth_bound)


def character_twist(psi, y: int) -> MultFnSpec:
    """f(n) = psi(n) * 1_{y-smooth}(n) for a Dirichlet character psi."""
    label = f"twist[q={psi.q},rank={psi.rank},y={y}]"
    return completely_multiplicative(label, lambda p: psi.cvalue(p), smooth_bound=y)


# ---------------------------------------------------------------------------
# evaluation


def factor_by_lpf(table: SieveTable, n: int) -> list[tuple[int, int]]:
    """Factorization of n <= x_max by repeated largest-prime-factor division."""
    if n > table.x_max:
        raise RangeError(f"n={n} exceeds table x_max={table.x_max}")
    out = []
    while n > 1:
        p = int(table.lpf[n])
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        out.append((p, k))
    return out


def evaluate(f: MultFnSpec, n: int, table: SieveTable) -> complex:
    """f(n) as the oracle product over the factorization of n."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if n > table.x_max:
        raise RangeError(f"n={n} exceeds table x_max={table.x_max}")
    if n == 1:
        return 1.0 + 0j
    if f.smooth_bound is not None and int(table.lpf[n]) > f.smooth_bound:
        return 0j
    val = 1.0 + 0j
    for p, k in factor_by_lpf(table, n):
        val *= f.at(p, k)
    return val


def values_array(f: MultFnSpec, table: SieveTable, x: int) -> np.ndarray:
    """f(n) for n = 0..x as a complex array (f[0] = 0), computed in O(x) waves.

    Each pass rewrites vals[n] = f(P-power part of n) * vals[cofactor]; after
    j passes every n with at most j distinct primes is correct, so omega(x)
    passes converge.
    """
    if x > table.x_max:
        raise RangeError(f"x={x} exceeds table x_max={table.x_max}")
    fpp = np.zeros(x + 1, dtype=np.complex128)
    if x >= 1:
        fpp[1] = 1.0
    bound = x if f.smooth_bound is None else min(x, f.smooth_bound)
    for p in table.primes:
        p = int(p)
        if p > bound:
            break
        pe, k = p, 1
        while pe <= x:
            fpp[pe] = complex(f.at(p, k))
            pe *= p
            k += 1
    ppart = table.prime_power_part()[: x + 1]
    n = np.arange(x + 1)
    cof = n // ppart
    # passes needed = max number of distinct prime factors below x
    passes, prod = 1, 6
    while prod <= x:
        passes += 1
        prod *= _nth_prime(passes + 1)
    vals = np.ones(x + 1, dtype=np.complex128)
    for _ in range(max(passes, 1)):
        vals = fpp[ppart] * vals[cof]
    vals[0] = 0
    if x >= 1:
        vals[1] = 1.0
    return vals


def _nth_prime(i: int) -> int:
    ps = primes_upto(200)
    return ps[i - 1]


def get_values(f: MultFnSpec, table: SieveTable, x: int) -> np.ndarray:
    """values_array with per-table caching; returns a read-only view 0..x."""
    key = f.fingerprint()
    cached = table._values_cache.get(key)
    if cached is None or cached.size < x + 1:
        cached = values_array(f, table, x)
        cached.setflags(write=False)
        table._values_cache[key] = cached
    return cached[: x + 1]


def get_support(f: MultFnSpec, table: SieveTable, x: int):
    """(positions n <= x with f(n) != 0, values there), as read-only views.

    Smooth-supported f vanishes off the Psi(x,y) smooth integers, so the
    residue-wise sums downstream only ever need to touch this support.
    """
    get_values(f, table, x)
    full = table._values_cache[f.fingerprint()]
    key = (f.fingerprint(), "support")
    entry = table._values_cache.get(key)
    if entry is None or entry[0] is not full:
        ns = np.nonzero(full)[0]
        vs = full[ns]
        ns.setflags(write=False)
        vs.setflags(write=False)
        entry = (full, ns, vs)
        table._values_cache[key] = entry
    _, ns, vs = entry
    hi = int(np.searchsorted(ns, x + 1))
    return ns[:hi], vs[:hi]


# ---------------------------------------------------------------------------
# log-derivative coefficients and class membership


@dataclass
class LambdaTable:
    """Lambda_f on prime powers <= N, stored as coefficients c with value c*log p."""

    N: int
    coeffs: dict  # p^k -> (p, c)

    def value(self, n: int) -> complex:
        """Lambda_f(n) as a complex number (0 off prime powers)."""
        if n in self.coeffs:
            p, c = self.coeffs[n]
            return c * math.log(p)
        return 0j

    def coefficient(self, n: int):
        """(p, c) with Lambda_f(n) = c*log p, or None off prime powers."""
        return self.coeffs.get(n)


def lambda_f(f: MultFnSpec, N: int) -> LambdaTable:
    """Coefficients of -F'/F: k f(p^k) = sum_{j<=k} c_j f(p^{k-j}), solved upward."""
    coeffs = {}
    for p in primes_upto(N):
        kmax = 0
        pe = p
        while pe <= N:
            kmax += 1
            pe *= p
        fvals = [1.0 + 0j]
        for k in range(1, kmax + 1):
            if f.smooth_bound is not None and p > f.smooth_bound:
                fvals.append(0j)
            else:
                fvals.append(complex(f.at(p, k)))
        cs = [0j]
        pe = p
        for k in range(1, kmax + 1):
            c_k = k * fvals[k] - sum(cs[j] * fvals[k - j] for j in range(1, k))
            cs.append(c_k)
            coeffs[pe] = (p, c_k)
            pe *= p
    return LambdaTable(N, coeffs)


@dataclass
class ClassCCertificate:
    """max |Lambda_f(p^k)| / Lambda(p^k) over p^k <= N; valid iff <= 1 (+ slack)."""

    checked_up_to: int
    max_ratio: float

    @property
    def valid(self) -> bool:
        return self.max_ratio <= 1.0 + CLASS_C_SLACK


def check_class_c(f: MultFnSpec, N: int) -> ClassCCertificate:
    table = lambda_f(f, N)
    worst = 0.0
    for p, c in table.coeffs.values():
        worst = max(worst, abs(c))
    return ClassCCertificate(N, worst)


def dirichlet_inverse(f: MultFnSpec, N: int) -> MultFnSpec:
    """The g with (f*g)(n) = [n=1], built on prime powers p^k <= N.

    Inverts the evaluated function: a smoothness bound on f zeroes the
    prime values above it before inversion, and g carries the same bound.
    """
    gvals = {}
    for p in primes_upto(N):
        if f.smooth_bound is not None and p > f.smooth_bound:
            continue  # f(p^k) = 0 there, hence g(p^k) = 0; oracle falls through
        kmax = 0
        pe = p
        while pe <= N:
            kmax += 1
            pe *= p
        fv = [1.0 + 0j] + [complex(f.at(p, k)) for k in range(1, kmax + 1)]
        gv = [1.0 + 0j]
        for k in range(1, kmax + 1):
            gv.append(-sum(fv[j] * gv[k - j] for j in range(1, k + 1)))
            gvals[(p, k)] = gv[k]

    y = f.smooth_bound

    def oracle(p, k):
        if y is not None and p > y:
            return 0j
        try:
            return gvals[(p, k)]
        except KeyError:
            raise OracleError(
                f"inverse[{f.label}]: no oracle value at (p={p}, k={k}); built up to {N}"
            ) from None

    return MultFnSpec(f"inverse[{f.label}]", oracle, smooth_bound=y)


def restrict_smooth(f: MultFnSpec, y: int) -> MultFnSpec:
    """Same oracle, support cut to y-smooth integers at evaluation time."""
    if y < 2:
        raise DomainError(f"need y >= 2, got {y}")
    bound = y if f.smooth_bound is None else min(y, f.smooth_bound)
    return MultFnSpec(f"{f.label}|smooth[{bound}]", f.oracle, smooth_bound=bound)
