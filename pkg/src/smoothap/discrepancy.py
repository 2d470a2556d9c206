"""Progression discrepancies, the conductor-truncated kernel, and averages.

For a multiplicative f and gcd(a, q) = 1,

    Delta(f,x;q,a) = sum_{n<=x, n=a(q)} f(n) - (1/phi(q)) sum_{n<=x,(n,q)=1} f(n)

and Delta_Xi replaces the coprime main term by the character main terms
(1/phi(q)) sum_{chi in Xi_q} chi(a) S_f(x,chi) over the characters mod q
induced by a set Xi of primitive characters.  Delta_A is the special case
Xi = all primitive characters of conductor <= D, computable directly
through the kernel

    u_D(n; q) = [n=1 mod q] - (1/phi(q)) sum_{chi mod q, cond(chi)<=D} chi(n),

which also has an exact rational divisor-sum form (Moebius route).  Both
routes are implemented and cross-checked.

All complex sums reduce residue-wise first (bincount in ascending n, a
fixed order), then combine over at most q terms with numpy's pairwise
sum, so serial and threaded runs agree byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import divisors, euler_phi, factorize, moebius, modinv, radical_multiples
from .characters import CharacterFamily, DirichletCharacter, induce
from .errors import DomainError
from .multfn import MultFnSpec, dirichlet_inverse, evaluate, get_support
from .sieve import SieveTable
from .util import ordered_map


@dataclass
class DiscrepancyRecord:
    """One (q, residue) cell: Delta and friends with their components."""

    q: int
    a1: int
    a2: int
    delta: complex
    delta_xi: complex | None = None
    delta_a: complex | None = None
    progression_sum: complex = 0j
    coprime_main: complex = 0j
    xi_main: complex = 0j

    def primary(self) -> complex:
        """The discrepancy this record was computed for (Delta_Xi when present)."""
        if self.delta_xi is not None:
            return self.delta_xi
        return self.delta


@dataclass
class ExceptionalWitness:
    character: DirichletCharacter
    X: int | None = None
    value: float | None = None
    threshold: float | None = None


@dataclass
class ExceptionalSet:
    """A set Xi of primitive characters, optionally with detection witnesses."""

    members: list[ExceptionalWitness] = field(default_factory=list)
    near_misses: list[ExceptionalWitness] = field(default_factory=list)

    @classmethod
    def from_characters(cls, chars) -> "ExceptionalSet":
        ms = []
        for chi in chars:
            if not chi.primitive:
                raise DomainError(f"Xi members must be primitive; got modulus {chi.q}")
            ms.append(ExceptionalWitness(chi))
        return cls(ms)

    @property
    def characters(self) -> list[DirichletCharacter]:
        return [w.character for w in self.members]

    def members_dividing(self, q: int) -> list[DirichletCharacter]:
        """The primitive members whose conductor divides q (they induce Xi_q)."""
        return [w.character for w in self.members if q % w.character.q == 0]

    @property
    def beta(self) -> Fraction:
        """sum of 1/conductor over members, exact."""
        return beta_stats(self)[0]

    @property
    def weighted_count(self) -> float:
        """sum of conductor^{-1/2} over members."""
        return beta_stats(self)[1]


def beta_stats(xi: ExceptionalSet) -> tuple[Fraction, float]:
    """(beta, weighted) = (sum 1/r_psi exactly, sum 1/sqrt(r_psi)) over members."""
    beta = Fraction(0)
    weighted = 0.0
    for chi in xi.characters:
        beta += Fraction(1, chi.q)
        weighted += 1.0 / math.sqrt(chi.q)
    return beta, weighted


# ---------------------------------------------------------------------------
# residue-wise summation helpers


def residue_sums(fv: np.ndarray, q: int) -> np.ndarray:
    """sum of fv[n] over n = r (mod q), as a length-q complex vector."""
    res = np.arange(fv.size) % q
    re = np.bincount(res, weights=fv.real, minlength=q)
    im = np.bincount(res, weights=fv.imag, minlength=q)
    return re + 1j * im


def _f_residue_sums(f: MultFnSpec, table: SieveTable, x: int, q: int) -> np.ndarray:
    """residue_sums of the values of f up to x, touching only its support."""
    ns, vs = get_support(f, table, x)
    res = ns % q
    re = np.bincount(res, weights=vs.real, minlength=q)
    im = np.bincount(res, weights=vs.imag, minlength=q)
    return re + 1j * im


@lru_cache(maxsize=None)
def _unit_residues(q: int) -> np.ndarray:
    out = np.array([r for r in range(q) if math.gcd(r, q) == 1], dtype=np.int64)
    out.setflags(write=False)
    return out


def character_sum(f: MultFnSpec, X: int, chi: DirichletCharacter,
                  table: SieveTable) -> complex:
    """S_f(X, chi) = sum_{n<=X} f(n) * conj(chi(n))."""
    rs = _f_residue_sums(f, table, X, chi.q)
    return complex((np.conj(chi.complex_table()) * rs).sum())


def _sum_induced(rs: np.ndarray, psi: DirichletCharacter, q: int, conj: bool) -> complex:
    """sum over residues of rs[r] * psi_q(r), psi_q = psi induced to modulus q."""
    base = psi.complex_table()
    idx = np.arange(q) % psi.q
    tab = base[idx]
    units = _unit_residues(q)
    vals = tab[units]
    if conj:
        vals = np.conj(vals)
    return complex((vals * rs[units]).sum())


# ---------------------------------------------------------------------------
# the discrepancies


def delta_record(f: MultFnSpec, x: int, q: int, a: int,
                 table: SieveTable) -> DiscrepancyRecord:
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    a %= q
    if math.gcd(a, q) != 1:
        raise DomainError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    rs = _f_residue_sums(f, table, x, q)
    prog = complex(rs[a % q])
    units = _unit_residues(q)
    coprime = complex(rs[units].sum())
    phi = euler_phi(q)
    d = prog - coprime / phi
    return DiscrepancyRecord(q=q, a1=a, a2=1, delta=d,
                             progression_sum=prog, coprime_main=coprime / phi)


def delta(f: MultFnSpec, x: int, q: int, a: int, table: SieveTable) -> complex:
    """Delta(f,x;q,a): progression sum minus the coprime average."""
    return delta_record(f, x, q, a, table).delta


def delta_xi_record(f: MultFnSpec, x: int, q: int, a1: int, a2: int,
                    xi: ExceptionalSet, table: SieveTable) -> DiscrepancyRecord:
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    if math.gcd(a1 * a2, q) != 1:
        raise DomainError(f"need gcd(a1*a2, q) = 1, got a1={a1}, a2={a2}, q={q}")
    b = (a1 % q) * modinv(a2, q) % q if q > 1 else 0
    rs = _f_residue_sums(f, table, x, q)
    prog = complex(rs[b])
    units = _unit_residues(q)
    coprime = complex(rs[units].sum())
    phi = euler_phi(q)
    xi_main = 0j
    for psi in xi.members_dividing(q):
        chi_b = induce(psi, q).cvalue(b) if q > 1 else 1.0 + 0j
        s = _sum_induced(rs, psi, q, conj=True)
        xi_main += chi_b * s
    dxi = prog - xi_main / phi
    return DiscrepancyRecord(q=q, a1=a1, a2=a2, delta=prog - coprime / phi,
                             delta_xi=dxi, progression_sum=prog,
                             coprime_main=coprime / phi, xi_main=xi_main / phi)


def delta_xi(f: MultFnSpec, x: int, q: int, a1: int, a2: int,
             xi: ExceptionalSet, table: SieveTable) -> complex:
    """Delta_Xi(f,x;q,a1*conj(a2)): main terms only from characters induced by Xi."""
    return delta_xi_record(f, x, q, a1, a2, xi, table).delta_xi


def delta_xi_residue(f: MultFnSpec, x: int, q: int, a: int,
                     xi: ExceptionalSet, table: SieveTable) -> complex:
    """Convenience (a)-form of delta_xi: residue given directly, a2 = 1."""
    return delta_xi_record(f, x, q, a, 1, xi, table).delta_xi


# ---------------------------------------------------------------------------
# the conductor-truncated kernel, both exact forms


def u_kernel_moebius(n: int, q: int, D: int) -> Fraction:
    """Divisor-sum form of the kernel, exact rational.

    0 when gcd(n,q) > 1; otherwise
    [n=1 mod q] - (1/phi(q)) * sum_{d<=D, d | (q, n-1)} phi(d) *
                               sum_{b<=D/d, b | q/d} mu(b).
    """
    if q < 1 or D < 1:
        raise DomainError(f"need q >= 1 and D >= 1, got q={q}, D={D}")
    n %= q
    if math.gcd(n, q) != 1:
        return Fraction(0)
    ind = 1 if n % q == 1 % q else 0
    g = math.gcd(q, n - 1)
    total = 0
    for d in divisors(g):
        if d > D:
            continue
        inner = 0
        lim = D // d
        for b in divisors(q // d):
            if b <= lim:
                inner += moebius(b)
        total += euler_phi(d) * inner
    phi = euler_phi(q)
    return Fraction(ind * phi - total, phi)


def u_kernel_chardef(n: int, q: int, D: int, family: CharacterFamily) -> complex:
    """Definition form: [n=1 mod q] - (1/phi(q)) sum_{chi mod q, cond<=D} chi(n)."""
    if family.D < min(D, q):
        raise DomainError(f"family only covers conductors <= {family.D}, need {min(D, q)}")
    n %= q
    ind = 1.0 if n % q == 1 % q else 0.0
    if math.gcd(n, q) != 1:
        return complex(ind)  # every chi(n) = 0; n=1 unreachable unless q=1
    s = 0j
    for psi in family.members:
        if psi.q <= D and q % psi.q == 0:
            s += induce(psi, q).cvalue(n)
    return ind - s / euler_phi(q)


def u_kernel_chardef_row(q: int, D: int, family: CharacterFamily) -> np.ndarray:
    """u_kernel_chardef at every residue mod q at once (one induction per member)."""
    if family.D < min(D, q):
        raise DomainError(f"family only covers conductors <= {family.D}, need {min(D, q)}")
    n = np.arange(q)
    ind = np.zeros(q)
    ind[1 % q] = 1.0
    s = np.zeros(q, dtype=np.complex128)
    for psi in family.members:
        if psi.q <= D and q % psi.q == 0:
            s += psi.complex_table()[n % psi.q]
    units = _unit_residues(q)
    keep = np.zeros(q, dtype=bool)
    keep[units] = True
    s[~keep] = 0  # induced characters vanish off the units of q
    return ind - s / euler_phi(q)


def delta_a_record(f: MultFnSpec, x: int, q: int, a1: int, a2: int, D: int,
                   table: SieveTable) -> DiscrepancyRecord:
    if math.gcd(a1 * a2, q) != 1:
        raise DomainError(f"need gcd(a1*a2, q) = 1, got a1={a1}, a2={a2}, q={q}")
    c = modinv(a1, q) * (a2 % q) % q if q > 1 else 0  # kernel argument scale
    rs = _f_residue_sums(f, table, x, q)
    row = np.array(
        [float(u_kernel_moebius((r * c) % q if q > 1 else 0, q, D)) for r in range(q)]
    )
    da = complex((row * rs).sum())
    units = _unit_residues(q)
    coprime = complex(rs[units].sum())
    phi = euler_phi(q)
    b = (a1 % q) * modinv(a2, q) % q if q > 1 else 0
    prog = complex(rs[b])
    return DiscrepancyRecord(q=q, a1=a1, a2=a2, delta=prog - coprime / phi,
                             delta_a=da, progression_sum=prog,
                             coprime_main=coprime / phi)


def delta_A(f: MultFnSpec, x: int, q: int, a1: int, a2: int, D: int,
            table: SieveTable) -> complex:
    """Delta_A(f,x;q,a1*conj(a2)) = sum_{n<=x} f(n) u_D(n*conj(a1)*a2; q)."""
    return delta_a_record(f, x, q, a1, a2, D, table).delta_a


# ---------------------------------------------------------------------------
# averages over moduli


def bv_average(f: MultFnSpec, x: int, Q: int, a1: int, a2: int,
               xi: ExceptionalSet, table: SieveTable,
               threads: int = 1) -> tuple[float, list[DiscrepancyRecord]]:
    """sum_{q<=Q, gcd(q, a1*a2)=1} |Delta_Xi(f,x;q,a1*conj(a2))| plus the records.

    Work may fan out over q, but records and the total are always reduced
    in ascending q, so the result is independent of the schedule.
    """
    if Q > x:
        raise DomainError(f"need Q <= x, got Q={Q}, x={x}")
    get_support(f, table, x)  # shared read-only cache, built before fan-out
    qs = [q for q in range(1, Q + 1) if math.gcd(q, a1 * a2) == 1]
    records = ordered_map(
        lambda q: delta_xi_record(f, x, q, a1, a2, xi, table), qs, threads
    )
    total = 0.0
    for rec in records:
        total += abs(rec.delta_xi)
    return total, records


# ---------------------------------------------------------------------------
# the transfer identity between Delta_Xi and Delta_A


@dataclass
class TransferCheck:
    lhs: complex
    rhs: complex

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def verify_transfer_identity(f: MultFnSpec, x: int, q: int, a1: int, a2: int,
                             xi: ExceptionalSet, D: int,
                             table: SieveTable) -> TransferCheck:
    """Evaluate both sides of the exact identity relating Delta_Xi to Delta_A.

    lhs = Delta_Xi - Delta_A at (f, x; q, a1*conj(a2)).
    rhs = (1/phi(q)) * sum over l with prime factors dividing q of
          g(l) * sum_{d<=D, (d,l)=1, d|q} phi(d) * Delta_Xi(f, x/l; d, b*conj(l))
                 * sum_{m<=D/d, m|q/d} mu(m),
    with g the Dirichlet inverse of f.  The l-sum is finite: terms vanish
    once x/l < 1.
    """
    for chi in xi.characters:
        if chi.q > D:
            raise DomainError(
                f"Xi member of conductor {chi.q} lies outside A({D}); identity needs Xi in A(D)"
            )
    if math.gcd(a1 * a2, q) != 1:
        raise DomainError(f"need gcd(a1*a2, q) = 1, got a1={a1}, a2={a2}, q={q}")

    lhs = (delta_xi(f, x, q, a1, a2, xi, table)
           - delta_A(f, x, q, a1, a2, D, table))

    g = dirichlet_inverse(f, x)
    b = (a1 % q) * modinv(a2, q) % q if q > 1 else 0
    qprimes = tuple(p for p, _ in factorize(q))
    ells = radical_multiples(qprimes, x)
    qdivs = [d for d in divisors(q) if d <= D]
    mu_sums = {d: sum(moebius(m) for m in divisors(q // d) if m <= D // d)
               for d in qdivs}

    rhs = 0j
    for ell in ells:
        gl = evaluate(g, ell, table)
        if gl == 0:
            continue
        xl = x // ell
        for d in qdivs:
            if math.gcd(d, ell) != 1 or mu_sums[d] == 0:
                continue
            a = (b % d) * modinv(ell, d) % d if d > 1 else 0
            dx = delta_xi_residue(f, xl, d, a, xi, table)
            rhs += gl * euler_phi(d) * dx * mu_sums[d]
    rhs /= euler_phi(q)
    return TransferCheck(lhs, rhs)
