"""Exact Dirichlet character arithmetic.

A character mod q is stored as an exponent vector on a fixed set of
standard generators of (Z/qZ)*: each odd prime-power factor p^e
contributes its cyclic group with the least primitive root as generator,
and a factor 2^e contributes nothing (e = 1), the order-2 group <-1>
(e = 2), or the pair <-1> x <5> (e >= 3).  Every character value is an
exact root of unity e^{2 pi i k/m} kept as the reduced fraction k/m;
complex floats appear only at the summation layer.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import euler_phi, factorize
from .errors import DomainError

MODULUS_CAP = 1_000_000  # dlog tables are O(q); raise deliberately if needed


class RootSumStructureError(ArithmeticError):
    """A root-of-unity multiset lacked the uniform-subgroup shape."""


@dataclass
class _Component:
    """One cyclic factor of (Z/qZ)*: generator, order, discrete logs."""

    p: int
    pe: int
    order: int
    gen: int  # generator residue mod pe
    gen_q: int  # CRT lift: = gen mod pe, = 1 mod q/pe
    dlog: np.ndarray  # residue mod pe -> exponent of gen, -1 off units


def _least_primitive_root(p: int, e: int) -> int:
    """Smallest primitive root mod p^e for odd p."""
    fac = [r for r, _ in factorize(p - 1)]
    g = 2
    while True:
        if all(pow(g, (p - 1) // r, p) != 1 for r in fac):
            break
        g += 1
    if e > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _crt_lift(residue: int, pe: int, q: int) -> int:
    """The residue mod q that is `residue` mod pe and 1 mod q/pe."""
    m = q // pe
    if m == 1:
        return residue % q
    t = ((residue - 1) * pow(m, -1, pe)) % pe
    return (1 + m * t) % q


class UnitGroup:
    """Cached structure of (Z/qZ)*: components, discrete logs, unit mask."""

    _cache: dict[int, "UnitGroup"] = {}

    def __init__(self, q: int):
        self.q = q
        self.components: list[_Component] = []
        for p, e in factorize(q):
            self.components.extend(self._local(p, e, q))
        self.M = math.lcm(*(c.order for c in self.components)) if self.components else 1
        self.phi = euler_phi(q)
        self.unit_mask = np.fromiter(
            (math.gcd(r, q) == 1 for r in range(q)), dtype=bool, count=q
        ) if q > 1 else np.ones(1, dtype=bool)
        self.unit_mask.setflags(write=False)
        self._dlog_rows = None

    @staticmethod
    def _local(p: int, e: int, q: int) -> list[_Component]:
        pe = p**e
        if p == 2:
            if e == 1:
                return []
            if e == 2:
                dlog = np.full(4, -1, dtype=np.int64)
                dlog[1], dlog[3] = 0, 1
                return [_Component(2, 4, 2, 3, _crt_lift(3, 4, q), dlog)]
            half = 2 ** (e - 2)
            d_sign = np.full(pe, -1, dtype=np.int64)
            d_five = np.full(pe, -1, dtype=np.int64)
            v = 1
            for b in range(half):
                d_sign[v], d_five[v] = 0, b
                d_sign[pe - v], d_five[pe - v] = 1, b
                v = (v * 5) % pe
            return [
                _Component(2, pe, 2, pe - 1, _crt_lift(pe - 1, pe, q), d_sign),
                _Component(2, pe, half, 5, _crt_lift(5, pe, q), d_five),
            ]
        s = pe - pe // p
        g = _least_primitive_root(p, e)
        dlog = np.full(pe, -1, dtype=np.int64)
        v = 1
        for k in range(s):
            dlog[v] = k
            v = (v * g) % pe
        return [_Component(p, pe, s, g, _crt_lift(g, pe, q), dlog)]

    @classmethod
    def get(cls, q: int) -> "UnitGroup":
        if q < 1:
            raise DomainError(f"modulus must be >= 1, got {q}")
        if q > MODULUS_CAP:
            raise DomainError(f"modulus {q} exceeds the cap {MODULUS_CAP}")
        grp = cls._cache.get(q)
        if grp is None:
            grp = cls._cache[q] = UnitGroup(q)
        return grp

    def dlog_rows(self) -> list[np.ndarray]:
        """Per component, dlog of every residue 0..q-1 (garbage off units)."""
        if self._dlog_rows is None:
            n = np.arange(self.q)
            self._dlog_rows = [c.dlog[n % c.pe] for c in self.components]
        return self._dlog_rows


class DirichletCharacter:
    """A Dirichlet character mod q as an exponent vector on standard generators.

    Identity is by value table: two characters compare equal iff they share
    a modulus and exponent vector on the canonical generators.
    """

    __slots__ = ("group", "exps", "_conductor", "_table")

    def __init__(self, group: UnitGroup, exps: tuple[int, ...]):
        if len(exps) != len(group.components):
            raise ValueError("exponent vector does not match group structure")
        self.group = group
        self.exps = tuple(c % comp.order for c, comp in zip(exps, group.components))
        self._conductor = None
        self._table = None

    @property
    def q(self) -> int:
        return self.group.q

    @property
    def is_principal(self) -> bool:
        return all(c == 0 for c in self.exps)

    @property
    def order(self) -> int:
        if not self.exps:
            return 1
        return math.lcm(
            *(comp.order // math.gcd(c, comp.order) if c else 1
              for c, comp in zip(self.exps, self.group.components))
        )

    @property
    def rank(self) -> int:
        """Position in the deterministic enumeration (mixed-radix exponent rank)."""
        r = 0
        for c, comp in zip(self.exps, self.group.components):
            r = r * comp.order + c
        return r

    def value(self, n: int) -> Fraction | None:
        """chi(n) as the reduced fraction k/m meaning e^{2 pi i k/m}; None when chi(n)=0."""
        g = self.group
        n %= g.q
        if not g.unit_mask[n]:
            return None
        k = 0
        for c, comp in zip(self.exps, g.components):
            k += c * int(comp.dlog[n % comp.pe]) * (g.M // comp.order)
        return Fraction(k % g.M, g.M)

    def cvalue(self, n: int) -> complex:
        v = self.value(n)
        if v is None:
            return 0j
        return complex(np.exp(2j * np.pi * float(v)))

    def complex_table(self) -> np.ndarray:
        """Length-q complex array of chi over residues (0 off units); cached."""
        if self._table is None:
            g = self.group
            k = np.zeros(g.q, dtype=np.int64)
            for c, comp, row in zip(self.exps, g.components, g.dlog_rows()):
                k += c * (g.M // comp.order) * row
            phases = np.mod(k, g.M).astype(np.float64) / g.M
            tab = np.exp(2j * np.pi * phases)
            tab[~g.unit_mask] = 0
            tab.setflags(write=False)
            self._table = tab
        return self._table

    @property
    def conductor(self) -> int:
        """Smallest r | q whose induced structure carries chi (local formula)."""
        if self._conductor is None:
            cond = 1
            twos = [(comp, c) for comp, c in zip(self.group.components, self.exps)
                    if comp.p == 2]
            if len(twos) == 1:
                if twos[0][1] % 2:
                    cond *= 4
            elif len(twos) == 2:
                (_, c_sign), (comp5, c5) = twos
                if c5 % comp5.order:
                    cond *= 4 * (comp5.order // math.gcd(c5, comp5.order))
                elif c_sign % 2:
                    cond *= 4
            for comp, c in zip(self.group.components, self.exps):
                if comp.p == 2 or c % comp.order == 0:
                    continue
                m = comp.order // math.gcd(c, comp.order)
                t = 0
                while m % comp.p == 0:
                    m //= comp.p
                    t += 1
                cond *= comp.p ** (t + 1)
            self._conductor = cond
        return self._conductor

    @property
    def primitive(self) -> bool:
        return self.conductor == self.q

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(
            self.group,
            tuple((-c) % comp.order for c, comp in zip(self.exps, self.group.components)),
        )

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        return multiply(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.q == other.q
            and self.exps == other.exps
        )

    def __hash__(self):
        return hash((self.q, self.exps))

    def __repr__(self):
        return f"DirichletCharacter(q={self.q}, exps={self.exps})"

    def to_record(self) -> dict:
        """Serializable form: modulus, conductor, and the k/m value list."""
        vals = []
        for n in range(self.q):
            v = self.value(n)
            vals.append("0" if v is None else f"{v.numerator}/{v.denominator}")
        return {"q": self.q, "conductor": self.conductor, "values": vals}


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, lexicographic in exponent vectors."""
    group = UnitGroup.get(q)
    orders = [c.order for c in group.components]
    return [
        DirichletCharacter(group, exps)
        for exps in itertools.product(*(range(s) for s in orders))
    ]


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def principal_character(q: int) -> DirichletCharacter:
    group = UnitGroup.get(q)
    return DirichletCharacter(group, tuple(0 for _ in group.components))


def trivial_character() -> DirichletCharacter:
    """The character of modulus 1 (identically 1)."""
    return principal_character(1)


def induce(psi: DirichletCharacter, q: int) -> DirichletCharacter:
    """The character mod q equal to psi on units of q, zero elsewhere."""
    r = psi.conductor
    if q % r:
        raise DomainError(f"conductor {r} does not divide target modulus {q}")
    psi0 = psi if psi.primitive else decompose(psi)
    group = UnitGroup.get(q)
    exps = []
    for comp in group.components:
        val = psi0.value(comp.gen_q)
        c = val * comp.order
        if c.denominator != 1:  # value order must divide the generator order
            raise ArithmeticError("inconsistent induction exponent")
        exps.append(int(c) % comp.order)
    return DirichletCharacter(group, tuple(exps))


def decompose(chi: DirichletCharacter) -> DirichletCharacter:
    """The unique primitive character inducing chi."""
    r = chi.conductor
    if r == chi.q:
        return chi
    group_r = UnitGroup.get(r)
    exps = []
    for comp in group_r.components:
        t = comp.gen_q
        while math.gcd(t, chi.q) != 1:
            t += r
            if t > chi.q + r:
                raise ArithmeticError("no coprime lift found")  # unreachable
        val = chi.value(t)
        c = val * comp.order
        if c.denominator != 1:
            raise ArithmeticError("inconsistent decomposition exponent")
        exps.append(int(c) % comp.order)
    return DirichletCharacter(group_r, tuple(exps))


def multiply(chi1: DirichletCharacter, chi2: DirichletCharacter) -> DirichletCharacter:
    """Pointwise product chi1*chi2 as a character mod lcm(q1, q2)."""
    L = math.lcm(chi1.q, chi2.q)
    a = induce(chi1, L)
    b = induce(chi2, L)
    group = a.group
    exps = tuple(
        (c1 + c2) % comp.order
        for c1, c2, comp in zip(a.exps, b.exps, group.components)
    )
    return DirichletCharacter(group, exps)


@dataclass
class CharacterFamily:
    """All primitive characters of conductor <= D, the trivial one included."""

    D: int
    members: list[DirichletCharacter] = field(default_factory=list)

    def up_to(self, bound: int) -> list[DirichletCharacter]:
        return [chi for chi in self.members if chi.q <= bound]


def family_A(D: int) -> CharacterFamily:
    """Primitive characters of conductor <= D, ordered by conductor then rank."""
    if D < 1:
        raise DomainError(f"need D >= 1, got {D}")
    members = []
    for r in range(1, D + 1):
        if r % 4 == 2:
            continue  # no primitive characters for moduli = 2 mod 4
        for chi in enumerate_characters(r):
            if chi.primitive:
                members.append(chi)
    return CharacterFamily(D, members)


def exact_root_counts_sum(counts, M: int) -> int:
    """Exact integer value of sum_k counts[k] * e^{2 pi i k/M}, group-shaped input.

    The multiset must be uniform over the cyclic subgroup it spans (the
    shape produced by summing a character over a group, or a group of
    characters at a point): either all mass sits at 1, or every element of
    some mu_m (m > 1) appears equally often, making the sum exactly 0.
    Anything else raises RootSumStructureError rather than guessing.
    """
    counts = {k % M: c for k, c in dict(counts).items() if c}
    support = sorted(counts)
    if not support:
        return 0
    if support == [0]:
        return counts[0]
    g = math.gcd(M, *support)
    m = M // g
    if len(counts) != m or set(support) != {j * g for j in range(m)}:
        raise RootSumStructureError("support is not a full cyclic subgroup")
    if len(set(counts.values())) != 1:
        raise RootSumStructureError("non-uniform multiplicities over the subgroup")
    return 0  # c * (full sum over mu_m) with m > 1


def exact_unit_sum(values) -> int:
    """exact_root_counts_sum for values given as k/m fractions."""
    fracs = [Fraction(v) if not isinstance(v, Fraction) else v for v in values]
    if not fracs:
        return 0
    M = math.lcm(*(f.denominator for f in fracs))
    return exact_root_counts_sum(Counter(int(f * M) % M for f in fracs), M)
