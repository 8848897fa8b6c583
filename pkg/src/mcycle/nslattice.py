"""Neron-Severi lattice of a product abelian surface E1 x E2: classes are
triples (a, b, phi) with a, b the fibre coefficients and phi in the Hom
module, represented as u + v*sqrt(D). The intersection pairing, Humbert norm,
CM cycles and the factor-swap involution live here.

A rank marker distinguishes the three shapes of Hom(E1, E2): 0 (generic,
phi = 0), 1 (isogenous non-CM: phi a multiple of a fixed isogeny of degree
-D, stored as v*sqrt(D) with D = -deg), 2 (CM order of discriminant D).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf, workdps

from .arith import BigReal, rat_from_str, rat_to_str
from .errors import IncompatibleModules


@dataclass(frozen=True)
class EndElt:
    """u + v*sqrt(disc); disc < 0 here (imaginary quadratic or isogeny shim)."""

    u: Fraction
    v: Fraction
    disc: int
    rank: int = 2

    def __init__(self, u, v, disc: int, rank: int = 2):
        u, v = Fraction(u), Fraction(v)
        if disc >= 0 and not (u == 0 and v == 0):
            raise ValueError("disc must be negative for nonzero elements")
        if rank not in (0, 1, 2):
            raise ValueError("rank marker must be 0, 1 or 2")
        if rank == 0 and not (u == 0 and v == 0):
            raise IncompatibleModules("rank-0 Hom module admits only phi = 0")
        if rank == 1 and u != 0:
            raise IncompatibleModules("rank-1 Hom module is Z*h: no rational part")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "disc", disc)
        object.__setattr__(self, "rank", rank)

    @staticmethod
    def zero(disc: int = -4, rank: int = 2) -> "EndElt":
        return EndElt(0, 0, disc, rank)

    @staticmethod
    def isogeny(degree: int, multiple=1) -> "EndElt":
        """multiple * h with deg h = degree, in the rank-1 module."""
        if degree < 1:
            raise ValueError("isogeny degree must be >= 1")
        return EndElt(0, Fraction(multiple), -degree, rank=1)

    @staticmethod
    def sqrt_disc(disc: int) -> "EndElt":
        """sqrt(D) in the CM order of discriminant D < 0."""
        if disc >= 0:
            raise ValueError("disc must be negative")
        return EndElt(0, 1, disc, rank=2)

    @property
    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def is_integral(self) -> bool:
        """Membership in the order: maximal order for D = 1 (mod 4), Z[sqrt D]
        otherwise (half-integral u, v with u = v (mod Z) in the first case)."""
        if self.is_zero:
            return True
        if self.disc % 4 == 1:
            u2, v2 = 2 * self.u, 2 * self.v
            return u2.denominator == 1 and v2.denominator == 1 and (u2 - v2) % 2 == 0
        return self.u.denominator == 1 and self.v.denominator == 1

    def conjugate(self) -> "EndElt":
        return EndElt(self.u, -self.v, self.disc, self.rank)

    def degree(self) -> Fraction:
        """deg(phi) = N(phi) = u^2 - v^2 * D >= 0 (deg 0 = 0 by convention)."""
        return self.u * self.u - self.v * self.v * self.disc

    def trace_with(self, other: "EndElt") -> Fraction:
        """Tr(self * conj(other)) = 2*(u1*u2 - v1*v2*D)."""
        _require_compatible(self, other)
        return 2 * (self.u * other.u - self.v * other.v * self.disc)

    def __add__(self, other: "EndElt") -> "EndElt":
        _require_compatible(self, other)
        d, r = _merge_module(self, other)
        return EndElt(self.u + other.u, self.v + other.v, d, r)

    def __sub__(self, other: "EndElt") -> "EndElt":
        return self + (-other)

    def __neg__(self) -> "EndElt":
        return EndElt(-self.u, -self.v, self.disc, self.rank)

    def __rmul__(self, n) -> "EndElt":
        return EndElt(self.u * Fraction(n), self.v * Fraction(n), self.disc, self.rank)

    def to_json(self) -> dict:
        return {"u": rat_to_str(self.u), "v": rat_to_str(self.v), "disc": self.disc}

    @staticmethod
    def from_json(d: dict, rank: int = 2) -> "EndElt":
        return EndElt(rat_from_str(str(d["u"])), rat_from_str(str(d["v"])), int(d["disc"]), rank)


def _require_compatible(x: EndElt, y: EndElt):
    if x.is_zero or y.is_zero:
        return
    if x.disc != y.disc or x.rank != y.rank:
        raise IncompatibleModules(
            f"modules differ: disc {x.disc}/{y.disc}, rank {x.rank}/{y.rank}"
        )


def _merge_module(x: EndElt, y: EndElt) -> tuple[int, int]:
    if x.is_zero:
        return (y.disc, y.rank)
    return (x.disc, x.rank)


@dataclass(frozen=True)
class NSClass:
    """a*(E1 x 0) + b*(0 x E2) + (graph part phi); Gamma_phi = (1, deg phi, phi)."""

    a: Fraction
    b: Fraction
    phi: EndElt

    def __init__(self, a, b, phi: EndElt):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "phi", phi)

    def __add__(self, other: "NSClass") -> "NSClass":
        return NSClass(self.a + other.a, self.b + other.b, self.phi + other.phi)

    def __sub__(self, other: "NSClass") -> "NSClass":
        return NSClass(self.a - other.a, self.b - other.b, self.phi - other.phi)

    def __neg__(self) -> "NSClass":
        return NSClass(-self.a, -self.b, -self.phi)

    def __rmul__(self, n) -> "NSClass":
        return NSClass(self.a * Fraction(n), self.b * Fraction(n), Fraction(n) * self.phi)

    def to_json(self) -> dict:
        return {"a": rat_to_str(self.a), "b": rat_to_str(self.b), "phi": self.phi.to_json()}

    @staticmethod
    def from_json(d: dict, rank: int = 2) -> "NSClass":
        return NSClass(
            rat_from_str(str(d["a"])), rat_from_str(str(d["b"])),
            EndElt.from_json(d["phi"], rank),
        )


def fibre1(disc: int = -4, rank: int = 2) -> NSClass:
    return NSClass(1, 0, EndElt.zero(disc, rank))


def fibre2(disc: int = -4, rank: int = 2) -> NSClass:
    return NSClass(0, 1, EndElt.zero(disc, rank))


def theta(disc: int = -4, rank: int = 2) -> NSClass:
    """The product principal polarization (1, 1, 0)."""
    return NSClass(1, 1, EndElt.zero(disc, rank))


def graph(phi: EndElt) -> NSClass:
    """Gamma_phi = (1, deg phi, phi)."""
    return NSClass(1, phi.degree(), phi)


def ns_pair(d1: NSClass, d2: NSClass) -> Fraction:
    """<(a1,b1,phi1),(a2,b2,phi2)> = a1 b2 + a2 b1 - Tr(phi1 conj(phi2)).

    Reproduces (Gamma_phi, f1) = deg phi, (Gamma_phi, f2) = 1 and
    (Gamma_phi, Gamma_psi) = deg(phi - psi)."""
    return d1.a * d2.b + d2.a * d1.b - d1.phi.trace_with(d2.phi)


def humbert_norm(d: NSClass) -> Fraction:
    """H(D) = (D . Theta)^2 - 2 D^2."""
    th = theta(d.phi.disc, d.phi.rank)
    s = ns_pair(d, th)
    return s * s - 2 * ns_pair(d, d)


def sigma_star(d: NSClass) -> NSClass:
    """Pullback of the factor swap: (a, b, phi) -> (b, a, conj phi)."""
    return NSClass(d.b, d.a, d.phi.conjugate())


def cm_z(disc: int) -> NSClass:
    """Z = Gamma_sqrt(D) - (E1 x 0) + D*(0 x E2) = (0, 0, sqrt D)."""
    if disc >= 0:
        raise ValueError("disc must be a negative discriminant")
    sq = EndElt.sqrt_disc(disc)
    return graph(sq) - fibre1(disc) + disc * fibre2(disc)


def cm_cycle(disc: int, dps: int = 50) -> tuple[NSClass, BigReal]:
    """(Z - sigma* Z, c) with c = 1/sqrt(-(Z - sigma*Z)^2), so the scaled
    class has self-pairing -1; the self-pairing of Z - sigma*Z is -8|D|."""
    z = cm_z(disc)
    s = z - sigma_star(z)
    sp = ns_pair(s, s)
    if sp >= 0:
        raise ValueError("anti-invariant part has non-negative self-pairing")
    with workdps(dps):
        val = 1 / mp.sqrt(mpf(-sp.numerator) / sp.denominator)
    c = BigReal(val, abs(val) * mpf(10) ** (1 - dps) * 2, dps)
    return s, c


def gram_matrix(classes: list[NSClass]) -> list[list[Fraction]]:
    return [[ns_pair(x, y) for y in classes] for x in classes]


def gram_signature(classes: list[NSClass]) -> tuple[int, int, int]:
    """(positive, negative, zero) eigenvalue counts, computed numerically."""
    import numpy as np

    g = np.array([[float(v) for v in row] for row in gram_matrix(classes)])
    eig = np.linalg.eigvalsh(g)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(eig))))
    pos = int(np.sum(eig > tol))
    neg = int(np.sum(eig < -tol))
    return pos, neg, len(eig) - pos - neg
