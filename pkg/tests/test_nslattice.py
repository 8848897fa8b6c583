import random
from fractions import Fraction as F

import pytest
from mpmath import mpf, workdps

from mcycle.errors import IncompatibleModules
from mcycle.nslattice import (
    EndElt,
    NSClass,
    cm_cycle,
    cm_z,
    fibre1,
    fibre2,
    gram_signature,
    graph,
    humbert_norm,
    ns_pair,
    sigma_star,
    theta,
)

DISCS = (-3, -4, -7, -8, -11)


class TestEndElt:
    def test_degree_nonnegative(self):
        e = EndElt(2, 3, -7)
        assert e.degree() == 4 + 9 * 7

    def test_conjugate_involution(self):
        e = EndElt(F(1, 2), F(3, 2), -7)
        assert e.conjugate().conjugate() == e

    def test_integrality_convention(self):
        # D = 1 (mod 4): half-integers with matching parity are integral
        assert EndElt(F(1, 2), F(1, 2), -7).is_integral()
        assert not EndElt(F(1, 2), 1, -7).is_integral()
        assert EndElt(1, 2, -7).is_integral()
        # D = 0 (mod 4): integers only
        assert EndElt(1, 1, -4).is_integral()
        assert not EndElt(F(1, 2), F(1, 2), -4).is_integral()

    def test_rank_constraints(self):
        with pytest.raises(IncompatibleModules):
            EndElt(1, 0, -4, rank=0)
        with pytest.raises(IncompatibleModules):
            EndElt(1, 1, -4, rank=1)
        assert EndElt.isogeny(3).degree() == 3

    def test_deg_difference_identity(self):
        rng = random.Random(9)
        for _ in range(100):
            d = rng.choice(DISCS)
            phi = EndElt(rng.randint(-9, 9), rng.randint(-9, 9), d)
            psi = EndElt(rng.randint(-9, 9), rng.randint(-9, 9), d)
            lhs = (phi - psi).degree()
            rhs = phi.degree() + psi.degree() - phi.trace_with(psi)
            assert lhs == rhs


class TestPairing:
    def test_fibres(self):
        assert ns_pair(fibre1(), fibre2()) == 1
        assert ns_pair(fibre1(), fibre1()) == 0
        assert ns_pair(fibre2(), fibre2()) == 0

    def test_theta_squared(self):
        assert ns_pair(theta(), theta()) == 2

    def test_graph_pairings(self):
        for n in range(2, 11):
            h = EndElt.isogeny(n - 1)
            gh = graph(h)
            assert ns_pair(gh, fibre1(h.disc, 1)) == n - 1  # deg phi
            assert ns_pair(gh, fibre2(h.disc, 1)) == 1
            assert ns_pair(gh, theta(h.disc, 1)) == n
            assert ns_pair(gh, gh) == 0

    def test_graph_graph_is_degree_of_difference(self):
        rng = random.Random(10)
        for _ in range(50):
            d = rng.choice(DISCS)
            phi = EndElt(rng.randint(-6, 6), rng.randint(-6, 6), d)
            psi = EndElt(rng.randint(-6, 6), rng.randint(-6, 6), d)
            assert ns_pair(graph(phi), graph(psi)) == (phi - psi).degree()

    def test_incompatible_modules(self):
        x = NSClass(1, 1, EndElt(1, 1, -4))
        y = NSClass(1, 1, EndElt(1, 1, -8))
        with pytest.raises(IncompatibleModules):
            ns_pair(x, y)

    def test_zero_phi_is_universally_compatible(self):
        x = NSClass(1, 1, EndElt.zero(-4))
        y = NSClass(2, 3, EndElt(1, 1, -8))
        assert ns_pair(x, y) == 2 + 3


class TestHumbertNorm:
    def test_isogeny_graphs(self):
        for n in range(2, 11):
            gh = graph(EndElt.isogeny(n - 1))
            assert humbert_norm(gh) == n * n

    def test_fibre_and_theta(self):
        assert humbert_norm(fibre1()) == 1
        assert humbert_norm(theta()) == 0

    def test_invariant_under_sigma(self):
        rng = random.Random(13)
        for _ in range(50):
            d = rng.choice(DISCS)
            x = NSClass(rng.randint(-5, 5), rng.randint(-5, 5),
                        EndElt(rng.randint(-5, 5), rng.randint(-5, 5), d))
            assert humbert_norm(sigma_star(x)) == humbert_norm(x)

    def test_positive_on_theta_complement(self):
        rng = random.Random(14)
        count = 0
        while count < 100:
            d = rng.choice(DISCS)
            x = NSClass(F(rng.randint(-8, 8)), F(rng.randint(-8, 8)),
                        EndElt(rng.randint(-8, 8), rng.randint(-8, 8), d))
            th = theta(d)
            # project onto the orthogonal complement of Theta (Theta^2 = 2)
            coeff = F(ns_pair(x, th), 2)
            y = x - coeff * th
            if y.a == 0 and y.b == 0 and y.phi.is_zero:
                continue
            assert ns_pair(y, th) == 0
            assert humbert_norm(y) > 0
            count += 1


class TestCMCycles:
    def test_cm_z_is_pure_graph_part(self):
        for d in DISCS:
            z = cm_z(d)
            assert z.a == 0 and z.b == 0
            assert z.phi == EndElt.sqrt_disc(d)

    def test_orthogonality(self):
        for d in DISCS:
            z = cm_z(d)
            gamma1 = graph(EndElt(1, 0, d))
            for other in (fibre1(d), fibre2(d), gamma1, theta(d)):
                assert ns_pair(z, other) == 0

    def test_anti_invariant_self_pairing(self):
        for d in DISCS:
            z = cm_z(d)
            s = z - sigma_star(z)
            assert ns_pair(s, s) == -8 * abs(d)

    def test_equals_graph_difference(self):
        for d in DISCS:
            z = cm_z(d)
            s = z - sigma_star(z)
            assert s == graph(EndElt.sqrt_disc(d)) - graph(EndElt(0, -1, d))

    def test_sigma_anti_invariance(self):
        for d in DISCS:
            s = cm_z(d) - sigma_star(cm_z(d))
            assert sigma_star(s) == -s

    def test_normalization(self):
        for d in DISCS:
            s, c = cm_cycle(d)
            with workdps(50):
                scaled = (c * c).val * float(ns_pair(s, s))
                assert abs(scaled + 1) < 1e-40

    def test_cm_cycle_d4_value(self):
        s, c = cm_cycle(-4)
        assert ns_pair(s, s) == -32
        with workdps(50):
            assert abs(c.val - 1 / mpf(32) ** mpf("0.5")) < mpf(10) ** -45


class TestSigmaStar:
    def test_swaps_fibres(self):
        assert sigma_star(fibre1()) == fibre2()
        assert sigma_star(fibre2()) == fibre1()

    def test_involution(self):
        rng = random.Random(15)
        for _ in range(30):
            d = rng.choice(DISCS)
            x = NSClass(rng.randint(-5, 5), rng.randint(-5, 5),
                        EndElt(rng.randint(-5, 5), rng.randint(-5, 5), d))
            assert sigma_star(sigma_star(x)) == x

    def test_isometry(self):
        rng = random.Random(16)
        for _ in range(50):
            d = rng.choice(DISCS)
            x = NSClass(rng.randint(-5, 5), rng.randint(-5, 5),
                        EndElt(rng.randint(-5, 5), rng.randint(-5, 5), d))
            y = NSClass(rng.randint(-5, 5), rng.randint(-5, 5),
                        EndElt(rng.randint(-5, 5), rng.randint(-5, 5), d))
            assert ns_pair(sigma_star(x), sigma_star(y)) == ns_pair(x, y)


def test_signature_1_3():
    for d in DISCS:
        basis = [fibre1(d), fibre2(d), graph(EndElt(1, 0, d)),
                 graph(EndElt.sqrt_disc(d))]
        assert gram_signature(basis) == (1, 3, 0)


def test_json_round_trip():
    x = NSClass(F(1, 2), 3, EndElt(F(1, 2), F(3, 2), -7))
    assert NSClass.from_json(x.to_json()) == x
