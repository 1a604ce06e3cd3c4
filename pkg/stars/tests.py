from django.test import SimpleTestCase
from sympy import QQ

from cochains.models import PolyDiffOp
from cochains.services import apply, hochschild_d
from multivectors.models import Polyvector
from obstructions.models import Bounds, IntegrableSystem
from polynomials.exceptions import NotPoissonError, OrderError, PreconditionError
from polynomials.models import TruncatedSeries
from polynomials.services import poisson_bracket, polynomial_ring
from stars.models import FormalDiffeo, StarProduct
from stars.services import (
    ExtensionResult,
    apply_diffeo,
    assoc_residual,
    certify,
    check_extension,
    compose_diffeos,
    extend_one_order,
    gauge_transform,
    invert_diffeo,
    moyal,
    morphism_defect,
    residual_witness,
    star_commutator,
    star_eval,
    star_series,
)


def canonical_r2():
    ring = polynomial_ring(['x', 'p'])
    return ring, Polyvector.basis(ring, (0, 1))


def canonical_r4():
    ring = polynomial_ring(['x1', 'x2', 'p1', 'p2'])
    return ring, Polyvector.build(ring, 2, [((0, 2), 1), ((1, 3), 1)])


def second_derivative_star(order=2):
    ring = polynomial_ring(['x'])
    B_1 = PolyDiffOp.build(ring, 2, [(((1,), (1,)), 1)])
    terms = (B_1,) + tuple(PolyDiffOp.zero(ring, 2) for _ in range(order - 1))
    return ring, certify(StarProduct(ring, order, terms))


class MoyalTests(SimpleTestCase):
    def test_associative_to_order_four_in_dimension_two(self):
        ring, pi = canonical_r2()
        s = moyal(pi, 4)
        for n in range(1, 5):
            self.assertFalse(assoc_residual(s, n), f'order {n}')
        self.assertEqual(certify(s).certified_order, 4)

    def test_associative_to_order_four_in_dimension_four(self):
        ring, pi = canonical_r4()
        s = moyal(pi, 4)
        for n in range(1, 5):
            self.assertFalse(assoc_residual(s, n), f'order {n}')

    def test_position_times_momentum(self):
        ring, pi = canonical_r2()
        x, p = ring.gens
        series = star_eval(moyal(pi, 2), x, p)
        self.assertEqual(series.coefficients, (x * p, ring(QQ(1, 2)), ring.zero))

    def test_harmonic_oscillator_square(self):
        ring, pi = canonical_r2()
        x, p = ring.gens
        H = (x**2 + p**2) * QQ(1, 2)
        series = star_eval(moyal(pi, 2), H, H)
        self.assertEqual(series.coefficients, (H**2, ring.zero, ring(QQ(1, 4))))

    def test_unit(self):
        ring, pi = canonical_r2()
        x, p = ring.gens
        f = x**3 * p + p**2
        s = moyal(pi, 3)
        self.assertEqual(star_eval(s, f, ring.one).coefficients, (f,) + (ring.zero,) * 3)
        self.assertEqual(star_eval(s, ring.one, f).coefficients, (f,) + (ring.zero,) * 3)

    def test_momenta_in_dimension_four_commute_exactly(self):
        ring, pi = canonical_r4()
        p1, p2 = ring.gens[2], ring.gens[3]
        series = star_eval(moyal(pi, 3), p1**2, p2**3)
        self.assertEqual(series.coefficients, (p1**2 * p2**3,) + (ring.zero,) * 3)

    def test_commutator_starts_with_poisson_bracket(self):
        ring, pi = canonical_r4()
        x1, x2, p1, p2 = ring.gens
        s = moyal(pi, 2)
        for a, b in ((x1, p1), (x1**2 * p2, p1 * x2), (p1**2, x1**3)):
            series = star_commutator(s, a, b)
            self.assertFalse(series[0])
            self.assertEqual(series[1], poisson_bracket(pi, a, b))

    def test_rejects_non_constant_bivector(self):
        ring = polynomial_ring(['x', 'y', 'z'])
        x, y, z = ring.gens
        pi = Polyvector.build(ring, 2, [((0, 1), z), ((1, 2), x), ((0, 2), -y)])
        with self.assertRaises(NotPoissonError):
            moyal(pi, 2)

    def test_cocycle_equations(self):
        ring, pi = canonical_r2()
        s = moyal(pi, 3)
        self.assertFalse(hochschild_d(s.term(1)))
        self.assertTrue(check_extension(s, 1, s.term(2)))
        self.assertTrue(check_extension(s, 2, s.term(3)))
        self.assertFalse(check_extension(s, 1, s.term(2).scale(2)))


class ResidualTests(SimpleTestCase):
    def test_second_derivative_star_fails_at_order_two(self):
        ring, s = second_derivative_star()
        x = ring.gens[0]
        self.assertEqual(s.certified_order, 1)
        self.assertFalse(assoc_residual(s, 1))
        self.assertEqual(apply(assoc_residual(s, 2), (x, x**2, x**3)), -12 * x**2)

    def test_witness(self):
        ring, s = second_derivative_star()
        triple, value = residual_witness(s, 2)
        self.assertTrue(value)
        self.assertEqual(apply(assoc_residual(s, 2), triple), value)
        self.assertIsNone(residual_witness(s, 1))

    def test_order_out_of_range(self):
        ring, s = second_derivative_star()
        with self.assertRaises(OrderError):
            assoc_residual(s, 3)

    def test_series_product_matches_star_eval(self):
        ring, pi = canonical_r2()
        x, p = ring.gens
        s = moyal(pi, 2)
        zero = ring.zero
        u = TruncatedSeries(2, (x**2, zero, zero))
        v = TruncatedSeries(2, (p, zero, zero))
        self.assertEqual(star_series(s, u, v), star_eval(s, x**2, p))


class FormalDiffeoTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x'])
        self.x = self.ring.gens[0]
        self.dx = PolyDiffOp.partial(self.ring, (1,))

    def test_inverse_of_a_translation(self):
        D = FormalDiffeo.from_terms(self.ring, 2, {1: self.dx})
        inverse = invert_diffeo(D)
        self.assertEqual(inverse.terms, (-self.dx, PolyDiffOp.partial(self.ring, (2,))))
        self.assertTrue(compose_diffeos(D, inverse).is_identity())
        self.assertTrue(compose_diffeos(inverse, D).is_identity())

    def test_inverse_with_variable_coefficients(self):
        ring, _ = canonical_r2()
        x, p = ring.gens
        D = FormalDiffeo.from_terms(ring, 3, {
            1: PolyDiffOp.partial(ring, (0, 1), x),
            2: PolyDiffOp.partial(ring, (2, 0), p),
        })
        self.assertTrue(compose_diffeos(D, invert_diffeo(D)).is_identity())

    def test_apply(self):
        D = FormalDiffeo.from_terms(self.ring, 1, {1: self.dx})
        self.assertEqual(apply_diffeo(D, self.x**2).coefficients, (self.x**2, 2 * self.x))

    def test_order_mismatch(self):
        with self.assertRaises(OrderError):
            compose_diffeos(FormalDiffeo.identity(self.ring, 1), FormalDiffeo.identity(self.ring, 2))


class GaugeTransformTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x'])
        self.second = PolyDiffOp.build(self.ring, 2, [(((1,), (1,)), 1)])

    def test_half_laplacian_gauges_in_a_first_order_term(self):
        D = FormalDiffeo.from_terms(self.ring, 1, {1: PolyDiffOp.partial(self.ring, (2,), QQ(1, 2))})
        transformed = gauge_transform(StarProduct.trivial(self.ring, 1), D)
        self.assertEqual(transformed.term(1), -self.second)

    def test_translation_gauges_in_a_second_order_term(self):
        D = FormalDiffeo.from_terms(self.ring, 2, {1: PolyDiffOp.partial(self.ring, (1,))})
        transformed = gauge_transform(StarProduct.trivial(self.ring, 2), D)
        self.assertFalse(transformed.term(1))
        self.assertEqual(transformed.term(2), self.second)

    def test_roundtrip_and_associativity(self):
        ring, pi = canonical_r2()
        x, p = ring.gens
        s = moyal(pi, 2)
        D = FormalDiffeo.from_terms(ring, 2, {
            1: PolyDiffOp.partial(ring, (0, 1), x),
            2: PolyDiffOp.partial(ring, (2, 0)),
        })
        transformed = gauge_transform(s, D)
        self.assertEqual(certify(transformed).certified_order, 2)
        back = gauge_transform(transformed, invert_diffeo(D))
        self.assertEqual(back.terms, s.terms)

    def test_identity_is_a_morphism_on_momenta(self):
        ring, pi = canonical_r2()
        system = IntegrableSystem(ring, pi, (ring.gens[1],))
        s = moyal(pi, 2)
        self.assertIsNone(morphism_defect(s, FormalDiffeo.identity(ring, 2), system))

    def test_morphism_defect_on_positions(self):
        ring, pi = canonical_r2()
        x, p = ring.gens
        system = IntegrableSystem(ring, pi, (x, p))
        order, _, value = morphism_defect(moyal(pi, 1), FormalDiffeo.identity(ring, 1), system)
        self.assertEqual(order, 1)
        self.assertTrue(value)


class ExtensionTests(SimpleTestCase):
    def test_trivial_star_extends_with_cocycle_freedom(self):
        ring = polynomial_ring(['x'])
        result = extend_one_order(StarProduct.trivial(ring, 1), 1, Bounds(1, 2))
        self.assertEqual(result.status, ExtensionResult.SOLVED)
        self.assertEqual(result.order, 2)
        self.assertFalse(hochschild_d(result.particular))
        self.assertTrue(result.freedom)
        for op in result.freedom:
            self.assertFalse(hochschild_d(op))

    def test_moyal_second_order_is_found(self):
        ring, pi = canonical_r2()
        s = moyal(pi, 1)
        result = extend_one_order(s, 1, Bounds(0, 2))
        self.assertEqual(result.status, ExtensionResult.SOLVED)
        self.assertTrue(check_extension(s, 1, result.particular))
        self.assertTrue(check_extension(s, 1, moyal(pi, 2).term(2)))

    def test_needs_certified_associativity(self):
        ring, s = second_derivative_star()
        with self.assertRaises(PreconditionError):
            extend_one_order(s, 2, Bounds(2, 2))
