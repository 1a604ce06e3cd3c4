import random

from django.test import SimpleTestCase
from sympy import QQ

from multivectors.models import Polyvector
from polynomials.exceptions import (
    DegreeError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    OrderError,
)
from polynomials.linear import LinearSystem, solve_linear
from polynomials.models import TruncatedSeries
from polynomials.services import (
    count_exponent_vectors,
    derivative,
    evaluate_at,
    exponent_vectors,
    poisson_bracket,
    poly_mul,
    poly_partial,
    polynomial_ring,
    series_combine,
    total_degree,
)


def random_polynomial(rng, ring, degree=3, terms=4):
    monomials = exponent_vectors(ring.ngens, degree)
    return ring.from_dict({
        rng.choice(monomials): QQ(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(terms)
    })


class PolynomialArithmeticTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens

    def test_default_coordinate_names(self):
        ring = polynomial_ring(3)
        self.assertEqual([str(g) for g in ring.gens], ['x0', 'x1', 'x2'])

    def test_products(self):
        x, p = self.x, self.p
        self.assertEqual(poly_mul(x + p, x - p), x**2 - p**2)
        self.assertEqual(poly_mul(p, self.ring.one), p)
        self.assertEqual(poly_mul(x**2, x**3), x**5)

    def test_product_rejects_other_dimension(self):
        other = polynomial_ring(['x', 'p', 'q'])
        with self.assertRaises(DimensionMismatchError):
            poly_mul(self.x, other.gens[0])

    def test_partials(self):
        x, p = self.x, self.p
        self.assertEqual(poly_partial(x**2 * p**3, 1), 3 * x**2 * p**2)
        self.assertEqual(poly_partial(self.ring(7), 0), self.ring.zero)
        self.assertEqual(poly_partial(x * p, 0), p)
        with self.assertRaises(IndexOutOfRangeError):
            poly_partial(x, 2)

    def test_multi_index_derivative(self):
        x, p = self.x, self.p
        self.assertEqual(derivative(x**3 * p**2, (2, 1)), 12 * x * p)
        self.assertEqual(derivative(x, (0, 0)), x)

    def test_degree_and_evaluation(self):
        x, p = self.x, self.p
        self.assertEqual(total_degree(x**2 * p + p), 3)
        self.assertEqual(total_degree(self.ring.zero), -1)
        self.assertEqual(evaluate_at(x * p + 1, (QQ(1, 2), 4)), QQ(3))

    def test_ring_axioms_on_random_polynomials(self):
        rng = random.Random(7)
        for _ in range(20):
            f, g, h = (random_polynomial(rng, self.ring) for _ in range(3))
            self.assertEqual((f * g) * h, f * (g * h))
            self.assertEqual(f * (g + h), f * g + f * h)


class ExponentVectorTests(SimpleTestCase):
    def test_order_is_degree_then_descending(self):
        self.assertEqual(
            exponent_vectors(2, 2),
            [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)],
        )

    def test_count_matches_enumeration(self):
        for ngens, degree in ((1, 4), (3, 2), (4, 3)):
            self.assertEqual(len(exponent_vectors(ngens, degree)), count_exponent_vectors(ngens, degree))


class PoissonBracketTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens
        self.pi = Polyvector.basis(self.ring, (0, 1))

    def test_canonical_examples(self):
        x, p = self.x, self.p
        H = (x**2 + p**2) * QQ(1, 2)
        self.assertEqual(poisson_bracket(self.pi, x, p), self.ring.one)
        self.assertEqual(poisson_bracket(self.pi, H, x), -p)
        self.assertEqual(poisson_bracket(self.pi, x**2 * p, p**2), 4 * x * p**2)

    def test_antisymmetry_and_leibniz(self):
        rng = random.Random(11)
        for _ in range(15):
            f, g, h = (random_polynomial(rng, self.ring) for _ in range(3))
            self.assertFalse(poisson_bracket(self.pi, f, g) + poisson_bracket(self.pi, g, f))
            self.assertEqual(
                poisson_bracket(self.pi, f, g * h),
                poisson_bracket(self.pi, f, g) * h + g * poisson_bracket(self.pi, f, h),
            )

    def test_needs_a_bivector(self):
        with self.assertRaises(DegreeError):
            poisson_bracket(Polyvector.vector_field(self.ring, [1, 0]), self.x, self.p)


class TruncatedSeriesTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['a', 'b'])
        self.a, self.b = self.ring.gens
        self.one = self.ring.one

    def test_product_is_truncated(self):
        u = TruncatedSeries(1, (self.one, self.a))
        v = TruncatedSeries(1, (self.one, self.b))
        self.assertEqual(series_combine(u, v, poly_mul).coefficients, (self.one, self.a + self.b))

    def test_full_product_at_order_two(self):
        zero = self.ring.zero
        u = TruncatedSeries(2, (self.one, self.a, zero))
        v = TruncatedSeries(2, (self.one, self.b, zero))
        self.assertEqual(
            series_combine(u, v, poly_mul).coefficients,
            (self.one, self.a + self.b, self.a * self.b),
        )

    def test_product_with_zero(self):
        zero = self.ring.zero
        u = TruncatedSeries(1, (self.one, self.a))
        self.assertTrue(series_combine(u, TruncatedSeries(1, (zero, zero)), poly_mul).is_zero())

    def test_order_mismatch(self):
        with self.assertRaises(OrderError):
            series_combine(
                TruncatedSeries(1, (self.one, self.a)),
                TruncatedSeries(0, (self.one,)),
                poly_mul,
            )


class LinearSystemTests(SimpleTestCase):
    def test_consistent_system_with_freedom(self):
        # u0 + u1 = 2, u1 - u2 = 1
        system = LinearSystem(3)
        system.add('r0', 0, 1)
        system.add('r0', 1, 1)
        system.add_rhs('r0', 2)
        system.add('r1', 1, 1)
        system.add('r1', 2, -1)
        system.add_rhs('r1', 1)
        solution = system.solve()
        self.assertTrue(solution.consistent)
        self.assertEqual(solution.rank, 2)
        self.assertEqual(len(solution.nullspace), 1)
        u = [solution.particular.get(j, QQ(0)) for j in range(3)]
        self.assertEqual(u[0] + u[1], 2)
        self.assertEqual(u[1] - u[2], 1)
        kernel = solution.nullspace[0]
        k = [kernel.get(j, QQ(0)) for j in range(3)]
        self.assertEqual(k[0] + k[1], 0)
        self.assertEqual(k[1] - k[2], 0)

    def test_inconsistent_system(self):
        system = LinearSystem(1)
        system.add('r0', 0, 2)
        system.add_rhs('r0', 1)
        system.add('r1', 0, 4)
        system.add_rhs('r1', 3)
        solution = system.solve()
        self.assertFalse(solution.consistent)
        self.assertEqual(solution.rank, 1)
        self.assertEqual(solution.augmented_rank, 2)

    def test_zero_matrix_with_nonzero_rhs(self):
        solution = solve_linear({0: {2: QQ(1)}}, 1, 2)
        self.assertFalse(solution.consistent)
        self.assertTrue(solution.matrix_is_zero)

    def test_empty_system(self):
        solution = solve_linear({}, 0, 2)
        self.assertTrue(solution.consistent)
        self.assertEqual(len(solution.nullspace), 2)
