import random
from itertools import combinations

from django.test import SimpleTestCase
from sympy import QQ

from cochains.services import apply
from multivectors.models import Polyvector, RelativeClass
from multivectors.services import (
    d_hor,
    d_pi,
    hamiltonian_vector_field,
    hkr_to_cochain,
    jacobi_check,
    relative_wedge,
    schouten_bracket,
    vector_field_action,
    wedge,
)
from obstructions.models import IntegrableSystem
from polynomials.exceptions import DegreeError, DimensionMismatchError, NotPoissonError
from polynomials.services import exponent_vectors, poisson_bracket, polynomial_ring


def random_polynomial(rng, ring, degree=2, terms=3):
    monomials = exponent_vectors(ring.ngens, degree)
    return ring.from_dict({
        rng.choice(monomials): QQ(rng.randint(-4, 4), rng.randint(1, 2)) for _ in range(terms)
    })


def random_polyvector(rng, ring, degree, coefficient_degree=1):
    items = [
        (indices, random_polynomial(rng, ring, coefficient_degree, 2))
        for indices in combinations(range(ring.ngens), degree)
    ]
    return Polyvector.build(ring, degree, items)


def so3(ring):
    return Polyvector.build(ring, 2, [((0, 1), ring.gens[2]), ((1, 2), ring.gens[0]), ((0, 2), -ring.gens[1])])


class WedgeTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens
        self.dx = Polyvector.basis(self.ring, (0,))
        self.dp = Polyvector.basis(self.ring, (1,))

    def test_examples(self):
        self.assertFalse(wedge(self.dx, self.dx))
        self.assertEqual(wedge(self.dx, self.dp), Polyvector.basis(self.ring, (0, 1)))
        self.assertEqual(
            wedge(Polyvector.basis(self.ring, (0,), self.x), self.dp),
            Polyvector.basis(self.ring, (0, 1), self.x),
        )

    def test_graded_commutativity(self):
        self.assertEqual(wedge(self.dp, self.dx), -wedge(self.dx, self.dp))

    def test_dimension_mismatch(self):
        other = polynomial_ring(3)
        with self.assertRaises(DimensionMismatchError):
            wedge(self.dx, Polyvector.basis(other, (0,)))


class SchoutenBracketTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens
        self.pi = Polyvector.basis(self.ring, (0, 1))

    def test_vector_field_on_function(self):
        self.assertEqual(
            schouten_bracket(Polyvector.basis(self.ring, (0,)), Polyvector.function(self.x**2)),
            Polyvector.function(2 * self.x),
        )

    def test_bivector_on_function(self):
        self.assertEqual(
            schouten_bracket(self.pi, Polyvector.function(self.x)),
            Polyvector.basis(self.ring, (1,)),
        )

    def test_bivector_on_vector_field(self):
        self.assertEqual(
            schouten_bracket(self.pi, Polyvector.basis(self.ring, (0,), self.x)),
            self.pi,
        )

    def test_lie_bracket_of_vector_fields(self):
        X = Polyvector.basis(self.ring, (0,))
        Y = Polyvector.basis(self.ring, (0,), self.x)
        self.assertEqual(schouten_bracket(X, Y), X)

    def test_graded_antisymmetry(self):
        rng = random.Random(3)
        ring = polynomial_ring(3)
        for _ in range(20):
            p, q = rng.randint(0, 2), rng.randint(1, 3)
            P, Q = random_polyvector(rng, ring, p), random_polyvector(rng, ring, q)
            sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
            self.assertFalse(schouten_bracket(P, Q) + schouten_bracket(Q, P).scale(sign))

    def test_graded_jacobi(self):
        rng = random.Random(5)
        ring = polynomial_ring(3)
        for _ in range(10):
            degrees = [rng.randint(1, 2) for _ in range(3)]
            P, Q, R = (random_polyvector(rng, ring, d) for d in degrees)
            p, q = degrees[0], degrees[1]
            sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
            lhs = schouten_bracket(P, schouten_bracket(Q, R))
            rhs = schouten_bracket(schouten_bracket(P, Q), R) + schouten_bracket(Q, schouten_bracket(P, R)).scale(sign)
            self.assertEqual(lhs, rhs)


class JacobiCheckTests(SimpleTestCase):
    def test_canonical_and_so3_are_poisson(self):
        ring = polynomial_ring(['x', 'p'])
        self.assertTrue(jacobi_check(Polyvector.basis(ring, (0, 1)))[0])
        ring = polynomial_ring(['x', 'y', 'z'])
        ok, witness = jacobi_check(so3(ring))
        self.assertTrue(ok)
        self.assertFalse(witness)

    def test_non_poisson_witness(self):
        ring = polynomial_ring(['x', 'y', 'z'])
        x, y, z = ring.gens
        pi = Polyvector.build(ring, 2, [((0, 1), z), ((1, 2), y)])
        ok, witness = jacobi_check(pi)
        self.assertFalse(ok)
        self.assertEqual(list(witness.components), [(0, 1, 2)])
        coefficient = witness.components[(0, 1, 2)]
        self.assertEqual(coefficient.ring.ngens, 3)
        self.assertEqual(set(coefficient.keys()), {(0, 0, 1)})

    def test_needs_a_bivector(self):
        ring = polynomial_ring(2)
        with self.assertRaises(DegreeError):
            jacobi_check(Polyvector.basis(ring, (0,)))


class PoissonDifferentialTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens
        self.pi = Polyvector.basis(self.ring, (0, 1))

    def test_examples(self):
        x = self.x
        self.assertEqual(d_pi(self.pi, Polyvector.function(x)), Polyvector.basis(self.ring, (1,)))
        self.assertFalse(d_pi(self.pi, d_pi(self.pi, Polyvector.function(x**3))))
        self.assertEqual(d_pi(self.pi, Polyvector.basis(self.ring, (0,), x)), self.pi)

    def test_square_vanishes_for_so3(self):
        rng = random.Random(13)
        ring = polynomial_ring(['x', 'y', 'z'])
        pi = so3(ring)
        for _ in range(10):
            T = random_polyvector(rng, ring, rng.randint(0, 2), 2)
            self.assertFalse(d_pi(pi, d_pi(pi, T)))

    def test_hamiltonian_vector_field(self):
        rng = random.Random(17)
        for _ in range(10):
            f = random_polynomial(rng, self.ring, 3)
            g = random_polynomial(rng, self.ring, 3)
            X = hamiltonian_vector_field(self.pi, f)
            self.assertEqual(vector_field_action(X, g), poisson_bracket(self.pi, f, g))

    def test_rejects_non_poisson(self):
        ring = polynomial_ring(['x', 'y', 'z'])
        x, y, z = ring.gens
        pi = Polyvector.build(ring, 2, [((0, 1), z), ((1, 2), y)])
        with self.assertRaises(NotPoissonError):
            d_pi(pi, Polyvector.function(x))


class HKRTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens

    def test_vector_field_is_its_own_cochain(self):
        X = Polyvector.vector_field(self.ring, [self.p, self.x**2])
        f = self.x**2 * self.p + self.p**3
        self.assertEqual(apply(hkr_to_cochain(X), (f,)), vector_field_action(X, f))

    def test_bivector_values(self):
        chi = hkr_to_cochain(Polyvector.basis(self.ring, (0, 1)))
        self.assertEqual(apply(chi, (self.x, self.p)), self.ring(QQ(1, 2)))
        self.assertEqual(apply(chi, (self.x**2, self.p)), self.x)

    def test_output_is_antisymmetric(self):
        rng = random.Random(19)
        ring = polynomial_ring(3)
        for _ in range(10):
            chi = hkr_to_cochain(random_polyvector(rng, ring, 2, 2))
            f, g = random_polynomial(rng, ring, 3), random_polynomial(rng, ring, 3)
            self.assertFalse(apply(chi, (f, g)) + apply(chi, (g, f)))


class HorizontalDifferentialTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x1', 'x2', 'p1', 'p2'])
        x1, x2, p1, p2 = self.ring.gens
        pi = Polyvector.build(self.ring, 2, [((0, 2), 1), ((1, 3), 1)])
        self.system = IntegrableSystem(self.ring, pi, (p1, p2))
        self.x1 = x1

    def test_coordinate_gives_minus_one(self):
        c = RelativeClass.build(self.ring, 2, 0, [((), self.x1)])
        self.assertEqual(d_hor(self.system, c), RelativeClass.build(self.ring, 2, 1, [((1,), -1)]))

    def test_constant_class_is_closed(self):
        c = RelativeClass.build(self.ring, 2, 2, [((1, 2), 2)])
        self.assertFalse(d_hor(self.system, c))

    def test_casimir_generators_kill_everything(self):
        ring = polynomial_ring(['x', 'y', 'z', 'w'])
        x, y, z, w = ring.gens
        system = IntegrableSystem(ring, Polyvector.basis(ring, (0, 1)), (z, w))
        c = RelativeClass.build(ring, 2, 1, [((1,), x**2 * y), ((2,), x + z)])
        self.assertFalse(d_hor(system, c))

    def test_square_vanishes(self):
        rng = random.Random(23)
        for _ in range(50):
            degree = rng.randint(0, 1)
            items = [((), random_polynomial(rng, self.ring))] if degree == 0 else [
                ((1,), random_polynomial(rng, self.ring)), ((2,), random_polynomial(rng, self.ring)),
            ]
            c = RelativeClass.build(self.ring, 2, degree, items)
            self.assertFalse(d_hor(self.system, d_hor(self.system, c)))

    def test_square_vanishes_on_other_systems(self):
        ring3 = polynomial_ring(['x', 'y', 'z'])
        _, y, z = ring3.gens
        p1, p2 = self.ring.gens[2:]
        systems = {
            'transverse y, z': IntegrableSystem(ring3, Polyvector.basis(ring3, (0, 1)), (y, z)),
            'mixed momenta': IntegrableSystem(self.ring, self.system.pi, (p1 + p2, p2)),
        }
        rng = random.Random(59)
        for label, system in systems.items():
            ring = system.ring
            for case in range(30):
                degree = rng.randint(0, 1)
                items = [((), random_polynomial(rng, ring))] if degree == 0 else [
                    ((1,), random_polynomial(rng, ring)), ((2,), random_polynomial(rng, ring)),
                ]
                c = RelativeClass.build(ring, 2, degree, items)
                self.assertFalse(d_hor(system, d_hor(system, c)), f'{label}, case {case}')

    def test_size_mismatch(self):
        c = RelativeClass.build(self.ring, 3, 0, [((), self.x1)])
        with self.assertRaises(DimensionMismatchError):
            d_hor(self.system, c)

    def test_square_of_degree_one_class_vanishes(self):
        c = RelativeClass.build(self.ring, 2, 1, [((1,), self.x1), ((2,), self.x1 + 1)])
        self.assertFalse(relative_wedge(c, c))
