import random

from django.test import SimpleTestCase
from sympy import QQ

from cochains.models import PolyDiffOp
from cochains.services import (
    BRACKET_SIGN,
    apply,
    cup,
    generator_monomials,
    gerst_bracket,
    gerst_circ,
    hochschild_d,
    insert,
    leibniz_splits,
    operator_order,
    restricted_values,
    vanishes_on_subalgebra,
)
from multivectors.models import Polyvector
from multivectors.services import hkr_to_cochain, schouten_bracket
from obstructions.models import IntegrableSystem
from polynomials.exceptions import ArityError
from polynomials.services import exponent_vectors, polynomial_ring
from stars.services import moyal


def random_polynomial(rng, ring, degree=1, terms=2):
    monomials = exponent_vectors(ring.ngens, degree)
    return ring.from_dict({
        rng.choice(monomials): QQ(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(terms)
    })


def random_operator(rng, ring, arity, order, terms=2, coefficient_degree=1):
    alphas = exponent_vectors(ring.ngens, order)
    items = []
    for _ in range(terms):
        key = tuple(rng.choice(alphas) for _ in range(arity))
        items.append((key, random_polynomial(rng, ring, coefficient_degree)))
    return PolyDiffOp.build(ring, arity, items)


def sign(exponent):
    return -1 if exponent % 2 else 1


class ApplyTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens

    def test_examples(self):
        x, p = self.x, self.p
        op = PolyDiffOp.build(self.ring, 2, [(((1, 0), (0, 1)), 1)])
        self.assertEqual(apply(op, (x**2, p**3)), 6 * x * p**2)
        self.assertEqual(apply(PolyDiffOp.function(x + 3), ()), x + 3)
        self.assertEqual(apply(PolyDiffOp.partial(self.ring, (0, 1), x), (p**2,)), 2 * x * p)

    def test_arity_mismatch(self):
        with self.assertRaises(ArityError):
            apply(PolyDiffOp.multiplication(self.ring), (self.x,))

    def test_canonical_form_merges_and_prunes(self):
        key = ((1, 0), (0, 0))
        op = PolyDiffOp.build(self.ring, 2, [(key, self.x), (key, -self.x)])
        self.assertFalse(op)
        self.assertEqual(operator_order(PolyDiffOp.partial(self.ring, (2, 1))), 3)

    def test_leibniz_split_weights(self):
        splits = dict((parts, weight) for weight, parts in leibniz_splits((2,), 2))
        self.assertEqual(splits, {((0,), (2,)): 1, ((1,), (1,)): 2, ((2,), (0,)): 1})


class HochschildDifferentialTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x'])

    def test_derivation_is_a_cocycle(self):
        self.assertFalse(hochschild_d(PolyDiffOp.partial(self.ring, (1,))))

    def test_second_derivative(self):
        expected = PolyDiffOp.build(self.ring, 2, [(((1,), (1,)), -2)])
        self.assertEqual(hochschild_d(PolyDiffOp.partial(self.ring, (2,))), expected)

    def test_multiplication_is_a_cocycle(self):
        self.assertFalse(hochschild_d(PolyDiffOp.multiplication(self.ring)))

    def test_square_vanishes_on_random_operators(self):
        rng = random.Random(29)
        for case in range(40):
            ring = polynomial_ring(rng.randint(1, 4))
            op = random_operator(rng, ring, rng.randint(0, 2), rng.randint(0, 2))
            self.assertFalse(hochschild_d(hochschild_d(op)), f'case {case}')

    def test_matches_bracket_with_multiplication(self):
        rng = random.Random(31)
        for case in range(40):
            ring = polynomial_ring(rng.randint(1, 3))
            m = PolyDiffOp.multiplication(ring)
            op = random_operator(rng, ring, rng.randint(0, 2), rng.randint(0, 2))
            self.assertEqual(hochschild_d(op), gerst_bracket(op, m).scale(BRACKET_SIGN), f'case {case}')
            k = op.arity
            self.assertEqual(hochschild_d(op), gerst_bracket(m, op).scale(sign(k + 1)), f'case {case}')


class CupProductTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens
        self.dx = PolyDiffOp.partial(self.ring, (1, 0))
        self.dp = PolyDiffOp.partial(self.ring, (0, 1))

    def test_sign_of_two_derivations(self):
        self.assertEqual(apply(cup(self.dx, self.dp), (self.x, self.p)), -self.ring.one)

    def test_function_on_the_left(self):
        f = PolyDiffOp.function(self.x**2)
        self.assertEqual(cup(f, self.dp), self.dp.scale(self.x**2))

    def test_square_of_a_derivation(self):
        x, p = self.x, self.p
        a, b = x * p**2, p**3 + x
        self.assertEqual(apply(cup(self.dp, self.dp), (a, b)), -(a.diff(1) * b.diff(1)))


class GerstenhaberTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens
        self.m = PolyDiffOp.multiplication(self.ring)
        self.D = PolyDiffOp.build(self.ring, 1, [(((1, 0),), self.p), (((0, 2),), 1)])

    def test_multiplication_after_unary(self):
        a, b = self.x**2 * self.p, self.p**3
        expected = apply(self.D, (a,)) * b + a * apply(self.D, (b,))
        self.assertEqual(apply(gerst_circ(self.m, self.D), (a, b)), expected)

    def test_unary_after_multiplication(self):
        a, b = self.x**2 * self.p, self.x + self.p**3
        self.assertEqual(apply(gerst_circ(self.D, self.m), (a, b)), apply(self.D, (a * b,)))

    def test_insertion_value(self):
        ring = polynomial_ring(['x'])
        x = ring.gens[0]
        B = PolyDiffOp.build(ring, 2, [(((1,), (1,)), 1)])
        self.assertEqual(apply(gerst_circ(B, B), (x, x**2, x**3)), -12 * x**2)

    def test_circ_needs_positive_arity(self):
        with self.assertRaises(ArityError):
            gerst_circ(PolyDiffOp.function(self.x), self.m)

    def test_bracket_examples(self):
        dx = PolyDiffOp.partial(self.ring, (1, 0))
        self.assertFalse(gerst_bracket(self.m, dx))
        self.assertFalse(gerst_bracket(self.m, self.m))
        self.assertEqual(gerst_bracket(dx, PolyDiffOp.partial(self.ring, (1, 0), self.x)), dx)

    def test_graded_antisymmetry(self):
        rng = random.Random(37)
        for case in range(30):
            ring = polynomial_ring(rng.randint(1, 3))
            phi = random_operator(rng, ring, rng.randint(0, 2), rng.randint(0, 2))
            psi = random_operator(rng, ring, rng.randint(0, 2), rng.randint(0, 2))
            twist = sign((phi.arity - 1) * (psi.arity - 1))
            self.assertFalse(gerst_bracket(phi, psi) + gerst_bracket(psi, phi).scale(twist), f'case {case}')

    def test_graded_jacobi(self):
        rng = random.Random(41)
        for case in range(10):
            ring = polynomial_ring(2)
            phi, psi, chi = (random_operator(rng, ring, rng.randint(1, 2), 1) for _ in range(3))
            twist = sign((phi.arity - 1) * (psi.arity - 1))
            lhs = gerst_bracket(phi, gerst_bracket(psi, chi))
            rhs = gerst_bracket(gerst_bracket(phi, psi), chi) + gerst_bracket(psi, gerst_bracket(phi, chi)).scale(twist)
            self.assertEqual(lhs, rhs, f'case {case}')

    def test_insert_identity_is_neutral(self):
        identity = PolyDiffOp.identity(self.ring)
        self.assertEqual(insert(self.m, 1, identity), self.m)
        self.assertEqual(insert(identity, 0, self.D), self.D)


class HKRCompatibilityTests(SimpleTestCase):
    def test_bracket_of_vector_fields(self):
        rng = random.Random(43)
        ring = polynomial_ring(3)
        for case in range(50):
            X = Polyvector.vector_field(ring, [random_polynomial(rng, ring, 2) for _ in range(3)])
            Y = Polyvector.vector_field(ring, [random_polynomial(rng, ring, 2) for _ in range(3)])
            self.assertEqual(
                gerst_bracket(hkr_to_cochain(X), hkr_to_cochain(Y)),
                hkr_to_cochain(schouten_bracket(X, Y)),
                f'case {case}',
            )

    def test_vector_fields_are_cocycles(self):
        rng = random.Random(47)
        ring = polynomial_ring(3)
        for _ in range(10):
            X = Polyvector.vector_field(ring, [random_polynomial(rng, ring, 2) for _ in range(3)])
            self.assertFalse(hochschild_d(hkr_to_cochain(X)))


class RestrictionTests(SimpleTestCase):
    def setUp(self):
        self.ring = polynomial_ring(['x', 'p'])
        self.x, self.p = self.ring.gens
        self.pi = Polyvector.basis(self.ring, (0, 1))
        self.system = IntegrableSystem(self.ring, self.pi, (self.p,))

    def test_generator_monomials(self):
        monomials = generator_monomials(self.system, 3)
        self.assertEqual([e for e, _ in monomials], [(0,), (1,), (2,), (3,)])
        self.assertEqual(monomials[3][1], self.p**3)

    def test_moyal_first_order_vanishes_on_momenta(self):
        B_1 = moyal(self.pi, 1).term(1)
        self.assertTrue(restricted_values(B_1, self.system, 3).is_zero())
        self.assertTrue(vanishes_on_subalgebra(B_1, self.system))

    def test_table_values(self):
        op = PolyDiffOp.build(self.ring, 2, [(((0, 1), (0, 1)), 1)])
        values = restricted_values(op, self.system, 2).values
        self.assertEqual(values[((1,), (2,))], 2 * self.p)
        m_values = restricted_values(PolyDiffOp.multiplication(self.ring), self.system, 1).values
        self.assertEqual(m_values[((1,), (1,))], self.p**2)

    def test_zero_table_predicts_vanishing_at_higher_degree(self):
        rng = random.Random(53)
        x, p = self.x, self.p
        op = PolyDiffOp.build(self.ring, 2, [(((1, 0), (0, 1)), x), (((0, 0), (1, 0)), p)])
        self.assertTrue(vanishes_on_subalgebra(op, self.system))
        for _ in range(10):
            f = self.ring.from_dict({(0, rng.randint(0, 6)): QQ(rng.randint(1, 5)) for _ in range(3)})
            g = self.ring.from_dict({(0, rng.randint(0, 6)): QQ(rng.randint(1, 5)) for _ in range(3)})
            self.assertFalse(apply(op, (f, g)))

    def test_nonzero_table_entry(self):
        op = PolyDiffOp.build(self.ring, 2, [(((0, 1), (0, 0)), 1)])
        self.assertFalse(vanishes_on_subalgebra(op, self.system))
