import random
from dataclasses import replace

from django.test import SimpleTestCase
from sympy import QQ

from cochains.models import PolyDiffOp
from cochains.services import vanishes_on_subalgebra
from multivectors.models import Polyvector, RelativeClass
from obstructions.models import Bounds, IntegrableSystem, Status
from obstructions.services import (
    audit,
    cocycle_cascade_check,
    deformed_generators,
    eliminate_to_order,
    exactness_solve,
    gauge_step,
    has_zero_image,
    lift_vector_field,
    obstruction_class,
    require_valid,
    validate_system,
)
from polynomials.exceptions import PreconditionError
from polynomials.services import exponent_vectors, polynomial_ring, unit_vector
from stars.models import FormalDiffeo
from stars.services import certify, gauge_transform, moyal, star_commutator


def antisymmetric_correction(ring, i, j):
    """d_i (x) d_j - d_j (x) d_i, a Hochschild 2-cocycle."""
    e_i, e_j = unit_vector(ring.ngens, i), unit_vector(ring.ngens, j)
    return PolyDiffOp.build(ring, 2, [((e_i, e_j), 1), ((e_j, e_i), -1)])


def corrected_moyal(pi, order, correction, at):
    s = moyal(pi, order)
    return certify(s.with_term(at, s.term(at) + correction))


def removable():
    ring = polynomial_ring(['x', 'y', 'z'])
    _, y, z = ring.gens
    pi = Polyvector.basis(ring, (0, 1))
    system = IntegrableSystem(ring, pi, (y, z))
    return ring, system, corrected_moyal(pi, 2, antisymmetric_correction(ring, 1, 2), 2)


def obstructed(at=2):
    ring = polynomial_ring(['x', 'y', 'z', 'w'])
    z, w = ring.gens[2], ring.gens[3]
    pi = Polyvector.basis(ring, (0, 1))
    system = IntegrableSystem(ring, pi, (z, w))
    return ring, system, corrected_moyal(pi, 2, antisymmetric_correction(ring, 2, 3), at)


def canonical_r4():
    ring = polynomial_ring(['x1', 'x2', 'p1', 'p2'])
    return ring, Polyvector.build(ring, 2, [((0, 2), 1), ((1, 3), 1)])


class ValidationTests(SimpleTestCase):
    def test_momenta_are_valid(self):
        ring, pi = canonical_r4()
        report = validate_system(IntegrableSystem(ring, pi, ring.gens[2:]), seed=0)
        self.assertTrue(report.valid)
        self.assertEqual(report.jacobian_rank, 2)
        self.assertEqual(report.nonzero_minor, (2, 3))
        self.assertEqual(report.failures(), [])

    def test_dependent_generators(self):
        ring = polynomial_ring(['x', 'p'])
        x = ring.gens[0]
        report = validate_system(IntegrableSystem(ring, Polyvector.basis(ring, (0, 1)), (x, x**2)), seed=0)
        self.assertFalse(report.valid)
        self.assertIsNone(report.nonzero_minor)
        self.assertEqual(report.jacobian_rank, 1)
        self.assertIn('Jacobian rank 1', report.failures()[0])

    def test_non_commuting_generators(self):
        ring, pi = canonical_r4()
        x1, p1 = ring.gens[0], ring.gens[2]
        system = IntegrableSystem(ring, pi, (x1, p1))
        report = validate_system(system, seed=0)
        self.assertFalse(report.valid)
        self.assertEqual(report.bracket_failures, ((1, 2, ring.one),))
        with self.assertRaises(PreconditionError):
            require_valid(system, seed=0)

    def test_non_poisson_bivector(self):
        ring = polynomial_ring(['x', 'y', 'z'])
        x, y, z = ring.gens
        pi = Polyvector.build(ring, 2, [((0, 1), z), ((1, 2), y)])
        report = validate_system(IntegrableSystem(ring, pi, (x,)), seed=0)
        self.assertFalse(report.valid)
        self.assertIsNotNone(report.jacobi_witness)


class ObstructionClassTests(SimpleTestCase):
    def test_removable_class(self):
        ring, system, s = removable()
        self.assertEqual(s.certified_order, 2)
        self.assertFalse(obstruction_class(s, system, 1))
        self.assertEqual(obstruction_class(s, system, 2), RelativeClass.build(ring, 2, 2, [((1, 2), 2)]))
        self.assertTrue(cocycle_cascade_check(s, system, 2).closed)

    def test_class_matches_brute_force_commutators(self):
        ring, system, s = removable()
        chi = obstruction_class(s, system, 2)
        y, z = system.generators
        self.assertEqual(star_commutator(s, y, z)[2], chi.components[(1, 2)])
        self.assertFalse(star_commutator(s, y, z)[1])

    def test_requires_lower_orders_to_vanish(self):
        ring, system, s = obstructed(at=1)
        with self.assertRaises(PreconditionError):
            obstruction_class(s, system, 2)

    def test_requires_certified_associativity(self):
        ring, system, s = removable()
        with self.assertRaises(PreconditionError):
            obstruction_class(replace(s, certified_order=1), system, 2)

    def test_gauge_covariance_for_transverse_diffeos(self):
        ring, pi = canonical_r4()
        system = IntegrableSystem(ring, pi, ring.gens[2:])
        s = corrected_moyal(pi, 2, antisymmetric_correction(ring, 2, 3), 2)
        chi = obstruction_class(s, system, 2)
        self.assertEqual(chi, RelativeClass.build(ring, 2, 2, [((1, 2), 2)]))
        # operators differentiating only in positions act trivially on momenta
        alphas = [alpha for alpha in exponent_vectors(4, 2) if sum(alpha[:2]) and not sum(alpha[2:])]
        monomials = exponent_vectors(4, 1)
        rng = random.Random(59)
        for case in range(10):
            terms = {}
            for k in (1, 2):
                terms[k] = PolyDiffOp.build(ring, 1, [
                    ((rng.choice(alphas),), ring.from_dict({rng.choice(monomials): QQ(rng.randint(1, 5))}))
                    for _ in range(2)
                ])
            transformed = gauge_transform(s, FormalDiffeo.from_terms(ring, 2, terms))
            self.assertTrue(vanishes_on_subalgebra(transformed.term(1), system), f'case {case}')
            self.assertEqual(obstruction_class(transformed, system, 2), chi, f'case {case}')

    def test_commutative_star_stays_commutative_under_gauges_fixing_c(self):
        ring = polynomial_ring(['x', 'y', 'z'])
        _, y, z = ring.gens
        pi = Polyvector.basis(ring, (0, 1))
        system = IntegrableSystem(ring, pi, (y, z))
        s = moyal(pi, 3)
        # every term differentiates in x, so D is the identity on R[y, z]
        alphas = [alpha for alpha in exponent_vectors(3, 2) if alpha[0]]
        monomials = exponent_vectors(3, 1)
        rng = random.Random(61)
        for case in range(10):
            terms = {
                k: PolyDiffOp.build(ring, 1, [
                    ((rng.choice(alphas),), ring.from_dict({rng.choice(monomials): QQ(rng.randint(-3, 3) or 1)}))
                    for _ in range(2)
                ])
                for k in (1, 2, 3)
            }
            transformed = gauge_transform(s, FormalDiffeo.from_terms(ring, 3, terms))
            commutator = star_commutator(transformed, y, z)
            for n in range(1, 4):
                self.assertFalse(obstruction_class(transformed, system, n), f'case {case}, order {n}')
                self.assertFalse(commutator[n], f'case {case}, order {n}')


class ExactnessTests(SimpleTestCase):
    def test_exact_within_degree_one(self):
        ring, system, _ = removable()
        x = ring.gens[0]
        c = RelativeClass.build(ring, 2, 2, [((1, 2), 2)])
        result = exactness_solve(system, c, 1)
        self.assertTrue(result.exact)
        self.assertFalse(result.zero_image)
        self.assertEqual(result.solution, RelativeClass.build(ring, 2, 1, [((2,), -2 * x)]))

    def test_undecided_below_the_needed_degree(self):
        ring, system, _ = removable()
        result = exactness_solve(system, RelativeClass.build(ring, 2, 2, [((1, 2), 2)]), 0)
        self.assertFalse(result.exact)
        self.assertFalse(result.zero_image)
        self.assertFalse(result.certificate['consistent'])

    def test_casimir_generators_have_zero_image(self):
        ring, system, _ = obstructed()
        self.assertTrue(has_zero_image(system))
        result = exactness_solve(system, RelativeClass.build(ring, 2, 2, [((1, 2), 2)]), 2)
        self.assertFalse(result.exact)
        self.assertTrue(result.zero_image)

    def test_zero_class(self):
        ring, system, _ = removable()
        result = exactness_solve(system, RelativeClass.zero(ring, 2, 2), 2)
        self.assertTrue(result.exact)
        self.assertFalse(result.solution)

    def test_lift_of_a_non_coordinate_system(self):
        ring = polynomial_ring(['x', 'y', 'z'])
        x, y, z = ring.gens
        system = IntegrableSystem(ring, Polyvector.basis(ring, (0, 1)), (y + z, z))
        Y = RelativeClass.build(ring, 2, 1, [((1,), x), ((2,), 1)])
        Z = lift_vector_field(system, Y, Bounds(1, 2))
        self.assertEqual(Z, Polyvector.vector_field(ring, {1: x - 1, 2: 1}))


class GaugeStepTests(SimpleTestCase):
    def test_removable_step(self):
        ring, system, s = removable()
        x = ring.gens[0]
        Y = RelativeClass.build(ring, 2, 1, [((2,), -2 * x)])
        step = gauge_step(s, system, 2, Y, Bounds(2, 2))
        self.assertTrue(step.decided)
        self.assertEqual(step.lift, Polyvector.vector_field(ring, {2: -2 * x}))
        self.assertEqual(step.scale, -1)
        self.assertEqual(step.diffeo.term(1), PolyDiffOp.partial(ring, (0, 0, 1), 2 * x))
        transformed = gauge_transform(s, step.diffeo)
        self.assertTrue(vanishes_on_subalgebra(transformed.term(2), system))

    def test_symmetric_remainder_only(self):
        _, system, _ = removable()
        s = moyal(system.pi, 2)
        step = gauge_step(s, system, 2, None, Bounds(2, 2))
        self.assertTrue(step.decided)
        self.assertTrue(step.diffeo.is_identity())


class EliminationTests(SimpleTestCase):
    def test_moyal_on_a_casimir_system(self):
        ring = polynomial_ring(['x', 'y', 'z'])
        y, z = ring.gens[1], ring.gens[2]
        pi = Polyvector.basis(ring, (0, 1))
        system = IntegrableSystem(ring, pi, (y, z))
        report = eliminate_to_order(moyal(pi, 4), system, 4, Bounds(2, 2), seed=0)
        self.assertEqual(report.status, Status.TRIVIALIZED)
        self.assertEqual(report.order_reached, 4)
        self.assertTrue(report.gauge.is_identity())
        self.assertTrue(all(not c for _, c in report.classes))

    def test_removable(self):
        ring, system, s = removable()
        x = ring.gens[0]
        report = eliminate_to_order(s, system, 2, Bounds(2, 2), seed=0)
        self.assertEqual(report.status, Status.TRIVIALIZED)
        self.assertEqual(report.classes[1], (2, RelativeClass.build(ring, 2, 2, [((1, 2), 2)])))
        self.assertEqual(report.gauge.term(1), PolyDiffOp.partial(ring, (0, 0, 1), 2 * x))
        self.assertEqual(audit(s, system, report), [])
        for k in (1, 2):
            self.assertTrue(vanishes_on_subalgebra(report.star.term(k), system))

    def test_removable_needs_degree_one(self):
        ring, system, s = removable()
        report = eliminate_to_order(s, system, 2, Bounds(0, 2), seed=0)
        self.assertEqual(report.status, Status.UNDECIDED)
        self.assertEqual(report.order_reached, 2)

    def test_obstructed(self):
        ring, system, s = obstructed()
        report = eliminate_to_order(s, system, 2, Bounds(2, 2), seed=0)
        self.assertEqual(report.status, Status.OBSTRUCTED)
        self.assertEqual(report.order_reached, 2)
        self.assertTrue(report.certificates[-1]['exactness']['zero_image'])

    def test_first_order_class_is_an_obstruction(self):
        ring, system, s = obstructed(at=1)
        report = eliminate_to_order(s, system, 1, Bounds(2, 2), seed=0)
        self.assertEqual(report.status, Status.OBSTRUCTED)
        self.assertEqual(report.order_reached, 1)
        self.assertEqual(report.classes, ((1, RelativeClass.build(ring, 2, 2, [((1, 2), 2)])),))

    def test_rejects_invalid_system(self):
        ring, pi = canonical_r4()
        system = IntegrableSystem(ring, pi, (ring.gens[0], ring.gens[2]))
        with self.assertRaises(PreconditionError):
            eliminate_to_order(moyal(pi, 2), system, 2, seed=0)

    def test_audit_catches_a_wrong_star(self):
        ring, system, s = removable()
        report = eliminate_to_order(s, system, 2, Bounds(2, 2), seed=0)
        failures = audit(s, system, replace(report, star=s))
        self.assertTrue(any('gauge transform' in f for f in failures))

    def test_deformed_generators_commute(self):
        ring, system, s = removable()
        report = eliminate_to_order(s, system, 2, Bounds(2, 2), seed=0)
        series, table = deformed_generators(s, report.gauge, system)
        self.assertEqual(series[1][0], ring.gens[2])
        self.assertTrue(table[(1, 2)].is_zero())
