"""
Obstructions to making a star product commutative on a Poisson-commutative
subalgebra C, and the order-by-order gauge elimination.
"""

import logging
import random
from itertools import combinations

from django.conf import settings
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from cochains.models import PolyDiffOp
from cochains.services import (
    TableEvaluator,
    hochschild_d,
    restricted_values,
    vanishes_on_subalgebra,
)
from multivectors.models import Polyvector, RelativeClass
from multivectors.services import (
    d_hor,
    hamiltonian_vector_field,
    hkr_to_cochain,
    jacobi_check,
    vector_field_action,
)
from obstructions.models import (
    Bounds,
    CascadeReport,
    ExactnessResult,
    GaugeStep,
    ObstructionReport,
    Status,
    ValidationReport,
)
from polynomials.exceptions import (
    DegreeError,
    DimensionMismatchError,
    InternalCheckError,
    OrderError,
    PreconditionError,
)
from polynomials.linear import LinearSystem
from polynomials.services import (
    evaluate_at,
    exponent_vectors,
    poisson_bracket,
    unit_vector,
)
from stars.models import FormalDiffeo
from stars.services import (
    apply_diffeo,
    compose_diffeos,
    gauge_transform,
    morphism_defect,
    star_series,
)

logger = logging.getLogger(__name__)


def _random_point(rng, ngens):
    return tuple(QQ(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(ngens))


def validate_system(system, seed=None):
    """
    Check the Jacobi identity, pairwise Poisson-commutativity and functional
    independence of the generators.

    Independence asks for an n x n minor of the Jacobian that is not
    identically zero; it is cross-checked at seeded random rational points.
    """
    seed = settings.QUANTIZE_SEED if seed is None else seed
    rng = random.Random(seed)
    ring = system.ring
    ok, witness = jacobi_check(system.pi)

    failures = []
    for i, j in combinations(range(system.size), 2):
        bracket = poisson_bracket(system.pi, system.generators[i], system.generators[j])
        if bracket:
            failures.append((i + 1, j + 1, bracket))

    jacobian = [[f.diff(k) for k in range(ring.ngens)] for f in system.generators]
    n = system.size
    nonzero_minor = None
    sample_point = None
    rank = 0
    if n == 0:
        nonzero_minor = ()
    elif n <= ring.ngens:
        domain = ring.to_domain()
        for columns in combinations(range(ring.ngens), n):
            minor = DomainMatrix(
                [[jacobian[i][k] for k in columns] for i in range(n)], (n, n), domain
            ).det()
            if minor:
                nonzero_minor = columns
                for _ in range(16):
                    point = _random_point(rng, ring.ngens)
                    if evaluate_at(minor, point):
                        sample_point = point
                        break
                break
    if n:
        point = sample_point or _random_point(rng, ring.ngens)
        numeric = DomainMatrix(
            [[QQ(evaluate_at(entry, point)) for entry in row] for row in jacobian],
            (n, ring.ngens), QQ,
        )
        rank = numeric.rank()
        if nonzero_minor is not None and sample_point is None:
            logger.warning('nonzero Jacobian minor %s vanished at every sampled point', nonzero_minor)

    report = ValidationReport(
        valid=ok and not failures and nonzero_minor is not None,
        jacobi_witness=None if ok else witness,
        bracket_failures=tuple(failures),
        jacobian_rank=rank,
        nonzero_minor=nonzero_minor,
        sample_point=sample_point,
    )
    logger.info('validated system of %d generators: %s', n, 'valid' if report.valid else 'invalid')
    return report


def require_valid(system, seed=None):
    report = validate_system(system, seed)
    if not report.valid:
        raise PreconditionError('; '.join(report.failures()), witness=report)
    return report


def _unit_key(size, i):
    return unit_vector(size, i - 1)


def antisymmetrized_class(op, system):
    """sum_{i<j} (op(f_i, f_j) - op(f_j, f_i)) e_i ^ e_j, read off the degree-1 restricted table."""
    n = system.size
    table = restricted_values(op, system, slot_degree=1).values
    items = []
    for i, j in combinations(range(1, n + 1), 2):
        a, b = _unit_key(n, i), _unit_key(n, j)
        items.append(((i, j), table[(a, b)] - table[(b, a)]))
    return RelativeClass.build(system.ring, n, 2, items)


def _require_ready(s, system, n):
    if s.ring != system.ring:
        raise DimensionMismatchError('star product and system live in different ambient spaces')
    if not 1 <= n <= s.order:
        raise OrderError(f'order {n} out of range 1..{s.order}')
    if s.certified_order < n:
        raise PreconditionError(
            f'star product is certified associative only to order {s.certified_order}, need {n}',
            witness={'certified_order': s.certified_order, 'required': n},
        )
    for k in range(1, n):
        first = restricted_values(s.term(k), system).first_nonzero()
        if first is not None:
            raise PreconditionError(
                f'B_{k} does not vanish on C: value {first[1]} on generator monomials {first[0]}',
                witness={'order': k, 'monomials': first[0], 'value': first[1]},
            )


def obstruction_class(s, system, n):
    """chi_n: the antisymmetrized order-n commutator coefficients on generators."""
    _require_ready(s, system, n)
    return antisymmetrized_class(s.term(n), system)


def cocycle_cascade_check(s, system, n):
    """d(B_n) vanishes on C and d_hor(chi_n) = 0."""
    _require_ready(s, system, n)
    first = restricted_values(hochschild_d(s.term(n)), system).first_nonzero()
    horizontal = d_hor(system, antisymmetrized_class(s.term(n), system))
    return CascadeReport(
        closed=first is None and not horizontal,
        hochschild_witness=first,
        horizontal_witness=horizontal if horizontal else None,
    )


def has_zero_image(system):
    """True if every generator is a Casimir, so d_hor vanishes on every class."""
    return all(not hamiltonian_vector_field(system.pi, f) for f in system.generators)


def exactness_solve(system, c, degree_bound):
    """Solve d_hor(Y) = c with polynomial components of degree <= degree_bound."""
    if c.degree != 2 and c:
        raise DegreeError(f'exactness is solved for degree-2 classes, got degree {c.degree}')
    if d_hor(system, c):
        raise PreconditionError('class is not closed under d_hor', witness=d_hor(system, c))
    ring = system.ring
    n = system.size
    zero_image = has_zero_image(system)
    if not c:
        return ExactnessResult(
            True, RelativeClass.zero(ring, n, 1), degree_bound, zero_image,
            {'unknowns': 0, 'rank': 0, 'augmented_rank': 0, 'consistent': True},
        )

    monomials = exponent_vectors(ring.ngens, degree_bound)
    columns = [(k, e) for k in range(1, n + 1) for e in monomials]
    linear = LinearSystem(len(columns))
    for col, (k, e) in enumerate(columns):
        image = d_hor(system, RelativeClass.build(ring, n, 1, [((k,), ring.from_dict({e: QQ(1)}))]))
        for indices, value in image.components.items():
            for monom, coefficient in value.items():
                linear.add((indices, monom), col, coefficient)
    for indices, value in c.components.items():
        for monom, coefficient in value.items():
            linear.add_rhs((indices, monom), coefficient)

    solution = linear.solve()
    certificate = solution.certificate()
    certificate['zero_image'] = zero_image
    logger.info(
        'exactness at degree %d: %d unknowns, rank %d, consistent %s',
        degree_bound, len(columns), solution.rank, solution.consistent,
    )
    if not solution.consistent:
        return ExactnessResult(False, None, degree_bound, zero_image, certificate)

    Y = RelativeClass.build(ring, n, 1, [
        ((columns[col][0],), ring.from_dict({columns[col][1]: value}))
        for col, value in solution.particular.items()
    ])
    if d_hor(system, Y) != c:
        raise InternalCheckError('exactness solution fails d_hor(Y) = c')
    return ExactnessResult(True, Y, degree_bound, zero_image, certificate)


def lift_vector_field(system, Y, bounds):
    """
    A vector field Z on the ambient space with Z(f_j) = Y_j, or None if none
    exists within the coefficient-degree bound.
    """
    ring = system.ring
    indices = system.coordinate_indices()
    if indices is not None:
        Z = Polyvector.vector_field(ring, {
            indices[j - 1]: Y.components.get((j,), ring.zero) for j in range(1, system.size + 1)
        })
    else:
        monomials = exponent_vectors(ring.ngens, bounds.degree)
        columns = [(k, e) for k in range(ring.ngens) for e in monomials]
        linear = LinearSystem(len(columns))
        for col, (k, e) in enumerate(columns):
            for j, f in enumerate(system.generators, start=1):
                image = ring.from_dict({e: QQ(1)}) * f.diff(k)
                for monom, coefficient in image.items():
                    linear.add((j, monom), col, coefficient)
        for (j,), value in Y.components.items():
            for monom, coefficient in value.items():
                linear.add_rhs((j, monom), coefficient)
        solution = linear.solve()
        if not solution.consistent:
            logger.warning('vector-field lift infeasible at degree %d', bounds.degree)
            return None
        Z = Polyvector.build(ring, 1, [
            ((columns[col][0],), ring.from_dict({columns[col][1]: value}))
            for col, value in solution.particular.items()
        ])
    for j, f in enumerate(system.generators, start=1):
        if vector_field_action(Z, f) != Y.components.get((j,), ring.zero):
            raise InternalCheckError(f'vector-field lift fails on generator f_{j}')
    return Z


def _proportionality(chi, delta):
    """The rational t with chi + t delta = 0, or None."""
    for key, value in sorted(delta.components.items()):
        monom, coefficient = sorted(value.items())[0]
        t = -chi.components.get(key, chi.ring.zero).get(monom, QQ(0)) / coefficient
        if (chi + delta.scale(t)).is_zero():
            return t
        return None
    return None


def _solve_gauge_term(s, system, n, bounds):
    """
    A unary operator D with d(D) = -B_n on the restricted table, or None.

    The slot degree covers the order of B_n and of every ansatz operator, so a
    zero table means B_n + d(D) vanishes on C.
    """
    ring = s.ring
    target = s.term(n)
    slot_degree = max(target.order, bounds.op_order) + 1
    evaluator = TableEvaluator(system, slot_degree)
    target_table = evaluator.table(target)
    if target_table.is_zero():
        return PolyDiffOp.zero(ring, 1), {'unknowns': 0, 'rank': 0, 'slot_degree': slot_degree}

    alphas = exponent_vectors(ring.ngens, bounds.op_order)
    monomials = exponent_vectors(ring.ngens, bounds.degree)
    columns = [(e, alpha) for alpha in alphas for e in monomials]
    tables = {alpha: evaluator.table(hochschild_d(PolyDiffOp.partial(ring, alpha))) for alpha in alphas}
    linear = LinearSystem(len(columns))
    for col, (e, alpha) in enumerate(columns):
        for key, value in tables[alpha].values.items():
            for monom, coefficient in value.items():
                linear.add((key, tuple(a + b for a, b in zip(monom, e))), col, coefficient)
    for key, value in target_table.values.items():
        for monom, coefficient in value.items():
            linear.add_rhs((key, monom), -coefficient)

    solution = linear.solve()
    certificate = solution.certificate()
    certificate['slot_degree'] = slot_degree
    logger.info(
        'gauge term at order %d: %d unknowns, %d equations, rank %d',
        n, len(columns), linear.nrows, solution.rank,
    )
    if not solution.consistent:
        return None, certificate
    return PolyDiffOp.build(ring, 1, [
        ((columns[col][1],), ring.from_dict({columns[col][0]: value}))
        for col, value in solution.particular.items()
    ]), certificate


def gauge_step(s, system, n, Y, bounds):
    """
    Gauge increment id + hbar^{n-1} t Z + hbar^n D_n making B_n vanish on C.

    Z lifts the exactness witness Y; t is fixed by requiring the class of the
    transformed B_n to vanish. D_n then removes the symmetric remainder on
    the restricted monomial table.
    """
    _require_ready(s, system, n)
    ring = s.ring
    certificate = {'order': n, 'bounds': bounds.as_dict()}
    terms = {}
    lift = None
    scale = None
    if Y is not None and Y:
        if n < 2:
            raise OrderError('an exactness witness needs order at least 2')
        lift = lift_vector_field(system, Y, bounds)
        if lift is None:
            certificate['reason'] = 'vector-field lift infeasible within bounds'
            return GaugeStep(n, False, certificate=certificate)
        X = hkr_to_cochain(lift)
        chi = antisymmetrized_class(s.term(n), system)
        probe = gauge_transform(s, FormalDiffeo.from_terms(ring, s.order, {n - 1: X}))
        scale = _proportionality(chi, antisymmetrized_class(probe.term(n), system) - chi)
        if scale is None:
            certificate['reason'] = 'lifted vector field does not cancel the class'
            return GaugeStep(n, False, lift=lift, certificate=certificate)
        terms[n - 1] = X.scale(scale)
        certificate['scale'] = scale

    partial = gauge_transform(s, FormalDiffeo.from_terms(ring, s.order, terms)) if terms else s
    D_n, solve_certificate = _solve_gauge_term(partial, system, n, bounds)
    certificate['gauge_term'] = solve_certificate
    if D_n is None:
        logger.warning('order %d gauge term undecided within bounds %s', n, bounds.as_dict())
        certificate['reason'] = 'gauge term infeasible within bounds'
        return GaugeStep(n, False, lift=lift, scale=scale, certificate=certificate)
    terms[n] = D_n

    diffeo = FormalDiffeo.from_terms(ring, s.order, terms)
    transformed = gauge_transform(s, diffeo)
    for k in range(1, n + 1):
        if not vanishes_on_subalgebra(transformed.term(k), system):
            raise InternalCheckError(f'gauge step at order {n} leaves B_{k} nonzero on C')
    return GaugeStep(n, True, diffeo, lift, scale, certificate)


def eliminate_to_order(s, system, order, bounds=None, seed=None):
    """Make B_1..B_order vanish on C by successive gauge steps, or report why not."""
    bounds = bounds or Bounds.from_settings()
    require_valid(system, seed)
    if order > s.order:
        raise OrderError(f'cannot eliminate to order {order}: star product has order {s.order}')
    if s.certified_order < order:
        raise PreconditionError(
            f'star product is certified associative only to order {s.certified_order}, need {order}',
            witness={'certified_order': s.certified_order, 'required': order},
        )
    original = s.truncated(order)
    current = original
    gauge = FormalDiffeo.identity(s.ring, order)
    classes = []
    steps = []
    certificates = []

    def report(status, reached):
        return ObstructionReport(
            reached, status, tuple(classes), gauge, current, bounds, tuple(steps), tuple(certificates)
        )

    for n in range(1, order + 1):
        logger.info('elimination: order %d of %d', n, order)
        if vanishes_on_subalgebra(current.term(n), system):
            classes.append((n, RelativeClass.zero(s.ring, system.size, 2)))
            certificates.append({'order': n, 'vanishes_on_C': True})
            continue

        chi = obstruction_class(current, system, n)
        classes.append((n, chi))
        cascade = cocycle_cascade_check(current, system, n)
        if not cascade.closed:
            raise InternalCheckError(f'order {n} class fails its closedness check')
        entry = {'order': n, 'vanishes_on_C': False, 'closed': True}
        certificates.append(entry)

        Y = None
        if chi:
            if n == 1:
                entry['reason'] = 'first-order class is gauge invariant'
                logger.info('obstructed at order 1')
                return report(Status.OBSTRUCTED, n)
            exactness = exactness_solve(system, chi, bounds.degree)
            entry['exactness'] = exactness.certificate
            if not exactness.exact:
                status = Status.OBSTRUCTED if exactness.zero_image else Status.UNDECIDED
                logger.log(
                    logging.INFO if exactness.zero_image else logging.WARNING,
                    'order %d class is not exact: %s', n, status,
                )
                return report(status, n)
            Y = exactness.solution

        step = gauge_step(current, system, n, Y, bounds)
        steps.append(step)
        entry['gauge'] = step.certificate
        if not step.decided:
            return report(Status.UNDECIDED, n)
        current = gauge_transform(current, step.diffeo)
        gauge = compose_diffeos(gauge, step.diffeo)

    result = report(Status.TRIVIALIZED, order)
    failures = audit(original, system, result)
    if failures:
        raise InternalCheckError('; '.join(failures))
    return result


def audit(original, system, report):
    """
    Independent audit of a TRIVIALIZED report; returns the list of failures.

    Every transformed B_k vanishes on C, the reported star is the gauge
    transform of the original, and the gauge intertwines the products on C.
    """
    failures = []
    for k in range(1, report.order_reached + 1):
        first = restricted_values(report.star.term(k), system).first_nonzero()
        if first is not None:
            failures.append(f'B_{k} is {first[1]} on generator monomials {first[0]}')
    recomputed = gauge_transform(original, report.gauge)
    if recomputed.terms != report.star.terms:
        failures.append('reported star is not the gauge transform of the input')
    defect = morphism_defect(original, report.gauge, system)
    if defect is not None:
        failures.append(f'gauge does not intertwine at order {defect[0]} on {defect[1]}')
    return failures


def deformed_generators(s, D, system):
    """The series D(f_i) and the table of their star commutators."""
    series = tuple(apply_diffeo(D, f) for f in system.generators)
    table = {}
    for i, j in combinations(range(system.size), 2):
        table[(i + 1, j + 1)] = star_series(s, series[i], series[j]) - star_series(s, series[j], series[i])
    return series, table
