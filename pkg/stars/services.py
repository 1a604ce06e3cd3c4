"""Truncated star products and formal diffeomorphisms."""

import logging
from dataclasses import dataclass, replace
from itertools import product
from math import factorial

from sympy import QQ

from cochains.models import PolyDiffOp
from cochains.services import (
    TableEvaluator,
    apply,
    gerst_circ,
    hochschild_d,
    insert,
)
from polynomials.exceptions import (
    DimensionMismatchError,
    InternalCheckError,
    NotPoissonError,
    OrderError,
    PreconditionError,
)
from polynomials.linear import LinearSystem
from polynomials.models import TruncatedSeries
from polynomials.services import (
    bivector_entry,
    check_same_ring,
    exponent_vectors,
    series_combine,
    total_degree,
    unit_vector,
)
from stars.models import FormalDiffeo, StarProduct

logger = logging.getLogger(__name__)


def _bivector_operator(pi):
    """sum_{i,j} pi^{ij} d_i (x) d_j with constant coefficients."""
    ngens = pi.ring.ngens
    items = []
    for i in range(ngens):
        for j in range(ngens):
            entry = bivector_entry(pi, i, j)
            if entry:
                items.append(((unit_vector(ngens, i), unit_vector(ngens, j)), entry))
    return PolyDiffOp.build(pi.ring, 2, items)


def _constant_product(P, Q):
    """Slotwise composition of two constant-coefficient bidifferential operators."""
    items = []
    for (a1, a2), c in P.terms.items():
        for (b1, b2), d in Q.terms.items():
            items.append((
                (tuple(x + y for x, y in zip(a1, b1)), tuple(x + y for x, y in zip(a2, b2))),
                c * d,
            ))
    return PolyDiffOp.build(P.ring, 2, items)


def moyal(pi, order):
    """
    Moyal product of a constant bivector, with real formal parameter:
    B_k = (1 / (2^k k!)) sum pi^{i1 j1} .. pi^{ik jk} d_{i1..ik} (x) d_{j1..jk}.
    """
    if pi.degree != 2:
        raise NotPoissonError(f'Moyal product needs a bivector, got degree {pi.degree}')
    for indices, coefficient in pi.components.items():
        if total_degree(coefficient) > 0:
            raise NotPoissonError(
                f'Moyal product needs a constant Poisson bivector; component {indices} is {coefficient}'
            )
    P = _bivector_operator(pi)
    power = PolyDiffOp.multiplication(pi.ring)
    terms = []
    for k in range(1, order + 1):
        power = _constant_product(power, P)
        terms.append(power.scale(QQ(1, 2 ** k * factorial(k))))
    # constant bivectors are Poisson and their Moyal products associative at every order
    return StarProduct(pi.ring, order, tuple(terms), order)


def star_eval(s, a, b):
    check_same_ring(s, a, b)
    return TruncatedSeries(s.order, tuple(apply(s.term(k), (a, b)) for k in range(s.order + 1)))


def star_commutator(s, a, b):
    return star_eval(s, a, b) - star_eval(s, b, a)


def assoc_residual(s, n):
    """R_n = sum_{k+l=n} B_k o B_l, with B_0 the multiplication; zero iff associative at order n."""
    if not 1 <= n <= s.order:
        raise OrderError(f'residual order {n} out of range 1..{s.order}')
    result = PolyDiffOp.zero(s.ring, 3)
    for k in range(n + 1):
        result = result + gerst_circ(s.term(k), s.term(n - k))
    return result


def certify(s):
    """Return s with certified_order set to the largest n such that R_1..R_n vanish."""
    certified = 0
    for n in range(1, s.order + 1):
        if assoc_residual(s, n):
            break
        certified = n
    logger.info('star product certified associative to order %d of %d', certified, s.order)
    return replace(s, certified_order=certified)


def residual_witness(s, n, degree=None):
    """
    First triple of coordinate monomials on which R_n is nonzero, as
    ((a, b, c), value), or None if R_n vanishes.
    """
    residual = assoc_residual(s, n)
    if not residual:
        return None
    if degree is None:
        degree = residual.order
    ring = s.ring
    monomials = [ring.from_dict({e: QQ(1)}) for e in exponent_vectors(ring.ngens, degree)]
    for triple in product(monomials, repeat=3):
        value = apply(residual, triple)
        if value:
            return triple, value
    raise InternalCheckError(f'nonzero residual R_{n} has no witness at degree {degree}')


def _compose(a, b):
    return insert(a, 0, b)


def compose_diffeos(D, E):
    """(D o E)(a) = D(E(a)), truncated at the common order."""
    if D.ring != E.ring:
        raise DimensionMismatchError('formal diffeomorphisms live in different ambient spaces')
    if D.order != E.order:
        raise OrderError(f'formal diffeomorphism orders differ: {D.order} and {E.order}')
    return FormalDiffeo.from_series(series_combine(D.as_series(), E.as_series(), _compose))


def invert_diffeo(D):
    """E with D o E = E o D = id up to order N: E_n = -sum_{k=1..n} D_k o E_{n-k}."""
    inverse = [PolyDiffOp.identity(D.ring)]
    for n in range(1, D.order + 1):
        term = PolyDiffOp.zero(D.ring, 1)
        for k in range(1, n + 1):
            term = term - _compose(D.term(k), inverse[n - k])
        inverse.append(term)
    return FormalDiffeo(D.ring, D.order, tuple(inverse[1:]))


def apply_diffeo(D, a):
    if D.ring != a.ring:
        raise DimensionMismatchError('diffeomorphism and function live in different spaces')
    return TruncatedSeries(D.order, tuple(apply(D.term(k), (a,)) for k in range(D.order + 1)))


def _pushforward(s, D):
    """Operator series of (a, b) -> D(a) * D(b)."""
    if s.ring != D.ring:
        raise DimensionMismatchError('star product and gauge live in different ambient spaces')
    if s.order != D.order:
        raise OrderError(f'star product has order {s.order}, gauge has order {D.order}')
    left = series_combine(s.as_series(), D.as_series(), lambda B, E: insert(B, 0, E))
    return series_combine(left, D.as_series(), lambda B, E: insert(B, 1, E))


def gauge_transform(s, D):
    """The star product a *' b = D^{-1}(D(a) * D(b))."""
    pushed = _pushforward(s, D)
    inverse = invert_diffeo(D)
    result = series_combine(inverse.as_series(), pushed, _compose)
    if result[0] != PolyDiffOp.multiplication(s.ring):
        raise InternalCheckError('gauge transform changed the undeformed product')
    return StarProduct(s.ring, s.order, tuple(result.coefficients[1:]), s.certified_order)


def morphism_defect(s, D, system, slot_degree=None):
    """
    Check D(a) * D(b) = D(ab) on generator monomials.

    Returns None when the relation holds at every order, otherwise
    (order, monomial pair, defect polynomial) for the first failure.
    """
    pushed = _pushforward(s, D)
    multiplication = PolyDiffOp.multiplication(s.ring)
    for n in range(1, s.order + 1):
        defect = pushed[n] - insert(D.term(n), 0, multiplication)
        if not defect:
            continue
        degree = defect.order + 1 if slot_degree is None else slot_degree
        first = TableEvaluator(system, degree).table(defect).first_nonzero()
        if first is not None:
            return n, first[0], first[1]
    return None


@dataclass(frozen=True)
class ExtensionResult:
    """
    Outcome of solving the next Maurer-Cartan order.

    `particular` solves d B_{n+1} = target; `freedom` spans the Hochschild
    2-cocycles inside the ansatz that may be added to it.
    """
    order: int
    status: str
    target: PolyDiffOp
    particular: object = None
    freedom: tuple = ()
    certificate: dict = None

    SOLVED = 'solved'
    UNDECIDED = 'undecided'


def extension_target(s, n):
    """sum_{k+l=n+1, k,l>=1} B_k o B_l, the value d B_{n+1} must take."""
    target = PolyDiffOp.zero(s.ring, 3)
    for k in range(1, n + 1):
        target = target + gerst_circ(s.term(k), s.term(n + 1 - k))
    return target


def _binary_ansatz(ring, bounds):
    alphas = exponent_vectors(ring.ngens, bounds.op_order)
    coefficients = exponent_vectors(ring.ngens, bounds.degree)
    return [
        (monomial, (alpha, beta))
        for alpha in alphas for beta in alphas for monomial in coefficients
    ]


def _shift(key_coefficient, exps):
    return tuple(a + b for a, b in zip(key_coefficient, exps))


def extend_one_order(s, n, bounds):
    """
    Solve d B_{n+1} = sum B_k o B_l over coefficients of degree <= bounds.degree
    and slot orders <= bounds.op_order.
    """
    if s.certified_order < n:
        raise PreconditionError(
            f'star product is certified associative only to order {s.certified_order}, need {n}',
            witness={'certified_order': s.certified_order, 'required': n},
        )
    if n > s.order:
        raise OrderError(f'cannot extend order {n}: star product has order {s.order}')
    ring = s.ring
    target = extension_target(s, n)
    ansatz = _binary_ansatz(ring, bounds)
    logger.info('extending to order %d with %d unknowns', n + 1, len(ansatz))

    system = LinearSystem(len(ansatz))
    differentials = {}
    for col, (exps, key) in enumerate(ansatz):
        if key not in differentials:
            differentials[key] = hochschild_d(PolyDiffOp.build(ring, 2, [(key, 1)]))
        for out_key, coefficient in differentials[key].terms.items():
            for monom, c in coefficient.items():
                system.add((out_key, _shift(monom, exps)), col, c)
    for out_key, coefficient in target.terms.items():
        for monom, c in coefficient.items():
            system.add_rhs((out_key, monom), c)

    solution = system.solve()
    if not solution.consistent:
        logger.warning('order %d extension undecided within the ansatz', n + 1)
        return ExtensionResult(n + 1, ExtensionResult.UNDECIDED, target, certificate=solution.certificate())

    def operator(vector):
        return PolyDiffOp.build(ring, 2, [
            (ansatz[col][1], ring.from_dict({ansatz[col][0]: value}))
            for col, value in vector.items()
        ])

    particular = operator(solution.particular)
    if hochschild_d(particular) != target:
        raise InternalCheckError(f'order {n + 1} extension fails its residual post-check')
    freedom = tuple(operator(vector) for vector in solution.nullspace)
    return ExtensionResult(
        n + 1, ExtensionResult.SOLVED, target, particular, freedom, solution.certificate()
    )


def check_extension(s, n, candidate):
    """True if `candidate` satisfies the order-(n+1) associativity constraint."""
    if candidate.ring != s.ring:
        raise DimensionMismatchError('candidate lives in a different ambient space')
    return hochschild_d(candidate) == extension_target(s, n)


def star_series(s, u, v):
    """Product of two truncated series of polynomials: sum_{p+q+r=n} B_p(u_q, v_r)."""
    if u.order != s.order or v.order != s.order:
        raise OrderError(f'series orders must equal the star order {s.order}')
    coefficients = []
    for n in range(s.order + 1):
        value = s.ring.zero
        for p in range(n + 1):
            for q in range(n - p + 1):
                value += apply(s.term(p), (u[q], v[n - p - q]))
        coefficients.append(value)
    return TruncatedSeries(s.order, tuple(coefficients))
