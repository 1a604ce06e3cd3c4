"""Exact polynomial arithmetic over QQ, Poisson brackets and truncated series."""

from functools import reduce
from itertools import combinations_with_replacement
from math import comb

from sympy import QQ
from sympy.polys.rings import PolyRing

from polynomials.exceptions import (
    DegreeError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    OrderError,
)
from polynomials.models import TruncatedSeries


def polynomial_ring(names):
    """
    Return the polynomial ring QQ[names].

    `names` is a sequence of coordinate names or a positive integer m, in which
    case the coordinates are called x0 .. x{m-1}.
    """
    if isinstance(names, int):
        if names < 1:
            raise DimensionMismatchError('ambient dimension must be positive')
        names = [f'x{i}' for i in range(names)]
    names = list(names)
    if not names:
        raise DimensionMismatchError('ambient dimension must be positive')
    return PolyRing(','.join(names), QQ)


def check_same_ring(*elements):
    rings = {e.ring for e in elements}
    if len(rings) > 1:
        dims = sorted(r.ngens for r in rings)
        raise DimensionMismatchError(f'ambient spaces differ (dimensions {dims})')
    return rings.pop()


def poly_mul(p, q):
    check_same_ring(p, q)
    return p * q


def poly_partial(p, i):
    if not 0 <= i < p.ring.ngens:
        raise IndexOutOfRangeError(f'coordinate index {i} out of range 0..{p.ring.ngens - 1}')
    return p.diff(i)


def derivative(p, alpha):
    """Apply the multi-index derivative d^alpha to p."""
    for i, times in enumerate(alpha):
        for _ in range(times):
            if not p:
                return p
            p = p.diff(i)
    return p


def total_degree(p):
    if not p:
        return -1
    return max(sum(monom) for monom in p.keys())


def evaluate_at(p, point):
    """Evaluate p at a rational point; returns an element of QQ."""
    return p(*[QQ(v) for v in point])


def exponent_vectors(ngens, degree):
    """All exponent vectors of total degree <= degree, ordered by degree then lexicographically."""
    vectors = []
    for d in range(degree + 1):
        level = []
        for combo in combinations_with_replacement(range(ngens), d):
            exps = [0] * ngens
            for i in combo:
                exps[i] += 1
            level.append(tuple(exps))
        vectors.extend(sorted(level, reverse=True))
    return vectors


def count_exponent_vectors(ngens, degree):
    return comb(ngens + degree, degree)


def unit_vector(ngens, i):
    exps = [0] * ngens
    exps[i] = 1
    return tuple(exps)


def bivector_entry(pi, i, j):
    """pi^{ij} with the antisymmetry made explicit."""
    if i == j:
        return pi.ring.zero
    if i < j:
        return pi.components.get((i, j), pi.ring.zero)
    return -pi.components.get((j, i), pi.ring.zero)


def poisson_bracket(pi, f, g):
    """{f, g} = sum_{i<j} pi^{ij} (d_i f d_j g - d_j f d_i g)."""
    if pi.degree != 2:
        raise DegreeError(f'Poisson bracket needs a bivector, got degree {pi.degree}')
    ring = check_same_ring(pi, f, g)
    df = [f.diff(i) for i in range(ring.ngens)]
    dg = [g.diff(i) for i in range(ring.ngens)]
    result = ring.zero
    for (i, j), coefficient in pi.components.items():
        result += coefficient * (df[i] * dg[j] - df[j] * dg[i])
    return result


def series_combine(u, v, combiner):
    """Cauchy product c_n = sum_{k+l=n} combiner(u_k, v_l), truncated at the common order."""
    if u.order != v.order:
        raise OrderError(f'series orders differ: {u.order} and {v.order}')
    coefficients = []
    for n in range(u.order + 1):
        coefficients.append(
            reduce(lambda acc, term: acc + term, (combiner(u[k], v[n - k]) for k in range(n + 1)))
        )
    return TruncatedSeries(u.order, tuple(coefficients))
