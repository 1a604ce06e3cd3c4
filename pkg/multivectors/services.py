"""
Polyvector calculus: wedge, Schouten-Nijenhuis bracket, HKR map, d_pi and the
horizontal differential of the relative Poisson complex.

Sign convention: [X, f] = X(f), [X, Y] is the Lie bracket,
[X ^ Y, f] = X(f) Y - Y(f) X, so that d_pi(f) = [pi, f] is the Hamiltonian
vector field of f. This is (-1)^{(p-1)(q-1)} times the bracket given by the
right-derivative superformula.
"""

from itertools import permutations
from math import factorial

from sympy import QQ

from cochains.models import PolyDiffOp
from multivectors.models import Polyvector, RelativeClass, canonical_indices
from polynomials.exceptions import DegreeError, DimensionMismatchError, NotPoissonError
from polynomials.services import poisson_bracket, unit_vector


def _check_ring(P, Q):
    if P.ring != Q.ring:
        raise DimensionMismatchError(
            f'ambient dimensions differ: {P.ring.ngens} and {Q.ring.ngens}'
        )


def wedge(P, Q):
    _check_ring(P, Q)
    items = []
    for I, p in P.components.items():
        for J, q in Q.components.items():
            items.append((I + J, p * q))
    return Polyvector.build(P.ring, P.degree + Q.degree, items)


def _right_odd_derivative(P, i):
    """Right derivative of P with respect to the odd coordinate paired with x_i."""
    items = []
    k = P.degree
    for I, p in P.components.items():
        if i in I:
            pos = I.index(i)
            sign = -1 if (k - 1 - pos) % 2 else 1
            items.append((I[:pos] + I[pos + 1:], p * sign))
    return Polyvector.build(P.ring, k - 1, items)


def _superformula_bracket(P, Q):
    p, q = P.degree, Q.degree
    result = Polyvector.zero(P.ring, p + q - 1)
    sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    for i in range(P.ring.ngens):
        if p:
            result = result + wedge(_right_odd_derivative(P, i), Q.diff(i))
        if q:
            result = result - wedge(_right_odd_derivative(Q, i), P.diff(i)).scale(sign)
    return result


def schouten_bracket(P, Q):
    """Schouten-Nijenhuis bracket of degree |P| + |Q| - 1."""
    _check_ring(P, Q)
    if P.degree == 0 and Q.degree == 0:
        return Polyvector.zero(P.ring, 0)
    bracket = _superformula_bracket(P, Q)
    if ((P.degree - 1) * (Q.degree - 1)) % 2:
        bracket = -bracket
    return bracket


def jacobi_check(pi):
    """Return (is_poisson, [pi, pi])."""
    if pi.degree != 2:
        raise DegreeError(f'Jacobi check needs a bivector, got degree {pi.degree}')
    witness = schouten_bracket(pi, pi)
    return not witness, witness


def require_poisson(pi):
    ok, witness = jacobi_check(pi)
    if not ok:
        raise NotPoissonError('bivector does not satisfy [pi, pi] = 0', witness=witness)


def d_pi(pi, T):
    """Poisson differential d_pi(T) = [pi, T]."""
    require_poisson(pi)
    return schouten_bracket(pi, T)


def hamiltonian_vector_field(pi, f):
    """X_f with X_f(g) = {f, g}."""
    return d_pi(pi, Polyvector.function(f))


def vector_field_action(X, f):
    if X.degree != 1:
        raise DegreeError(f'expected a vector field, got degree {X.degree}')
    if X.ring != f.ring:
        raise DimensionMismatchError('vector field and function live in different spaces')
    result = f.ring.zero
    for (i,), c in X.components.items():
        result += c * f.diff(i)
    return result


def hkr_to_cochain(P):
    """
    chi(X_1 ^ ... ^ X_k)(g_1, ..., g_k) = (1/k!) sum_sigma sign(sigma) X_1(g_sigma(1)) ... X_k(g_sigma(k)).
    """
    k = P.degree
    ngens = P.ring.ngens
    if k == 0:
        return PolyDiffOp.function(P.as_function())
    weight = QQ(1, factorial(k))
    items = []
    for I, p in P.components.items():
        for sigma in permutations(range(k)):
            _, sign = canonical_indices(sigma)
            slots = [None] * k
            for t, s in enumerate(sigma):
                slots[s] = unit_vector(ngens, I[t])
            items.append((tuple(slots), p * (weight * sign)))
    return PolyDiffOp.build(P.ring, k, items)


def d_hor(system, c):
    """Horizontal Poisson differential: d(w (x) v) = sum_i {f_i, w} (x) e_i ^ v."""
    n = len(system.generators)
    if c.system_size != n:
        raise DimensionMismatchError(
            f'class has system size {c.system_size}, system has {n} generators'
        )
    if c.ring != system.ring:
        raise DimensionMismatchError('class and system live in different ambient spaces')
    items = []
    for v, w in c.components.items():
        for i, f in enumerate(system.generators, start=1):
            if i in v:
                continue
            bracket = poisson_bracket(system.pi, f, w)
            if bracket:
                items.append(((i,) + v, bracket))
    return RelativeClass.build(c.ring, n, c.degree + 1, items)


def relative_wedge(c1, c2):
    if c1.ring != c2.ring or c1.system_size != c2.system_size:
        raise DimensionMismatchError('relative classes of different systems')
    items = []
    for I, p in c1.components.items():
        for J, q in c2.components.items():
            items.append((I + J, p * q))
    return RelativeClass.build(c1.ring, c1.system_size, c1.degree + c2.degree, items)
