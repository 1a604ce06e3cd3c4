"""Hochschild cochains as polydifferential operators."""

import logging
from itertools import product
from math import factorial

from cochains.models import PolyDiffOp, RestrictedTable
from polynomials.exceptions import ArityError, DimensionMismatchError
from polynomials.services import derivative, exponent_vectors

logger = logging.getLogger(__name__)


def _check_ring(*ops):
    rings = {op.ring for op in ops}
    if len(rings) > 1:
        raise DimensionMismatchError('operators live in different ambient spaces')


def _add(alpha, beta):
    return tuple(a + b for a, b in zip(alpha, beta))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def leibniz_splits(alpha, parts):
    """
    Distribute d^alpha over a product of `parts` factors.

    Yields (multinomial coefficient, tuple of `parts` multi-indices summing to alpha).
    """
    per_coordinate = []
    for a in alpha:
        options = []
        for split in _compositions(a, parts):
            weight = factorial(a)
            for s in split:
                weight //= factorial(s)
            options.append((weight, split))
        per_coordinate.append(options)
    for choice in product(*per_coordinate):
        weight = 1
        for w, _ in choice:
            weight *= w
        yield weight, tuple(tuple(split[t] for _, split in choice) for t in range(parts))


def apply(op, args):
    """Evaluate the operator on polynomial arguments."""
    args = list(args)
    if len(args) != op.arity:
        raise ArityError(f'operator of arity {op.arity} applied to {len(args)} arguments')
    for a in args:
        if a.ring != op.ring:
            raise DimensionMismatchError('argument lives in a different ambient space')
    cache = {}

    def d(slot, alpha):
        key = (slot, alpha)
        if key not in cache:
            cache[key] = derivative(args[slot], alpha)
        return cache[key]

    result = op.ring.zero
    for key, c in op.terms.items():
        value = c
        for slot, alpha in enumerate(key):
            value = value * d(slot, alpha)
            if not value:
                break
        result += value
    return result


def hochschild_d(op):
    """
    (d phi)(f_1..f_{k+1}) = f_1 phi(f_2..) + sum_j (-1)^j phi(.., f_j f_{j+1}, ..)
    + (-1)^{k+1} phi(..) f_{k+1}.
    """
    k = op.arity
    zero = (0,) * op.ring.ngens
    items = []
    for key, c in op.terms.items():
        items.append(((zero,) + key, c))
        for j in range(1, k + 1):
            alpha = key[j - 1]
            sign = -1 if j % 2 else 1
            for weight, (beta, gamma) in leibniz_splits(alpha, 2):
                items.append((key[:j - 1] + (beta, gamma) + key[j:], c * (sign * weight)))
        items.append((key + (zero,), c * (-1 if (k + 1) % 2 else 1)))
    return PolyDiffOp.build(op.ring, k + 1, items)


def cup(phi, psi):
    """(phi u psi)(f_1..f_{i+j}) = (-1)^{ij} phi(f_1..f_i) psi(f_{i+1}..f_{i+j})."""
    _check_ring(phi, psi)
    sign = -1 if (phi.arity * psi.arity) % 2 else 1
    items = []
    for key_phi, c in phi.terms.items():
        for key_psi, d in psi.terms.items():
            items.append((key_phi + key_psi, c * d * sign))
    return PolyDiffOp.build(phi.ring, phi.arity + psi.arity, items)


def insert(phi, slot, psi):
    """
    Feed the output of psi into slot `slot` of phi, without sign.

    Derivatives of phi acting on psi's output are pushed through by the
    Leibniz rule onto psi's coefficient and psi's slots.
    """
    _check_ring(phi, psi)
    if not 0 <= slot < phi.arity:
        raise ArityError(f'slot {slot} out of range for arity {phi.arity}')
    if psi.is_identity():
        return phi
    if phi.is_identity():
        return psi
    j = psi.arity
    items = []
    coefficient_derivatives = {}
    for key_phi, c in phi.terms.items():
        alpha = key_phi[slot]
        before, after = key_phi[:slot], key_phi[slot + 1:]
        for key_psi, d in psi.terms.items():
            for weight, parts in leibniz_splits(alpha, j + 1):
                cache_key = (key_psi, parts[0])
                if cache_key not in coefficient_derivatives:
                    coefficient_derivatives[cache_key] = derivative(d, parts[0])
                dd = coefficient_derivatives[cache_key]
                if not dd:
                    continue
                inner = tuple(_add(key_psi[t], parts[t + 1]) for t in range(j))
                items.append((before + inner + after, c * dd * weight))
    return PolyDiffOp.build(phi.ring, phi.arity + j - 1, items)


def gerst_circ(phi, psi):
    """Gerstenhaber composition sum_{l=0}^{i-1} (-1)^{l(j-1)} phi(.., psi(..), ..)."""
    _check_ring(phi, psi)
    if phi.arity == 0:
        raise ArityError('cannot insert into an operator of arity 0')
    j = psi.arity
    result = PolyDiffOp.zero(phi.ring, phi.arity + j - 1)
    for slot in range(phi.arity):
        term = insert(phi, slot, psi)
        result = result - term if (slot * (j - 1)) % 2 else result + term
    return result


def gerst_bracket(phi, psi):
    """[phi, psi] = phi o psi - (-1)^{(i-1)(j-1)} psi o phi."""
    _check_ring(phi, psi)
    i, j = phi.arity, psi.arity
    if i + j - 1 < 0:
        return PolyDiffOp.zero(phi.ring, 0)
    first = gerst_circ(phi, psi) if i else PolyDiffOp.zero(phi.ring, i + j - 1)
    second = gerst_circ(psi, phi) if j else PolyDiffOp.zero(phi.ring, i + j - 1)
    if ((i - 1) * (j - 1)) % 2:
        return first + second
    return first - second


# d(phi) = BRACKET_SIGN * [phi, m] for every arity; equivalently d(phi) = (-1)^{k+1} [m, phi].
BRACKET_SIGN = -1


def generator_monomials(system, degree):
    """
    Monomials f^e in the generators with |e| <= degree, as (e, polynomial) pairs.

    Ordered by degree, then lexicographically descending in e.
    """
    generators = system.generators
    powers = [[system.ring.one] for _ in generators]
    monomials = []
    for exps in exponent_vectors(len(generators), degree):
        value = system.ring.one
        for i, e in enumerate(exps):
            while len(powers[i]) <= e:
                powers[i].append(powers[i][-1] * generators[i])
            value = value * powers[i][e]
        monomials.append((exps, value))
    return monomials


class TableEvaluator:
    """Evaluates operators on tuples of generator monomials, sharing derivative caches."""

    def __init__(self, system, degree):
        self.system = system
        self.degree = degree
        self.monomials = generator_monomials(system, degree)
        self._polys = dict(self.monomials)
        self._derivatives = {}

    def polynomial(self, exps):
        if exps not in self._polys:
            value = self.system.ring.one
            for f, e in zip(self.system.generators, exps):
                value = value * f ** e
            self._polys[exps] = value
        return self._polys[exps]

    def derivative(self, exps, alpha):
        key = (exps, alpha)
        if key not in self._derivatives:
            self._derivatives[key] = derivative(self.polynomial(exps), alpha)
        return self._derivatives[key]

    def evaluate(self, op, exps_tuple):
        result = op.ring.zero
        for key, c in op.terms.items():
            value = c
            for exps, alpha in zip(exps_tuple, key):
                value = value * self.derivative(exps, alpha)
                if not value:
                    break
            result += value
        return result

    def table(self, op):
        values = {}
        keys = [exps for exps, _ in self.monomials]
        for exps_tuple in product(keys, repeat=op.arity):
            values[exps_tuple] = self.evaluate(op, exps_tuple)
        return RestrictedTable(op.arity, self.degree, values)


def restricted_values(op, system, slot_degree=None):
    """
    Evaluate op on every tuple of generator monomials of degree <= slot_degree.

    The default slot degree is order(op) + 1, at which an all-zero table means
    op vanishes on the subalgebra generated by the system.
    """
    if op.ring != system.ring:
        raise DimensionMismatchError('operator and system live in different ambient spaces')
    if slot_degree is None:
        slot_degree = op.order + 1
    evaluator = TableEvaluator(system, slot_degree)
    logger.debug(
        'restricted table: arity %d, %d monomials per slot', op.arity, len(evaluator.monomials)
    )
    return evaluator.table(op)


def vanishes_on_subalgebra(op, system, slot_degree=None):
    """Membership of op in the kernel of restriction to the subalgebra."""
    return restricted_values(op, system, slot_degree).is_zero()


def operator_order(op):
    return op.order