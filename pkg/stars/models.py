from dataclasses import dataclass, replace

from cochains.models import PolyDiffOp
from polynomials.exceptions import ArityError, DimensionMismatchError, OrderError
from polynomials.models import TruncatedSeries


def _check_terms(ring, order, terms, arity):
    if len(terms) != order:
        raise OrderError(f'expected {order} terms, got {len(terms)}')
    for k, op in enumerate(terms, start=1):
        if op.ring != ring:
            raise DimensionMismatchError(f'term {k} lives in a different ambient space')
        if op.arity != arity:
            raise ArityError(f'term {k} has arity {op.arity}, expected {arity}')


@dataclass(frozen=True)
class StarProduct:
    """
    a * b = ab + hbar B_1(a, b) + ... + hbar^N B_N(a, b).

    `certified_order` is the largest n for which the associativity residuals
    R_1..R_n are known to vanish.
    """
    ring: object
    order: int
    terms: tuple
    certified_order: int = 0

    def __post_init__(self):
        _check_terms(self.ring, self.order, self.terms, 2)

    @classmethod
    def trivial(cls, ring, order):
        return cls(ring, order, tuple(PolyDiffOp.zero(ring, 2) for _ in range(order)), order)

    @property
    def ambient_dim(self):
        return self.ring.ngens

    def term(self, k):
        """B_k, with B_0 the multiplication."""
        if k == 0:
            return PolyDiffOp.multiplication(self.ring)
        if not 1 <= k <= self.order:
            raise OrderError(f'order {k} out of range 0..{self.order}')
        return self.terms[k - 1]

    def as_series(self):
        return TruncatedSeries(self.order, (self.term(0),) + self.terms)

    def with_term(self, k, op, certified_order=None):
        terms = list(self.terms)
        if k == self.order + 1:
            terms.append(op)
        else:
            terms[k - 1] = op
        certified = min(self.certified_order, k - 1) if certified_order is None else certified_order
        return replace(self, order=len(terms), terms=tuple(terms), certified_order=certified)

    def truncated(self, order):
        return StarProduct(
            self.ring, order, self.terms[:order], min(self.certified_order, order)
        )


@dataclass(frozen=True)
class FormalDiffeo:
    """D = id + hbar D_1 + ... + hbar^N D_N."""
    ring: object
    order: int
    terms: tuple

    def __post_init__(self):
        _check_terms(self.ring, self.order, self.terms, 1)

    @classmethod
    def identity(cls, ring, order):
        return cls(ring, order, tuple(PolyDiffOp.zero(ring, 1) for _ in range(order)))

    @classmethod
    def from_terms(cls, ring, order, terms):
        """Build from a {k: operator} map; missing orders are zero."""
        return cls(
            ring, order,
            tuple(terms.get(k, PolyDiffOp.zero(ring, 1)) for k in range(1, order + 1)),
        )

    def term(self, k):
        if k == 0:
            return PolyDiffOp.identity(self.ring)
        if not 1 <= k <= self.order:
            raise OrderError(f'order {k} out of range 0..{self.order}')
        return self.terms[k - 1]

    def as_series(self):
        return TruncatedSeries(self.order, (self.term(0),) + self.terms)

    @classmethod
    def from_series(cls, series):
        return cls(series[0].ring, series.order, tuple(series.coefficients[1:]))

    def is_identity(self):
        return not any(self.terms)
