from dataclasses import dataclass, field

from sympy import QQ

from polynomials.exceptions import ArityError, DimensionMismatchError


def _canonical_terms(ring, arity, items):
    terms = {}
    for key, coefficient in items:
        key = tuple(tuple(alpha) for alpha in key)
        if len(key) != arity:
            raise ArityError(f'term {key} has {len(key)} slots, expected {arity}')
        for alpha in key:
            if len(alpha) != ring.ngens:
                raise DimensionMismatchError(
                    f'multi-index {alpha} has length {len(alpha)}, expected {ring.ngens}'
                )
        if not coefficient:
            continue
        if not hasattr(coefficient, 'ring'):
            coefficient = ring(QQ(coefficient))
        elif coefficient.ring != ring:
            raise DimensionMismatchError('coefficient lives in a different ambient space')
        total = terms.get(key, ring.zero) + coefficient
        if total:
            terms[key] = total
        else:
            terms.pop(key, None)
    return terms


@dataclass(frozen=True, eq=False)
class PolyDiffOp:
    """
    A k-ary polydifferential operator sum c_alpha(x) d^{alpha_1} (x) ... (x) d^{alpha_k}.

    `terms` maps a k-tuple of multi-indices to its polynomial coefficient. The
    representation is canonical: equal operators have equal `terms`.
    """
    ring: object
    arity: int
    terms: dict = field(default_factory=dict)

    @classmethod
    def build(cls, ring, arity, items):
        if hasattr(items, 'items'):
            items = items.items()
        return cls(ring, arity, _canonical_terms(ring, arity, items))

    @classmethod
    def zero(cls, ring, arity):
        return cls(ring, arity, {})

    @classmethod
    def function(cls, f):
        """The arity-0 cochain given by a polynomial."""
        return cls.build(f.ring, 0, [((), f)])

    @classmethod
    def identity(cls, ring):
        return cls.build(ring, 1, [(((0,) * ring.ngens,), 1)])

    @classmethod
    def multiplication(cls, ring):
        return cls.build(ring, 2, [(((0,) * ring.ngens, (0,) * ring.ngens), 1)])

    @classmethod
    def partial(cls, ring, alpha, coefficient=1):
        """The unary operator coefficient * d^alpha."""
        return cls.build(ring, 1, [((tuple(alpha),), coefficient)])

    @property
    def ambient_dim(self):
        return self.ring.ngens

    @property
    def order(self):
        """Largest total derivative degree in any slot (0 for the zero operator)."""
        return max((sum(alpha) for key in self.terms for alpha in key), default=0)

    def is_identity(self):
        return self.arity == 1 and self.terms == {((0,) * self.ring.ngens,): self.ring.one}

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        return self.ring == other.ring and self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, self.arity, frozenset(self.terms.items())))

    def _check(self, other):
        if self.ring != other.ring:
            raise DimensionMismatchError('operators live in different ambient spaces')
        if self.arity != other.arity:
            raise ArityError(f'cannot add arities {self.arity} and {other.arity}')

    def __add__(self, other):
        self._check(other)
        return PolyDiffOp(
            self.ring, self.arity,
            _canonical_terms(
                self.ring, self.arity, list(self.terms.items()) + list(other.terms.items())
            ),
        )

    def __neg__(self):
        return PolyDiffOp(self.ring, self.arity, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        """Multiply every coefficient by a rational or a polynomial."""
        if not hasattr(factor, 'ring'):
            factor = self.ring(QQ(factor))
        return PolyDiffOp(
            self.ring, self.arity,
            _canonical_terms(self.ring, self.arity, [(k, v * factor) for k, v in self.terms.items()]),
        )

    def __repr__(self):
        terms = ', '.join(f'{k}: {v}' for k, v in sorted(self.terms.items()))
        return f'PolyDiffOp(arity={self.arity}, {{{terms}}})'


@dataclass(frozen=True)
class RestrictedTable:
    """Values of an operator on every tuple of generator monomials of degree <= slot_degree."""
    arity: int
    slot_degree: int
    values: dict

    def is_zero(self):
        return not any(self.values.values())

    def first_nonzero(self):
        for key, value in self.values.items():
            if value:
                return key, value
        return None
