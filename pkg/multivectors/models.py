from dataclasses import dataclass, field

from sympy import QQ

from polynomials.exceptions import DegreeError, DimensionMismatchError, IndexOutOfRangeError


def canonical_indices(indices):
    """
    Sort an index tuple, returning (sorted_tuple, sign of the sorting permutation).

    Repeated indices give (None, 0).
    """
    indices = list(indices)
    if len(set(indices)) != len(indices):
        return None, 0
    sign = 1
    # insertion sort keeps track of transpositions
    for i in range(1, len(indices)):
        j = i
        while j > 0 and indices[j - 1] > indices[j]:
            indices[j - 1], indices[j] = indices[j], indices[j - 1]
            sign = -sign
            j -= 1
    return tuple(indices), sign


def _canonical_components(ring, degree, items):
    components = {}
    for indices, coefficient in items:
        if len(indices) != degree:
            raise DegreeError(f'index tuple {indices} does not have length {degree}')
        key, sign = canonical_indices(indices)
        if not sign or not coefficient:
            continue
        if not hasattr(coefficient, 'ring'):
            coefficient = ring(QQ(coefficient))
        elif coefficient.ring != ring:
            raise DimensionMismatchError('component lives in a different ambient space')
        total = components.get(key, ring.zero) + coefficient * sign
        if total:
            components[key] = total
        else:
            components.pop(key, None)
    return components


@dataclass(frozen=True, eq=False)
class Polyvector:
    """
    An antisymmetric polynomial k-vector field sum_I p_I d_{i1} ^ ... ^ d_{ik}.

    Components are keyed by strictly increasing index tuples; a degree-0
    polyvector is a polynomial stored under the key ().
    """
    ring: object
    degree: int
    components: dict = field(default_factory=dict)

    @classmethod
    def build(cls, ring, degree, items):
        if degree < 0:
            raise DegreeError('polyvector degree must be non-negative')
        if hasattr(items, 'items'):
            items = items.items()
        items = list(items)
        for indices, _ in items:
            for i in indices:
                if not 0 <= i < ring.ngens:
                    raise IndexOutOfRangeError(
                        f'coordinate index {i} out of range 0..{ring.ngens - 1}'
                    )
        return cls(ring, degree, _canonical_components(ring, degree, items))

    @classmethod
    def zero(cls, ring, degree):
        return cls(ring, degree, {})

    @classmethod
    def function(cls, f):
        return cls.build(f.ring, 0, [((), f)])

    @classmethod
    def vector_field(cls, ring, coefficients):
        """Vector field from a {coordinate index: polynomial} map or a sequence."""
        if not hasattr(coefficients, 'items'):
            coefficients = dict(enumerate(coefficients))
        return cls.build(ring, 1, [((i,), c) for i, c in coefficients.items()])

    @classmethod
    def basis(cls, ring, indices, coefficient=1):
        return cls.build(ring, len(indices), [(tuple(indices), coefficient)])

    @property
    def ambient_dim(self):
        return self.ring.ngens

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        if not isinstance(other, Polyvector):
            return NotImplemented
        if self.ring != other.ring:
            return False
        if not self.components and not other.components:
            return True
        return self.degree == other.degree and self.components == other.components

    def __hash__(self):
        return hash((self.ring, self.degree, frozenset(self.components.items())))

    def _check(self, other):
        if self.ring != other.ring:
            raise DimensionMismatchError('polyvectors live in different ambient spaces')
        if self.degree != other.degree and self.components and other.components:
            raise DegreeError(f'cannot add degrees {self.degree} and {other.degree}')

    def __add__(self, other):
        self._check(other)
        degree = self.degree if self.components else other.degree
        return Polyvector(
            self.ring, degree,
            _canonical_components(
                self.ring, degree, list(self.components.items()) + list(other.components.items())
            ),
        )

    def __neg__(self):
        return Polyvector(self.ring, self.degree, {k: -v for k, v in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        """Multiply every component by a rational or a polynomial."""
        if not hasattr(factor, 'ring'):
            factor = self.ring(QQ(factor))
        return Polyvector(
            self.ring, self.degree,
            _canonical_components(
                self.ring, self.degree, [(k, v * factor) for k, v in self.components.items()]
            ),
        )

    def diff(self, i):
        return Polyvector(
            self.ring, self.degree,
            _canonical_components(
                self.ring, self.degree, [(k, v.diff(i)) for k, v in self.components.items()]
            ),
        )

    def as_function(self):
        if self.degree != 0:
            raise DegreeError(f'expected a function, got degree {self.degree}')
        return self.components.get((), self.ring.zero)

    def __repr__(self):
        terms = ', '.join(f'{k}: {v}' for k, v in sorted(self.components.items()))
        return f'Polyvector(degree={self.degree}, {{{terms}}})'


@dataclass(frozen=True, eq=False)
class RelativeClass:
    """
    An element of A (x) wedge^k R^n: components keyed by increasing k-tuples of
    1-based generator indices, values polynomials on the ambient space.
    """
    ring: object
    system_size: int
    degree: int
    components: dict = field(default_factory=dict)

    @classmethod
    def build(cls, ring, system_size, degree, items):
        if hasattr(items, 'items'):
            items = items.items()
        items = list(items)
        for indices, _ in items:
            for i in indices:
                if not 1 <= i <= system_size:
                    raise IndexOutOfRangeError(
                        f'generator index {i} out of range 1..{system_size}'
                    )
        return cls(ring, system_size, degree, _canonical_components(ring, degree, items))

    @classmethod
    def zero(cls, ring, system_size, degree):
        return cls(ring, system_size, degree, {})

    def __bool__(self):
        return bool(self.components)

    def is_zero(self):
        return not self.components

    def __eq__(self, other):
        if not isinstance(other, RelativeClass):
            return NotImplemented
        if self.ring != other.ring or self.system_size != other.system_size:
            return False
        if not self.components and not other.components:
            return True
        return self.degree == other.degree and self.components == other.components

    def __hash__(self):
        return hash((self.ring, self.system_size, self.degree, frozenset(self.components.items())))

    def _check(self, other):
        if self.ring != other.ring or self.system_size != other.system_size:
            raise DimensionMismatchError('relative classes of different systems')
        if self.degree != other.degree and self.components and other.components:
            raise DegreeError(f'cannot add degrees {self.degree} and {other.degree}')

    def __add__(self, other):
        self._check(other)
        degree = self.degree if self.components else other.degree
        return RelativeClass(
            self.ring, self.system_size, degree,
            _canonical_components(
                self.ring, degree, list(self.components.items()) + list(other.components.items())
            ),
        )

    def __neg__(self):
        return RelativeClass(
            self.ring, self.system_size, self.degree,
            {k: -v for k, v in self.components.items()},
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        if not hasattr(factor, 'ring'):
            factor = self.ring(QQ(factor))
        return RelativeClass(
            self.ring, self.system_size, self.degree,
            _canonical_components(
                self.ring, self.degree, [(k, v * factor) for k, v in self.components.items()]
            ),
        )

    def __repr__(self):
        terms = ', '.join(f'{k}: {v}' for k, v in sorted(self.components.items()))
        return f'RelativeClass(n={self.system_size}, degree={self.degree}, {{{terms}}})'
