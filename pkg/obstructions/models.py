from dataclasses import dataclass, field

from django.conf import settings

from polynomials.exceptions import DegreeError, DimensionMismatchError


@dataclass(frozen=True)
class IntegrableSystem:
    """
    A Poisson bivector with Poisson-commuting generators f_1..f_n of C.

    Construction only checks shapes; validate_system checks the rest.
    """
    ring: object
    pi: object
    generators: tuple

    def __post_init__(self):
        if self.pi.degree != 2:
            raise DegreeError(f'Poisson structure must be a bivector, got degree {self.pi.degree}')
        if self.pi.ring != self.ring:
            raise DimensionMismatchError('Poisson structure lives in a different ambient space')
        for i, f in enumerate(self.generators, start=1):
            if f.ring != self.ring:
                raise DimensionMismatchError(f'generator f_{i} lives in a different ambient space')
        object.__setattr__(self, 'generators', tuple(self.generators))

    @property
    def ambient_dim(self):
        return self.ring.ngens

    @property
    def size(self):
        return len(self.generators)

    def coordinate_indices(self):
        """Coordinate index of each generator if every f_i is a distinct coordinate, else None."""
        gens = list(self.ring.gens)
        indices = []
        for f in self.generators:
            if f not in gens:
                return None
            indices.append(gens.index(f))
        if len(set(indices)) != len(indices):
            return None
        return tuple(indices)


@dataclass(frozen=True)
class Bounds:
    """Caps of every polynomial ansatz: coefficient degree and operator order."""
    degree: int = 2
    op_order: int = 2

    @classmethod
    def from_settings(cls, degree=None, op_order=None):
        return cls(
            settings.QUANTIZE_DEGREE_BOUND if degree is None else degree,
            settings.QUANTIZE_OP_ORDER_BOUND if op_order is None else op_order,
        )

    def as_dict(self):
        return {'degree': self.degree, 'op_order': self.op_order}


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    jacobi_witness: object = None
    bracket_failures: tuple = ()
    jacobian_rank: int = 0
    nonzero_minor: tuple = None
    sample_point: tuple = None

    def failures(self):
        messages = []
        if self.jacobi_witness is not None:
            messages.append('Poisson bivector fails the Jacobi identity')
        for i, j, bracket in self.bracket_failures:
            messages.append(f'{{f_{i}, f_{j}}} = {bracket} != 0')
        if self.nonzero_minor is None:
            messages.append(f'generators are functionally dependent: Jacobian rank {self.jacobian_rank}')
        return messages


@dataclass(frozen=True)
class CascadeReport:
    closed: bool
    hochschild_witness: tuple = None
    horizontal_witness: object = None


@dataclass(frozen=True)
class ExactnessResult:
    """
    Outcome of solving d_hor(Y) = c within a degree bound.

    `zero_image` certifies that d_hor vanishes on every degree-1 class,
    independently of the bound.
    """
    exact: bool
    solution: object = None
    degree_bound: int = 0
    zero_image: bool = False
    certificate: dict = field(default_factory=dict)


@dataclass(frozen=True)
class GaugeStep:
    order: int
    decided: bool
    diffeo: object = None
    lift: object = None
    scale: object = None
    certificate: dict = field(default_factory=dict)


class Status:
    TRIVIALIZED = 'TRIVIALIZED'
    OBSTRUCTED = 'OBSTRUCTED'
    UNDECIDED = 'UNDECIDED'


@dataclass(frozen=True)
class ObstructionReport:
    order_reached: int
    status: str
    classes: tuple
    gauge: object
    star: object
    bounds: Bounds
    steps: tuple = ()
    certificates: tuple = ()

    @property
    def trivialized(self):
        return self.status == Status.TRIVIALIZED
