from dataclasses import dataclass

from polynomials.exceptions import OrderError


@dataclass(frozen=True)
class TruncatedSeries:
    """
    A formal series c_0 + hbar c_1 + ... + hbar^N c_N.

    Payloads are any values with `+` (polynomials, operators). Nothing past
    `order` is ever stored.
    """
    order: int
    coefficients: tuple

    def __post_init__(self):
        if self.order < 0:
            raise ValueError('order must be non-negative')
        if len(self.coefficients) != self.order + 1:
            raise ValueError(
                f'expected {self.order + 1} coefficients, got {len(self.coefficients)}'
            )

    def __getitem__(self, k):
        return self.coefficients[k]

    def __iter__(self):
        return iter(self.coefficients)

    def __add__(self, other):
        if self.order != other.order:
            raise OrderError(f'cannot add series of orders {self.order} and {other.order}')
        return TruncatedSeries(
            self.order, tuple(a + b for a, b in zip(self.coefficients, other.coefficients))
        )

    def __sub__(self, other):
        if self.order != other.order:
            raise OrderError(f'cannot subtract series of orders {self.order} and {other.order}')
        return TruncatedSeries(
            self.order, tuple(a - b for a, b in zip(self.coefficients, other.coefficients))
        )

    def is_zero(self):
        return all(not c for c in self.coefficients)
