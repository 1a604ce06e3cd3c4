"""Exact sparse linear systems over QQ."""

import logging
from dataclasses import dataclass, field

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearSolution:
    consistent: bool
    rank: int
    augmented_rank: int
    ncols: int
    particular: dict = field(default_factory=dict)
    nullspace: tuple = ()

    @property
    def matrix_is_zero(self):
        return self.rank == 0

    def certificate(self):
        return {
            'consistent': self.consistent,
            'rank': self.rank,
            'augmented_rank': self.augmented_rank,
            'unknowns': self.ncols,
        }


class LinearSystem:
    """
    Accumulates equations sum_j a_ij u_j = b_i keyed by arbitrary hashable row labels.

    Unknowns are integers 0..ncols-1; missing right-hand sides are zero.
    """

    def __init__(self, ncols):
        self.ncols = ncols
        self._rows = {}
        self._rhs = {}

    def add(self, row_key, col, value):
        if not value:
            return
        row = self._rows.setdefault(row_key, {})
        total = row.get(col, QQ(0)) + QQ(value)
        if total:
            row[col] = total
        else:
            del row[col]

    def add_rhs(self, row_key, value):
        if not value:
            return
        self._rows.setdefault(row_key, {})
        self._rhs[row_key] = self._rhs.get(row_key, QQ(0)) + QQ(value)

    @property
    def nrows(self):
        return len(self._rows)

    def solve(self):
        keys = sorted(self._rows, key=repr)
        matrix = {}
        for i, key in enumerate(keys):
            row = dict(self._rows[key])
            rhs = self._rhs.get(key)
            if rhs:
                row[self.ncols] = rhs
            if row:
                matrix[i] = row
        return solve_linear(matrix, len(keys), self.ncols)


def solve_linear(rows, nrows, ncols):
    """
    Solve the augmented system given as {row: {col: value}}, column `ncols` holding the right-hand side.

    The particular solution sets every free unknown to zero; the nullspace is
    returned as a tuple of sparse {col: value} vectors, one per free unknown.
    """
    logger.debug('solving %d x %d system over QQ', nrows, ncols)
    if nrows == 0 or not rows:
        basis = tuple({j: QQ(1)} for j in range(ncols))
        return LinearSolution(True, 0, 0, ncols, {}, basis)

    augmented = DomainMatrix(
        {i: {j: QQ(v) for j, v in row.items()} for i, row in rows.items()},
        (nrows, ncols + 1),
        QQ,
    )
    reduced, pivots = augmented.rref()
    reduced = reduced.to_sparse().rep

    pivots = tuple(pivots)
    rank = sum(1 for p in pivots if p < ncols)
    consistent = ncols not in pivots
    augmented_rank = len(pivots)

    particular = {}
    if consistent:
        for i, col in enumerate(pivots):
            value = reduced.get(i, {}).get(ncols)
            if value:
                particular[col] = value

    pivot_set = set(pivots)
    nullspace = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = {free: QQ(1)}
        for i, col in enumerate(pivots):
            if col >= ncols:
                break
            value = reduced.get(i, {}).get(free)
            if value:
                vector[col] = -value
        nullspace.append(vector)

    logger.debug('rank %d, augmented rank %d, nullity %d', rank, augmented_rank, len(nullspace))
    return LinearSolution(consistent, rank, augmented_rank, ncols, particular, tuple(nullspace))
