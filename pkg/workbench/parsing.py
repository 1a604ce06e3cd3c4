"""Polynomial strings and operator term lists of problem files."""

import ast

from sympy import QQ

from cochains.models import PolyDiffOp
from polynomials.exceptions import ProblemFileError


def _rewrite_powers(text):
    """Replace '^' by '**', returning the new text and a map back to original columns."""
    rewritten = []
    columns = []
    for column, char in enumerate(text):
        if char == '^':
            rewritten.append('**')
            columns.extend([column, column])
        else:
            rewritten.append(char)
            columns.append(column)
    columns.append(len(text))
    return ''.join(rewritten), columns


class _PolynomialBuilder:
    def __init__(self, ring, field, columns):
        self.ring = ring
        self.field = field
        self.columns = columns
        self.names = {str(g): g for g in ring.gens}

    def error(self, node, message):
        column = self.columns[min(node.col_offset, len(self.columns) - 1)] + 1
        return ProblemFileError(message, field=self.field, line=1, column=column)

    def constant(self, node, value):
        if not value.is_ground:
            raise self.error(node, 'expected a constant')
        return value.LC if value else QQ(0)

    def build(self, node):
        if isinstance(node, ast.Expression):
            return self.build(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise self.error(node, f'unsupported literal {node.value!r}; use integers and "/"')
            return self.ring(QQ(node.value))
        if isinstance(node, ast.Name):
            if node.id not in self.names:
                raise self.error(node, f'undeclared variable {node.id!r}')
            return self.names[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            operand = self.build(node.operand)
            return -operand if isinstance(node.op, ast.USub) else operand
        if isinstance(node, ast.BinOp):
            left = self.build(node.left)
            if isinstance(node.op, ast.Pow):
                exponent = self.constant(node.right, self.build(node.right))
                if exponent.denominator != 1 or exponent < 0:
                    raise self.error(node.right, 'exponents must be non-negative integers')
                return left ** int(exponent)
            right = self.build(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                divisor = self.constant(node.right, right)
                if not divisor:
                    raise self.error(node.right, 'division by zero')
                return left * self.ring(1 / divisor)
        raise self.error(node, 'unsupported syntax in polynomial')


def parse_polynomial(ring, text, field=None):
    """
    Parse a polynomial over the declared coordinates of `ring`.

    Accepts integers, '+', '-', '*', '/' by constants and '^' powers.
    """
    if isinstance(text, int) and not isinstance(text, bool):
        return ring(QQ(text))
    if not isinstance(text, str):
        raise ProblemFileError(f'expected a polynomial string, got {type(text).__name__}', field=field)
    source, columns = _rewrite_powers(text.strip())
    if not source:
        raise ProblemFileError('empty polynomial', field=field)
    try:
        tree = ast.parse(source, mode='eval')
    except SyntaxError as exc:
        column = columns[min((exc.offset or 1) - 1, len(columns) - 1)] + 1
        raise ProblemFileError('invalid polynomial syntax', field=field, line=1, column=column) from exc
    return _PolynomialBuilder(ring, field, columns).build(tree)


def format_rational(value):
    value = QQ(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def format_polynomial(p):
    """Canonical text of a polynomial: terms by descending exponent vector, re-parseable."""
    if not p:
        return '0'
    names = [str(g) for g in p.ring.gens]
    pieces = []
    for monom, coefficient in sorted(p.items(), reverse=True):
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f'{name}^{e}')
        magnitude = abs(coefficient)
        if not factors:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = '*'.join(factors)
        else:
            body = '*'.join([format_rational(magnitude)] + factors)
        negative = coefficient < 0
        if not pieces:
            pieces.append(f'-{body}' if negative else body)
        else:
            pieces.append(f'- {body}' if negative else f'+ {body}')
    return ' '.join(pieces)


def parse_operator(ring, arity, terms, field):
    """Build a PolyDiffOp from [{"coefficient": str, "derivatives": [[..], ..]}, ..]."""
    if not isinstance(terms, list):
        raise ProblemFileError('expected a list of operator terms', field=field)
    items = []
    for index, term in enumerate(terms):
        where = f'{field}[{index}]'
        if not isinstance(term, dict) or set(term) - {'coefficient', 'derivatives'}:
            raise ProblemFileError('a term has keys "coefficient" and "derivatives"', field=where)
        derivatives = term.get('derivatives')
        if not isinstance(derivatives, list) or len(derivatives) != arity:
            raise ProblemFileError(f'expected {arity} derivative multi-indices', field=where)
        key = []
        for alpha in derivatives:
            if (
                not isinstance(alpha, list) or len(alpha) != ring.ngens
                or not all(isinstance(a, int) and not isinstance(a, bool) and a >= 0 for a in alpha)
            ):
                raise ProblemFileError(
                    f'multi-index {alpha!r} must list {ring.ngens} non-negative integers', field=where
                )
            key.append(tuple(alpha))
        coefficient = parse_polynomial(ring, term.get('coefficient', '1'), f'{where}.coefficient')
        items.append((tuple(key), coefficient))
    return PolyDiffOp.build(ring, arity, items)


def format_operator(op):
    return [
        {'coefficient': format_polynomial(coefficient), 'derivatives': [list(alpha) for alpha in key]}
        for key, coefficient in sorted(op.terms.items())
    ]
