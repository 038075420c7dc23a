import logging
import math
import re
from typing import List, Tuple

from pydantic import ValidationError

from app.exceptions import ParseError
from app.models.compact_set import CompactSet
from app.models.expressions import Poly, SinRecip, PieceExpr


class ConstExprParser:
    """Folds constant arithmetic (literals, pi, + - * /, parentheses) to a float"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self._init_patterns()

    def _init_patterns(self):
        """Initialize token patterns"""
        self.patterns = {
            'number': re.compile(r'(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'),
            'pi': re.compile(r'pi\b'),
            'space': re.compile(r'\s+'),
        }

    def parse(self, text: str, column: int = 1, line: int = 1) -> float:
        """Evaluate a constant expression; `column` is where `text` starts in its line"""
        self._tokens = self._tokenize(text, column, line)
        self._pos = 0
        self._line = line
        if not self._tokens:
            raise ParseError('expected a constant', line, column)
        value = self._expr()
        if self._pos < len(self._tokens):
            _, token, col = self._tokens[self._pos]
            raise ParseError(f"unexpected '{token}' in constant", line, col)
        return value

    def _tokenize(self, text: str, column: int, line: int) -> List[Tuple[str, str, int]]:
        tokens = []
        i = 0
        while i < len(text):
            space = self.patterns['space'].match(text, i)
            if space:
                i = space.end()
                continue
            number = self.patterns['number'].match(text, i)
            if number:
                tokens.append(('num', number.group(0), column + i))
                i = number.end()
                continue
            if self.patterns['pi'].match(text, i):
                tokens.append(('pi', 'pi', column + i))
                i += 2
                continue
            if text[i] in '+-*/()':
                tokens.append(('op', text[i], column + i))
                i += 1
                continue
            raise ParseError(f"unexpected character '{text[i]}'", line, column + i)
        return tokens

    def _peek(self):
        return self._tokens[self._pos] if self._pos < len(self._tokens) else None

    def _next(self):
        token = self._peek()
        if token is None:
            last_col = self._tokens[-1][2] + len(self._tokens[-1][1]) if self._tokens else 1
            raise ParseError('unexpected end of constant', self._line, last_col)
        self._pos += 1
        return token

    def _expr(self) -> float:
        value = self._term()
        while self._peek() and self._peek()[1] in '+-' and self._peek()[0] == 'op':
            _, op, _ = self._next()
            rhs = self._term()
            value = value + rhs if op == '+' else value - rhs
        return value

    def _term(self) -> float:
        value = self._unary()
        while self._peek() and self._peek()[0] == 'op' and self._peek()[1] in '*/':
            _, op, col = self._next()
            rhs = self._unary()
            if op == '*':
                value = value * rhs
            else:
                if rhs == 0:
                    raise ParseError('division by zero in constant', self._line, col)
                value = value / rhs
        return value

    def _unary(self) -> float:
        token = self._peek()
        if token and token[0] == 'op' and token[1] in '+-':
            self._next()
            value = self._unary()
            return -value if token[1] == '-' else value
        return self._primary()

    def _primary(self) -> float:
        kind, token, col = self._next()
        if kind == 'num':
            return float(token)
        if kind == 'pi':
            return math.pi
        if token == '(':
            value = self._expr()
            closing = self._next()
            if closing[1] != ')':
                raise ParseError("expected ')'", self._line, closing[2])
            return value
        raise ParseError(f"unexpected '{token}' in constant", self._line, col)


def split_top_level(text: str, separator=None, column: int = 1) -> List[Tuple[str, int]]:
    """Split on whitespace (or on `separator`) outside parentheses.

    Returns (fragment, column) pairs; fragments of a separator split are stripped.
    """
    pieces: List[Tuple[str, int]] = []
    depth = 0
    start = 0
    for i, ch in enumerate(text + (separator or ' ')):
        if ch == '(':
            depth += 1
        elif ch == ')':
            depth -= 1
        at_end = i == len(text)
        splits = at_end or (depth == 0 and (ch == separator if separator else ch.isspace()))
        if splits:
            fragment = text[start:i]
            stripped = fragment.strip()
            if stripped or separator:
                offset = len(fragment) - len(fragment.lstrip())
                pieces.append((stripped, column + start + offset))
            start = i + 1
    return pieces


class ExpressionParser:
    """Parses piece expressions and set literals of the map DSL"""

    SINRECIP_KEYS = ('amp', 'k', 'c', 'off')

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.consts = ConstExprParser()

    def parse_const(self, text: str, column: int = 1, line: int = 1) -> float:
        return self.consts.parse(text, column, line)

    def parse_expr(self, text: str, column: int = 1, line: int = 1) -> PieceExpr:
        """Parse `poly c0 c1 ...` or `sinrecip amp=.. k=.. c=.. off=..`"""
        atoms = split_top_level(text, column=column)
        if not atoms:
            raise ParseError('expected an expression', line, column)
        keyword, keyword_col = atoms[0]
        if keyword == 'poly':
            if len(atoms) < 2:
                raise ParseError('poly needs at least one coefficient', line, keyword_col + len(keyword))
            coeffs = [self.parse_const(atom, col, line) for atom, col in atoms[1:]]
            return Poly(coeffs=tuple(coeffs))
        if keyword == 'sinrecip':
            return self._parse_sinrecip(atoms[1:], line, keyword_col + len(keyword))
        raise ParseError(f"unknown expression kind '{keyword}' (expected poly or sinrecip)", line, keyword_col)

    def _parse_sinrecip(self, atoms: List[Tuple[str, int]], line: int, end_col: int) -> SinRecip:
        values = {}
        for atom, col in atoms:
            key, eq, value_text = atom.partition('=')
            if not eq or key not in self.SINRECIP_KEYS:
                raise ParseError(f"expected one of {', '.join(k + '=' for k in self.SINRECIP_KEYS)}", line, col)
            if key in values:
                raise ParseError(f"duplicate '{key}='", line, col)
            value_col = col + len(key) + 1
            values[key] = (self.parse_const(value_text, value_col, line), value_col)
        missing = [key for key in self.SINRECIP_KEYS if key not in values]
        if missing:
            raise ParseError(f"sinrecip is missing {', '.join(k + '=' for k in missing)}", line, end_col)
        if values['k'][0] == 0:
            raise ParseError('sinrecip needs k != 0', line, values['k'][1])
        return SinRecip(amp=values['amp'][0], k=values['k'][0],
                        center=values['c'][0], offset=values['off'][0])

    def parse_set_literal(self, text: str, column: int = 1, line: int = 1) -> CompactSet:
        """Parse a union of `{a, b, ...}` and `[a, b]` terms joined by `u`"""
        intervals = []
        i = 0
        expect_term = True
        while True:
            while i < len(text) and text[i].isspace():
                i += 1
            if i >= len(text):
                if expect_term:
                    raise ParseError('expected a set term', line, column + i)
                break
            if not expect_term:
                if text[i] != 'u':
                    raise ParseError(f"expected 'u' between set terms, got '{text[i]}'", line, column + i)
                i += 1
                expect_term = True
                continue
            opener = text[i]
            if opener not in '{[':
                raise ParseError(f"expected '{{' or '[', got '{opener}'", line, column + i)
            closer = '}' if opener == '{' else ']'
            end = text.find(closer, i + 1)
            if end < 0:
                raise ParseError(f"missing '{closer}'", line, column + i)
            entries = split_top_level(text[i + 1:end], separator=',', column=column + i + 1)
            values = [self.parse_const(entry, col, line) for entry, col in entries]
            if opener == '[':
                if len(values) != 2:
                    raise ParseError('an interval term needs exactly two bounds', line, column + i)
                if values[0] > values[1]:
                    raise ParseError(f'interval [{values[0]}, {values[1]}] has lo > hi', line, column + i)
                intervals.append((values[0], values[1]))
            else:
                intervals.extend((v, v) for v in values)
            i = end + 1
            expect_term = False
        try:
            return CompactSet.make(intervals)
        except ValidationError as e:
            raise ParseError(f'invalid set literal: {e.errors()[0]["msg"]}', line, column)


_default_parser = ExpressionParser()


def parse_expr(text: str) -> PieceExpr:
    return _default_parser.parse_expr(text)


def parse_const(text: str) -> float:
    return _default_parser.parse_const(text)


def parse_set_literal(text: str) -> CompactSet:
    return _default_parser.parse_set_literal(text)
