import logging
import re
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from app.exceptions import ParseError
from app.models.compact_set import CompactSet
from app.models.piecewise_map import AUTO, FiberSpec, PiecewiseMap
from app.models.expressions import PieceExpr
from app.services.expression_parser import ExpressionParser, split_top_level

SNAP_TOLERANCE = 1e-12


def _matching_paren(text: str, start: int) -> int:
    depth = 0
    for i in range(start, len(text)):
        if text[i] == '(':
            depth += 1
        elif text[i] == ')':
            depth -= 1
            if depth == 0:
                return i
    return -1


class MapFileParser:
    """Parses the line-oriented map definition format:

        domain [a, b]
        puncture x
        piece (u, v) : <expr>
        fiber x : <set-literal> | auto
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.exprs = ExpressionParser()

    def parse(self, text: str) -> PiecewiseMap:
        domain: Optional[Tuple[float, float]] = None
        pieces: List[Tuple[float, float, PieceExpr, int]] = []
        punctures: List[Tuple[float, int, int]] = []
        fibers: List[Tuple[float, FiberSpec, int, int]] = []

        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].rstrip()
            stripped = line.lstrip()
            if not stripped:
                continue
            col = len(line) - len(stripped) + 1
            keyword = re.match(r'[A-Za-z_]*', stripped).group(0) or stripped.split(None, 1)[0]
            rest_col = col + len(keyword)
            rest = line[rest_col - 1:]
            arg_col = rest_col + len(rest) - len(rest.lstrip())

            if keyword == 'domain':
                if domain is not None:
                    raise ParseError('domain declared twice', line_no, col)
                lo, hi = self._parse_pair(rest, rest_col, line_no, '[', ']')
                if not lo < hi:
                    raise ParseError(f"domain [{lo}, {hi}] needs a < b", line_no, arg_col)
                domain = (lo, hi)
            elif keyword == 'puncture':
                punctures.append((self.exprs.parse_const(rest, rest_col, line_no), line_no, arg_col))
            elif keyword == 'piece':
                colon = self._top_level_colon(rest)
                if colon < 0:
                    raise ParseError("expected ':' after the piece interval", line_no, rest_col + len(rest))
                u, v = self._parse_pair(rest[:colon], rest_col, line_no, '(', ')')
                if not u < v:
                    raise ParseError(f"piece ({u}, {v}) needs u < v", line_no, arg_col)
                try:
                    expr = self.exprs.parse_expr(rest[colon + 1:], rest_col + colon + 1, line_no)
                except ValidationError as e:
                    raise ParseError(e.errors()[0]['msg'], line_no, rest_col + colon + 1)
                pieces.append((u, v, expr, line_no))
            elif keyword == 'fiber':
                colon = self._top_level_colon(rest)
                if colon < 0:
                    raise ParseError("expected ':' after the fiber point", line_no, rest_col + len(rest))
                x = self.exprs.parse_const(rest[:colon], rest_col, line_no)
                value_text = rest[colon + 1:]
                value_col = rest_col + colon + 1
                if value_text.strip() == AUTO:
                    fib: FiberSpec = AUTO
                else:
                    fib = self.exprs.parse_set_literal(value_text, value_col, line_no)
                fibers.append((x, fib, line_no, arg_col))
            else:
                raise ParseError(f"unknown statement '{keyword}'", line_no, col)

        if domain is None:
            raise ParseError('missing domain statement', 1, 1)
        return self._assemble(domain, pieces, punctures, fibers)

    def _assemble(self, domain, pieces, punctures, fibers) -> PiecewiseMap:
        if not pieces:
            raise ParseError('a map needs at least one piece', 1, 1)
        pieces.sort(key=lambda p: p[0])
        a, b = domain
        first_u, _, _, first_line = pieces[0]
        if first_u != a:
            raise ParseError(f'first piece starts at {first_u}, domain starts at {a}', first_line, 1)
        for (_, v, _, _), (u, _, _, line_no) in zip(pieces, pieces[1:]):
            if u != v:
                raise ParseError(f'piece starts at {u} but the previous one ends at {v}', line_no, 1)
        last_v, last_line = pieces[-1][1], pieces[-1][3]
        if last_v != b:
            raise ParseError(f'last piece ends at {last_v}, domain ends at {b}', last_line, 1)

        breakpoints = [a] + [v for _, v, _, _ in pieces]
        puncture_points = []
        for x, line_no, col in punctures:
            bp = self._snap(x, breakpoints, line_no, col)
            if bp in (a, b):
                raise ParseError(f'puncture {x} must be an interior breakpoint', line_no, col)
            puncture_points.append(bp)

        fiber_map: Dict[float, FiberSpec] = {}
        for x, fib, line_no, col in fibers:
            bp = self._snap(x, breakpoints, line_no, col)
            if bp in puncture_points:
                raise ParseError(f'fiber declared at puncture {x}', line_no, col)
            if bp in fiber_map:
                raise ParseError(f'fiber at {x} declared twice', line_no, col)
            fiber_map[bp] = fib

        try:
            return PiecewiseMap.from_pieces(domain, [(u, v, e) for u, v, e, _ in pieces],
                                            fiber_map, puncture_points)
        except (ValidationError, ValueError) as e:
            message = e.errors()[0]['msg'] if isinstance(e, ValidationError) else str(e)
            raise ParseError(f'invalid map: {message}', pieces[0][3], 1)

    def _snap(self, x: float, breakpoints: List[float], line_no: int, col: int) -> float:
        for bp in breakpoints:
            if abs(bp - x) <= SNAP_TOLERANCE * max(1.0, abs(x)):
                return bp
        raise ParseError(f'{x} is not a piece endpoint', line_no, col)

    def _parse_pair(self, text: str, col: int, line_no: int, opener: str, closer: str) -> Tuple[float, float]:
        start = len(text) - len(text.lstrip())
        body = text.strip()
        if not body.startswith(opener) or not body.endswith(closer):
            raise ParseError(f"expected '{opener}lo, hi{closer}'", line_no, col + start)
        if opener == '(' and _matching_paren(body, 0) != len(body) - 1:
            raise ParseError("unbalanced parentheses", line_no, col + start)
        entries = split_top_level(body[1:-1], separator=',', column=col + start + 1)
        if len(entries) != 2:
            raise ParseError(f"expected exactly two bounds in '{body}'", line_no, col + start)
        return tuple(self.exprs.parse_const(entry, entry_col, line_no) for entry, entry_col in entries)

    @staticmethod
    def _top_level_colon(text: str) -> int:
        depth = 0
        for i, ch in enumerate(text):
            if ch in '([{':
                depth += 1
            elif ch in ')]}':
                depth -= 1
            elif ch == ':' and depth == 0:
                return i
        return -1


def serialize_map(F: PiecewiseMap) -> str:
    """Map file text for F; floats are written exactly"""
    a, b = F.domain
    lines = [f'domain [{a!r}, {b!r}]']
    lines.extend(f'puncture {p!r}' for p in F.punctures)
    lines.extend(f'piece ({u!r}, {v!r}) : {expr.to_text()}' for u, v, expr in F.segments())
    for x, fib in zip(F.breakpoints, F.fibers):
        if isinstance(fib, CompactSet):
            lines.append(f'fiber {x!r} : {fib.to_literal()}')
    return '\n'.join(lines) + '\n'


_default_parser = MapFileParser()


def parse_map_text(text: str) -> PiecewiseMap:
    return _default_parser.parse(text)
