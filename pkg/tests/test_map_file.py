import pytest

from app.exceptions import ParseError
from app.models.compact_set import CompactSet
from app.models.expressions import SinRecip, const
from app.models.piecewise_map import AUTO
from app.services.map_file import parse_map_text, serialize_map

F21_TEXT = """\
# the jump pair, two-point fiber
domain [-1, 1]
piece (-1, 0) : poly 1
piece (0, 1)  : poly -1     # right half
fiber 0 : {-1, 1}
"""

CORPUS_MAPS = [
    ('F21', None), ('G21', None), ('sinrec', None), ('Pn', 1), ('Pn', 7), ('gn', 1), ('gn', 4),
    ('fn-trunc(5)', 3), ('F21-trunc(4)', None), ('G21-trunc(6)', None),
]


class TestParse:
    def test_jump_pair(self, analyzer, F21):
        F = parse_map_text(F21_TEXT)
        assert F.breakpoints == (-1.0, 0.0, 1.0)
        assert F.pieces == (const(1.0), const(-1.0))
        assert F.fibers[0] == AUTO and F.fibers[2] == AUTO
        assert F.fiber(0.0) == CompactSet.points([-1.0, 1.0])
        assert analyzer.map_equal(F, F21, 0.0)

    def test_pieces_in_any_order_with_constant_expressions(self):
        F = parse_map_text(
            "domain [0, 1]\n"
            "piece (1/2, 1) : sinrecip amp=1 k=1 c=1/2 off=0\n"
            "piece (0, 1/2) : poly 0 2\n"
            "fiber 1/2 : [-1, 1]\n"
        )
        assert F.breakpoints == (0.0, 0.5, 1.0)
        assert isinstance(F.pieces[1], SinRecip)
        assert F.fiber(0.5) == CompactSet.interval(-1.0, 1.0)

    def test_punctures(self):
        F = parse_map_text("domain [0, 2]\npuncture 1\npiece (0, 1) : poly 0\npiece (1, 2) : poly 1\n")
        assert F.punctures == (1.0,)
        assert F.fibers[1] is None

    def test_explicit_auto_fiber(self):
        F = parse_map_text("domain [0, 2]\npiece (0, 1) : poly 0\npiece (1, 2) : poly 1\nfiber 1 : auto\n")
        assert F.fiber(1.0) == CompactSet.points([0.0, 1.0])


class TestErrors:
    @pytest.mark.parametrize('text, line, column', [
        ("piece (0, 1) : poly 0\n", 1, 1),
        ("domain [0, 1]\npiece (0, 1) : poly 0\nfiber 1/2 : {0}\n", 3, 7),
        ("domain [0, 1]\npiece (0, 1) : cosine 1\n", 2, 16),
        ("domain [0, 1]\n\npiece (0, 1) : poly 0\nshape (0, 1)\n", 4, 1),
        ("domain [0, 1]\npiece (0, 1) : poly 0\nfiber 0 : [1, 0]\n", 3, 11),
        ("domain [1, 0]\n", 1, 8),
        ("domain [0, 1]\npiece (0, 1) poly 0\n", 2, 20),
    ])
    def test_positions(self, text, line, column):
        with pytest.raises(ParseError) as info:
            parse_map_text(text)
        assert (info.value.line, info.value.column) == (line, column)

    def test_gap_between_pieces(self):
        with pytest.raises(ParseError, match='previous one ends'):
            parse_map_text("domain [0, 2]\npiece (0, 1) : poly 0\npiece (1.5, 2) : poly 0\n")

    def test_pieces_must_reach_the_domain_end(self):
        with pytest.raises(ParseError, match='domain ends'):
            parse_map_text("domain [0, 2]\npiece (0, 1) : poly 0\n")

    def test_fiber_on_a_puncture(self):
        with pytest.raises(ParseError, match='puncture'):
            parse_map_text("domain [0, 2]\npuncture 1\npiece (0, 1) : poly 0\npiece (1, 2) : poly 0\nfiber 1 : {0}\n")

    def test_puncture_at_domain_end(self):
        with pytest.raises(ParseError, match='interior'):
            parse_map_text("domain [0, 2]\npuncture 2\npiece (0, 2) : poly 0\n")

    def test_wave_center_inside_piece(self):
        with pytest.raises(ParseError, match='center'):
            parse_map_text("domain [0, 2]\npiece (0, 2) : sinrecip amp=1 k=1 c=1 off=0\n")

    def test_duplicate_fiber(self):
        with pytest.raises(ParseError, match='twice'):
            parse_map_text("domain [0, 1]\npiece (0, 1) : poly 0\nfiber 0 : {0}\nfiber 0 : {0}\n")


@pytest.mark.parametrize('name, n', CORPUS_MAPS)
def test_corpus_maps_survive_a_file_round_trip(corpus, analyzer, name, n):
    F = corpus.build(name, n)
    G = parse_map_text(serialize_map(F))
    assert analyzer.map_equal(F, G, 0.0)
    assert serialize_map(G) == serialize_map(F)


def test_serialized_jump_pair():
    assert serialize_map(parse_map_text(F21_TEXT)) == (
        "domain [-1.0, 1.0]\n"
        "piece (-1.0, 0.0) : poly 1.0\n"
        "piece (0.0, 1.0) : poly -1.0\n"
        "fiber 0.0 : {-1.0, 1.0}\n"
    )
