import pytest

from app.cli import EXIT_INVARIANT, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE, parse_tolerance, run
from app.services.corpus import random_minimal_usco
from app.services.map_analyzer import MapAnalyzer
from app.services.map_file import parse_map_text, serialize_map
from tests.conftest import FULL_PARAMS


def test_classify_prints_flags_and_witnesses(capsys):
    assert run(['classify', 'corpus:F21']) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == 'usco=yes minimal_usco=yes cusco=no minimal_cusco=no'
    assert out[1].startswith('witness x=0.0 cusco:')
    assert out[2].startswith('witness x=0.0 minimal_cusco:')


def test_classify_a_map_file(tmp_path, capsys):
    path = tmp_path / 'ramp.map'
    path.write_text("domain [0, 1]\npiece (0, 1) : poly 1 -2\n")
    assert run(['classify', str(path)]) == EXIT_OK
    assert capsys.readouterr().out.strip() == 'usco=yes minimal_usco=yes cusco=yes minimal_cusco=yes'


def test_dist_prints_a_bracket(capsys):
    assert run(['dist', 'corpus:F21', 'corpus:G21', '--metric', 'point:0', '--tol', '1e-3']) == EXIT_OK
    assert capsys.readouterr().out.strip() == '[1, 1]'


def test_phi_on_a_cusco_reports_the_witness(tmp_path, capsys):
    out_path = tmp_path / 'out.map'
    assert run(['phi', 'corpus:G21', '-o', str(out_path)]) == EXIT_PRECONDITION
    err = capsys.readouterr().err
    assert 'x=0.0' in err and 'minimal_usco' in err
    assert not out_path.exists()


def test_phi_then_phi_inv(tmp_path, capsys):
    hull_path = tmp_path / 'hull.map'
    back_path = tmp_path / 'back.map'
    assert run(['phi', 'corpus:F21', '-o', str(hull_path)]) == EXIT_OK
    assert run(['classify', str(hull_path)]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0] == 'usco=yes minimal_usco=no cusco=yes minimal_cusco=yes'

    assert run(['phi-inv', str(hull_path), '-o', str(back_path)]) == EXIT_OK
    restored = parse_map_text(back_path.read_text())
    assert MapAnalyzer().map_equal(restored, parse_map_text(
        "domain [-1, 1]\npiece (-1, 0) : poly 1\npiece (0, 1) : poly -1\nfiber 0 : {-1, 1}\n"), 0.0)


def test_converge_prints_a_table_and_verdict(capsys):
    code = run(['converge', 'gn', 'corpus:G21', '--metric', 'graph', '--n', '2..6', '--tol', '2/n'])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ['n', 'lo', 'hi', 'tol']
    assert [int(line.split()[0]) for line in lines[1:-1]] == [2, 3, 4, 5, 6]
    assert lines[-1] == 'verdict: converges below 0.333333'


def test_converge_failure_names_the_witness(capsys):
    code = run(['converge', 'gn', 'corpus:F21', '--metric', 'graph', '--n', '2..6', '--tol', '0.5'])
    assert code == EXIT_OK
    assert capsys.readouterr().out.splitlines()[-1].startswith('verdict: fails at n=')


def test_corpus_list_and_get(tmp_path, capsys):
    assert run(['corpus', 'list']) == EXIT_OK
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names[:5] == ['F21', 'G21', 'sinrec', 'Pn', 'gn']

    assert run(['corpus', 'get', 'G21']) == EXIT_OK
    assert capsys.readouterr().out.endswith('fiber 0.0 : [-1.0, 1.0]\n')

    out_path = tmp_path / 'p2.map'
    assert run(['corpus', 'get', 'Pn', '--n', '2', '-o', str(out_path)]) == EXIT_OK
    assert 'sinrecip' in out_path.read_text()


def test_plot_is_byte_identical(tmp_path):
    first, second = tmp_path / 'a.svg', tmp_path / 'b.svg'
    assert run(['plot', 'corpus:F21', '-o', str(first)]) == EXIT_OK
    assert run(['plot', 'corpus:F21', '-o', str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert first.read_bytes().lstrip().startswith(b'<?xml')


def test_plot_with_a_y_range(tmp_path):
    out_path = tmp_path / 'g.svg'
    assert run(['plot', 'corpus:gn,n=3', '-o', str(out_path), '--y-range=-2,2']) == EXIT_OK
    assert out_path.stat().st_size > 0
    assert run(['plot', 'corpus:gn,n=3', '-o', str(out_path), '--y-range=2,-2']) == EXIT_USAGE


@pytest.mark.parametrize('argv', [
    ['dist', 'corpus:F21', 'corpus:G21', '--metric', 'sup'],
    ['dist', 'corpus:F21', 'corpus:G21', '--metric', 'uniform', '--tol', '0'],
    ['classify', 'corpus:nope'],
    ['classify', 'corpus:Pn'],
    ['classify', 'missing.map'],
    ['converge', 'gn', 'corpus:G21', '--metric', 'graph', '--n', '5..1'],
    ['frobnicate'],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE
    assert capsys.readouterr().err


def test_parse_error_in_a_map_file(tmp_path, capsys):
    path = tmp_path / 'bad.map'
    path.write_text("domain [0, 1]\npiece (0, 1) : cosine 1\n")
    assert run(['classify', str(path)]) == EXIT_USAGE
    assert 'line 2, column 16' in capsys.readouterr().err


def test_invariant_violation_exit_code(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(MapAnalyzer, 'graph_closure', lambda self, F: F)
    assert run(['phi-inv', 'corpus:G21', '-o', str(tmp_path / 'out.map')]) == EXIT_INVARIANT
    assert 'internal error' in capsys.readouterr().err


def test_tolerance_expressions():
    assert parse_tolerance('1e-3') == 1e-3
    tol = parse_tolerance('2/n')
    assert tol(4) == 0.5
    assert parse_tolerance('1/(n*n)')(10) == pytest.approx(0.01)


CORPUS_SOURCES = ['corpus:F21', 'corpus:G21', 'corpus:sinrec', 'corpus:Pn,n=2', 'corpus:gn,n=3',
                  'corpus:F21-trunc(4)', 'corpus:G21-trunc(4)', 'corpus:fn-trunc(4),n=2']


def test_phi_output_is_minimal_cusco_for_every_minimal_usco_input(tmp_path, capsys):
    sources = list(CORPUS_SOURCES)
    for seed in range(10):
        path = tmp_path / f'random{seed}.map'
        path.write_text(serialize_map(random_minimal_usco(seed, FULL_PARAMS)))
        sources.append(str(path))

    converted = 0
    for i, source in enumerate(sources):
        assert run(['classify', source]) == EXIT_OK
        if 'minimal_usco=yes' not in capsys.readouterr().out.splitlines()[0]:
            continue
        out_path = tmp_path / f'phi{i}.map'
        assert run(['phi', source, '-o', str(out_path)]) == EXIT_OK
        assert run(['classify', str(out_path)]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0].endswith('minimal_cusco=yes'), source
        converted += 1
    assert converted >= 11


@pytest.mark.parametrize('argv', [
    ['classify', 'corpus:F21'],
    ['dist', 'corpus:F21', 'corpus:G21', '--metric', 'uniform', '--tol', '1e-6'],
    ['dist', 'corpus:gn,n=4', 'corpus:G21', '--metric', 'graph', '--tol', '1e-2'],
    ['converge', 'gn', 'corpus:G21', '--metric', 'graph', '--n', '2..5', '--tol', '2/n'],
])
def test_output_is_repeatable(argv, capsys):
    assert run(argv) == EXIT_OK
    first = capsys.readouterr().out
    assert first
    assert run(argv) == EXIT_OK
    assert capsys.readouterr().out == first
