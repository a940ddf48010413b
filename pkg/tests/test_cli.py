"""
CLI tests through click's CliRunner: building codes, corrupting, decoding,
bound reports, experiments, and library errors as clean exits.
"""
import json

import pytest
from click.testing import CliRunner

from ldlab.cli import main
from ldlab.code_io import read_code, read_word, write_code, write_grid, write_word
from ldlab.families import InterleavedCode
from ldlab.linear_code import encode


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def had22_file(tmp_path, had22):
    path = tmp_path / 'had22.gen'
    write_code(path, had22)
    return path


def read_report(path):
    return json.loads(path.read_text(encoding='utf-8'))


class TestCodeCommands:
    """code make / code info"""

    def test_make_hadamard(self, runner, tmp_path):
        out = tmp_path / 'had23.gen'
        result = runner.invoke(main, ['code', 'make', 'hadamard', '--q', '2', '--k', '3', '--out', str(out)])
        assert result.exit_code == 0, result.output
        code = read_code(out)
        assert (code.q, code.n, code.k) == (2, 8, 3)
        assert code.tag == 'hadamard(q=2,k=3)'

    def test_make_to_stdout(self, runner):
        result = runner.invoke(main, ['code', 'make', 'rs', '--q', '5', '--degree', '1'])
        assert result.exit_code == 0, result.output
        assert '5 5 2' in result.output.splitlines()

    def test_make_tensor(self, runner, tmp_path, had22_file):
        out = tmp_path / 'product.gen'
        result = runner.invoke(main, ['code', 'make', 'tensor', '--left', str(had22_file),
                                      '--right', str(had22_file), '--out', str(out)])
        assert result.exit_code == 0, result.output
        assert read_code(out).n == 16

    def test_info(self, runner, tmp_path, had22_file):
        out = tmp_path / 'info.json'
        result = runner.invoke(main, ['code', 'info', str(had22_file), '--out', str(out)])
        assert result.exit_code == 0, result.output
        info = read_report(out)
        assert info['distance'] == 2
        assert info['relative_distance'] == '1/2'
        assert info['size'] == 4


class TestCorruptAndDecode:
    """corrupt and decode interleaved"""

    def test_corrupt_codeword(self, runner, tmp_path, had22, had22_file):
        out = tmp_path / 'received.word'
        result = runner.invoke(main, ['corrupt', '--code', str(had22_file), '--message', '1,0',
                                      '--errors', '1', '--seed', '4', '--out', str(out)])
        assert result.exit_code == 0, result.output
        original = encode(had22, [1, 0])
        received = read_word(out)
        assert sum(1 for a, b in zip(original.symbols, received.symbols) if a != b) == 1

    def test_corrupt_needs_one_source(self, runner):
        result = runner.invoke(main, ['corrupt', '--errors', '1'])
        assert result.exit_code == 2

    def test_corrupt_rejects_both_sources(self, runner, tmp_path, had22, had22_file):
        word = tmp_path / 'codeword.word'
        write_word(word, had22.codeword(1))
        out = tmp_path / 'received.word'
        result = runner.invoke(main, ['corrupt', '--word', str(word), '--code', str(had22_file),
                                      '--message', '1,0', '--errors', '1', '--out', str(out)])
        assert result.exit_code == 2
        assert 'not both' in result.output
        assert not out.exists()

    def test_decode_interleaved(self, runner, tmp_path, had22, had22_file):
        grid = InterleavedCode(had22, 2).grid([1, 2])
        received = tmp_path / 'received.grid'
        write_grid(received, grid)
        out = tmp_path / 'decoded.json'
        result = runner.invoke(main, ['decode', 'interleaved', '--code', str(had22_file), '--m', '2',
                                      '--received', str(received), '--eta', '1/4', '--out', str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        # grids in the row metric sit at least 2 rows apart
        assert report['list_size'] == 1
        assert report['list'] == [str(grid).splitlines()]
        assert report['within_bound'] is True

    def test_decode_interleaved_tree(self, runner, tmp_path, had22, had22_file):
        grid = InterleavedCode(had22, 2).grid([3, 0])
        received = tmp_path / 'received.grid'
        write_grid(received, grid)
        out = tmp_path / 'tree.json'
        result = runner.invoke(main, ['decode', 'interleaved', '--code', str(had22_file), '--m', '2',
                                      '--received', str(received), '--eta', '1/4', '--algo', 'tree',
                                      '--out', str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        assert report['list_size'] == 1
        assert report['tree_stats']['violations'] == 0
        assert 'tree' in report


# -----------------------------
# Bounds
# -----------------------------

class TestBoundCommands:
    """bounds ... as JSON reports"""

    def test_interleaved(self, runner, tmp_path):
        out = tmp_path / 'bound.json'
        result = runner.invoke(main, ['bounds', 'interleaved', '--delta', '1/2', '--eta', '1/4',
                                      '--ell', '2', '--out', str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        # b = 1, r = 1
        assert report['value'] == 4
        assert report['details'] == {'b': 1, 'r': 1}

    def test_johnson(self, runner, tmp_path):
        out = tmp_path / 'johnson.json'
        result = runner.invoke(main, ['bounds', 'johnson', '--delta', '1/2', '--variant', 'binary',
                                      '--out', str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        assert report['radius'] == pytest.approx(0.5)
        assert report['range_holds'] is True

    def test_ghw(self, runner, tmp_path, had22_file):
        out = tmp_path / 'ghw.json'
        result = runner.invoke(main, ['bounds', 'ghw', '--code', str(had22_file), '-r', '2', '--out', str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        assert report['ghw'] == '3/4'
        assert report['lower_bound'] == '3/4'


class TestErrors:
    """Library errors become one-line click errors"""

    def test_eta_not_below_delta(self, runner):
        result = runner.invoke(main, ['bounds', 'interleaved', '--delta', '1/2', '--eta', '1/2', '--ell', '2'])
        assert result.exit_code == 1
        assert 'eta < delta' in result.output

    def test_bad_rational(self, runner):
        result = runner.invoke(main, ['bounds', 'interleaved', '--delta', 'half', '--eta', '1/4', '--ell', '2'])
        assert result.exit_code == 2
        assert 'not a rational number' in result.output

    def test_unknown_experiment(self, runner):
        result = runner.invoke(main, ['experiment', 'run', 'no_such_experiment'])
        assert result.exit_code == 1
        assert 'no_such_experiment' in result.output

    def test_bad_param(self, runner):
        result = runner.invoke(main, ['experiment', 'run', 'ghw_hadamard', '--param', 'hadamard_ks'])
        assert result.exit_code == 2


# -----------------------------
# Experiments
# -----------------------------

class TestExperimentCommands:
    """experiment list / run"""

    def test_list(self, runner):
        result = runner.invoke(main, ['experiment', 'list'])
        assert result.exit_code == 0, result.output
        rows = json.loads(result.output)
        assert len(rows) == 17
        assert rows[0]['seed'] is not None

    def test_run_small(self, runner, tmp_path):
        out = tmp_path / 'ghw.json'
        result = runner.invoke(main, ['experiment', 'run', 'ghw_hadamard', '--param', 'hadamard_ks=[1, 2]',
                                      '--param', 'other_codes=[]', '--out', str(out)])
        assert result.exit_code == 0, result.output
        report = read_report(out)
        assert report['passed'] is True
        assert report['aggregates']['hadamard_cases'] == 3
