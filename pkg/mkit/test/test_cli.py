"""Command line: reports, exit codes, determinism and the verify round trip."""

import json
import os

import pytest
from click.testing import CliRunner

from mkit.main import cli, main

from .conftest import INPUTS_DIR


def _path(name: str) -> str:
    return os.path.join(INPUTS_DIR, name)


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, args):
    result = runner.invoke(cli, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return json.loads(result.output), result.output


def _save(tmp_path, report, name="report.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(report))
    return str(path)


class TestCommands:

    def test_milnor_f4(self, runner):
        report, _ = _run(runner, ['milnor', '-f', _path('f4.json')])
        assert (report["mu"], report["mu1"], report["mu0"]) == (4, 2, 2)
        assert report["basis"] == [[0, 0], [1, 0], [0, 1], [1, 1]]
        assert report["engine"]["mu"] == 4
        assert report["engine"]["weights"] == ["1/2", "1/3"]

    def test_weights(self, runner):
        report, _ = _run(runner, ['weights', '-f', _path('a1.json')])
        assert report["weights"] == ["1", "1/2"]

    def test_decompose_worked_example(self, runner):
        report, _ = _run(runner, ['decompose', '-f', _path('a1.json'), '--omega', _path('omega.json'),
                                  '--order', '8'])
        assert report["c"] == [["1"]]
        assert report["xi"] == {"terms": [{"e": [2, 0], "c": "-1/4"}]}
        assert report["residual"] is None
        assert report["flagged"] is False

    def test_flux_check(self, runner, tmp_path):
        csv_path = str(tmp_path / "samples.csv")
        report, _ = _run(runner, ['flux-check', '--c', _path('c.json'), '--grid', '0.25:1:4', '--tol', '1e-6',
                                  '--csv', csv_path])
        assert report["max_residual"] < 1e-6
        assert report["passed"] is True
        assert len(report["samples"]) == 4
        assert os.path.exists(csv_path)

    def test_flux_recovery(self, runner):
        report, _ = _run(runner, ['flux-check', '--c', _path('c_linear.json'), '--grid', '0.1:1:10',
                                  '--recover', '1'])
        assert report["recovered"] == pytest.approx([1.0, 1.0], abs=1e-4)

    def test_normalize_series(self, runner):
        report, _ = _run(runner, ['normalize', '--c', _path('c_linear.json'), '--order', '2', '--cap', '6'])
        assert report["w"] == ["1", "5/7", "0"]
        assert report["sign"] == "+1"

    def test_classify(self, runner):
        report, _ = _run(runner, ['classify', '--alpha', _path('alpha_lnf3.json'), '-f', _path('a1.json'),
                                  '--order', '2'])
        assert report["class"] == "LNF3"
        assert report["sign"] == "+1"

    def test_classify_germ_file(self, runner):
        report, _ = _run(runner, ['classify', '--germ', _path('germ_lnf2.json'), '--order', '2'])
        assert report["class"] == "LNF2"
        assert report["sign"] == "-1"

    def test_reports_are_byte_stable(self, runner):
        args = ['decompose', '-f', _path('a1.json'), '--omega', _path('omega_martinet.json'), '--order', '8']
        _, first = _run(runner, args)
        _, second = _run(runner, args)
        assert first == second


class TestVerify:

    @pytest.mark.parametrize("args", [
        ['weights', '-f', 'f4.json'],
        ['milnor', '-f', 'f4.json'],
        ['decompose', '-f', 'a1.json', '--omega', 'omega_martinet.json', '--order', '8'],
        ['normalize', '--c', 'c_linear.json', '--order', '2', '--cap', '6'],
        ['normalize', '-f', 'a1.json', '--omega', 'omega_martinet.json', '--order', '2', '--cap', '6'],
        ['classify', '--alpha', 'alpha_lnf3.json', '-f', 'a1.json', '--order', '2'],
        ['classify', '--germ', 'germ_lnf2.json', '--order', '2'],
        ['flux-check', '--c', 'c.json', '--grid', '0.25:1:4'],
    ])
    def test_round_trip(self, runner, tmp_path, args):
        args = [_path(a) if a.endswith('.json') else a for a in args]
        report, _ = _run(runner, args)
        verified, _ = _run(runner, ['verify', _save(tmp_path, report)])
        assert verified["verified"] is True

    def test_edited_coefficient(self, runner, tmp_path, capsys):
        report, _ = _run(runner, ['decompose', '-f', _path('a1.json'), '--omega', _path('omega.json')])
        report["c"] = [["2"]]
        assert main(['verify', _save(tmp_path, report)]) == 4

    def test_edited_normalizer(self, runner, tmp_path, capsys):
        report, _ = _run(runner, ['normalize', '--c', _path('c_linear.json'), '--order', '2', '--cap', '6'])
        report["phi"]["x"]["terms"][0]["c"] = "2"
        assert main(['verify', _save(tmp_path, report)]) == 4

    def test_truncated_file(self, capsys):
        assert main(['verify', _path('truncated.json')]) == 2

    def test_not_a_report(self, tmp_path, capsys):
        assert main(['verify', _save(tmp_path, {"mu": 4})]) == 2


class TestExitCodes:

    def test_success(self, capsys):
        assert main(['milnor', '-f', _path('f4.json')]) == 0
        assert json.loads(capsys.readouterr().out)["mu"] == 4

    def test_malformed_input(self, capsys):
        assert main(['milnor', '-f', _path('truncated.json')]) == 2

    def test_missing_option(self, capsys):
        assert main(['decompose', '-f', _path('a1.json')]) == 2

    def test_missing_file(self, capsys):
        assert main(['milnor', '-f', _path('no_such_file.json')]) == 2

    def test_precondition(self, capsys):
        assert main(['milnor', '-f', _path('not_quasihomogeneous.json')]) == 3
        error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert "not quasihomogeneous" in error["message"]

    def test_wrong_form_degree(self, capsys):
        assert main(['decompose', '-f', _path('a1.json'), '--omega', _path('a1.json')]) == 2

    def test_tolerance_exceeded(self, capsys):
        assert main(['flux-check', '--c', _path('c_linear.json'), '--grid', '0.5:1:3', '--tol', '1e-30']) == 4

    def test_germ_without_function(self, capsys):
        assert main(['classify', '--germ', _path('germ_missing_f.json')]) == 2

    def test_germ_excludes_split_inputs(self, capsys):
        assert main(['classify', '--germ', _path('germ_lnf2.json'), '-f', _path('a1.json')]) == 2

    def test_normalize_needs_inputs(self, capsys):
        assert main(['normalize', '--order', '2']) == 2
