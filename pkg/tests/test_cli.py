import argparse
import csv
import json
import math
from pathlib import Path

import fixs
import jsf
import pytest
import utils_test_gapcert as utils

from gapcert import cli, constants, exceptions
from gapcert.cli import RunConfig
from gapcert.presets import get_preset


@pytest.mark.parametrize(
    "text, expected",
    [("9.53", 9.53), ("3.033pi", 3.033 * math.pi), ("2*pi", 2.0 * math.pi), ("pi", math.pi)],
)
def test_window(text, expected):
    assert cli._window(text) == pytest.approx(expected, rel=1e-15)


def test_window_rejects_garbage():
    with pytest.raises(argparse.ArgumentTypeError):
        cli._window("threepi")


class TestRunConfig:
    def test_defaults_come_from_preset(self):
        config = RunConfig.from_dict({"command": "h-eval"})
        preset = get_preset(constants.DEFAULT_PRESET)
        assert config.P1 == preset.P1
        assert config.P2 == preset.P2
        assert (config.r, config.M, config.c) == (preset.r, preset.M, preset.c)

    def test_explicit_polynomial_skips_preset(self):
        config = RunConfig.from_dict({"command": "h-eval", "P1": [1, 2]})
        assert config.P1 == (1.0, 2.0)
        assert config.P2 == (0.0,)

    def test_format_key_is_mapped(self):
        config = RunConfig.from_dict({"command": "zeros", "format": "offset"})
        assert config.table_format == "offset"

    def test_random_documents_build(self):
        for _ in range(20):
            document = jsf.JSF(fixs.RUN_CONFIG_SCHEMA).generate()
            config = RunConfig.from_dict(document)
            assert config.command == document["command"]

    @pytest.mark.parametrize("kwargs", [{"r": 0}, {"M": -1}, {"command": "plot"}])
    def test_invalid_values(self, kwargs):
        arguments = {"command": "h-eval", **kwargs}
        with pytest.raises(exceptions.ParamsError):
            RunConfig(**arguments)

    def test_schema_violation(self):
        with pytest.raises(exceptions.SchemaValidationError):
            RunConfig.from_dict({"command": "h-eval", "r": 9})


class TestMain:
    @pytest.fixture(autouse=True)
    def setup_method(self, tmp_path: Path, monkeypatch, capsys, caplog):
        self.tmp_path = tmp_path
        self.capsys = capsys
        self.caplog = caplog
        monkeypatch.setattr(constants, "RESULTS_BASE_FOLDER", tmp_path / "results")

    def report(self):
        return json.loads(self.capsys.readouterr().out)

    def test_h_eval_zero_window(self):
        code = cli.main(["h-eval", "--c", "0", "--p1", "1,2", "--p2", "0.5"])
        assert code == cli.EXIT_OK
        report = self.report()
        assert report["breakdown"]["h"] == 0.0
        assert report["P1"] == [1.0, 2.0]

    def test_h_eval_zero_mollifier(self):
        code = cli.main(["h-eval", "--p1", "0", "--p2", "0"])
        assert code == cli.EXIT_ZERO_MOLLIFIER

    def test_h_eval_other_theta(self):
        code = cli.main(["h-eval", "--theta", "0.3", "--p1", "1", "--p2", "0"])
        assert code == cli.EXIT_CONFIG

    def test_bad_coefficients_exit_two(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["h-eval", "--p1", "1,a"])
        assert err.value.code == 2

    def test_repeat_runs_are_byte_identical(self):
        first = self.tmp_path / "first.json"
        second = self.tmp_path / "second.json"
        args = ["h-eval", "--c", "pi", "--r", "1", "--p1", "1,-1", "--p2", "0.5"]
        assert cli.main(args + ["--out", str(first)]) == cli.EXIT_OK
        assert cli.main(args + ["--out", str(second)]) == cli.EXIT_OK
        assert first.read_bytes() == second.read_bytes()

    def test_flags_override_config_file(self):
        config = self.tmp_path / "run.json"
        config.write_text(
            json.dumps({"command": "h-eval", "r": 1, "c": 1.0, "P1": [1.0], "P2": [0.0]})
        )
        assert cli.main(["h-eval", "--config", str(config), "--c", "0"]) == cli.EXIT_OK
        report = self.report()
        assert report["params"]["c"] == 0.0
        assert report["params"]["r"] == 1

    def test_invalid_config_file(self):
        config = self.tmp_path / "run.json"
        config.write_text("{not json")
        assert cli.main(["h-eval", "--config", str(config)]) == cli.EXIT_CONFIG

    def test_certify_bad_bracket(self):
        args = ["certify", "--r", "1", "--m", "0", "--bracket-lo", "0.1", "--bracket-hi", "0.2"]
        assert cli.main(args) == cli.EXIT_BRACKET

    def test_oracle_constants(self):
        assert cli.main(["oracle", "--suite", "constants"]) == cli.EXIT_OK
        report = self.report()
        assert report["passed"] is True
        assert all(check["passed"] for check in report["checks"])

    def test_zeros(self):
        out = self.tmp_path / "summary.json"
        code = cli.main(["zeros", "--zeros-file", str(utils.FIRST_ZEROS), "--out", str(out)])
        assert code == cli.EXIT_OK
        document = json.loads(out.read_text(encoding="utf-8"))
        assert document["count"] == 99
        assert document == self.report()
        with open(self.tmp_path / "summary_gaps.csv", encoding="utf-8") as stream:
            rows = list(csv.reader(stream))
        assert len(rows) == 100

    def test_zeros_malformed_file(self):
        path = utils.write_lines(self.tmp_path / "z.txt", ["14.1", "abc"])
        assert cli.main(["zeros", "--zeros-file", str(path)]) == cli.EXIT_CONFIG
        assert f"{path}:2" in self.caplog.text

    def test_zeros_needs_file(self):
        assert cli.main(["zeros"]) == cli.EXIT_CONFIG

    def test_zeros_missing_file(self):
        missing = self.tmp_path / "missing.txt"
        assert cli.main(["zeros", "--zeros-file", str(missing)]) == cli.EXIT_CONFIG
