import json

from bench import main
from utilities import ExitStatus


def write_config(tmp_path, document):
    config_path = tmp_path / 'experiment.json'
    config_path.write_text(json.dumps(document))
    return str(config_path)


class TestBench:
    def test_list(self, capsys):
        assert main(["list"]) == ExitStatus.OK
        listing = capsys.readouterr().out
        for name in ("alpha-solve", "optomech-sweep", "ising-cool",
                     "rabi-spectrum", "rabi-thermal"):
            assert name in listing

    def test_alpha_solve(self, tmp_path):
        out = tmp_path / 'out'
        assert main(["alpha-solve", "--out", str(out)]) == ExitStatus.OK
        with (out / 'alpha_rabi.json').open() as f:
            document = json.load(f)
        assert document["manifest"]["experiment"] == "alpha-solve"
        assert document["certified"]

    def test_verbose_writes_debug_log(self, tmp_path):
        out = tmp_path / 'out'
        assert main(["alpha-solve", "--out", str(out),
                     "--verbose"]) == ExitStatus.OK
        assert (out / 'debug.log').exists()

    def test_debug_log_follows_configured_directory(self, tmp_path):
        elsewhere = tmp_path / 'elsewhere'
        config = write_config(tmp_path, {
            "experiment": "alpha-solve",
            "output": {"directory": str(elsewhere)}})
        assert main(["alpha-solve", "--config", config,
                     "--verbose"]) == ExitStatus.OK
        assert (elsewhere / 'debug.log').exists()
        assert (elsewhere / 'alpha_rabi.json').exists()

    def test_config_for_other_experiment(self, tmp_path):
        config = write_config(tmp_path, {"experiment": "rabi-thermal"})
        assert main(["alpha-solve", "--config", config, "--out",
                     str(tmp_path)]) == ExitStatus.CONFIG_ERROR

    def test_budget_refusal(self, tmp_path):
        config = write_config(tmp_path, {"experiment": "ising-cool",
                                         "model": {"N": 8}})
        assert main(["ising-cool", "--config", config, "--out",
                     str(tmp_path)]) == ExitStatus.CONFIG_ERROR
        assert not (tmp_path / 'ising_cool.csv').exists()

    def test_malformed_config(self, tmp_path):
        config_path = tmp_path / 'broken.json'
        config_path.write_text('{"experiment": ')
        assert main(["alpha-solve", "--config", str(config_path),
                     "--out", str(tmp_path)]) == ExitStatus.CONFIG_ERROR

    def test_unknown_experiment(self, tmp_path):
        assert main(["dicke-sweep", "--out",
                     str(tmp_path)]) == ExitStatus.CONFIG_ERROR

    def test_bad_threads(self, tmp_path):
        assert main(["alpha-solve", "--threads", "0", "--out",
                     str(tmp_path)]) == ExitStatus.CONFIG_ERROR

    def test_row_failures(self, tmp_path):
        config = write_config(tmp_path, {
            "experiment": "rabi-thermal",
            "model": {"g": [0.1]},
            "numerics": {"nbar_grid": [0.0], "cutoffs": [1, 2]}})
        assert main(["rabi-thermal", "--config", config, "--out",
                     str(tmp_path)]) == ExitStatus.ROW_FAILURES
        with (tmp_path / 'rabi_thermal_g0.1.csv').open() as f:
            assert "InvalidSpecError" in f.read()
