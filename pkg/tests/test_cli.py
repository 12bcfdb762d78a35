import json

import pytest

from skinlayer import cli


@pytest.fixture(autouse=True)
def _no_env(monkeypatch):
    monkeypatch.delenv("SKINLAYER_OUT", raising=False)


def _args(*argv):
    return cli.build_parser().parse_args(list(argv))


def test_defaults_and_precedence(tmp_path, monkeypatch):
    cfg = cli.load_config(_args("rates"))
    assert cfg.deltas == (0.08, 0.04, 0.02, 0.01) and cfg.modes == (1, 2, 3)
    assert (cfg.R, cfg.R_out, cfg.omega, cfg.eps_r) == (1.0, 2.0, 1.0, 1.0)
    ini = tmp_path / "run.ini"
    ini.write_text("[problem]\nomega = 1.5\n[sweep]\nmodes = 2, 3\ndeltas = 0.1 0.05 0.02 0.01\n"
                   "[run]\nout = from-file\n")
    cfg = cli.load_config(_args("rates", "--config", str(ini), "--modes", "1"))
    assert cfg.omega == 1.5 and cfg.modes == (1,) and cfg.deltas[0] == 0.1
    assert cfg.out == "from-file"
    monkeypatch.setenv("SKINLAYER_OUT", str(tmp_path / "env"))
    cfg = cli.load_config(_args("rates", "--config", str(ini), "--out", "flag"))
    assert cfg.out == str(tmp_path / "env")


def test_validation_errors(tmp_path, capsys):
    assert cli.main(["rates", "--delta", ""]) == 2
    assert "delta list is empty" in capsys.readouterr().err
    assert cli.main(["rates", "--orders", "5"]) == 2
    assert cli.main(["rates", "--delta", "0.1,0.05,0.02"]) == 2
    ini = tmp_path / "bad.ini"
    ini.write_text("[problem]\nmu = 2\n")
    assert cli.main(["decay-check", "--config", str(ini)]) == 2
    assert cli.main(["decay-check", "--config", str(tmp_path / "missing.ini")]) == 2


def test_rates_artifacts_and_determinism(tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    argv = ["rates", "--modes", "1", "--orders", "0", "--json"]
    assert cli.main(argv + ["--out", str(out1)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["schema_version"] == 1
    assert abs(summary["slopes"]["0"] - 1.0) <= 0.2
    assert cli.main(argv + ["--out", str(out2)]) == 0
    assert (out1 / "rates_k0.csv").read_bytes() == (out2 / "rates_k0.csv").read_bytes()
    assert (out1 / "rates.gp").read_text().startswith("# gnuplot")
    assert json.loads((out1 / "summary.json").read_text())["passed"] is True


def test_default_rates_four_csvs(tmp_path):
    assert cli.main(["rates", "--out", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.glob("rates_k*.csv")) == [
        f"rates_k{k}.csv" for k in range(4)]
    slopes = json.loads((tmp_path / "summary.json").read_text())["slopes"]
    assert [round(slopes[str(k)]) for k in range(4)] == [1, 3, 3, 4]


def test_breach_gives_nonzero_exit(tmp_path, monkeypatch):
    monkeypatch.setitem(cli.GIBC_WINDOWS, 0, (5.0, 6.0))
    assert cli.main(["rates", "--modes", "1", "--orders", "0", "--out", str(tmp_path)]) == 1


def test_expansion_kind(tmp_path, capsys):
    assert cli.main(["rates", "--kind", "expansion", "--orders", "2", "--out", str(tmp_path)]) == 0
    assert "PASS" in capsys.readouterr().out


@pytest.mark.parametrize("command", ["profiles-check", "symbol-check", "curl-check", "decay-check"])
def test_checks_pass(command, tmp_path, capsys):
    assert cli.main([command, "--out", str(tmp_path), "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["schema_version"] == 1 and summary["passed"] is True


def test_symbol_scan_csv_written(tmp_path):
    assert cli.main(["symbol-check", "--out", str(tmp_path)]) == 0
    header = (tmp_path / "symbol_scan_k3.csv").read_text().splitlines()[0]
    assert header == "k,delta,lambda,family,re,im"
