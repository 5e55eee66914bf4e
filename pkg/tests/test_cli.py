import json
import math

import numpy as np
import pytest

from quantclock.cli import main, parse_config, run
from quantclock.errors import ConfigError
from quantclock.pricing import PricingInput, black_scholes

MINIMAL_SIM = """
[run]
command = simulate
seed = 42
n = 200
format = csv

[clock]
quantile = arcsine
driver = gamma
theta = 1.0
t = 1.0
"""


def test_parse_minimal_simulate():
    cfg = parse_config(MINIMAL_SIM)
    assert cfg.command == "simulate"
    assert cfg.seed == 42
    assert cfg.sections["clock"]["quantile"] == "arcsine"


def test_parse_rejects_unknown_keys():
    bad = MINIMAL_SIM + "\n[clock]\n" if False else MINIMAL_SIM.replace(
        "[clock]", "[clock]\nfoo = 1"
    )
    with pytest.raises(ConfigError, match="foo"):
        parse_config(bad)


def test_parse_rejects_unknown_section():
    with pytest.raises(ConfigError, match="mystery"):
        parse_config(MINIMAL_SIM + "\n[mystery]\nx = 1\n")


def test_parse_requires_seed():
    text = MINIMAL_SIM.replace("seed = 42\n", "")
    with pytest.raises(ConfigError, match="seed"):
        parse_config(text)


def test_parse_rejects_bad_command():
    with pytest.raises(ConfigError):
        parse_config("[run]\ncommand = dance\nseed = 1\n")


def test_parse_rejects_nonpositive_n():
    with pytest.raises(ConfigError):
        parse_config("[run]\ncommand = simulate\nseed = 1\nn = 0\n")


def test_parse_cgmy_design_route():
    text = """
[run]
command = design
seed = 3

[design]
preset = cgmy
alpha = 0.35
g = 3.0
m = 5.0
cgmy_v_variant = paper
"""
    cfg = parse_config(text)
    assert cfg.sections["design"]["cgmy_v_variant"] == "paper"


def test_cli_determinism(tmp_path):
    cfgfile = tmp_path / "sim.ini"
    cfgfile.write_text(MINIMAL_SIM)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--config", str(cfgfile), "--out", str(out1)]) == 0
    assert main(["--config", str(cfgfile), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().splitlines()
    assert lines[0] == "sample"
    assert len(lines) == 201


def test_cli_threads_do_not_change_output(tmp_path):
    cfgfile = tmp_path / "sim.ini"
    cfgfile.write_text(MINIMAL_SIM.replace("n = 200", "n = 20000"))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--config", str(cfgfile), "--threads", "1", "--out", str(out1)]) == 0
    assert main(["--config", str(cfgfile), "--threads", "4", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_seed_override_changes_output(tmp_path):
    cfgfile = tmp_path / "sim.ini"
    cfgfile.write_text(MINIMAL_SIM)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--config", str(cfgfile), "--out", str(out1)]) == 0
    assert main(["--config", str(cfgfile), "--seed", "7", "--out", str(out2)]) == 0
    assert out1.read_bytes() != out2.read_bytes()


def test_cli_config_error_exit_code(tmp_path):
    cfgfile = tmp_path / "bad.ini"
    cfgfile.write_text("[run]\ncommand = simulate\nseed = 1\nfoo = 2\n")
    assert main(["--config", str(cfgfile)]) == 2
    assert main(["--config", str(tmp_path / "missing.ini")]) == 2


def test_cli_price_degenerate_matches_black_scholes(tmp_path, capsys):
    cfgfile = tmp_path / "price.ini"
    cfgfile.write_text(
        """
[run]
command = price
seed = 9
n = 2000

[price]
route = weighted_bs
model = degenerate
s0 = 100
k = 100
r = 0.0
sigma = 0.2
tau = 1.0
"""
    )
    assert main(["--config", str(cfgfile)]) == 0
    payload = json.loads(capsys.readouterr().out)
    inp = PricingInput(spot=100, strike=100, rate=0.0, sigma=0.2, tau=1.0)
    assert payload["price"] == pytest.approx(black_scholes(inp), rel=1e-12)
    assert payload["schema_version"] == 1
    assert "config_digest" in payload


def test_cli_sample_ggc_json(tmp_path):
    cfgfile = tmp_path / "s.ini"
    cfgfile.write_text(
        """
[run]
command = sample
seed = 4
n = 500
format = json

[ggc]
theta = 1.0
r = degenerate
r_c = 1.0
t = 2.0
"""
    )
    out = tmp_path / "draws.json"
    assert main(["--config", str(cfgfile), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["n"] == 500
    assert len(payload["samples"]) == 500
    # GGC(1, 1) at t = 2 is gamma(2): mean 2
    assert abs(payload["mean"] - 2.0) < 0.3


def test_cli_design_report(tmp_path):
    cfgfile = tmp_path / "d.ini"
    cfgfile.write_text(
        """
[run]
command = design
seed = 5

[design]
preset = nig
alpha = 0.5
delta = 1.0
"""
    )
    out = tmp_path / "design.json"
    assert main(["--config", str(cfgfile), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    # psi_L(w) = (1+w)^(1/2) - 1 + w/2 (1+w)^(-1/2) at w = 1
    assert payload["psi_l"]["1"] == pytest.approx(
        math.sqrt(2.0) - 1.0 + 0.5 / math.sqrt(2.0), rel=1e-9
    )


def test_cli_path_export(tmp_path):
    cfgfile = tmp_path / "p.ini"
    cfgfile.write_text(MINIMAL_SIM.replace("t = 1.0", "t = 1.0\npath = true\ngrid_points = 32"))
    out = tmp_path / "path.csv"
    assert main(["--config", str(cfgfile), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "time,value"
    assert len(lines) == 33
    vals = [float(l.split(",")[1]) for l in lines[1:]]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_cli_verify_quick(tmp_path, capsys):
    cfgfile = tmp_path / "v.ini"
    cfgfile.write_text(
        """
[run]
command = verify
seed = 11
n = 5000

[verify]
n = 5000
checks = deterministic,cftp,pairings
"""
    )
    assert main(["--config", str(cfgfile)]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3


def test_cli_verify_unknown_check(tmp_path):
    cfgfile = tmp_path / "v.ini"
    cfgfile.write_text(
        "[run]\ncommand = verify\nseed = 1\n\n[verify]\nchecks = nonsense\n"
    )
    assert main(["--config", str(cfgfile)]) == 2


def test_run_config_command_override(tmp_path):
    cfg = parse_config(MINIMAL_SIM)
    cfg.command = "price"
    cfg.sections["price"] = {"route": "black_scholes"}
    assert run(cfg) == 0


def test_cli_numeric_error_exit_code(tmp_path):
    # a domain failure inside a module surfaces as the numeric exit code
    cfgfile = tmp_path / "d.ini"
    cfgfile.write_text(
        "[run]\ncommand = design\nseed = 1\n\n[design]\npreset = cgmy\nalpha = 1.5\n"
    )
    assert main(["--config", str(cfgfile)]) == 3


def test_cli_full_battery_untruncated(tmp_path, capsys):
    # the whole catalog through the CLI at desk scale must exit 0
    cfgfile = tmp_path / "v.ini"
    cfgfile.write_text(
        "[run]\ncommand = verify\nseed = 20110811\n\n[verify]\nn = 20000\n"
    )
    assert main(["--config", str(cfgfile)]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == len(__import__("quantclock").battery.BATTERY)
