import json
import subprocess
import sys

import pytest

from jscc.cli import parse_and_run
from jscc.spectra import JointSpectrum, Spectrum, ambient_spectrum

BASE = {
    "q": 2, "n": 4, "l": 4, "m": 4,
    "source": {"kind": "iid", "p": [0.9, 0.1]},
    "channel": {"kind": "bsc", "param": 0.05},
    "code": {"kind": "uniform"},
    "quant": {"preset": "channel-coding"},
    "gamma": 0.1,
}


@pytest.fixture
def config(tmp_path):
    def write(**changes):
        data = dict(BASE, **changes)
        path = tmp_path / "c.json"
        path.write_text(json.dumps(data))
        return str(path)

    return write


def run(argv, capsys):
    code = parse_and_run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_happy_path(config, tmp_path, capsys):
    out_path = tmp_path / "r.csv"
    code, _, err = run(["simulate", "--config", config(), "--seed", "7", "--trials", "100000",
                        "--out", str(out_path)], capsys)
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("n,l,m,q,rate,gamma,channel,param,trials,seed,eps_map")
    assert lines[1].split(",")[8:10] == ["100000", "7"]
    assert "wrote" in err


def test_repeated_runs_byte_identical(config, tmp_path, capsys):
    path = config(sweep={"gamma": [0.1, 0.3]})
    outs = []
    for threads in ["1", "3", "1"]:
        out = tmp_path / f"r{len(outs)}.json"
        code, _, _ = run(["sweep", "--config", path, "--trials", "3000", "--threads", threads,
                          "--format", "json", "--out", str(out), "--quiet"], capsys)
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_missing_config_exit_2(tmp_path, capsys):
    missing = tmp_path / "absent.json"
    code, _, err = run(["simulate", "--config", str(missing)], capsys)
    assert code == 2
    assert str(missing) in err
    assert err.count("\n") == 1


def test_spectrum_over_budget_exit_3(config, capsys):
    code, _, err = run(["spectrum", "--config", config(n=30, l=30, m=30)], capsys)
    assert code == 3
    assert "16777216" in err
    assert err.count("\n") == 1


def test_budget_flag(config, capsys):
    code, _, err = run(["spectrum", "--config", config(), "--budget", "8"], capsys)
    assert code == 3 and "budget is 8" in err


def test_usage_errors_exit_1(config, capsys):
    assert run(["bogus"], capsys)[0] == 1
    assert run(["simulate"], capsys)[0] == 1
    assert run(["simulate", "--config", config(), "--seed", "-4"], capsys)[0] == 1
    assert run(["simulate", "--config", config(), "--format", "xml"], capsys)[0] == 1
    assert run(["simulate", "--config", config(), "--preset", "jscc-default"], capsys)[0] == 1


def test_invalid_config_lists_all_problems(config, capsys):
    path = config(q=4, channel={"kind": "dmc", "matrix": [[0.5, 0.5], [0.5, 0.49]]}, colour=1)
    code, _, err = run(["bound", "--config", path], capsys)
    assert code == 2
    assert "not prime" in err and "row 1" in err and "colour" in err
    assert err.count("\n") == 1


def test_seed_override_validated_by_schema(config, capsys):
    code, _, _ = run(["simulate", "--config", config(), "--seed", str(2**64)], capsys)
    assert code == 1


def test_ambient_spectrum_output(config, capsys):
    code, out, _ = run(["spectrum", "--config", config(), "--ambient"], capsys)
    assert code == 0
    assert Spectrum.from_csv(out) == ambient_spectrum(4, 2)


def test_code_spectrum_json(config, capsys):
    code, out, _ = run(["spectrum", "--config", config(code={"kind": "identity"}), "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)
    assert all(r["type_counts_in"] == r["type_counts_out"] for r in rows)
    code, out, _ = run(["spectrum", "--config", config(code={"kind": "identity"})], capsys)
    J = JointSpectrum.from_csv(out)
    assert J.total() == 1


def test_goodness_reports_bits(config, capsys):
    code, out, _ = run(["goodness", "--config", config(code={"kind": "identity"}), "--format", "json"], capsys)
    assert code == 0
    row = json.loads(out)
    assert row["log_rate_bits"] == pytest.approx(row["log_rate"] / 0.6931471805599453)
    code, out, _ = run(["goodness", "--config", config()], capsys)
    assert out.splitlines()[1].split(",")[4:7] == ["1", "1", "1.0"]


def test_sampled_goodness_reading(config, capsys):
    code, out, _ = run(["goodness", "--config", config(goodness="sampled"), "--format", "json"], capsys)
    assert code == 0
    row = json.loads(out)
    assert row["reading"] == "sampled" and row["max_alpha"] >= 1


def test_alpha_table(config, capsys):
    code, out, _ = run(["alpha", "--preset", "channel-coding"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "type_counts_in,type_counts_out,alpha_num,alpha_den"


def test_bound_and_preset_list(capsys):
    code, out, _ = run(["bound", "--preset", "jscc-default", "--format", "json"], capsys)
    assert code == 0
    row = json.loads(out)[0]
    assert row["bound_rhs"] == pytest.approx(row["bound_prob"] + row["bound_exp"])
    code, out, _ = run(["preset-list"], capsys)
    assert [line.split("\t")[0] for line in out.splitlines()] == [
        "channel-coding", "source-coding", "jscc-default"
    ]


def test_timing_flag_fills_runtime(capsys):
    _, out, _ = run(["simulate", "--preset", "channel-coding", "--trials", "50"], capsys)
    assert out.splitlines()[1].split(",")[19] == ""
    _, out, _ = run(["simulate", "--preset", "channel-coding", "--trials", "50", "--timing"], capsys)
    assert float(out.splitlines()[1].split(",")[19]) > 0


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "jscc.cli", "preset-list", "--format", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert set(json.loads(proc.stdout)) == {"channel-coding", "source-coding", "jscc-default"}
