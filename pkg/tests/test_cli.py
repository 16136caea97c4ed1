import contextlib
import csv
import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldlab.cli import EXIT_FAIL, EXIT_OK, EXIT_STRUCTURAL, EXIT_USAGE, load_config_file, main, resolve
from fieldlab.errors import ConfigError

SMALL = ["--m-uv", "1"]


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_check_small_lattice_reports_exact_commutator_failures(capsys):
    code, out, err = run(capsys, "check", *SMALL)
    assert code == EXIT_FAIL
    reports = json.loads(out)
    failed = {r["name"] for r in reports if not r["pass"] and r["details"].get("expect") != "fail"}
    assert failed == {"[phi(x), phi(y)] = 0 exactly", "[pi(x), pi(y)] = 0 exactly"}
    assert "FAIL" in err


def test_check_csv_and_out_file(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, stdout, _ = run(capsys, "check", *SMALL, "--format", "csv", "--out", str(out))
    assert code == EXIT_FAIL
    assert stdout == ""
    table = rows(out.read_text())
    assert table[0] == ["name", "anchor", "deviation", "tol", "pass", "scalar", "tau_scalar", "backend", "config"]
    assert len(table) > 50


def test_check_is_bit_identical_across_runs(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "check", *SMALL, "--out", str(a))
    run(capsys, "check", *SMALL, "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_massless_check_is_structural(capsys):
    code, out, _ = run(capsys, "check", *SMALL, "--mass", "0")
    assert code == EXIT_STRUCTURAL
    assert any(r["details"].get("skipped") for r in json.loads(out))


@pytest.mark.parametrize(
    "args",
    [
        ["check", "--tau", "0"],
        ["check", "--m-ir", "4"],
        ["check", "--mass", "1/2"],
        ["check", "--backend", "dense", "--max-dim", "100"],
        ["check", "--bogus"],
        ["nosuchcommand"],
        ["export", *SMALL, "--site", "7"],
    ],
)
def test_usage_errors(capsys, args):
    assert run(capsys, *args)[0] == EXIT_USAGE


def test_propagator_table(capsys):
    code, out, _ = run(capsys, "propagator", *SMALL)
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == ["dx", "dt", "re", "im", "route", "deviation"]
    body = table[1:]
    assert len(body) == 2 * 3 * 3
    assert {r[4] for r in body} == {"commutator", "direct"}
    assert max(float(r[5]) for r in body) <= 1e-9


def test_propagator_selected_offsets(capsys):
    code, out, _ = run(capsys, "propagator", "--dx", "0", "--dt", "0", "--dt", "1")
    assert code == EXIT_OK
    body = rows(out)[1:]
    assert [(r[0], r[1], r[4]) for r in body] == [
        ("0", "0", "commutator"),
        ("0", "0", "direct"),
        ("0", "1", "commutator"),
        ("0", "1", "direct"),
    ]
    assert float(body[1][2]) == pytest.approx(1.2833333333333334)


def test_propagator_massless_is_a_config_error(capsys):
    assert run(capsys, "propagator", *SMALL, "--mass", "0")[0] == EXIT_USAGE


def test_dispersion_and_histogram(tmp_path, capsys):
    hist = tmp_path / "h.csv"
    code, out, _ = run(capsys, "dispersion", "--histogram-out", str(hist))
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == ["k0", "p0", "E_p", "degeneracy"]
    assert table[1] == ["-4", "-4/3", "5/3", "2"]
    assert rows(hist.read_text()) == [["E", "count"], ["1", "5"], ["4/3", "2"], ["5/3", "2"]]


def test_dispersion_massless_shows_zero_mode(capsys):
    code, out, _ = run(capsys, "dispersion", "--mass", "0")
    assert code == EXIT_OK
    assert ["0", "0", "0", "1"] in rows(out)


def test_commutators(capsys):
    code, out, _ = run(capsys, "commutators", *SMALL)
    assert code == EXIT_OK
    table = rows(out)
    assert table[0] == ["operator", "left", "right", "row", "col", "re", "im"]
    assert {r[0] for r in table[1:]} == {"[a,a_dag]", "[phi,phi]", "[pi,pi]", "[phi,pi]"}


@pytest.mark.parametrize("op", ["phi", "pi", "a", "a_dag", "N", "H", "gamma_dag", "U"])
def test_export(capsys, op):
    code, out, _ = run(capsys, "export", *SMALL, "--operator", op, "--site", "1")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith(f"# {op} ")
    assert lines[1] == "row,col,re,im"
    assert all("np." not in line for line in lines)


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("m-uv: 1\nmass: '1'\ntau: 1\n")
    opts = resolve(str(cfg), {"tau": 2, "n": None})
    assert opts["m_uv"] == 1 and opts["tau"] == 2 and opts["n"] == 1
    code, out, _ = run(capsys, "dispersion", "--config", str(cfg))
    assert code == EXIT_OK
    assert len(rows(out)) == 4


@pytest.mark.parametrize("text", ["mass: 0.8\n", "colour: red\n", "- 1\n- 2\n", "tau: [1, 2]\n", "m_ir: : :\n"])
def test_bad_config_files(tmp_path, text):
    p = tmp_path / "c.yaml"
    p.write_text(text)
    with pytest.raises(ConfigError):
        load_config_file(p)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([1, 3, 5]), st.integers(1, 3))
def test_dispersion_rows_count(m_ir, mass):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(["dispersion", "--m-ir", str(m_ir), "--m-uv", "1", "--mass", str(mass)])
    assert code == EXIT_OK
    assert len(rows(buf.getvalue())) == m_ir + 1


def test_version(capsys):
    assert run(capsys, "--version")[0] == EXIT_OK
