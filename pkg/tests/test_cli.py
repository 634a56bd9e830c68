import io

import pytest

from obstructa.cli import VERBS, run
from obstructa.examples import example_path

VERB_ARGS = {
    "validate": ["--example", "E2"],
    "bar": ["--example", "E1", "--lmax", "3", "--emax", "1"],
    "cyclic": ["--example", "E2", "--lmax", "3"],
    "sym": ["--example", "E1", "--lmax", "3"],
    "hochschild": ["--example", "E2", "--lmax", "3"],
    "reduced-hochschild": ["--example", "E1", "--lmax", "3", "--emax", "1"],
    "ce": ["--example", "E2", "--lmax", "3"],
    "cyclic-ce": ["--example", "E2", "--lmax", "3"],
    "dual-ce": ["--example", "E1", "--lmax", "3"],
    "bicomplex-check": ["--example", "E3", "--lmax", "3"],
    "bb-complex": ["--example", "E1", "--lmax", "3", "--emax", "1", "--columns", "2,4"],
    "alpha": ["--example", "E4", "--lmax", "3", "--emax", "3", "--kmax", "2"],
    "gamma": ["--example", "E2", "--emax", "5"],
    "mc-check": ["--example", "E3", "--lmax", "4"],
    "vanish": ["--example", "E2", "--lmax", "3", "--samples", "4"],
    "pages": ["--example", "E2", "--lmax", "3"],
}


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return [line.split(" ", 1) for line in text.splitlines()]


def test_every_verb_has_a_case():
    assert set(VERB_ARGS) | {"deform", "example"} == set(VERBS)


@pytest.mark.parametrize("verb", sorted(VERB_ARGS))
def test_verb_passes_with_window_in_every_record(verb):
    code, out, err = call(verb, *VERB_ARGS[verb])
    assert code == 0, err
    lines = records(out)
    assert lines[0][0] == "report" and lines[-1][0] == "result"
    assert lines[-1][1].endswith("ok=true")
    for kind, rest in lines:
        assert f"command={verb}" in rest
        assert all(k in rest for k in ("L_max=", "E_max=", "mode=", "slope="))


def test_gamma_message_and_certificate():
    code, out, _ = call("gamma", "--spec", example_path("E2"), "--emax", "5")
    assert code == 0
    assert "d̂(γ) = 0 within window" in out
    assert "cert_kind=certificate" in out


def test_vanish_on_exact_obstructions_exits_one():
    code, out, err = call("vanish", "--spec", example_path("E3"))
    assert code == 1 and err == ""
    assert "no certificate: all primary obstructions exact" in out
    assert out.splitlines()[-1].endswith("ok=false")


def test_obstructed_maurer_cartan_exits_one():
    code, out, err = call("mc-check", "--example", "E2", "--lmax", "3")
    assert code == 1 and err == ""
    assert 'reason="Maurer-Cartan equation obstructed at T^1e^0" ok=false' in out


def test_example_then_hochschild_through_a_file(tmp_path):
    path = tmp_path / "e2.json"
    assert call("example", "E2", "--out", str(path))[0] == 0
    code, out, _ = call("hochschild", "--spec", str(path), "--emax", "3", "--lmax", "4")
    assert code == 0
    assert any(kind == "homology" for kind, _ in records(out))


def test_deform_output_validates(tmp_path):
    path = tmp_path / "e3b.json"
    code, _, err = call("deform", "--example", "E3", "--lmax", "4", "--out", str(path))
    assert code == 0, err
    code, out, _ = call("validate", "--spec", str(path))
    assert code == 0 and "spec=E3^b" in out


def test_empty_result_set_gives_a_header_only_report():
    code, out, _ = call("bar", "--example", "E2", "--degrees", "50..60")
    assert code == 0
    kinds = [k for k, _ in records(out)]
    assert kinds[0] == "report" and kinds[-1] == "result"
    assert "degree" not in kinds


def test_text_format_is_a_table():
    code, out, _ = call("bar", "--example", "E1", "--lmax", "2", "--emax", "1", "--format", "text")
    assert code == 0
    assert out.startswith("bar on E1\nwindow: L_max=2, E_max=1")
    assert out.rstrip().endswith("result: PASS")


@pytest.mark.parametrize("argv", [
    ["bar", "--example", "E9"],
    ["bar", "--spec", "/nonexistent/spec.json"],
    ["bar", "--example", "E2", "--degrees", "1-2"],
    ["bar", "--example", "E2", "--emax", "x"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_two(argv):
    assert call(*argv)[0] == 2


def test_cell_cap_exits_three(monkeypatch):
    monkeypatch.setenv("OBSTRUCTA_CAP", "10")
    code, _, err = call("bar", "--example", "E2")
    assert code == 3 and "OBSTRUCTA_CAP" in err


def test_clipped_window_refusal_names_the_cell():
    code, _, err = call("hochschild", "--example", "E3", "--lmax", "3", "--no-slope", "--degrees=-3..0")
    assert code == 1 and "d^2 != 0" in err and "[L]*L*L@T^0e^0" in err


@pytest.mark.parametrize("verb", ["bar", "cyclic", "hochschild", "pages", "vanish"])
def test_records_are_byte_identical_across_runs(verb):
    first = call(verb, *VERB_ARGS[verb])[1]
    assert first == call(verb, *VERB_ARGS[verb])[1]
