import json

import pytest

from twomatrix.cli import main, parse_grid, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return [line for line in text.splitlines() if line and not line.startswith("#")]


# -- phase ------------------------------------------------------------------------

def test_phase_case_one(capsys):
    code, out, _ = run(capsys, "phase", "--t", "0", "--tau", "1")
    rep = json.loads(out)
    assert code == 0
    assert rep["case"] == "I" and rep["xi_cr"] == 0.25
    assert rep["alpha"] == pytest.approx(2.81156, abs=1e-5)


def test_phase_multicritical(capsys):
    _, out, _ = run(capsys, "phase", "--t", "-1", "--tau", "1")
    assert json.loads(out)["case"] == "multicritical"


def test_phase_subregion(capsys):
    _, out, _ = run(capsys, "phase", "--t", "-3", "--tau", "1", "--xi", "1")
    assert json.loads(out)["subregion_at_xi"] == "C2b"


@pytest.mark.parametrize("argv", [
    ("phase", "--t", "0", "--tau", "-1"),
    ("phase", "--t", "0", "--tau", "1", "--xi", "0"),
    ("phase", "--bogus"),
    ("nocommand",),
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and "usage error" in err


# -- density ------------------------------------------------------------------------

def test_density_nu1_mass_on_grid(capsys):
    code, out, _ = run(capsys, "density", "--t", "0", "--tau", "1", "--measure", "nu1", "--grid", "-3:3:241")
    lines = out.splitlines()
    rows = csv_rows(out)
    assert code == 0
    assert rows[0] == "coordinate,density" and len(rows) == 242
    mass = float(lines[-1].split(",")[1])
    assert lines[-1].startswith("# mass,") and mass == pytest.approx(1.0, abs=1e-5)


def test_density_sigma_closed_form(capsys):
    _, out, _ = run(capsys, "density", "--measure", "sigma", "--grid", "1:2:2")
    first = csv_rows(out)[1].split(",")
    assert float(first[0]) == 1.0
    assert float(first[1]) == pytest.approx(0.2756644477108960, rel=1e-12)
    # at least 12 significant digits
    assert len(first[1].replace("0.", "", 1)) >= 12


def test_density_mu1_gap(capsys):
    _, out, _ = run(capsys, "density", "--measure", "mu1", "--xi", "0.16", "--grid", "-0.25:0.25:11")
    from twomatrix.spectral_curve import ModelParams, endpoints

    beta = endpoints(ModelParams(0.0, 1.0), 0.16)["beta"][0]
    for row in csv_rows(out)[1:]:
        x, d = map(float, row.split(","))
        if abs(x) < beta:
            assert d == 0.0


def test_density_axis_mismatch(capsys):
    code, _, err = run(capsys, "density", "--measure", "nu1", "--grid", "1i:2i:3")
    assert code == 1 and "real axis" in err


def test_density_mu_needs_xi(capsys):
    code, _, _ = run(capsys, "density", "--measure", "mu2", "--grid", "0:1:3")
    assert code == 1


def test_density_json(capsys):
    _, out, _ = run(capsys, "density", "--measure", "nu2", "--grid", "0.5:1.5:3", "--format", "json")
    rep = json.loads(out)
    assert rep["axis"] == "imaginary" and len(rep["density"]) == 3


def test_density_endpoint_reports_infinity(capsys):
    from twomatrix.spectral_curve import ModelParams, endpoints

    alpha = float(endpoints(ModelParams(0.0, 1.0), 1.0)["alpha"][0])
    _, out, _ = run(capsys, "density", "--measure", "mu1", "--xi", "1", "--grid", f"0:{alpha!r}:3")
    assert csv_rows(out)[-1].endswith(",inf")


# -- zeros --------------------------------------------------------------------------

def test_zeros_single(capsys):
    code, out, _ = run(capsys, "zeros", "--n", "5", "--k", "1")
    assert code == 0 and csv_rows(out) == ["zero", "0"]


def test_zeros_compare(capsys):
    _, out, _ = run(capsys, "zeros", "--t", "0", "--tau", "1", "--n", "40", "--k", "40", "--compare")
    footer = json.loads(out.splitlines()[-1][2:])
    zs = [float(v) for v in csv_rows(out)[1:]]
    assert footer["ks"] < 0.15
    assert len(zs) == 40 and all(a < b for a, b in zip(zs, zs[1:]))


def test_zeros_bad_degree(capsys):
    assert run(capsys, "zeros", "--n", "5", "--k", "6")[0] == 1


# -- verify --------------------------------------------------------------------------

def test_verify_masses(capsys):
    code, out, _ = run(capsys, "verify", "--t", "0", "--tau", "1", "--suite", "masses")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and len(rep["checks"]) == 3
    assert set(rep["checks"][0]) >= {"name", "value", "tolerance", "pass"}


def test_verify_fields(capsys):
    code, out, _ = run(capsys, "verify", "--t", "-2", "--tau", "1", "--suite", "fields")
    assert code == 0 and all(c["pass"] for c in json.loads(out)["checks"])


def test_verify_consistency(capsys):
    code, out, _ = run(capsys, "verify", "--t", "0", "--tau", "1", "--suite", "consistency")
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert code == 0 and checks["s1_s2_identity_at_xi_cr"]["value"] <= 1e-10


def test_verify_failure_exit_code(capsys, monkeypatch):
    import twomatrix.verification as ver

    monkeypatch.setitem(ver.SUITES, "masses", lambda p, **_: [ver.Check("forced", 1.0, 0.0)])
    code, out, _ = run(capsys, "verify", "--suite", "masses")
    assert code == 3 and json.loads(out)["pass"] is False


def test_numerical_failure_exit_code(capsys, monkeypatch):
    import twomatrix.cli as cli
    from twomatrix.errors import PrecisionError

    def boom(*a, **k):
        raise PrecisionError("did not converge")

    monkeypatch.setattr(cli, "compute_recurrence", boom)
    code, _, err = run(capsys, "zeros", "--n", "10")
    assert code == 2 and "did not converge" in err


# -- output -----------------------------------------------------------------------------

def test_output_is_deterministic_and_atomic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["density", "--t", "-2", "--tau", "1", "--measure", "nu3", "--grid", "-2:2:9"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv", "b.csv"]


def test_parse_grid():
    g = parse_grid("-1:1:5")
    assert (g.start, g.stop, g.count, g.imaginary) == (-1.0, 1.0, 5, False)
    assert parse_grid("0.5i:2i:3").imaginary
    for bad in ("1:2", "1:2:1", "2:1:5", "a:b:3", "1i:2:3"):
        with pytest.raises(UsageError):
            parse_grid(bad)
