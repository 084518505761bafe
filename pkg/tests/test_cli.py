import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochbridge import cli
from stochbridge.experiments import EXPERIMENTS

NAMES = {
    "kinetics-equilibrium", "kinetics-jump", "emitter-relax", "emitter-lineshape", "purcell",
    "kac-crossover", "kac-mc-vs-pde", "nelson-sample", "dirac-dispersion", "chiral-verbatim", "te-mass",
}

# A / (e - 1) at A = 100, mpmath 30 digits
PLANCK_100 = 58.1976706869326424385002005109


def _raw(experiment, seed=1, **params):
    return {"experiment": experiment, "seed": str(seed), **{k: str(v) for k, v in params.items()}}


# ------------------------------------------------------------------ list


def test_catalog_names_and_order():
    cat = cli.list_experiments()
    names = [e["name"] for e in cat]
    assert len(names) == 11 and set(names) == NAMES
    assert names == sorted(names)
    assert cat == cli.list_experiments()
    assert all(len(e["anchors"]) >= 1 and e["description"] for e in cat)


def test_list_command_prints_catalog(capsys):
    assert cli.main(["list"]) == 0
    assert [e["name"] for e in json.loads(capsys.readouterr().out)] == sorted(NAMES)


# -------------------------------------------------------------- validate


def test_validate_reports_cfl():
    raw = _raw("kac-mc-vs-pde", c=1.0, lam=1.0, n_walkers=100, t_end=1.5, dx=0.01, dt=0.015)
    problems = cli.validate(raw)
    assert len(problems) == 1 and "CFL" in problems[0] and "1.5" in problems[0]


def test_validate_empty_config_lists_missing_keys():
    problems = cli.validate({})
    assert "missing required key: experiment" in problems
    assert "missing required key: seed" in problems


def test_validate_lists_every_missing_parameter():
    problems = cli.validate({"experiment": "kac-mc-vs-pde"})
    missing = sorted(p.split(": ")[1] for p in problems if p.startswith("missing"))
    assert missing == ["c", "lam", "n_walkers", "seed", "t_end"]


def test_validate_valid_config_is_empty():
    assert cli.validate(_raw("kinetics-equilibrium", x=1, A=100)) == []
    assert cli.validate(_raw("nelson-sample", omega=1, n_particles=10, t_end=1.0)) == []


@pytest.mark.parametrize(
    "raw, fragment",
    [
        (_raw("warp-drive"), "unknown experiment"),
        (_raw("purcell", wavelength_over_n=1, Q=1e4, V=1, Qfactor=3), "unknown key"),
        (_raw("purcell", wavelength_over_n=1, Q=-1, V=1), "Q: must be > 0"),
        (_raw("purcell", wavelength_over_n=1, Q=1e4, V=1, xi=1.5), "xi: must be <= 1.0"),
        (_raw("kinetics-jump", x=1, A=1, n_events=2.5), "cannot parse"),
        (_raw("kinetics-equilibrium", x=1, A=1, form="bogus"), "form"),
        ({"experiment": "purcell", "seed": "-4"}, "seed"),
        (_raw("emitter-relax", gamma=1, N_th=1, dt=0.1), "stability"),
        (_raw("nelson-sample", omega=1, n_particles=10, t_end=1.0, dt=0.02), "drift step"),
        (_raw("dirac-dispersion", ks="0.3", mus="0"), "commensurate"),
        (_raw("chiral-verbatim", lam=0.5, mu=1, t_end=20), "domain"),
    ],
)
def test_validate_violations(raw, fragment):
    assert any(fragment in p for p in cli.validate(raw))


# -------------------------------------------------------------------- run


def test_kinetics_equilibrium_run(tmp_path):
    cfg = cli.build_config({**_raw("kinetics-equilibrium", x=1, A=100), "output_dir": str(tmp_path)})
    manifest = cli.run(cfg)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["results"]["fixed_point"] == pytest.approx(PLANCK_100, rel=1e-12)
    assert summary["results"]["converged"] is True
    for form in summary["results"]["forms"].values():
        assert form["N_final"] == pytest.approx(PLANCK_100, rel=1e-6)
    files = {a["file"] for a in manifest["artifacts"]}
    assert files == {"summary.json", "trajectory_bose_two_process.csv", "trajectory_einstein_three_process.csv"}
    assert (tmp_path / "manifest.json").exists()
    header = (tmp_path / "trajectory_bose_two_process.csv").read_text().splitlines()[0]
    assert header == "t,N"


def test_formats_select_outputs(tmp_path):
    cfg = cli.build_config({**_raw("purcell", wavelength_over_n=1, Q=1e4, V=1), "output_dir": str(tmp_path), "formats": "csv"})
    cli.run(cfg)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["manifest.json", "xi_scan.csv"]


def test_csv_uses_twelve_digits(tmp_path):
    cfg = cli.build_config({**_raw("purcell", wavelength_over_n=1, Q=1e4, V=1), "output_dir": str(tmp_path)})
    cli.run(cfg)
    last = (tmp_path / "xi_scan.csv").read_text().splitlines()[-1]
    assert last == "1,759.908877318"


def _payload(tmp_path, name, raw, workers):
    cfg = cli.build_config({**raw, "output_dir": str(tmp_path / name)})
    return cli.run(cfg, workers=workers)["payload_sha256"]


@pytest.mark.parametrize(
    "raw",
    [
        _raw("kinetics-jump", seed=5, x=1, A=1, n_events=20000),
        _raw("kac-mc-vs-pde", seed=5, c=1, lam=1, n_walkers=40000, t_end=2, dx=0.02),
        _raw("nelson-sample", seed=5, omega=1, n_particles=40000, t_end=0.4),
        _raw("dirac-dispersion", ks="0, 1", mus="0, 1", t_end=1),
    ],
    ids=lambda r: r["experiment"],
)
def test_payload_deterministic_across_runs_and_workers(tmp_path, raw):
    a = _payload(tmp_path, "a", raw, 1)
    b = _payload(tmp_path, "b", raw, 1)
    c = _payload(tmp_path, "c", raw, 4)
    assert a == b == c


def test_seed_changes_stochastic_payload(tmp_path):
    raw = _raw("kinetics-jump", seed=5, x=1, A=1, n_events=2000)
    assert _payload(tmp_path, "a", raw, 1) != _payload(tmp_path, "b", {**raw, "seed": "6"}, 1)


def test_run_refuses_invalid_config(tmp_path):
    cfg = cli.build_config(
        {**_raw("kac-mc-vs-pde", c=1, lam=1, n_walkers=10, t_end=1.5, dx=0.01, dt=0.015), "output_dir": str(tmp_path / "o")}
    )
    with pytest.raises(cli.ConfigError, match="CFL"):
        cli.run(cfg)
    assert not (tmp_path / "o").exists()


# ------------------------------------------------------------------- main


def test_main_run_with_overrides(tmp_path, capsys):
    conf = tmp_path / "eq.conf"
    conf.write_text("# equilibrium check\nexperiment = kinetics-equilibrium\nseed = 0\nx = 2\nA = 100\n")
    out = tmp_path / "out"
    assert cli.main(["run", str(conf), "--set", "x=1", "--seed", "9", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["seed"] == 9
    assert summary["parameters"]["x"] == 1.0
    assert summary["results"]["fixed_point"] == pytest.approx(PLANCK_100, rel=1e-12)
    assert json.loads(capsys.readouterr().out)["output_dir"] == str(out)


def test_main_unknown_experiment_writes_nothing(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("experiment = warp-drive\nseed = 1\n")
    out = tmp_path / "out"
    assert cli.main(["run", str(conf), "--out", str(out)]) != 0
    record = json.loads(capsys.readouterr().err)
    assert record["error"] == "config" and any("unknown experiment" in v for v in record["violations"])
    assert not out.exists()


def test_main_validate_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.conf"
    good.write_text("experiment = purcell\nseed = 1\nwavelength_over_n = 1\nQ = 1e4\nV = 1\n")
    assert cli.main(["validate", str(good)]) == 0
    assert json.loads(capsys.readouterr().out) == {"valid": True, "violations": []}
    assert cli.main(["validate", str(good), "--set", "xi=2"]) == 1
    assert json.loads(capsys.readouterr().out)["valid"] is False


def test_main_reports_missing_file(tmp_path, capsys):
    assert cli.main(["validate", str(tmp_path / "nope.conf")]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "io"


def test_config_syntax_errors():
    with pytest.raises(cli.ConfigError, match="line 2"):
        cli.parse_config_text("experiment = purcell\nthis line is wrong\n")


# --------------------------------------------------------- serialization


def test_json_floats_have_seventeen_digits():
    assert cli.dumps_json({"a": 0.1}) == '{\n  "a": 0.10000000000000001\n}'
    assert cli.dumps_json([math.nan, 1.5, True, None, "s"]) == '[null, 1.5, true, null, "s"]'
    assert json.loads(cli.dumps_json({"b": {"c": [1, 2.25]}})) == {"b": {"c": [1, 2.25]}}


def test_config_round_trip_example():
    text = "experiment = dirac-dispersion\nseed = 3\nks = 0, 0.5, 1\nmus = 1\nt_end = 2.5\n"
    cfg = cli.parse_config(text)
    assert cfg.parameters["ks"] == (0.0, 0.5, 1.0)
    again = cli.parse_config(cli.serialize_config(cfg))
    assert again == cfg
    assert cli.serialize_config(again) == cli.serialize_config(cfg)


_finite = st.floats(min_value=1e-6, max_value=1.0, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    name=st.sampled_from(sorted(EXPERIMENTS)),
    seed=st.integers(0, 2**64 - 1),
    value=_finite,
    formats=st.sampled_from(["csv", "json", "csv,json", "json, csv"]),
)
def test_config_round_trip_property(name, seed, value, formats):
    exp = EXPERIMENTS[name]
    raw = {"experiment": name, "seed": str(seed), "formats": formats, "output_dir": "out/x"}
    for key, spec in exp.params.items():
        if spec.kind == "floats":
            raw[key] = f"{value!r}, 1.0"
        elif spec.kind == "int":
            raw[key] = str(int(max(2, spec.low or 0)))
        elif spec.kind == "float":
            raw[key] = repr(value)
    raw.pop("form", None)
    cfg = cli.build_config(raw)
    assert cli.parse_config(cli.serialize_config(cfg)) == cfg
