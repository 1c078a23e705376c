import json

import pytest

from thinflow.cli import main
from thinflow.config import RunConfig


def run(*argv):
    return main(list(argv))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_cfg(tmp_path, **overrides):
    path = tmp_path / "run.yaml"
    RunConfig(**overrides).to_file(path)
    return str(path)


# ---------------------------------------------------------------------------
# parsing, defaults, exit codes

def test_dump_defaults_round_trips(capsys):
    assert run("--dump-defaults") == 0
    text = capsys.readouterr().out
    assert RunConfig.from_yaml(text) == RunConfig()


def test_no_subcommand_is_a_usage_error(capsys):
    assert run() == 3
    assert "subcommand" in capsys.readouterr().err


def test_unknown_subcommand_is_a_usage_error(capsys):
    assert run("frobnicate") == 3


def test_missing_config_file(tmp_path, capsys):
    assert run("kernel", "--config", str(tmp_path / "absent.yaml")) == 3


def test_invalid_config_field(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("geometry:\n  dimension: 3\n", encoding="utf-8")
    assert run("kernel", "--config", str(path)) == 3
    assert "dimension" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("geometry:\n  radius: 22.0\n", encoding="utf-8")
    assert run("kernel", "--config", str(path)) == 3


def test_bad_thread_count(tmp_path):
    assert run("kernel", "--threads", "0", "--out", str(tmp_path)) == 3


# ---------------------------------------------------------------------------
# kernel

def test_kernel_default_config(tmp_path, capsys):
    out = tmp_path / "out"
    assert run("kernel", "--strict", "--out", str(out)) == 0
    report = read_json(out / "decay_report.json")
    assert abs(report["mass_deviation"]) < 1e-6
    assert report["decay_rate_ratio"] == pytest.approx(1.0, abs=0.08)
    header = (out / "kernel_values.csv").read_text().splitlines()[0]
    assert header == "y,value"


def test_kernel_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run("kernel", "--out", str(out1)) == 0
    assert run("kernel", "--out", str(out2)) == 0
    for name in ("kernel_table.json", "kernel_values.csv", "decay_report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_kernel_rejects_short_grid(tmp_path, capsys):
    cfg = write_cfg(tmp_path, R=6.0)
    assert run("kernel", "--config", cfg, "--out", str(tmp_path / "o")) == 2
    assert "QuadratureDivergence" in capsys.readouterr().err


def test_kernel_strict_mass_gate(tmp_path, capsys):
    # R = 16 clears the tail estimate but leaves a few-1e-6 mass defect:
    # fine as a report, a failure under --strict
    cfg = write_cfg(tmp_path, R=16.0)
    out = tmp_path / "o"
    assert run("kernel", "--config", cfg, "--out", str(out)) == 0
    assert abs(read_json(out / "decay_report.json")["mass_deviation"]) > 1e-6
    assert run("kernel", "--config", cfg, "--strict", "--out", str(out)) == 2


# ---------------------------------------------------------------------------
# spectrum

def test_spectrum_smallest_order(tmp_path):
    out = tmp_path / "o"
    cfg = write_cfg(tmp_path, kmax=0)
    assert run("spectrum", "--config", cfg, "--strict", "--out", str(out)) == 0
    report = read_json(out / "spectrum_report.json")
    assert report["eigenspace_sizes"] == [1]
    assert report["gram_identity_deviation"] < 1e-6
    assert report["adjoint_identity_exact"] == {"0": True}
    gram = (out / "gram.csv").read_text().splitlines()
    assert len(gram) == 2  # header + the single entry


def test_spectrum_wide_grid_meets_identity(tmp_path):
    out = tmp_path / "o"
    cfg = write_cfg(tmp_path, R=36.0)
    assert run("spectrum", "--config", cfg, "--strict", "--out", str(out)) == 0
    report = read_json(out / "spectrum_report.json")
    assert report["gram_identity_deviation"] < 1e-5
    assert report["max_eigen_residual"] < 1e-4
    polys = read_json(out / "adjoint_polynomials.json")
    assert len(polys) == 6  # orders 0..5


# ---------------------------------------------------------------------------
# evolve

def test_evolve_default_dipole(tmp_path):
    out = tmp_path / "o"
    assert run("evolve", "--strict", "--out", str(out)) == 0
    report = read_json(out / "evolve_report.json")
    assert report["expected_rate"] == -0.25
    assert abs(report["relative_error"]) < 0.05
    norms = (out / "evolve_norms.csv").read_text().splitlines()
    assert norms[0] == "tau,weighted_l2_norm"
    assert len(norms) == 1 + len(report["taus"])


def test_evolve_rejects_bad_spec(tmp_path):
    assert run("evolve", "--data", "fd-cancelled:0", "--out", str(tmp_path)) == 3
    assert run("evolve", "--data", "wavelet", "--out", str(tmp_path)) == 3
    assert run("evolve", "--taus", "1.0", "--out", str(tmp_path)) == 3


# ---------------------------------------------------------------------------
# branch

def test_branch_trivial_blowup_level(tmp_path):
    out = tmp_path / "o"
    assert run("branch", "--k", "0", "--kind", "blowup", "--out", str(out)) == 0
    report = read_json(out / "branch_report.json")
    assert abs(report["solvability"]["coefficient"]) < 1e-10


def test_branch_global_k1_coefficient(tmp_path):
    out = tmp_path / "o"
    assert run("branch", "--k", "1", "--kind", "global", "--out", str(out)) == 0
    report = read_json(out / "branch_report.json")
    assert report["solvability"]["coefficient"] == pytest.approx(-2.6186,
                                                                 abs=1e-2)


def test_branch_2d_global_k1_roots(tmp_path):
    out = tmp_path / "o"
    cfg = write_cfg(tmp_path, dimension=2, h=0.1, kmax=3)
    assert run("branch", "--k", "1", "--kind", "global", "--config", cfg,
               "--out", str(out)) == 0
    report = read_json(out / "branch_report.json")
    roots = report["roots"]
    assert roots["conditions"] == {"a": True, "b": False, "c": False}
    assert len(roots["roots"]) <= 2
    assert roots["roots"][0]["value"] == pytest.approx(16.0 / 9.0, abs=1e-3)
    assert roots["roots"][0]["multiplicity"] == 2
    assert report["system"]["gamma_star"] == pytest.approx(16.0 / 9.0,
                                                           abs=1e-4)


def test_branch_2d_blowup_k2_reports_continuum(tmp_path):
    out = tmp_path / "o"
    cfg = write_cfg(tmp_path, dimension=2, h=0.1, kmax=3)
    assert run("branch", "--k", "2", "--kind", "blowup", "--config", cfg,
               "--out", str(out)) == 0
    report = read_json(out / "branch_report.json")
    assert "continuum" in report
    assert report["dense_scan"] == {"continuum": True, "count": 0}
    assert (out / "branch_forms.csv").exists()


def test_branch_rejects_negative_k(tmp_path):
    assert run("branch", "--k", "-1", "--out", str(tmp_path)) == 3


# ---------------------------------------------------------------------------
# continue / diagnose

def test_continue_trivial_family(tmp_path):
    out = tmp_path / "o"
    assert run("continue", "--k", "0", "--kind", "blowup",
               "--out", str(out)) == 0
    report = read_json(out / "continue_report.json")
    assert [p["n"] for p in report["profiles"]] == [0.2, 0.1, 0.05]
    assert all(p["alpha"] == 0.0 for p in report["profiles"])
    assert all(p["limit_distance"] == 0.0 for p in report["profiles"])
    assert (out / "profile_blowup_k0_n0p2.csv").exists()
    summary = (out / "branch_summary.csv").read_text().splitlines()
    assert summary[0] == ("n,alpha,beta,interface_radius,zero_count,"
                          "growth_exponent,limit_distance")
    assert len(summary) == 4


def test_diagnose_table(tmp_path):
    out = tmp_path / "o"
    assert run("diagnose", "--strict", "--out", str(out)) == 0
    report = read_json(out / "diagnose_report.json")
    assert report["n_list"] == [0.2, 0.1, 0.05]
    assert report["max_ratio_drift"] < 0.2
    bounds = [row["excluded_bound"] for row in report["rows"]]
    excl = [row["excluded_measure"] for row in report["rows"]]
    assert bounds == sorted(bounds, reverse=True)
    assert excl == sorted(excl, reverse=True)
    header = (out / "diagnose.csv").read_text().splitlines()[0]
    assert header == ("n,l1_error,second_order_ratio,"
                      "excluded_measure,excluded_bound")
