import json
import os

import numpy as np
import pytest

from bubblelab.cli import main
from bubblelab.config import config_from_dict, parse_kv_text
from bubblelab.errors import ConfigError


def run_cli(argv):
    return main(argv)


def test_parse_kv_text():
    kv = parse_kv_text("a.b = 1.5\n# comment\nc = hello\nd = 1, 2.5\ne = true")
    assert kv == {"a.b": 1.5, "c": "hello", "d": [1, 2.5], "e": True}


def test_parse_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_kv_text("not a pair")


def test_default_config_builds():
    cfg = config_from_dict({})
    assert cfg.J == 16 and cfg.solver == "galerkin"
    assert cfg.params.RT == pytest.approx(1.0, rel=1e-12)


def test_missing_config_file_exit_4(capsys):
    rc = run_cli(["--config", "/nonexistent/path.conf", "equilibrium",
                  "--mass", "1.0"])
    assert rc == 4
    assert "/nonexistent/path.conf" in capsys.readouterr().err


def test_sigma_coercivity_predicate():
    # the bound can only fail for radii below the equilibrium scale: every
    # solvable configuration has R* > 2|sigma|/p_inf, which implies it
    cfg = config_from_dict({"params.sigma": -0.9})
    assert not cfg.params.sigma_coercive_for(0.1)
    assert cfg.params.sigma_coercive_for(2.0)
    from bubblelab.equilibria import solve_equilibrium

    eq = solve_equilibrium(cfg.params, 5.0)
    assert eq.R_star > 2 * 0.9 / cfg.params.p_inf_star
    assert cfg.params.sigma_coercive_for(eq.R_star)


def test_bad_run_values_are_config_errors():
    assert run_cli(["--set", "run.T=-3.0", "equilibrium", "--mass", "5.0"]) == 2
    assert run_cli(["--set", "params.gamma=0.9", "equilibrium",
                    "--mass", "5.0"]) == 2
    assert run_cli(["equilibrium", "--mass", "-1.0"]) == 2


def test_inconsistent_R_g_rejected():
    rc = run_cli(["--set", "params.R_g=1.0", "equilibrium", "--mass", "5.0"])
    assert rc == 2


def test_equilibrium_canonical(capsys):
    rc = run_cli(["equilibrium", "--mass", "5.0265482"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["R_star"] == pytest.approx(1.0, abs=1e-7)
    assert payload["rho_star"] == pytest.approx(1.2, abs=1e-7)


def test_beta_json(capsys):
    rc = run_cli(["beta"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["beta"] == pytest.approx(0.0064, abs=1e-12)
    assert payload["term1"] == pytest.approx(2.03935, abs=1e-4)
    assert "B" in payload


def test_simulate_csv_schema_and_determinism(tmp_path, capsys):
    args = ["--set", "run.T=1.0", "--set", "run.J=8", "simulate",
            "--output-prefix", str(tmp_path / "runA")]
    assert run_cli(args) == 0
    capsys.readouterr()
    args2 = ["--set", "run.T=1.0", "--set", "run.J=8", "simulate",
             "--output-prefix", str(tmp_path / "runB")]
    assert run_cli(args2) == 0
    a = (tmp_path / "runA_galerkin.csv").read_bytes()
    b = (tmp_path / "runB_galerkin.csv").read_bytes()
    assert a == b  # byte-identical for identical (config, seed)
    header = a.decode().splitlines()[0]
    assert header == ("t,R,Rdot,p,mass,E_total,dEdt_fd,diss_rhs,residual,"
                      "dist_manifold,normW")


def test_simulate_both_comparison(tmp_path, capsys):
    args = ["--set", "run.T=1.0", "--set", "run.J=8", "--set", "run.N=96",
            "simulate", "--solver", "both",
            "--output-prefix", str(tmp_path / "dual")]
    assert run_cli(args) == 0
    assert (tmp_path / "dual_galerkin.csv").exists()
    assert (tmp_path / "dual_fd.csv").exists()
    summary = json.loads((tmp_path / "dual_summary.json").read_text())
    assert summary["max_R_gap"] < 1e-4


def test_fit_subcommand(tmp_path, capsys):
    csv = tmp_path / "decay.csv"
    t = np.linspace(0, 25, 2000)
    q = 1e-2 * np.exp(-1.3 * t)
    lines = ["t,quantity"] + [f"{ti:.17g},{qi:.17g}" for ti, qi in zip(t, q)]
    csv.write_text("\n".join(lines) + "\n")
    rc = run_cli(["fit", "--input", str(csv), "--quantity", "quantity"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["rate"] == pytest.approx(1.3, abs=1e-6)


def test_fit_missing_column(tmp_path):
    csv = tmp_path / "x.csv"
    csv.write_text("t,a\n0,1\n1,2\n")
    assert run_cli(["fit", "--input", str(csv), "--quantity", "zzz"]) == 2


def test_spectrum_json(tmp_path, capsys):
    rc = run_cli(["--set", "run.J=8", "spectrum",
                  "--output", str(tmp_path / "spec.json")])
    assert rc == 0
    payload = json.loads((tmp_path / "spec.json").read_text())
    assert payload["kernel_count"] == 1
    assert payload["beta"]["beta"] == pytest.approx(0.0064, abs=1e-12)
    assert payload["root_eig_mismatch"] < 1e-3
    assert payload["spectral_abscissa"] < -0.0064


def test_manifold_csv(tmp_path):
    rc = run_cli(["--set", "run.J=8", "manifold",
                  "--output", str(tmp_path / "man.csv"), "--n-points", "7"])
    assert rc == 0
    rows = (tmp_path / "man.csv").read_text().splitlines()
    assert rows[0] == "alpha,R_ss,rho_ss,rhs_residual"
    assert len(rows) == 8
    residuals = [float(r.split(",")[-1]) for r in rows[1:]]
    assert max(residuals) < 1e-10


def test_sweep(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BUBBLELAB_THREADS", "2")
    rc = run_cli(["--set", "run.T=0.5", "--set", "run.J=4", "--set",
                  "run.N=64", "sweep", "--key", "params.sigma",
                  "--values", "0.05,0.1", "--output-dir", str(tmp_path)])
    assert rc == 0
    made = sorted(os.listdir(tmp_path))
    assert any("sigma_0.05" in f for f in made)
    assert any("sigma_0.1" in f for f in made)


def test_tampered_tolerance_breaks_dual_agreement():
    # with tol = 1e-2 the fd oracle goes sloppy and the dual-solver
    # criterion (and hence verify) must fail
    from bubblelab.verify import _dual_gap, canonical_setup

    sh = canonical_setup(tol=1e-2)
    gap = _dual_gap(sh, 8, 96, 5.0)
    assert gap > 1e-4


def test_config_T_multiple_of_dt_out():
    with pytest.raises(ConfigError):
        config_from_dict({"run.T": 1.03, "run.dt_out": 0.02})
