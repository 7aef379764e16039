import json

import numpy as np
import pytest

from flplate import cli
from flplate.errors import NonconvergentQuadrature
from flplate.io import read_complex_csv, read_config, read_table


def run(*args):
    return cli.main(list(args))


def test_small_figure_grid(tmp_path):
    assert run("--scenario", "figure1", "--nx", "21", "--nt", "5", "--out", str(tmp_path)) == 0
    cols = read_table(tmp_path / "figure1.csv")
    assert list(cols) == ["x", "t", "eta", "phi"]
    assert len(cols["x"]) == 21 * 5
    assert cols["x"][0] == -10 and cols["t"][-1] == 2.0
    # t = 0 row is the Gaussian itself
    assert np.allclose(cols["eta"][:21], np.exp(-cols["x"][:21] ** 2 / 2), atol=1e-12)


def test_csv_conventions(tmp_path):
    run("--scenario", "kernel", "--nt", "3", "--out", str(tmp_path))
    raw = (tmp_path / "kernel.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    first = raw.split(b"\n")[1].split(b",")
    assert float(first[0]) == pytest.approx(1 / 3)
    t, K = read_complex_csv(tmp_path / "kernel.csv")
    assert len(t) == 3 and np.all(np.isfinite(K))
    contour = json.loads((tmp_path / "kernel_contour.json").read_text())
    assert contour["label"] == "deformed-ray" and contour["segments"][0]["type"] == "ray"


def test_zero_scenario_all_zero(tmp_path):
    assert run("--scenario", "zero", "--nx", "11", "--nt", "3", "--out", str(tmp_path)) == 0
    cols = read_table(tmp_path / "zero.csv")
    assert not np.any(cols["eta"]) and not np.any(cols["phi"])


@pytest.mark.parametrize("U", [0.5, 2.0])
def test_imomega_sign_layout(tmp_path, U):
    assert run("--scenario", "imomega", "--U", str(U), "--out", str(tmp_path)) == 0
    c = read_table(tmp_path / "imomega.csv")
    kr, ki, p, m = c["kr"], c["ki"], c["im_omega_plus"], c["im_omega_minus"]
    far = np.hypot(kr, ki) >= 2.0
    D = far & (kr >= 0.25) & (ki < 0)
    # inside D the growth bound forces Im w+ <= 0 (up to the o(1) slack)
    assert np.all(p[D] < 0) and np.all(m[D] > -0.2)
    pred = 0.5 * ki * (4 * kr - 1)
    sel = (np.hypot(kr, ki) >= 2.5) & (np.abs(pred) > 0.5)
    assert np.mean(np.sign(p[sel]) == np.sign(pred[sel])) > 0.98
    assert np.mean(np.sign(m[sel]) == -np.sign(pred[sel])) > 0.98


def test_wellposed_outputs(tmp_path):
    assert run("--scenario", "wellposed", "--nt", "11", "--out", str(tmp_path)) == 0
    summary = json.loads((tmp_path / "wellposed.json").read_text())
    assert summary["max_identity_residual_real"] < 1e-10
    assert 0 < summary["sup_ratio"] < 1


def test_halfline_outputs(tmp_path):
    # a coarse trace grid cannot resolve omega up to k_max = 60
    assert run("--scenario", "halfline", "--nt", "100", "--nx", "11",
               "--out", str(tmp_path)) == cli.EXIT_NUMERICAL
    assert run("--scenario", "halfline", "--nt", "300", "--nx", "11",
               "--out", str(tmp_path)) == 0
    summary = json.loads((tmp_path / "halfline.json").read_text())
    assert summary["closure"] == "given-xxx"
    t, g = read_complex_csv(tmp_path / "halfline_g.csv")
    assert len(t) == 301 and abs(g[0]) < 1e-6
    assert len(read_table(tmp_path / "halfline.csv")["x"]) == 11 * 11


def test_config_files_and_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\n[run]\nscenario = figure1\nnx = 11\nnt = 3\nU = 2\n")
    assert read_config(cfg)["U"] == 2
    js = tmp_path / "run.json"
    js.write_text(json.dumps({"scenario": "figure1", "nx": 11, "nt": 3}))
    env_dir = tmp_path / "env"
    monkeypatch.setenv(cli.OUTPUT_ENV, str(env_dir))
    assert run("--config", str(js)) == 0
    assert (env_dir / "figure1.csv").exists()
    flag_dir = tmp_path / "flag"
    assert run("--config", str(cfg), "--nt", "2", "--out", str(flag_dir)) == 0
    assert len(read_table(flag_dir / "figure1.csv")["x"]) == 22
    c = cli.build_config({"nx": "7"}, {"scenario": "kernel"}, env={})
    assert c.nx == 7 and c.mode == "kernel" and c.out == "."


def test_exit_codes(tmp_path, monkeypatch):
    assert run("--scenario", "figure1", "--nx", "1", "--out", str(tmp_path)) == cli.EXIT_CONFIG
    assert run("--scenario", "figure1", "--mode", "kernel") == cli.EXIT_CONFIG
    assert run("--scenario", "halfline", "--profile", "hinge2", "--nt", "10",
               "--out", str(tmp_path)) == cli.EXIT_CONFIG
    assert run("--config", str(tmp_path / "missing.json")) == cli.EXIT_IO
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run("--scenario", "kernel", "--out", str(blocker / "sub")) == cli.EXIT_IO

    def boom(cfg, out):
        raise NonconvergentQuadrature("forced")
    monkeypatch.setitem(cli.RUNNERS, "kernel", boom)
    assert run("--scenario", "kernel", "--out", str(tmp_path)) == cli.EXIT_NUMERICAL


def test_bad_config_values(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nx = many\n")
    assert run("--config", str(bad)) == cli.EXIT_CONFIG
    bad.write_text("colour = blue\n")
    assert run("--config", str(bad)) == cli.EXIT_CONFIG
    bad.write_text("just words\n")
    assert run("--config", str(bad)) == cli.EXIT_CONFIG


def test_nonlocal_with_state_file(tmp_path):
    from flplate.nonlocal_form import SurfaceState
    SurfaceState.rest(np.linspace(-5, 5, 51)).to_csv(tmp_path / "s.csv")
    assert run("--scenario", "nonlocal", "--state", str(tmp_path / "s.csv"),
               "--out", str(tmp_path)) == 0
    res = json.loads((tmp_path / "nonlocal.json").read_text())
    assert res["beam_max"] == 0 and max(res["global_relation"]) == 0
