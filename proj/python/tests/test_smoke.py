import json
import math

import numpy as np
import pytest

import myxo


def test_grid():
    g = myxo.AngularGrid(3)
    assert len(g) == 6
    assert g.reversal_partner(4) == 1
    assert g.group_of(4) == myxo.Group.Plus
    assert g.alignment_midpoint(1, 2) is None
    assert np.allclose(g.angles(), [(k - 3) * math.pi / 3 for k in range(6)])


def test_uniform_state_is_stationary():
    g = myxo.AngularGrid(21)
    for cs in (myxo.CrossSection.Maxwellian, myxo.CrossSection.Rod):
        t = myxo.KernelTables(g, cs)
        q = myxo.collision_operator(t, np.full(len(g), 1 / (2 * math.pi)))
        assert np.max(np.abs(q)) < 1e-13


def test_integrate_conserves_mass():
    g = myxo.AngularGrid(51)
    t = myxo.KernelTables(g, myxo.CrossSection.Rod)
    f = myxo.make_initial(g, myxo.ScenarioSpec())
    out = myxo.integrate(t, f, dt=0.05, t_end=5.0, snapshot_stride=10)
    masses = [r["total_mass"] for r in out["records"]]
    assert out["states"].shape == (len(out["records"]), len(g))
    assert max(abs(m - masses[0]) for m in masses) < 1e-12
    assert out["records"][-1]["variance"] < out["records"][0]["variance"]


def test_w2_circle():
    assert myxo.w2_circle([0.0], [1.0], [0.5], [1.0]) == pytest.approx(0.5)
    assert myxo.w2_circle([3.0], [1.0], [-3.0], [1.0]) == pytest.approx(2 * math.pi - 6.0)


def test_macro_and_kinetic():
    x = (np.arange(50) + 0.5) / 50
    rp = 0.6 + 0.2 * np.sin(2 * np.pi * x)
    rm = 0.4 + 0.1 * np.cos(2 * np.pi * x)
    ph = np.pi / 3 + 0.1 * np.sin(2 * np.pi * x)
    macro = myxo.run_macro(rp, rm, ph, t_end=0.2)
    t = myxo.KernelTables(myxo.AngularGrid(21), myxo.CrossSection.Maxwellian)
    kin = myxo.run_kinetic(t, rp, rm, ph, knudsen=0.05, t_end=0.2)
    assert np.sum(macro["rho_plus"]) == pytest.approx(np.sum(rp))
    assert myxo.l1_moment_discrepancy(macro, kin) < 0.1


def test_config_errors():
    with pytest.raises(myxo.ConfigError, match="unknown key"):
        myxo.validate_config('{"integration": {"dtt": 0.1}}')


def test_run_config(tmp_path):
    cfg = {"grid": {"n": 21}, "integration": {"dt": 0.1, "t_end": 1.0}}
    meta = myxo.run_config(json.dumps(cfg), tmp_path / "run")
    assert meta["steps"] == 10
    assert (tmp_path / "run" / "timeseries.csv").exists()
    assert json.loads((tmp_path / "run" / "meta.json").read_text())["steps"] == 10
