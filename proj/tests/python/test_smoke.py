import math
import os
from pathlib import Path

import numpy as np
import pytest

import lsi_certify as lsi

CONFIGS = Path(os.environ.get("LSI_CONFIGS", Path(__file__).resolve().parents[2] / "configs"))


@pytest.fixture(scope="module")
def gaussian():
    p = lsi.Potential("gaussian", {"scale": 1.0})
    g = lsi.Grid(1, 8.0, 1001)
    return p, g, lsi.Spectrum(p, g)


def test_gap(gaussian):
    _, _, spec = gaussian
    assert abs(lsi.spectral_gap(spec) - 1.0) < 1e-3
    assert spec.eigenvalues[0] == pytest.approx(0.0, abs=1e-10)


def test_heat_semigroup_preserves_mass(gaussian):
    _, g, spec = gaussian
    x = g.coordinates()
    f = 1.0 + np.sin(x)
    w = np.asarray(spec.weights)
    assert np.dot(w, spec.heat_apply(f, 1.0)) == pytest.approx(np.dot(w, f), rel=1e-12)
    # Dirichlet form of x is mu(x'^2) = 1.
    assert lsi.dirichlet_form(spec, x, x) == pytest.approx(1.0, rel=1e-3)


def test_certify(gaussian):
    p, _, spec = gaussian
    rep = lsi.certify(p, spec)
    assert rep["branch"] == "log-concave"
    assert rep["C_certified"] == 2.0
    assert rep["sound"]


def test_converse(gaussian):
    _, _, spec = gaussian
    out = lsi.converse(spec, [0.0], 0.25, 0.25)
    assert out["problem"]["b"] == pytest.approx(2 * math.sqrt(2), abs=1e-3)
    assert min(out["u"]) > 0
    assert out["coercivity"]["passed"]


def test_errors_and_run(tmp_path):
    with pytest.raises(ValueError):
        lsi.Potential("no-such-family")
    with pytest.raises(ValueError):
        lsi.Grid(1, 8.0, 2)
    assert lsi.run("spectrum", str(CONFIGS / "double_well.cfg"), str(tmp_path / "dw")) == 0
    assert (tmp_path / "dw" / "report.json").exists()
    assert lsi.run("converse", str(CONFIGS / "converse_weak.cfg"), str(tmp_path / "weak")) == 3
