import math
import os
import pathlib

import numpy as np
import pytest

import polyloc

ROOT = pathlib.Path(os.environ.get("POLYLOC_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))

TRIANGLE = """{
  "sources": {"kind": "bell", "which": "phi+"},
  "povms": {"kind": "entangled", "alpha1": "$a1"},
  "labels": "reference",
  "signs": "F11-F11-H11"
}"""


def test_states_are_valid_density_matrices():
    for rho in (polyloc.bell_state("psi-"), polyloc.noisy_gate_state(0.7, 0.4),
                polyloc.depolarize_bell(0.3), polyloc.separable_cc()):
        m = rho.matrix
        assert m.shape == (4, 4)
        assert np.allclose(m, m.conj().T)
        assert abs(np.trace(m) - 1) < 1e-12
    assert polyloc.bell_state().purity() == pytest.approx(1.0)
    assert polyloc.chsh_quantity(polyloc.bell_state()) == pytest.approx(2.0)
    assert not polyloc.chsh_local(polyloc.bell_state())


def test_povm_completeness():
    basis = polyloc.entangled_basis(0.6)
    total = sum(basis.element(k) for k in range(4))
    assert np.allclose(total, np.eye(4))


def test_distribution_and_evaluation():
    states = [polyloc.bell_state("phi+")] * 3
    labels = polyloc.label_convention("reference", 3)
    povms = [polyloc.relabel_outcomes(polyloc.product_basis(), l) for l in labels]
    p = polyloc.joint_distribution(states, povms)
    assert len(p) == 64
    assert p.values().sum() == pytest.approx(1.0)
    r = polyloc.evaluate(p, ["F17-F11-F11"])
    assert r["s_value"] == pytest.approx(0.5 + math.sqrt(0.5))
    assert r["violated"]
    best = polyloc.search_signs(p)
    assert best["s_value"] >= r["s_value"] - 1e-12
    assert len(best["signs"]) == 3


def test_template_threshold_and_sweep():
    t = polyloc.NetworkTemplate.parse(TRIANGLE)
    x = polyloc.find_threshold(t, "a1", 0.5, 0.99)
    assert x == pytest.approx(0.8913, abs=5e-4)
    rows = polyloc.sweep(t, ["a1:0.5:0.99:11"])
    assert len(rows) == 11
    assert [r["s_value"] > 1 for r in rows] == [r["params"][0] > x for r in rows]
    assert t.evaluate({"a1": 0.95})["violated"]


def test_spec_files_load():
    t = polyloc.NetworkTemplate.load(str(ROOT / "specs" / "noisy_gate.json"))
    assert set(t.referenced_params()) == {"p1", "p2", "a2"}
    c = polyloc.compare_linear(t, {"p1": 1.0, "p2": 1.0, "a2": 0.95})
    assert c["linear_value"] == pytest.approx(math.sqrt(2))


def test_maximize_and_lhv():
    value, arg = polyloc.maximize(lambda v: -(v[0] - 0.3) ** 2, [0.0], [1.0])
    assert value == pytest.approx(0.0, abs=1e-10)
    assert arg[0] == pytest.approx(0.3, abs=1e-5)
    p = polyloc.sample_model_distribution(3, 4, 9)
    assert p.values().sum() == pytest.approx(1.0)
    report = polyloc.run_lhv_suite(n=4, models=50)
    assert report["violations"] == 0


def test_discrepancy_report():
    assert "square" in polyloc.discrepancy_targets()
    r = polyloc.discrepancy_report("square", 11)
    assert r["pass"] and r["scale"] == pytest.approx(4.0)
    known = polyloc.load_known_discrepancies(str(ROOT / "KNOWN_DISCREPANCIES"))
    assert "two-param-orthogonality" in known


def test_errors_become_python_exceptions():
    with pytest.raises(ValueError):
        polyloc.entangled_basis(1.5)
    with pytest.raises(ValueError):
        polyloc.NetworkTemplate.parse('{"sources": {"kind": "warp"}}')
