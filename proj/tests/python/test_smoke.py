import json
import math

import numpy as np
import pytest

import qrabi


def test_params_and_hamiltonian():
    p = qrabi.ModelParams(omega=1.0, qubit_splitting=1.0, g2=0.1, a4=3e-4)
    assert p.g_t == pytest.approx(0.25)
    h = qrabi.hamiltonian(p, 10)
    assert h.shape == (22, 22)
    assert np.array_equal(h, h.T)
    levels = np.linalg.eigvalsh(h)
    r = qrabi.solve_spectrum(p, 10, 4)
    assert np.allclose(r.eigenvalues, levels[:4], atol=1e-10)


def test_oscillator_levels():
    p = qrabi.ModelParams(omega=1.0, qubit_splitting=0.0, g2=0.2)
    r = qrabi.solve_spectrum(p, 200, 10, False)
    exact = sorted(math.sqrt(1 + s * 0.8) * (n + 0.5) - 0.5 for s in (1, -1) for n in range(10))[:10]
    assert np.allclose(r.eigenvalues, exact, atol=1e-8)


def test_converged_spectrum_and_parity():
    p = qrabi.ModelParams(g2=0.2, a4=3e-4)
    r = qrabi.converged_spectrum(p, 4)
    assert r.converged
    basis = qrabi.FockSpinBasis(r.cutoff_used)
    assert qrabi.parity_expectation(r.eigenvectors[:, 0], basis) == pytest.approx(1.0)
    assert list(r.parities[:2]) == [1, -1]


def test_instability_is_an_exception():
    p = qrabi.ModelParams(g2=0.3)
    with pytest.raises(qrabi.InstabilityError):
        qrabi.converged_spectrum(p, 4)
    assert issubclass(qrabi.InstabilityError, qrabi.Error)


def test_semiclassical():
    assert qrabi.critical_ratio_exact(0.0) == pytest.approx(1.0)
    assert qrabi.critical_ratio_numeric(0.14) == pytest.approx(qrabi.critical_ratio_exact(0.14), rel=1e-9)
    s = qrabi.minimize_branch(qrabi.scaled_params(0.02, 2.0))
    assert not s.symmetric_phase and s.x_min > 0


def test_qfi_identity():
    p = qrabi.ModelParams(a4=3e-4)
    p.g2 = 1.05 * p.g_t
    opts = qrabi.QfiOptions()
    opts.policy = qrabi.ConvergencePolicy(max_cutoff=1024)
    q = qrabi.qfi_at(p, opts)
    assert abs(4 * q.chi_f - q.fq) / q.fq < 1e-3


def test_wavefunction():
    basis = qrabi.FockSpinBasis(20)
    grid = qrabi.default_position_grid(20, 256)
    wf = qrabi.to_position(basis.vacuum(qrabi.Spin.Down), basis, grid)
    assert wf.norm_check == pytest.approx(1.0, abs=1e-10)
    assert qrabi.observable_x2(basis.vacuum(qrabi.Spin.Down), basis) == pytest.approx(0.5)


def test_ptps_synthetic():
    assert qrabi.ptps_from_gap(lambda g: 0.8 * (1 + g)).time == pytest.approx(math.log(2) / 0.8)


def test_cli(tmp_path):
    out = str(tmp_path / "gap")
    assert qrabi.run_cli(["gap", "--g2-ratio-grid", "0:0.9:4", "--out", out]) == 0
    meta = json.loads((tmp_path / "gap.meta.json").read_text())
    assert meta["exit_code"] == 0
    assert (tmp_path / "gap.csv").read_text().splitlines()[0] == "g2,delta"
    assert qrabi.run_cli(["gap", "--g2-ratio-grid", "0:1:0", "--out", out + "_empty"]) == 2
