"""Interferometer model: routing, calibration, intensity readout.

Derived expectations are frozen from independent matrix products (raw
numpy kron pipelines built inline, not the package's operators).
"""
import numpy as np
import pytest

from ghzbeam.elements import block_path, s_waveplate_state
from ghzbeam.mermin import ImperfectionConfig
from ghzbeam.mzim import (
    MeasurementError,
    MzimModel,
    PortIntensities,
    calibrate,
    mzim_unitary,
    phi_sweep,
    read_ports,
)
from ghzbeam.state import (
    TriState,
    apply,
    basis_state,
    expectation,
    ghz_state,
    pauli_string,
    random_state,
)

TWO_PI = 2 * np.pi


def raw_mzim_matrix(phi: float) -> np.ndarray:
    """Independent oracle: hand-built kron product of the bench order."""
    i2 = np.eye(2, dtype=complex)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    p = np.diag([1.0, np.exp(1j * phi)]).astype(complex)
    cz_pp = np.diag([1, 1, 1, 1, 1, 1, -1, -1]).astype(complex)
    cz_pm = np.diag([1, 1, 1, 1, 1, -1, 1, -1]).astype(complex)
    lift_p = lambda m: np.kron(m, np.eye(4, dtype=complex))
    return lift_p(h) @ cz_pm @ cz_pp @ lift_p(p) @ lift_p(h)


def port_probs(amps: np.ndarray) -> tuple[float, float]:
    pr = np.abs(amps) ** 2
    return float(pr[:4].sum()), float(pr[4:].sum())


def test_model_validation():
    with pytest.raises(ValueError):
        MzimModel(bs1_reflectivity=0.0)
    with pytest.raises(ValueError):
        MzimModel(bs2_reflectivity=1.0)
    with pytest.raises(ValueError):
        MzimModel(visibility=1.5)
    ideal = MzimModel.ideal()
    assert (ideal.phi, ideal.bs1_reflectivity, ideal.bs2_reflectivity,
            ideal.visibility) == (0.0, 0.5, 0.5, 1.0)


def test_unitary_matches_raw_oracle():
    for phi in (0.0, 0.3, np.pi, 4.2):
        got = mzim_unitary(MzimModel(phi=phi)).matrix
        assert np.abs(got - raw_mzim_matrix(phi)).max() < 1e-12


def test_parity_routing_for_all_basis_states():
    u = mzim_unitary(MzimModel.ideal())
    for idx in range(8):
        p, pol, mode = (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
        out = apply(u, basis_state(idx))
        probs = port_probs(out.amps)
        assert probs[p ^ pol ^ mode] == pytest.approx(1.0, abs=1e-12)


def test_ghz_routes_entirely_to_port_zero():
    ports = read_ports(MzimModel.ideal(), ghz_state())
    assert ports.i0 == pytest.approx(1.0, abs=1e-12)
    assert ports.i1 == pytest.approx(0.0, abs=1e-12)


def test_odd_parity_basis_state_routes_to_port_one():
    ports = read_ports(MzimModel.ideal(), basis_state("100"))
    assert (ports.i0, ports.i1) == pytest.approx((0.0, 1.0), abs=1e-12)


def test_phase_pi_flips_even_parity_routing():
    # derived: raw matrix at phi=pi sends the even-parity port-0 probe to port 1
    probe = s_waveplate_state("V", path=0)
    out = raw_mzim_matrix(np.pi) @ probe.amps
    assert port_probs(out)[1] == pytest.approx(1.0, abs=1e-12)
    ports = read_ports(MzimModel(phi=np.pi), probe)
    assert ports.i1 == pytest.approx(1.0, abs=1e-12)


def test_path_superposition_splits_evenly():
    s = TriState.normalize([1, 0, 0, 0, 1, 0, 0, 0])
    ports = read_ports(MzimModel.ideal(), s)
    assert (ports.i0, ports.i1) == pytest.approx((0.5, 0.5), abs=1e-12)


def test_lossless_unitarity_of_intensities():
    rng = np.random.default_rng(5)
    for _ in range(200):
        s = random_state(rng)
        m = MzimModel(phi=float(rng.uniform(0, TWO_PI)),
                      bs1_reflectivity=float(rng.uniform(0.1, 0.9)),
                      bs2_reflectivity=float(rng.uniform(0.1, 0.9)),
                      visibility=float(rng.uniform(0, 1)))
        ports = read_ports(m, s)
        assert ports.i0 + ports.i1 == pytest.approx(1.0, abs=1e-12)


def test_contrast_equals_algebraic_parity_expectation():
    rng = np.random.default_rng(17)
    zzz = pauli_string("ZZZ")
    for _ in range(1000):
        s = random_state(rng)
        ports = read_ports(MzimModel.ideal(), s)
        assert ports.contrast() == pytest.approx(expectation(s, zzz), abs=1e-9)


def test_sweep_follows_cosine_squared():
    probe = s_waveplate_state("V", path=0)
    phis = np.linspace(0.0, TWO_PI, 101)
    records = phi_sweep(MzimModel.ideal(), probe, phis)
    for phi, rec in zip(phis, records):
        assert rec.i0 == pytest.approx(np.cos(phi / 2) ** 2, abs=1e-9)
        assert rec.i1 == pytest.approx(np.sin(phi / 2) ** 2, abs=1e-9)


def test_zero_visibility_flattens_the_fringe():
    probe = s_waveplate_state("V", path=0)
    records = phi_sweep(MzimModel(visibility=0.0), probe, np.linspace(0, TWO_PI, 11))
    for rec in records:
        assert (rec.i0, rec.i1) == pytest.approx((0.5, 0.5), abs=1e-12)


def test_visibility_scales_the_contrast():
    ports = read_ports(MzimModel(visibility=0.8), ghz_state())
    assert ports.contrast() == pytest.approx(0.8, abs=1e-12)


def test_read_ports_applies_noise_and_contrast_subtracts_it():
    cfg = ImperfectionConfig(detector_efficiency=0.9, dark_noise=0.05)
    ports = read_ports(MzimModel.ideal(), ghz_state(), noise=cfg)
    assert ports.i0 == pytest.approx(0.9 * 1.0 + 0.05, abs=1e-12)
    assert ports.i1 == pytest.approx(0.05, abs=1e-12)
    assert (ports.b0, ports.b1) == (0.05, 0.05)
    assert ports.contrast() == pytest.approx(1.0, abs=1e-12)


def test_contrast_guards_against_vanishing_intensity():
    with pytest.raises(MeasurementError):
        PortIntensities(i0=1e-14, i1=0.0).contrast()


def test_port_intensities_validation_and_text():
    with pytest.raises(ValueError):
        PortIntensities(i0=-0.1, i1=0.0)
    text = PortIntensities(i0=0.5, i1=0.5, b0=0.0, b1=0.0, phi=1.25).to_text()
    assert text == "I0=0.5 I1=0.5 b0=0 b1=0 phi=1.25"


def test_calibration_even_probe_to_port_zero():
    probe = s_waveplate_state("V", path=0)
    phi_opt = calibrate(MzimModel.ideal(), probe, target_port=0)
    assert min(phi_opt, TWO_PI - phi_opt) < 1e-6


def test_calibration_even_probe_to_port_one_is_pi():
    # derived oracle: dense sweep
    probe = s_waveplate_state("V", path=0)
    phis = np.linspace(0.0, TWO_PI, 10001)
    i1 = [rec.i1 for rec in phi_sweep(MzimModel.ideal(), probe, phis)]
    grid_best = phis[int(np.argmax(i1))]
    assert grid_best == pytest.approx(np.pi, abs=1e-3)
    phi_opt = calibrate(MzimModel.ideal(), probe, target_port=1)
    assert phi_opt == pytest.approx(np.pi, abs=1e-6)


def test_calibration_odd_probe_to_port_one_is_zero():
    odd = TriState.normalize([0, 1, 1, 0, 0, 0, 0, 0])  # odd-parity (P,M) on path 0
    phi_opt = calibrate(MzimModel.ideal(), odd, target_port=1)
    assert min(phi_opt, TWO_PI - phi_opt) < 1e-6


def test_blocking_one_ghz_path_gives_a_calibration_probe():
    probe, discarded = block_path(1, ghz_state())
    assert discarded == pytest.approx(0.5, abs=1e-12)
    assert probe.path_probabilities()[1] == pytest.approx(0.0, abs=1e-12)
    phi_opt = calibrate(MzimModel.ideal(), probe, target_port=0)
    assert min(phi_opt, TWO_PI - phi_opt) < 1e-6


def test_calibration_rejects_two_path_probes():
    with pytest.raises(ValueError):
        calibrate(MzimModel.ideal(), ghz_state(), target_port=0)


def test_calibration_result_matches_grid_oracle_generally():
    probe = TriState.normalize([0.8, 0.1, 0.3, 0.5, 0, 0, 0, 0])
    model = MzimModel(bs1_reflectivity=0.42, bs2_reflectivity=0.57, visibility=0.9)
    phis = np.linspace(0.0, TWO_PI, 8001)
    i0 = [rec.i0 for rec in phi_sweep(model, probe, phis)]
    grid_best = phis[int(np.argmax(i0))]
    phi_opt = calibrate(model, probe, target_port=0)
    delta = abs(phi_opt - grid_best)
    assert min(delta, TWO_PI - delta) < 1e-3
