"""Mode grids, port images, integration, background handling, PGM output."""
import numpy as np
import pytest

from ghzbeam.mermin import output_state
from ghzbeam.render import (
    IntensityImage,
    field_intensity,
    integrate,
    mode_functions,
    render_port,
    sample_circle,
    subtract_background,
    write_composite_pgm,
    write_pgm,
)
from ghzbeam.state import TriState, basis_state, ghz_state, random_state


def test_mode_functions_are_grid_orthonormal():
    x, y, hg01, hg10 = mode_functions(128, 3.0)
    pitch = x[0, 1] - x[0, 0]
    area = pitch * pitch
    assert np.sum(hg01**2) * area == pytest.approx(1.0, abs=1e-12)
    assert np.sum(hg10**2) * area == pytest.approx(1.0, abs=1e-12)
    assert abs(np.sum(hg01 * hg10) * area) < 1e-3


def test_mode_functions_reject_degenerate_grids():
    with pytest.raises(ValueError):
        mode_functions(16, 3.0)
    with pytest.raises(ValueError):
        mode_functions(64, 1.5)  # extent below two waists


def test_hg01_vanishes_on_its_nodal_line():
    img = render_port(basis_state("000"), port=0, n=128, extent=3.0)
    # |0_P 0_M> = HG01 in x polarization: two lobes, zero along y = 0
    mid = img.n // 2
    nodal = img.pixels[mid - 1 : mid + 1, :]
    assert nodal.max() < img.peak() * 1e-3


def test_doughnut_profile_for_non_separable_port_state():
    s = TriState.normalize([1, 0, 0, 1, 0, 0, 0, 0])
    img = render_port(s, port=0, n=256, extent=3.0)
    center = img.pixels[img.n // 2, img.n // 2]
    assert center < 0.01 * img.peak()
    ring = sample_circle(img, radius=1 / np.sqrt(2))
    assert ring.std() / ring.mean() < 0.01
    assert (ring.max() - ring.min()) / ring.mean() < 0.01
    # the ring radius is where the intensity peaks
    assert ring.mean() == pytest.approx(img.peak(), rel=0.01)


def test_zero_amplitude_port_renders_black():
    one_path = TriState.normalize([1, 1, 0, 0, 0, 0, 0, 0])
    img = render_port(one_path, port=1, n=64, extent=3.0)
    assert img.peak() == 0.0
    assert integrate(img) == 0.0


def test_integrated_port_fractions_match_amplitudes():
    rng = np.random.default_rng(42)
    for _ in range(25):
        s = random_state(rng)
        parts = [integrate(render_port(s, port, n=128, extent=3.0)) for port in (0, 1)]
        total = sum(parts)
        p0, p1 = s.path_probabilities()
        assert parts[0] / total == pytest.approx(p0, abs=1e-3)
        assert parts[1] / total == pytest.approx(p1, abs=1e-3)


def test_integral_converges_under_grid_refinement():
    s = TriState.normalize([0.6, 0.2j, -0.4, 0.5, 0.3, 0, 0.2, 0.1])
    coarse = integrate(render_port(s, 0, n=128, extent=3.0))
    fine = integrate(render_port(s, 0, n=256, extent=3.0))
    assert abs(fine - coarse) / fine < 1e-4


def test_rendering_is_quadratic_in_the_amplitudes():
    amps = np.array([0.5, 0.25j, -0.3, 0.1])
    base = field_intensity(amps, n=64, extent=3.0)
    scaled = field_intensity(3.0 * amps, n=64, extent=3.0)
    assert np.allclose(scaled, 9.0 * base, atol=1e-12)


def test_intensity_image_validation():
    with pytest.raises(ValueError):
        IntensityImage(np.full((64, 64), -1.0), 0.1, 3.0, 0)
    with pytest.raises(ValueError):
        IntensityImage(np.zeros((64, 32)), 0.1, 3.0, 0)
    with pytest.raises(ValueError):
        IntensityImage(np.full((64, 64), np.nan), 0.1, 3.0, 0)


def test_subtract_background():
    img = render_port(basis_state("000"), 0, n=64, extent=3.0)
    assert np.allclose(subtract_background(img, 0.0).pixels, img.pixels)
    cleared = subtract_background(img, img.peak())
    assert cleared.peak() == 0.0
    offset = IntensityImage(img.pixels + 0.125, img.pitch, img.extent, img.port)
    restored = subtract_background(offset, 0.125)
    assert np.abs(restored.pixels - img.pixels).max() < 1e-12
    with pytest.raises(ValueError):
        subtract_background(img, -1.0)


def test_pgm_headers_and_payload(tmp_path):
    img = render_port(basis_state("000"), 0, n=64, extent=3.0)
    p8 = write_pgm(img, tmp_path / "a.pgm", bits=8)
    raw = p8.read_bytes()
    assert raw.startswith(b"P5\n64 64\n255\n")
    assert len(raw) == len(b"P5\n64 64\n255\n") + 64 * 64
    assert max(raw[-64 * 64 :]) == 255  # scaled to the frame peak

    p16 = write_pgm(img, tmp_path / "b.pgm", bits=16)
    raw16 = p16.read_bytes()
    assert raw16.startswith(b"P5\n64 64\n65535\n")
    assert len(raw16) == len(b"P5\n64 64\n65535\n") + 2 * 64 * 64

    with pytest.raises(ValueError):
        write_pgm(img, tmp_path / "c.pgm", bits=12)


def test_pgm_zero_image_writes_zeros(tmp_path):
    one_path = TriState.normalize([1, 0, 0, 0, 0, 0, 0, 0])
    img = render_port(one_path, port=1, n=64, extent=3.0)
    p = write_pgm(img, tmp_path / "z.pgm")
    data = p.read_bytes()
    assert set(data[len(b"P5\n64 64\n255\n"):]) == {0}


def test_composite_places_ports_side_by_side(tmp_path):
    s = ghz_state()
    img0 = render_port(s, 0, n=64, extent=3.0)
    img1 = render_port(s, 1, n=64, extent=3.0)
    p = write_composite_pgm(img0, img1, tmp_path / "both.pgm", gap=4)
    assert p.read_bytes().startswith(b"P5\n132 64\n255\n")


def test_ideal_measurement_images_light_up_one_port():
    # after the parity measurement the non-separable state exits a single
    # port as a doughnut; the other port is dark
    out = output_state(ghz_state(), "ZZZ")
    bright = render_port(out, 0, n=128, extent=3.0)
    dark = render_port(out, 1, n=128, extent=3.0)
    assert integrate(dark) < 1e-12
    center = bright.pixels[bright.n // 2, bright.n // 2]
    assert center < 0.01 * bright.peak()
