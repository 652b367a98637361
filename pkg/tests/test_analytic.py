import numpy as np
import pytest
from scipy.integrate import quad

from photodet.analytic import (
    c_steady,
    emission_profile,
    gain,
    nd_slope,
    p_abs,
    p_abs_maximizer,
    p_abs_overlap,
    photon_spectrum,
    reflection,
    transmission,
)
from photodet.model import ModelParams

BASE = ModelParams()


def test_p_abs_reference_values():
    assert p_abs(BASE) == pytest.approx(10 / 11, abs=1e-15)
    assert p_abs(ModelParams(gamma2=0.0)) == 0.0
    assert abs(p_abs(ModelParams(delta=1e6))) < 1e-9
    with pytest.raises(ValueError):
        p_abs(ModelParams(gamma1=0.0, gamma2=0.0))


def test_p_abs_detuned_form():
    # detuned value equals the resonant form with kappa -> kappa - 2i delta
    p = ModelParams(delta=3.0)
    g = p.gamma1 + p.gamma2
    explicit = (4 * p.gamma1 * p.gamma2 / g) * (g + p.kappa) / (
        (g + p.kappa) ** 2 + 4 * p.delta**2
    )
    assert p_abs(p) == pytest.approx(explicit, rel=1e-14)


def test_p_abs_stays_in_unit_interval():
    rng = np.random.default_rng(41)
    for _ in range(10_000):
        p = ModelParams(
            kappa=float(rng.uniform(0, 5)),
            gamma1=float(rng.uniform(0, 5)),
            gamma2=float(rng.uniform(0, 5)),
            delta=float(rng.uniform(-5, 5)),
        )
        if p.gamma1 + p.gamma2 == 0:
            continue
        v = p_abs(p)
        assert 0.0 <= v <= 1.0


def test_maximizer():
    assert p_abs_maximizer(1.0, 0.0) == pytest.approx(1.0)
    gstar = p_abs_maximizer(1.0, 0.2)
    assert gstar == pytest.approx(np.sqrt(1.2), rel=1e-14)
    center = p_abs(ModelParams(gamma1=gstar))
    for eps in (-1e-3, 1e-3):
        assert p_abs(ModelParams(gamma1=gstar + eps)) < center
    # near-lossless cavity pushes the maximum toward one
    tiny = ModelParams(kappa=1e-3, gamma1=p_abs_maximizer(1.0, 1e-3))
    assert p_abs(tiny) > 0.999


def test_transmission_and_reflection():
    p = BASE
    # matched rates on resonance: full transmission, no reflection
    assert transmission(-p.delta, p) == pytest.approx(1.0)
    assert abs(reflection(-p.delta, p)) < 1e-15
    rng = np.random.default_rng(43)
    w = rng.uniform(-40, 40, size=100)
    total = np.abs(transmission(w, p)) ** 2 + np.abs(reflection(w, p)) ** 2
    assert np.max(np.abs(total - 1.0)) < 1e-12
    # peak transmission probability
    q = ModelParams(gamma2=2.5)
    peak = abs(transmission(-q.delta, q)) ** 2
    assert peak == pytest.approx(4 * q.gamma1 * q.gamma2 / (q.gamma1 + q.gamma2) ** 2)


def test_photon_spectrum():
    p = BASE
    norm = sum(
        quad(lambda w: abs(photon_spectrum(w, p)) ** 2, lo, hi, epsabs=1e-10, limit=200)[0]
        for lo, hi in ((-np.inf, 0.0), (0.0, np.inf))
    )
    assert abs(norm - 1.0) < 1e-8
    assert abs(photon_spectrum(0.0, p)) ** 2 == pytest.approx(2 / (np.pi * p.kappa))
    half = abs(photon_spectrum(p.kappa / 2, p)) ** 2
    assert half == pytest.approx(1 / (np.pi * p.kappa))  # FWHM equals kappa
    with pytest.raises(ValueError):
        emission_profile(ModelParams(kappa=0.0))


def test_overlap_identity():
    assert abs(p_abs_overlap(BASE) - 10 / 11) < 1e-6
    detuned = ModelParams(delta=3.0)
    assert abs(p_abs_overlap(detuned) - p_abs(detuned)) < 1e-6
    assert p_abs_overlap(ModelParams(gamma2=0.0)) < 1e-9


def test_steady_amplitude_slope_and_gain():
    assert c_steady(BASE) == pytest.approx(-20 / 11, abs=1e-14)
    assert abs(c_steady(ModelParams(Delta=1e7))) < 1e-6
    with pytest.raises(ValueError):
        c_steady(ModelParams(Gamma=0.0))
    assert nd_slope(BASE) == pytest.approx(40 / 11, abs=1e-14)
    assert gain(ModelParams(), 11.0) == pytest.approx(44.0)
    with pytest.raises(ValueError):
        gain(ModelParams(), -1.0)
