"""Closed-form results for the detection chain.

Every quantity here has an independent simulated counterpart somewhere in
the package; these expressions are the ground truth the numerics are held
against.

Frequency convention: spectral arguments are measured from the photon
carrier, so the photon line is centered at 0 and the molecular resonance
sits at -delta.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .model import ModelParams

__all__ = [
    "SpectralFunction",
    "p_abs",
    "p_abs_maximizer",
    "transmission",
    "reflection",
    "photon_spectrum",
    "transmission_profile",
    "reflection_profile",
    "emission_profile",
    "p_abs_overlap",
    "c_steady",
    "nd_slope",
    "gain",
]


@dataclass(frozen=True)
class SpectralFunction:
    """Complex frequency-domain profile with its center and width metadata."""

    fn: Callable[[np.ndarray], np.ndarray]
    center: float
    width: float
    label: str = ""

    def __call__(self, omega):
        return self.fn(np.asarray(omega, dtype=float))


def p_abs(params: ModelParams) -> float:
    """Probability that the photon shelves the molecule in its final state.

    Re[4 g1 g2 / ((g1+g2)(g1+g2+kappa-2i delta))]; the detuned case is the
    resonant one with kappa -> kappa - 2i delta, real part taken.
    """
    g1, g2, k, d = params.gamma1, params.gamma2, params.kappa, params.delta
    if g1 + g2 == 0:
        raise ValueError("p_abs undefined for gamma1 + gamma2 = 0")
    val = 4.0 * g1 * g2 / ((g1 + g2) * (g1 + g2 + k - 2j * d))
    return float(val.real)


def p_abs_maximizer(gamma2: float, kappa: float) -> float:
    """gamma1 maximizing the absorption probability at fixed gamma2, kappa."""
    if gamma2 <= 0 or kappa < 0:
        raise ValueError("need gamma2 > 0 and kappa >= 0")
    return float(np.sqrt(gamma2**2 + kappa * gamma2))


def transmission_profile(params: ModelParams) -> SpectralFunction:
    g1, g2, d = params.gamma1, params.gamma2, params.delta
    hw = 0.5 * (g1 + g2)
    root = np.sqrt(g1 * g2)

    def fn(omega):
        return root / (hw - 1j * (omega + d))

    return SpectralFunction(fn, center=-d, width=g1 + g2, label="molecular filter")


def reflection_profile(params: ModelParams) -> SpectralFunction:
    """Single-pole reflection amplitude paired with the transmission above.

    Only |R|^2 + |T|^2 = 1 is physically fixed; this phase convention is the
    one-pole form that vanishes at matched resonance.
    """
    g1, g2, d = params.gamma1, params.gamma2, params.delta
    hw = 0.5 * (g1 + g2)

    def fn(omega):
        x = omega + d
        return (0.5 * (g1 - g2) - 1j * x) / (hw - 1j * x)

    return SpectralFunction(fn, center=-d, width=g1 + g2, label="molecular reflection")


def emission_profile(params: ModelParams) -> SpectralFunction:
    """Normalized spectral amplitude of the photon leaking from the cavity."""
    k = params.kappa
    if k <= 0:
        raise ValueError("photon spectrum needs kappa > 0")

    def fn(omega):
        return (1.0 / np.sqrt(2.0 * np.pi)) * np.sqrt(k) / (0.5 * k - 1j * omega)

    return SpectralFunction(fn, center=0.0, width=k, label="photon line")


def transmission(omega, params: ModelParams):
    """Transmission amplitude of one excitation through the molecular filter."""
    return transmission_profile(params)(omega)


def reflection(omega, params: ModelParams):
    return reflection_profile(params)(omega)


def photon_spectrum(omega, params: ModelParams):
    return emission_profile(params)(omega)


def p_abs_overlap(params: ModelParams, abs_tol: float = 1e-9) -> float:
    """Absorption probability as the photon-line / filter spectral overlap.

    Adaptive quadrature of |phi|^2 |T|^2 over a window wide enough that the
    Lorentzian tails contribute below tolerance; must agree with the closed
    form to ~1e-6.
    """
    phi = emission_profile(params)
    tr = transmission_profile(params)
    if params.gamma1 + params.gamma2 == 0:
        raise ValueError("overlap undefined for gamma1 + gamma2 = 0")

    def integrand(w):
        return abs(phi(w)) ** 2 * abs(tr(w)) ** 2

    half = 200.0 * max(params.kappa, params.gamma1 + params.gamma2)
    peaks = sorted({0.0, -params.delta})
    # split at the peaks and integrate the 1/omega^4 tails to infinity
    edges = [-np.inf, *peaks, np.inf]
    val = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = quad(integrand, lo, hi, epsabs=abs_tol, epsrel=1e-10, limit=400)
        val += v
        err += e
    if err > 1e-7:
        raise RuntimeError(f"overlap quadrature did not converge: error {err:.1e}")
    return float(val)


def c_steady(params: ModelParams) -> complex:
    """Steady amplifier amplitude for the one-photon, fresh-molecule input."""
    if params.Gamma <= 0:
        raise ValueError("need Gamma > 0")
    return complex(-params.mu * p_abs(params) / (0.5 * params.Gamma + 1j * params.Delta))


def nd_slope(params: ModelParams) -> float:
    """Asymptotic growth rate of the collected signal, p_abs * 4 mu^2 / Gamma."""
    if params.Gamma <= 0:
        raise ValueError("need Gamma > 0")
    return p_abs(params) * 4.0 * params.mu**2 / params.Gamma


def gain(params: ModelParams, T: float) -> float:
    """Gain of the collection window: 4 mu^2 T / Gamma."""
    if params.Gamma <= 0:
        raise ValueError("need Gamma > 0")
    if T <= 0:
        raise ValueError("need T > 0")
    return 4.0 * params.mu**2 * T / params.Gamma
