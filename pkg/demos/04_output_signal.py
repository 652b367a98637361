"""The macroscopic signal, computed two independent ways.

The collected excitation count N_D(T) comes out of either

* the flux route: integrate Gamma <c-dagger c>(t) along the full master
  equation, or
* the kernel route: the regression-theorem double integral over the drive
  operator's two-time correlations (no amplifier space needed at all).

They share nothing beyond the generator and agree to a fraction of a
percent; both grow linearly at the rate p_abs * 4 mu^2 / Gamma once the
absorption stage has settled, and a vacuum input produces nothing: the
amplifier adds gain without adding amplified noise.
"""

import numpy as np

from photodet import (
    ModelParams,
    absorber_space,
    basis_state,
    gain_decomposition,
    n_d_flux,
    n_d_kernel,
    nd_slope,
)

params = ModelParams()
T = 30.0

kernel = n_d_kernel(params, T=T)
flux = n_d_flux(params, T=T)
target = nd_slope(params)
print("== one-photon input ==")
print(f"kernel route: N_D({T:g}) = {kernel.values[-1]:.4f}, slope {kernel.slope:.5f}")
print(f"flux route:   N_D({T:g}) = {flux.values[-1]:.4f}, slope {flux.slope:.5f}")
print(f"closed form slope p_abs 4 mu^2/Gamma = {target:.5f}  (40/11 = {40 / 11:.5f})")
interp = np.interp(flux.times, kernel.times, kernel.values)
print(f"route disagreement: {100 * np.max(np.abs(flux.values - interp)) / flux.values.max():.3f}%")

print("\n== vacuum input ==")
dark = n_d_flux(params, T=T, rho0=basis_state(absorber_space(), (0, 0)))
print(f"max N_D with zero photons: {np.max(np.abs(dark.values)):.2e} (no amplified noise)")

print("\n== idealized budget for the time-integrated output mode ==")
budget = gain_decomposition(params, T=T)
print(f"gain G = 4 mu^2 T / Gamma = {budget.gain:.1f}")
print(f"expected signal: 0 photons -> {budget.signal_no_photon}, "
      f"1 photon -> p_abs^2 G = {budget.signal_one_photon:.2f}")
print(f"amplified noise contribution: {budget.amplified_noise}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(kernel.times, kernel.values, label="kernel route")
    ax.plot(flux.times, flux.values, "--", label="flux route")
    ax.plot(kernel.times, target * kernel.times, ":", c="k", lw=0.8,
            label="asymptotic slope")
    ax.set_xlabel("collection time $T$ ($1/\\gamma_1$)")
    ax.set_ylabel("$N_D(T)$")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig("output_signal.png", dpi=150)
    print("\nwrote output_signal.png")
except ImportError:
    print("\n(matplotlib not installed; skipping the signal plot)")
