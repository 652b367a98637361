"""Command-line front end: named scenarios, deterministic CSV, plain summaries.

Scenarios
---------
oracle      closed-form table (absorption probability, steady amplitude,
            signal slope, gain) for the configured parameters
fig2        coefficients of the Heisenberg-evolved shelved-state projector
fig3        amplifier amplitude growth from a single photon
fig4        collected output signal, flux route and kernel route
sweep-pabs  absorption probability vs gamma1: closed form and simulation
validate    run the invariant suite and exit nonzero on any breach

Configuration: flat key=value file (via --config) plus command-line flags;
flags win over the file, the file wins over defaults. Exit codes: 0 success,
2 configuration error, 3 numerical failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from . import analytic
from .correlations import n_d_flux, n_d_kernel, two_time_correlation
from .evolution import (
    IntegrationError,
    TruncationError,
    amplitude_term,
    detect_steady_state,
    evolve_observable,
    evolve_state,
    expectation_series,
    k_coefficient_series,
    time_grid,
)
from .model import (
    MOLECULE_DIM,
    ModelParams,
    build_absorber_generator,
    build_generator,
    f_tilde,
)
from .operators import basis_state, embed, projector

SCENARIOS = ("oracle", "fig2", "fig3", "fig4", "sweep-pabs", "validate")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    scenario: str
    horizon: float = 50.0
    samples: int = 500
    out: str | None = None
    eta: float = 1.0
    sweep_min: float = 0.5
    sweep_max: float = 2.0
    sweep_step: float = 0.01

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(
                f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}"
            )
        if self.samples < 2:
            raise ConfigError(f"samples must be >= 2, got {self.samples}")
        if self.horizon <= 0:
            raise ConfigError(f"horizon must be > 0, got {self.horizon}")
        if not 0 <= self.eta <= 1:
            raise ConfigError(f"eta must lie in [0, 1], got {self.eta}")
        if self.sweep_step <= 0 or self.sweep_max <= self.sweep_min:
            raise ConfigError("sweep bounds need sweep_min < sweep_max and step > 0")


_PARAM_KEYS = {
    "kappa": float,
    "gamma1": float,
    "gamma2": float,
    "Gamma": float,
    "mu": float,
    "delta": float,
    "Delta": float,
    "nc": int,
}
_RUN_KEYS = {
    "horizon": float,
    "samples": int,
    "out": str,
    "eta": float,
    "sweep_min": float,
    "sweep_max": float,
    "sweep_step": float,
}


def parse_config_file(path: str) -> dict:
    """Flat key=value file; '#' starts a comment; unknown keys are errors."""
    values = {}
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, _, text = (s.strip() for s in line.partition("="))
        caster = _PARAM_KEYS.get(key) or _RUN_KEYS.get(key)
        if caster is None:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = caster(text)
        except ValueError:
            raise ConfigError(
                f"{path}:{lineno}: field {key!r} expects {caster.__name__}, got {text!r}"
            ) from None
    return values


def build_config(scenario: str, values: dict) -> RunConfig:
    param_kwargs = {}
    for key in _PARAM_KEYS:
        if key in values:
            param_kwargs["n_c" if key == "nc" else key] = values[key]
    run_kwargs = {key: values[key] for key in _RUN_KEYS if key in values}
    try:
        params = ModelParams(**param_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(params=params, scenario=scenario, **run_kwargs)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(x) for x in row) + "\n")


def _out_path(config: RunConfig) -> str:
    return config.out or f"{config.scenario}.csv"


def _scenario_oracle(config: RunConfig) -> None:
    p = config.params
    pa = analytic.p_abs(p)
    overlap = analytic.p_abs_overlap(p)
    css = analytic.c_steady(p)
    css_units = css * p.Gamma / p.mu if p.mu != 0 else 0j
    slope = analytic.nd_slope(p)
    gmax = analytic.p_abs_maximizer(p.gamma2, p.kappa) if p.gamma2 > 0 else float("nan")
    g = analytic.gain(p, config.horizon)
    rows = [
        ("p_abs", pa),
        ("p_abs_overlap", overlap),
        ("gamma1_maximizer", gmax),
        ("c_steady_re_mu_over_Gamma", css_units.real),
        ("c_steady_im_mu_over_Gamma", css_units.imag),
        ("nd_slope_gamma1", slope),
        (f"gain_T_{config.horizon:g}", g),
    ]
    _write_csv(_out_path(config), ["quantity", "value"], rows)
    print(f"P_abs={pa:.6f} (overlap quadrature {overlap:.6f})")
    print(f"slope={slope:.6f}*gamma1")
    print(f"c_ss={css_units.real:+.6f}{css_units.imag:+.6f}i *mu/Gamma")
    print(f"gamma1*={gmax:.6f}, gain(T={config.horizon:g})={g:.6f}")
    print(f"wrote {_out_path(config)}")


def _scenario_fig2(config: RunConfig) -> None:
    gen = build_absorber_generator(config.params)
    grid = time_grid(config.horizon, config.samples)
    coeffs = k_coefficient_series(gen, grid, rtol=config.params.rtol, atol=config.params.atol)
    rows = [
        (float(t),) + tuple(float(c.real) for c in coeffs[i])
        for i, t in enumerate(grid)
    ]
    _write_csv(_out_path(config), ["t", "k1", "k2", "k3", "k4", "k5", "k6"], rows)
    pa = analytic.p_abs(config.params)
    print(f"final k1={coeffs[-1, 0].real:.6f} (closed form p_abs={pa:.6f})")
    print(f"final k2={coeffs[-1, 1].real:.6f} k3={coeffs[-1, 2].real:.6f} "
          f"k4={coeffs[-1, 3].real:.6f} k6={coeffs[-1, 5].real:.2e}")
    print(f"wrote {_out_path(config)}")


def _scenario_fig3(config: RunConfig) -> None:
    p = config.params
    gen = build_generator(p)
    grid = time_grid(config.horizon, config.samples)
    series = amplitude_term(gen, grid, rtol=p.rtol, atol=p.atol, trunc_tol=p.trunc_tol)
    scale = p.Gamma / p.mu if p.mu != 0 else 0.0
    rows = [
        (float(t), float((v * scale).real), float((v * scale).imag))
        for t, v in zip(series.times, series.values)
    ]
    _write_csv(_out_path(config), ["t", "c_re", "c_im"], rows)
    steady = detect_steady_state(series, tol=5e-4)
    css = analytic.c_steady(p) * scale
    if steady.converged:
        print(f"steady <c>={steady.value.real * scale:+.6f}"
              f"{steady.value.imag * scale:+.6f}i *mu/Gamma "
              f"(reached t={steady.reached_at:.2f}; closed form {css.real:+.6f}{css.imag:+.6f}i)")
    else:
        print("steady state not reached within the horizon; raise --horizon")
    print(f"wrote {_out_path(config)}")


def _scenario_fig4(config: RunConfig) -> None:
    p = config.params
    flux = n_d_flux(p, T=config.horizon, rtol=p.rtol, atol=p.atol, trunc_tol=p.trunc_tol)
    kernel = n_d_kernel(p, T=config.horizon, rtol=p.rtol, atol=p.atol)
    t_out = np.linspace(0.0, config.horizon, config.samples)
    nd_f = config.eta * np.interp(t_out, flux.times, flux.values)
    nd_k = config.eta * np.interp(t_out, kernel.times, kernel.values)
    rows = [(float(t), float(a), float(b)) for t, a, b in zip(t_out, nd_f, nd_k)]
    _write_csv(_out_path(config), ["T", "nd_flux", "nd_kernel"], rows)
    slope = analytic.nd_slope(p)
    print(f"flux slope={config.eta * flux.slope:.6f}, "
          f"kernel slope={config.eta * kernel.slope:.6f}, "
          f"closed form {config.eta * slope:.6f} (eta={config.eta:g})")
    scale = max(nd_f.max(), 1e-300)
    print(f"route disagreement: {np.abs(nd_f - nd_k).max() / scale:.2e} of final value")
    print(f"wrote {_out_path(config)}")


def _batched_final_p2(params_list, horizon, rtol, atol) -> np.ndarray:
    """Long-time F2 population for many parameter sets in one integration."""
    gens = [build_absorber_generator(p) for p in params_list]
    d = gens[0].space.total_dim
    a_stack = []
    j_stacks = [[], []]
    for g in gens:
        gsum = sum(j.entries.conj().T @ j.entries for j in g.collapse_ops)
        a_stack.append(-1j * (g.h_eff.entries - 0.5j * gsum))
        for slot, j in enumerate(g.collapse_ops):
            j_stacks[slot].append(j.entries)
    a = np.stack(a_stack)
    adag = a.conj().transpose(0, 2, 1)
    js = [np.stack(s) for s in j_stacks]
    jds = [s.conj().transpose(0, 2, 1) for s in js]
    npts = len(gens)

    def rhs(t, y):
        m = y.reshape(npts, d, d)
        out = a @ m + m @ adag
        for j, jd in zip(js, jds):
            out += (j @ m) @ jd
        return out.ravel()

    rho0 = basis_state(gens[0].space, (1, 0)).entries
    y0 = np.broadcast_to(rho0, (npts, d, d)).ravel().astype(complex)
    sol = solve_ivp(rhs, (0.0, horizon), y0, t_eval=[horizon],
                    method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"sweep integration failed: {sol.message}")
    final = sol.y[:, -1].reshape(npts, d, d)
    p2 = embed(projector(MOLECULE_DIM, 2), 1, gens[0].space).entries
    return np.einsum("ij,pji->p", p2, final).real


def _scenario_sweep(config: RunConfig) -> None:
    p = config.params
    g1 = np.arange(config.sweep_min, config.sweep_max + 0.5 * config.sweep_step,
                   config.sweep_step)
    params_list = [replace(p, gamma1=float(x)) for x in g1]
    analytic_col = np.array([analytic.p_abs(q) for q in params_list])
    horizon = max(60.0, 12.0 / max(p.kappa, 1e-2))
    simulated = _batched_final_p2(params_list, horizon, p.rtol, p.atol)
    rows = [(float(a), float(b), float(c)) for a, b, c in zip(g1, analytic_col, simulated)]
    _write_csv(_out_path(config), ["gamma1", "pabs_analytic", "pabs_simulated"], rows)
    best = float(g1[np.argmax(simulated)])
    gstar = analytic.p_abs_maximizer(p.gamma2, p.kappa)
    print(f"simulated argmax gamma1={best:.4f}; closed-form maximizer {gstar:.4f} "
          f"(grid step {config.sweep_step:g})")
    print(f"max |simulated - analytic| = {np.abs(simulated - analytic_col).max():.2e}")
    print(f"wrote {_out_path(config)}")


def _validation_checks(config: RunConfig):
    """Fast invariant suite; returns a list of (name, check_fn) pairs.

    Each check returns (passed, detail); exceptions count as failures of
    that check only.
    """
    rng = np.random.default_rng(20240811)
    p_small = replace(config.params, n_c=4)

    def random_state(space):
        d = space.total_dim
        x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = x @ x.conj().T
        return rho / np.trace(rho)

    def generator_structure():
        gen = build_generator(p_small)
        drho = gen.apply(random_state(gen.space))
        tr = abs(np.trace(drho))
        herm = np.max(np.abs(drho - drho.conj().T))
        return tr < 1e-12 and herm < 1e-12, f"|tr L(rho)|={tr:.1e}"

    def trajectory_invariants():
        genr = build_absorber_generator(config.params)
        states = evolve_state(genr, basis_state(genr.space, (1, 0)), time_grid(50.0, 201))
        traces = np.array([np.trace(s.entries).real for s in states])
        eigmins = np.array([np.linalg.eigvalsh(s.entries).min() for s in states])
        return (
            np.abs(traces - 1).max() < 1e-9 and eigmins.min() > -1e-9,
            f"max|tr-1|={np.abs(traces - 1).max():.1e}, min eig={eigmins.min():.1e}",
        )

    def unitality():
        gen = build_generator(p_small)
        ident = gen.space.identity()
        obs = evolve_observable(gen, ident, time_grid(5.0, 11))
        dev = max(np.max(np.abs(o.entries - ident.entries)) for o in obs)
        return dev < 1e-9, f"max dev={dev:.1e}"

    def duality():
        from .operators import OperatorMatrix, StateMatrix

        gen = build_generator(p_small)
        d = gen.space.total_dim
        rho0 = StateMatrix(gen.space, random_state(gen.space))
        x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        op0 = OperatorMatrix(gen.space, x + x.conj().T)
        t_pair = time_grid(4.0, 5)
        rho_t = evolve_state(gen, rho0, t_pair, trunc_tol=None)
        op_t = evolve_observable(gen, op0, t_pair)
        worst = max(
            abs(np.trace(op_t[i].entries @ rho0.entries)
                - np.trace(op0.entries @ rho_t[i].entries))
            for i in range(len(t_pair))
        )
        return worst < 1e-8, f"max dev={worst:.1e}"

    def unidirectional():
        from .operators import annihilation as ann, creation as cre, embed as emb

        grid = time_grid(8.0, 33)
        base = replace(config.params, n_c=3)
        varied = replace(base, gamma2=3.1, Gamma=2.4, mu=1.7, Delta=0.9)
        vals = []
        for q, mol in ((base, 0), (varied, 1)):
            gen = build_generator(q)
            n_cav = emb(cre(2) @ ann(2), 0, gen.space)
            vals.append(
                expectation_series(
                    gen, basis_state(gen.space, (1, mol, 0)), [n_cav], grid,
                    trunc_tol=None,
                )[0]
            )
        dev = np.abs(vals[0] - vals[1]).max()
        return dev < 1e-9, f"max dev={dev:.1e}"

    def regression_zero_lag():
        genr = build_absorber_generator(config.params)
        f_op = f_tilde(config.params, genr.space)
        rho1 = evolve_state(genr, basis_state(genr.space, (1, 0)), np.array([0.0, 2.0]))[-1]
        direct = np.trace(f_op.entries @ f_op.entries @ rho1.entries)
        reg = two_time_correlation(
            genr, basis_state(genr.space, (1, 0)), f_op, f_op, t=2.0, tau=0.0
        )
        return abs(direct - reg) < 1e-9, f"dev={abs(direct - reg):.1e}"

    def spectral_unitarity():
        w = rng.uniform(-30, 30, size=100)
        total = np.abs(analytic.transmission(w, config.params)) ** 2 + np.abs(
            analytic.reflection(w, config.params)
        ) ** 2
        dev = np.max(np.abs(total - 1))
        return dev < 1e-12, f"max dev={dev:.1e}"

    def photon_norm():
        from scipy.integrate import quad

        phi = analytic.emission_profile(config.params)
        norm = sum(
            quad(lambda x: abs(phi(x)) ** 2, lo, hi, epsabs=1e-10, limit=200)[0]
            for lo, hi in ((-np.inf, 0.0), (0.0, np.inf))
        )
        return abs(norm - 1) < 1e-8, f"dev={abs(norm - 1):.1e}"

    def overlap_identity():
        worst = 0.0
        for g2 in (0.5, 1.0, 2.0):
            for k in (0.1, 0.2, 1.0):
                for d in (0.0, 1.0, 3.0):
                    q = replace(config.params, gamma2=g2, kappa=k, delta=d)
                    worst = max(worst, abs(analytic.p_abs_overlap(q) - analytic.p_abs(q)))
        return worst < 1e-6, f"max dev={worst:.1e}"

    def probability_range():
        lo, hi = 1.0, 0.0
        for _ in range(10_000):
            q = ModelParams(
                kappa=float(rng.uniform(0, 5)),
                gamma1=float(rng.uniform(0, 5)),
                gamma2=float(rng.uniform(0, 5)),
                delta=float(rng.uniform(-5, 5)),
            )
            if q.gamma1 + q.gamma2 == 0:
                continue
            v = analytic.p_abs(q)
            lo, hi = min(lo, v), max(hi, v)
        return 0 <= lo and hi <= 1, f"range [{lo:.3f}, {hi:.3f}]"

    def pinned_molecule_response():
        q = replace(config.params, kappa=0.0, gamma1=0.0, Gamma=1.3, Delta=0.7,
                    mu=0.8, n_c=14)
        genf = build_generator(q)
        grid2 = time_grid(8.0, 81)
        series = amplitude_term(genf, grid2, initial=basis_state(genf.space, (0, 2, 0)))
        pole = 0.5 * q.Gamma + 1j * q.Delta
        exact = (-q.mu / pole) * (1 - np.exp(-pole * grid2))
        dev = np.max(np.abs(series.values - exact))
        return dev < 1e-6, f"max dev={dev:.1e}"

    return [
        ("generator trace/hermiticity", generator_structure),
        ("state trace 1e-9 / positivity 1e-9", trajectory_invariants),
        ("adjoint unitality 1e-9", unitality),
        ("duality 1e-8", duality),
        ("no back-action on the cavity 1e-9", unidirectional),
        ("regression tau=0 1e-9", regression_zero_lag),
        ("|T|^2+|R|^2=1", spectral_unitarity),
        ("photon line normalized 1e-8", photon_norm),
        ("overlap identity 1e-6", overlap_identity),
        ("p_abs within [0,1]", probability_range),
        ("pinned-molecule amplitude 1e-6", pinned_molecule_response),
    ]


def _scenario_validate(config: RunConfig) -> int:
    results = []
    for name, fn in _validation_checks(config):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check fails; the suite continues
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok))
        print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
    _write_csv(
        _out_path(config),
        ["check", "status"],
        [(name, "pass" if ok else "fail") for name, ok in results],
    )
    print(f"wrote {_out_path(config)}")
    return EXIT_OK if all(ok for _, ok in results) else EXIT_VALIDATION


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="photodet",
        description="single-photon detection model: scenarios, sweeps, validation",
    )
    ap.add_argument("scenario", choices=SCENARIOS)
    ap.add_argument("--config", metavar="FILE", help="key=value configuration file")
    for key in ("kappa", "gamma1", "gamma2", "Gamma", "mu", "delta", "Delta"):
        ap.add_argument(f"--{key}", type=float, metavar="X")
    ap.add_argument("--nc", type=int, metavar="N", help="amplifier truncation")
    ap.add_argument("--horizon", type=float, metavar="T", help="time horizon in 1/gamma1")
    ap.add_argument("--samples", type=int, metavar="N", help="output rows per CSV")
    ap.add_argument("--out", metavar="PATH", help="output CSV path")
    ap.add_argument("--eta", type=float, metavar="X", help="collection efficiency multiplier")
    ap.add_argument("--sweep-min", dest="sweep_min", type=float, metavar="X")
    ap.add_argument("--sweep-max", dest="sweep_max", type=float, metavar="X")
    ap.add_argument("--sweep-step", dest="sweep_step", type=float, metavar="X")
    return ap


def main(argv=None) -> int:
    ap = build_arg_parser()
    ns = ap.parse_args(argv)
    try:
        values = parse_config_file(ns.config) if ns.config else {}
        for key in list(_PARAM_KEYS) + list(_RUN_KEYS):
            flag = getattr(ns, key, None)
            if flag is not None:
                values[key] = flag
        config = build_config(ns.scenario, values)
    except ConfigError as exc:
        print(f"photodet: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if config.scenario == "oracle":
            _scenario_oracle(config)
        elif config.scenario == "fig2":
            _scenario_fig2(config)
        elif config.scenario == "fig3":
            _scenario_fig3(config)
        elif config.scenario == "fig4":
            _scenario_fig4(config)
        elif config.scenario == "sweep-pabs":
            _scenario_sweep(config)
        elif config.scenario == "validate":
            return _scenario_validate(config)
    except TruncationError as exc:
        print(f"photodet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except IntegrationError as exc:
        print(f"photodet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"photodet: invariant breach: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
