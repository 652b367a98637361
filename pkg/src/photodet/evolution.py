"""Time propagation in both pictures.

Schrodinger picture: rho(t) from the structured Lindblad right-hand side

    d rho/dt = -i(H_nh rho - rho H_nh†) + sum_J J rho J†,
    H_nh = H_eff - (i/2) sum_J J†J.

Heisenberg picture: observables under the adjoint generator

    dO/dt = i[H_eff, O] + sum_J (J† O J - (1/2){J†J, O}),

so that trace(O(t) rho(0)) = trace(O(0) rho(t)). The superoperator is never
materialized; integration is adaptive high-order Runge-Kutta (DOP853) with
tight default tolerances, always through the generator's full linear
extension (see the note in _make_rhs).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import CAVITY_DIM, MOLECULE_DIM, LindbladGenerator
from .operators import (
    CompositeSpace,
    OperatorMatrix,
    StateMatrix,
    annihilation,
    basis_state,
    embed,
    flip,
    hs_inner,
    projector,
)

__all__ = [
    "TimeSeries",
    "SteadyStateResult",
    "KBasis",
    "IntegrationError",
    "TruncationError",
    "time_grid",
    "evolve_state",
    "evolve_observable",
    "expectation_series",
    "k_coefficients",
    "k_coefficient_series",
    "amplitude_term",
    "detect_steady_state",
]

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
DEFAULT_TRUNC_TOL = 1e-6


class IntegrationError(RuntimeError):
    """The adaptive integrator failed (e.g. step-size underflow)."""


class TruncationError(RuntimeError):
    """Amplifier population reached the truncation boundary."""


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Sampled trajectory: strictly increasing times with one value each."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values)
        if t.ndim != 1 or v.shape != t.shape:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SteadyStateResult:
    """Outcome of steady-state detection; never a silent extrapolation."""

    value: complex
    reached_at: float | None
    converged: bool


def time_grid(horizon: float, samples: int = 500) -> np.ndarray:
    """Uniform output grid [0, horizon]; horizon in units of 1/gamma1."""
    if horizon <= 0 or samples < 2:
        raise ValueError("need horizon > 0 and samples >= 2")
    return np.linspace(0.0, horizon, samples)


def _make_rhs(gen: LindbladGenerator, adjoint: bool):
    # The full linear extension of the flow is integrated even for Hermitian
    # inputs: shortcuts like A m + (A m)^dag agree with the generator only on
    # the Hermitian subspace and act as an unstable (norm-pumping) map on the
    # anti-Hermitian roundoff component, which then grows exponentially. The
    # true extension contracts every matrix, so roundoff stays at roundoff.
    d = gen.space.total_dim
    js = [j.entries for j in gen.collapse_ops]
    jds = [j.conj().T for j in js]
    gsum = np.zeros((d, d), dtype=complex)
    for j, jd in zip(js, jds):
        gsum += jd @ j
    a = -1j * (gen.h_eff.entries - 0.5j * gsum)
    adag = a.conj().T

    if not adjoint:

        def rhs(t, y):
            m = y.reshape(d, d)
            out = a @ m + m @ adag
            for j, jd in zip(js, jds):
                out += (j @ m) @ jd
            return out.ravel()

    else:

        def rhs(t, y):
            m = y.reshape(d, d)
            out = adag @ m + m @ a
            for j, jd in zip(js, jds):
                out += (jd @ m) @ j
            return out.ravel()

    return rhs


def propagate_matrix(
    gen: LindbladGenerator,
    m0: np.ndarray,
    times: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    adjoint: bool = False,
) -> np.ndarray:
    """Low-level flow: returns the raw matrix trajectory, shape (nt, d, d).

    Linearity of the generator makes this equally valid for density
    matrices, Heisenberg observables (``adjoint=True``) and the
    non-Hermitian seeds of regression-theorem correlations.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 1:
        raise ValueError("times must be a nonempty 1-d array")
    if len(times) > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("times must be strictly increasing")
    d = gen.space.total_dim
    m0 = np.asarray(m0, dtype=complex)
    if m0.shape != (d, d):
        raise ValueError(f"matrix shape {m0.shape} does not match space dim {d}")
    if len(times) == 1 or times[-1] == times[0]:
        return np.repeat(m0[None, :, :], len(times), axis=0)

    rhs = _make_rhs(gen, adjoint=adjoint)
    sol = solve_ivp(
        rhs,
        (times[0], times[-1]),
        m0.ravel(),
        t_eval=times,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegrationError(f"integration failed: {sol.message}")
    return np.ascontiguousarray(sol.y.T.reshape(len(times), d, d))


def propagate_observable_matrix(
    gen: LindbladGenerator,
    o0: np.ndarray,
    times: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> np.ndarray:
    """Adjoint flow with the identity component split off exactly.

    The adjoint generator is unital, so the identity part of an observable
    is a conserved fixed point; integrating only the remainder keeps
    unitality at machine precision instead of at integrator precision.
    """
    d = gen.space.total_dim
    o0 = np.asarray(o0, dtype=complex)
    alpha = np.trace(o0) / d
    rest = o0 - alpha * np.eye(d)
    traj = propagate_matrix(gen, rest, times, rtol, atol, adjoint=True)
    if alpha != 0:
        traj = traj + alpha * np.eye(d)
    return traj


def _amplifier_tail(space: CompositeSpace, traj: np.ndarray) -> float:
    """Worst-case population in the top two amplifier levels over a trajectory."""
    amp = space.factor_dims[-1]
    diag = np.einsum("tii->ti", traj).real
    pops = diag.reshape(traj.shape[0], -1, amp).sum(axis=1)
    return float(pops[:, -2:].sum(axis=1).max())


def _check_truncation(space: CompositeSpace, traj: np.ndarray, trunc_tol) -> None:
    if trunc_tol is None or len(space.factor_dims) != 3:
        return
    tail = _amplifier_tail(space, traj)
    if tail > trunc_tol:
        raise TruncationError(
            f"population {tail:.3e} in the top two amplifier levels exceeds "
            f"trunc_tol={trunc_tol:.1e}; raise n_c (currently "
            f"{space.factor_dims[-1] - 1})"
        )


def evolve_state(
    gen: LindbladGenerator,
    rho0: StateMatrix,
    times: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    trunc_tol: float | None = DEFAULT_TRUNC_TOL,
    validate: bool = True,
    positivity_tol: float = 1e-9,
) -> list[StateMatrix]:
    """Propagate a density matrix; every sample satisfies the state invariants."""
    if rho0.space != gen.space:
        raise ValueError("initial state lives on a different space than the generator")
    traj = propagate_matrix(gen, rho0.entries, times, rtol, atol)
    _check_truncation(gen.space, traj, trunc_tol)
    states = [StateMatrix(gen.space, m) for m in traj]
    if validate:
        for s in states:
            s.validate(positivity_tol=positivity_tol)
    return states


def evolve_observable(
    gen: LindbladGenerator,
    obs0: OperatorMatrix,
    times: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> list[OperatorMatrix]:
    """Propagate an observable under the adjoint generator."""
    if obs0.space != gen.space:
        raise ValueError("observable lives on a different space than the generator")
    traj = propagate_observable_matrix(gen, obs0.entries, times, rtol, atol)
    return [OperatorMatrix(gen.space, m) for m in traj]


def expectation_series(
    gen: LindbladGenerator,
    rho0: StateMatrix,
    observables: list[OperatorMatrix],
    times: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    trunc_tol: float | None = DEFAULT_TRUNC_TOL,
) -> np.ndarray:
    """Expectations trace(O rho(t)); returns shape (len(observables), nt).

    One propagation serves all observables; states are not retained.
    """
    if rho0.space != gen.space:
        raise ValueError("initial state lives on a different space than the generator")
    for o in observables:
        if o.space != gen.space:
            raise ValueError("observable lives on a different space than the generator")
    traj = propagate_matrix(gen, rho0.entries, times, rtol, atol)
    _check_truncation(gen.space, traj, trunc_tol)
    obs = np.stack([o.entries for o in observables])
    # trace(O rho) = sum_ij O_ij rho_ji
    return np.einsum("oij,tji->ot", obs, traj)


@dataclass(frozen=True, eq=False)
class KBasis:
    """Orthogonal operator basis for the Heisenberg-evolved F2 projector.

    The six members act on the cavity and molecule factors (identity on the
    amplifier when present) and stay pairwise Hilbert-Schmidt orthogonal:

    1. photon present, molecule in F0 (absorption channel)
    2. no photon, molecule already excited in F1
    3. photon present and molecule in F1 (re-absorption channel)
    4. molecule already shelved in F2 (stays there)
    5. cavity-molecule coherence, Hermitian combination
    6. cavity-molecule coherence, anti-Hermitian combination (detuned runs)
    """

    space: CompositeSpace
    operators: tuple[OperatorMatrix, ...]
    norms: np.ndarray = field(init=False)

    def __post_init__(self):
        if len(self.operators) != 6:
            raise ValueError("expected six basis operators")
        norms = np.array([hs_inner(k, k).real for k in self.operators])
        if np.any(norms <= 0):
            raise ValueError("basis operators must have positive norm")
        object.__setattr__(self, "operators", tuple(self.operators))
        object.__setattr__(self, "norms", norms)

    @classmethod
    def for_space(cls, space: CompositeSpace) -> "KBasis":
        dims = space.factor_dims
        if len(dims) < 2 or dims[0] != CAVITY_DIM or dims[1] != MOLECULE_DIM:
            raise ValueError(
                f"expected (cavity={CAVITY_DIM}, molecule={MOLECULE_DIM}, ...) space,"
                f" got {dims}"
            )
        pho1 = embed(projector(CAVITY_DIM, 1), 0, space)
        pho0 = embed(projector(CAVITY_DIM, 0), 0, space)
        mol0 = embed(projector(MOLECULE_DIM, 0), 1, space)
        mol1 = embed(projector(MOLECULE_DIM, 1), 1, space)
        mol2 = embed(projector(MOLECULE_DIM, 2), 1, space)
        raise_mol = embed(annihilation(CAVITY_DIM), 0, space) @ embed(
            flip(MOLECULE_DIM, 1, 0), 1, space
        )
        k5 = raise_mol + raise_mol.adjoint()
        k6 = 1j * raise_mol - 1j * raise_mol.adjoint()
        return cls(
            space,
            (pho1 @ mol0, pho0 @ mol1, pho1 @ mol1, mol2, k5, k6),
        )


def k_coefficients(obs: OperatorMatrix, basis: KBasis) -> np.ndarray:
    """Hilbert-Schmidt projections of an observable onto the K basis."""
    if obs.space != basis.space:
        raise ValueError("observable and basis live on different spaces")
    return np.array(
        [hs_inner(k, obs) / n for k, n in zip(basis.operators, basis.norms)]
    )


def k_coefficient_series(
    gen: LindbladGenerator,
    times: np.ndarray,
    basis: KBasis | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> np.ndarray:
    """Coefficients of the Heisenberg-evolved F2 projector, shape (nt, 6)."""
    if basis is None:
        basis = KBasis.for_space(gen.space)
    p2 = embed(projector(MOLECULE_DIM, 2), 1, gen.space)
    traj = propagate_observable_matrix(gen, p2.entries, times, rtol, atol)
    kmats = np.stack([k.entries for k in basis.operators])
    coeffs = np.einsum("kij,tij->tk", kmats.conj(), traj)
    return coeffs / basis.norms


def amplitude_term(
    gen: LindbladGenerator,
    times: np.ndarray,
    initial: StateMatrix | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    trunc_tol: float | None = DEFAULT_TRUNC_TOL,
) -> TimeSeries:
    """Amplifier amplitude <c>(t), by default from one photon and a fresh molecule.

    Computed in the Schrodinger picture (duality partner of the Heisenberg
    statement). The default initial state is |1 photon, F0, vacuum>.
    """
    dims = gen.space.factor_dims
    if len(dims) != 3:
        raise ValueError("amplitude_term needs the full three-factor space")
    if initial is None:
        initial = basis_state(gen.space, (1, 0, 0))
    c = embed(annihilation(dims[2]), 2, gen.space)
    vals = expectation_series(gen, initial, [c], times, rtol, atol, trunc_tol)[0]
    return TimeSeries(times, vals, label="amplifier amplitude <c>")


def detect_steady_state(
    series: TimeSeries,
    window: float | None = None,
    tol: float = 1e-4,
) -> SteadyStateResult:
    """Windowed steady-state detection over the tail of a series.

    The steady value is the mean over the final ``window`` of time (default:
    final 20% of the span). The series counts as converged only if no sample
    in that window deviates from the mean by more than ``tol``; the reported
    time is the earliest sample from which the whole remaining series stays
    within ``tol`` of the steady value.
    """
    t, v = series.times, series.values
    span = t[-1] - t[0]
    if window is None:
        window = 0.2 * span
    if not 0 < window <= span:
        raise ValueError(f"window {window} outside series span {span}")
    mask = t >= t[-1] - window
    if mask.sum() < 2:
        raise ValueError("series too short: fewer than 2 samples in the window")
    mean = v[mask].mean()
    dev = np.abs(v - mean)
    if dev[mask].max() >= tol:
        return SteadyStateResult(value=mean, reached_at=None, converged=False)
    inside = dev < tol
    bad = np.nonzero(~inside)[0]
    first = 0 if len(bad) == 0 else bad[-1] + 1
    return SteadyStateResult(value=mean, reached_at=float(t[first]), converged=True)
