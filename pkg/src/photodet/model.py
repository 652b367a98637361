"""Physical parameters and the cascaded Lindblad generator.

The detector chain is cavity -> molecule -> amplifier, coupled through
one-way (cascaded) fields. After eliminating the connecting continua the
dynamics is a Lindblad master equation with

* a joint collapse operator J = sqrt(kappa) a + sqrt(gamma1) |F0><F1|
  together with a cascade Hamiltonian term, which reproduce the
  unidirectional driving of the molecule by the cavity output,
* a collapse operator sqrt(gamma2) |F2><F1| for the shelving decay, and
* a collapse operator sqrt(Gamma) c for the amplifier output.

All rates are quoted in units of gamma1 and times in units of 1/gamma1.
Rotating frames: the cavity/molecule sector rotates at the photon carrier,
so the detuning delta appears as -delta |F1><F1|; the amplifier sector
rotates at the drive frequency, so Delta appears as +Delta c†c.

Sign convention for the cascade term: with the joint collapse operator
above, the driving direction (cavity pushes molecule, never the reverse)
requires H_casc = (i sqrt(kappa gamma1)/2)(a† |F0><F1| - |F1><F0| a). The
opposite sign would reverse the cascade; the absorption-probability tests
pin the choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import (
    CompositeSpace,
    OperatorMatrix,
    annihilation,
    creation,
    embed,
    flip,
    projector,
)

__all__ = [
    "ModelParams",
    "LindbladGenerator",
    "model_space",
    "absorber_space",
    "build_generator",
    "build_absorber_generator",
    "f_tilde",
]

MOLECULE_DIM = 3
CAVITY_DIM = 2  # single excitation: photon number 0 or 1


@dataclass(frozen=True)
class ModelParams:
    """All physical rates/detunings plus numerical controls.

    kappa   cavity decay rate
    gamma1  F0<->F1 coupling rate (the reference unit)
    gamma2  F1->F2 shelving decay rate
    Gamma   amplifier decay rate
    mu      drive strength while the molecule sits in F2
    delta   photon-molecule detuning
    Delta   amplifier-drive detuning
    n_c     amplifier photon-number truncation

    rtol/atol feed the adaptive ODE integrator; trunc_tol bounds the
    allowed population in the top two amplifier levels; positivity_tol
    bounds how negative a density-matrix eigenvalue may go.
    """

    kappa: float = 0.2
    gamma1: float = 1.0
    gamma2: float = 1.0
    Gamma: float = 1.0
    mu: float = 1.0
    delta: float = 0.0
    Delta: float = 0.0
    n_c: int = 20
    rtol: float = 1e-9
    atol: float = 1e-12
    trunc_tol: float = 1e-6
    positivity_tol: float = 1e-9

    def __post_init__(self):
        for name in ("kappa", "gamma1", "gamma2", "Gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be a finite nonnegative rate, got {v}")
        for name in ("mu", "delta", "Delta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.n_c < 2:
            raise ValueError(f"n_c must be >= 2, got {self.n_c}")
        for name in ("rtol", "atol", "trunc_tol", "positivity_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    """Effective Hamiltonian plus collapse operators on one composite space."""

    space: CompositeSpace
    h_eff: OperatorMatrix
    collapse_ops: tuple[OperatorMatrix, ...]

    def __post_init__(self):
        if not self.h_eff.is_hermitian(1e-12):
            raise ValueError("h_eff must be Hermitian")
        for j in self.collapse_ops:
            if j.space != self.space:
                raise ValueError("collapse operator on wrong space")
        object.__setattr__(self, "collapse_ops", tuple(self.collapse_ops))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Lindblad right-hand side acting on a raw density matrix."""
        h = self.h_eff.entries
        out = -1j * (h @ rho - rho @ h)
        for j in self.collapse_ops:
            jm = j.entries
            jd = jm.conj().T
            jdj = jd @ jm
            out += jm @ rho @ jd - 0.5 * (jdj @ rho + rho @ jdj)
        return out


def model_space(params: ModelParams) -> CompositeSpace:
    """Full (cavity, molecule, amplifier) space for the given truncation."""
    return CompositeSpace((CAVITY_DIM, MOLECULE_DIM, params.n_c + 1))


def absorber_space() -> CompositeSpace:
    """Reduced (cavity, molecule) space; enough for absorption quantities."""
    return CompositeSpace((CAVITY_DIM, MOLECULE_DIM))


def f_tilde(params: ModelParams, space: CompositeSpace) -> OperatorMatrix:
    """Drive-strength operator mu |F2><F2| embedded on the molecule factor."""
    _check_molecule_factor(space)
    return params.mu * embed(projector(MOLECULE_DIM, 2), 1, space)


def _check_molecule_factor(space: CompositeSpace) -> None:
    dims = space.factor_dims
    if len(dims) < 2 or dims[0] != CAVITY_DIM or dims[1] != MOLECULE_DIM:
        raise ValueError(
            f"expected factor order (cavity={CAVITY_DIM}, molecule={MOLECULE_DIM}, ...),"
            f" got {dims}"
        )


def _cascade_parts(params: ModelParams, space: CompositeSpace):
    """Joint collapse operator and cascade Hamiltonian for cavity -> molecule."""
    a = embed(annihilation(CAVITY_DIM), 0, space)
    lower01 = embed(flip(MOLECULE_DIM, 0, 1), 1, space)  # |F0><F1|
    joint = math.sqrt(params.kappa) * a + math.sqrt(params.gamma1) * lower01
    g = math.sqrt(params.kappa * params.gamma1)
    h_casc = (0.5j * g) * (a.adjoint() @ lower01 - lower01.adjoint() @ a)
    return joint, h_casc


def build_absorber_generator(params: ModelParams) -> LindbladGenerator:
    """Cascaded generator on the reduced (cavity, molecule) space.

    Exact for every observable that commutes with the F2 projector (all
    absorption-stage quantities), because the cascade is unidirectional:
    nothing downstream acts back on this sector.
    """
    space = absorber_space()
    joint, h_casc = _cascade_parts(params, space)
    shelf = math.sqrt(params.gamma2) * embed(flip(MOLECULE_DIM, 2, 1), 1, space)
    h = (-params.delta) * embed(projector(MOLECULE_DIM, 1), 1, space) + h_casc
    return LindbladGenerator(space, h, (joint, shelf))


def build_generator(params: ModelParams) -> LindbladGenerator:
    """Cascaded generator on the full (cavity, molecule, amplifier) space."""
    space = model_space(params)
    joint, h_casc = _cascade_parts(params, space)
    shelf = math.sqrt(params.gamma2) * embed(flip(MOLECULE_DIM, 2, 1), 1, space)
    amp_dim = params.n_c + 1
    c = embed(annihilation(amp_dim), 2, space)
    amp_out = math.sqrt(params.Gamma) * c
    h = (
        (-params.delta) * embed(projector(MOLECULE_DIM, 1), 1, space)
        + params.Delta * embed(creation(amp_dim) @ annihilation(amp_dim), 2, space)
        + (1j * params.mu) * (embed(projector(MOLECULE_DIM, 2), 1, space) @ (c - c.adjoint()))
        + h_casc
    )
    return LindbladGenerator(space, h, (joint, shelf, amp_out))
