"""Dense operator algebra on small tensor-product Hilbert spaces.

The detector model lives on a composite space (cavity ⊗ molecule ⊗ amplifier)
of at most a few hundred dimensions, so everything here is plain dense
``numpy``: no sparse formats, no symbolic algebra. Operators and spaces are
immutable after construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

__all__ = [
    "CompositeSpace",
    "OperatorMatrix",
    "StateMatrix",
    "annihilation",
    "creation",
    "number",
    "projector",
    "flip",
    "embed",
    "hs_inner",
    "commutator",
    "anticommutator",
    "basis_state",
]


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered tensor product of finite-dimensional factors.

    The model uses the fixed factor order (cavity, molecule, amplifier);
    reduced two-factor spaces (cavity, molecule) appear wherever the
    amplifier can be dropped.
    """

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if len(dims) == 0:
            raise ValueError("a composite space needs at least one factor")
        if any(d < 1 for d in dims):
            raise ValueError(f"factor dimensions must be >= 1, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def total_dim(self) -> int:
        return prod(self.factor_dims)

    def identity(self) -> "OperatorMatrix":
        return OperatorMatrix(self, np.eye(self.total_dim, dtype=complex))


def _as_square_complex(entries, dim: int) -> np.ndarray:
    m = np.ascontiguousarray(np.asarray(entries, dtype=complex))
    if m.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex operator on a :class:`CompositeSpace`."""

    space: CompositeSpace
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "entries", _as_square_complex(self.entries, self.space.total_dim)
        )

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def norm(self) -> float:
        """Hilbert-Schmidt (Frobenius) norm."""
        return float(np.linalg.norm(self.entries))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _require_same_space(self, other)
        return OperatorMatrix(self.space, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _require_same_space(self, other)
        return OperatorMatrix(self.space, self.entries - other.entries)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, -self.entries)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        _require_same_space(self, other)
        return OperatorMatrix(self.space, self.entries @ other.entries)


@dataclass(frozen=True, eq=False)
class StateMatrix:
    """Density matrix on a :class:`CompositeSpace`.

    Construction only checks shape; :meth:`validate` enforces the physical
    invariants (hermiticity, unit trace, positivity) at given tolerances.
    """

    space: CompositeSpace
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "entries", _as_square_complex(self.entries, self.space.total_dim)
        )

    def expectation(self, op: OperatorMatrix) -> complex:
        if op.space != self.space:
            raise ValueError("operator and state live on different spaces")
        return complex(np.trace(op.entries @ self.entries))

    def validate(
        self,
        trace_tol: float = 1e-9,
        herm_tol: float = 1e-9,
        positivity_tol: float = 1e-9,
    ) -> "StateMatrix":
        m = self.entries
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > herm_tol:
            raise ValueError(f"state not Hermitian: max asymmetry {herm:.3e}")
        tr_err = abs(np.trace(m) - 1.0)
        if tr_err > trace_tol:
            raise ValueError(f"state trace off by {tr_err:.3e}")
        lo = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
        if lo < -positivity_tol:
            raise ValueError(f"state not positive: min eigenvalue {lo:.3e}")
        return self


def _require_same_space(a, b) -> None:
    if a.space != b.space:
        raise ValueError(
            f"operands live on different spaces: {a.space.factor_dims} "
            f"vs {b.space.factor_dims}"
        )


def annihilation(dim: int) -> np.ndarray:
    """Truncated bosonic lowering operator: entries sqrt(n) at (n-1, n)."""
    if dim < 2:
        raise ValueError("annihilation needs dim >= 2")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def creation(dim: int) -> np.ndarray:
    return annihilation(dim).conj().T


def number(dim: int) -> np.ndarray:
    a = annihilation(dim)
    return a.conj().T @ a


def projector(dim: int, level: int) -> np.ndarray:
    """|level><level| on a dim-dimensional factor."""
    if not 0 <= level < dim:
        raise ValueError(f"level {level} outside 0..{dim - 1}")
    p = np.zeros((dim, dim), dtype=complex)
    p[level, level] = 1.0
    return p


def flip(dim: int, ket: int, bra: int) -> np.ndarray:
    """|ket><bra| on a dim-dimensional factor."""
    if not (0 <= ket < dim and 0 <= bra < dim):
        raise ValueError(f"levels ({ket}, {bra}) outside 0..{dim - 1}")
    f = np.zeros((dim, dim), dtype=complex)
    f[ket, bra] = 1.0
    return f


def embed(local_op: np.ndarray, factor_index: int, space: CompositeSpace) -> OperatorMatrix:
    """Tensor a single-factor operator with identities on all other factors.

    The factor order of ``space`` is preserved, so ``embed(x, 1, s)`` acts on
    the molecule in the model's fixed (cavity, molecule, amplifier) order.
    """
    dims = space.factor_dims
    if not 0 <= factor_index < len(dims):
        raise ValueError(f"factor_index {factor_index} outside 0..{len(dims) - 1}")
    local = np.asarray(local_op, dtype=complex)
    d = dims[factor_index]
    if local.shape != (d, d):
        raise ValueError(
            f"local operator shape {local.shape} does not match factor dim {d}"
        )
    before = prod(dims[:factor_index])
    after = prod(dims[factor_index + 1 :])
    full = np.kron(np.kron(np.eye(before, dtype=complex), local), np.eye(after, dtype=complex))
    return OperatorMatrix(space, full)


def hs_inner(a: OperatorMatrix, b: OperatorMatrix) -> complex:
    """Hilbert-Schmidt inner product trace(adjoint(a) @ b)."""
    _require_same_space(a, b)
    return complex(np.vdot(a.entries, b.entries))


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    _require_same_space(a, b)
    return OperatorMatrix(a.space, a.entries @ b.entries - b.entries @ a.entries)


def anticommutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    _require_same_space(a, b)
    return OperatorMatrix(a.space, a.entries @ b.entries + b.entries @ a.entries)


def basis_state(space: CompositeSpace, levels: tuple[int, ...]) -> StateMatrix:
    """Product basis state |levels[0], levels[1], ...> as a density matrix."""
    dims = space.factor_dims
    if len(levels) != len(dims):
        raise ValueError(f"need one level per factor ({len(dims)}), got {len(levels)}")
    idx = 0
    for lv, d in zip(levels, dims):
        if not 0 <= lv < d:
            raise ValueError(f"level {lv} outside factor of dimension {d}")
        idx = idx * d + lv
    rho = np.zeros((space.total_dim,) * 2, dtype=complex)
    rho[idx, idx] = 1.0
    return StateMatrix(space, rho)
