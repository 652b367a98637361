import numpy as np
import pytest

from photodet.operators import (
    CompositeSpace,
    OperatorMatrix,
    StateMatrix,
    annihilation,
    anticommutator,
    basis_state,
    commutator,
    creation,
    embed,
    flip,
    hs_inner,
    projector,
)


def test_space_validation():
    s = CompositeSpace((2, 3, 4))
    assert s.total_dim == 24
    with pytest.raises(ValueError):
        CompositeSpace(())
    with pytest.raises(ValueError):
        CompositeSpace((2, 0, 3))


def test_embed_identity_case():
    s = CompositeSpace((2, 3, 4))
    full = embed(np.eye(2), 0, s)
    assert np.array_equal(full.entries, np.eye(24, dtype=complex))


def test_embed_matches_brute_force_kron():
    rng = np.random.default_rng(7)
    s = CompositeSpace((2, 3, 2))
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    brute = np.kron(np.kron(np.eye(2), x), np.eye(2))
    assert np.allclose(embed(x, 1, s).entries, brute, atol=0)
    # Kronecker trace identity
    assert np.isclose(embed(x, 1, s).trace(), np.trace(x) * 2 * 2)


def test_embed_annihilation_block_structure():
    # a on the first factor only connects the photon-1 block to the photon-0 block
    s = CompositeSpace((2, 3, 2))
    a = embed(annihilation(2), 0, s).entries
    assert np.count_nonzero(a[:6, :6]) == 0
    assert np.count_nonzero(a[6:, :]) == 0
    assert np.array_equal(a[:6, 6:], np.eye(6))


def test_embed_rejects_bad_inputs():
    s = CompositeSpace((2, 3))
    with pytest.raises(ValueError):
        embed(np.eye(3), 0, s)
    with pytest.raises(ValueError):
        embed(np.eye(2), 5, s)


def test_annihilation_entries():
    a2 = annihilation(2)
    ket1 = np.array([0.0, 1.0])
    assert np.allclose(a2 @ ket1, [1.0, 0.0])
    assert np.isclose(annihilation(4)[2, 3], np.sqrt(3))
    with pytest.raises(ValueError):
        annihilation(1)


def test_truncated_commutator_artifact():
    # [a, adag] = identity except the top corner, which is 1 - N
    for n in (2, 4, 7):
        a = annihilation(n)
        comm = a @ a.conj().T - a.conj().T @ a
        expected = np.eye(n, dtype=complex)
        expected[-1, -1] = 1 - n
        assert np.allclose(comm, expected, atol=1e-14)


def test_hs_inner_basics():
    s = CompositeSpace((2, 3))
    ident = s.identity()
    assert np.isclose(hs_inner(ident, ident), 6.0)
    rng = np.random.default_rng(3)
    x = OperatorMatrix(s, rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    val = hs_inner(x, x)
    assert val.real > 0 and abs(val.imag) < 1e-14
    other = CompositeSpace((3, 2)).identity()
    with pytest.raises(ValueError):
        hs_inner(ident, other)


def test_hs_inner_positive_definite():
    rng = np.random.default_rng(11)
    s = CompositeSpace((2, 3))
    for _ in range(25):
        x = OperatorMatrix(s, rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
        assert hs_inner(x, x).real >= np.linalg.norm(x.entries) ** 2 * 0.999


def test_commutators():
    s = CompositeSpace((2, 3, 4))
    rng = np.random.default_rng(5)
    x = OperatorMatrix(s, rng.normal(size=(24, 24)))
    assert commutator(x, x).norm() == 0.0
    p0 = embed(projector(3, 0), 1, s)
    p2 = embed(projector(3, 2), 1, s)
    assert commutator(p2, p0).norm() == 0.0
    a = embed(annihilation(2), 0, s)
    cdag = embed(creation(4), 2, s)
    assert np.max(np.abs(commutator(a, cdag).entries)) <= 1e-15
    ac = anticommutator(p0, p0)
    assert np.allclose(ac.entries, 2 * p0.entries)


def test_embed_is_multiplicative():
    rng = np.random.default_rng(13)
    s = CompositeSpace((2, 3, 2))
    for _ in range(10):
        x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        y = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        lhs = embed(x @ y, 1, s).entries
        rhs = (embed(x, 1, s) @ embed(y, 1, s)).entries
        assert np.allclose(lhs, rhs, atol=1e-13)


def test_adjoint_involution_and_antihomomorphism():
    rng = np.random.default_rng(17)
    s = CompositeSpace((2, 3))
    a = OperatorMatrix(s, rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    b = OperatorMatrix(s, rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    assert np.array_equal(a.adjoint().adjoint().entries, a.entries)
    assert np.allclose((a @ b).adjoint().entries, (b.adjoint() @ a.adjoint()).entries)


def test_flip_and_projector():
    f = flip(3, 0, 1)
    assert f[0, 1] == 1.0 and np.count_nonzero(f) == 1
    p = projector(3, 2)
    assert p[2, 2] == 1.0 and np.count_nonzero(p) == 1
    with pytest.raises(ValueError):
        projector(3, 3)
    with pytest.raises(ValueError):
        flip(3, -1, 0)


def test_basis_state_and_validation():
    s = CompositeSpace((2, 3, 2))
    rho = basis_state(s, (1, 0, 0))
    rho.validate()
    assert np.isclose(rho.entries[6, 6], 1.0)
    with pytest.raises(ValueError):
        basis_state(s, (1, 0))
    with pytest.raises(ValueError):
        basis_state(s, (2, 0, 0))
    bad = StateMatrix(s, 0.5 * np.eye(12))
    with pytest.raises(ValueError):
        bad.validate()
    lopsided = np.zeros((12, 12), dtype=complex)
    lopsided[0, 0] = 1.5
    lopsided[1, 1] = -0.5
    with pytest.raises(ValueError):
        StateMatrix(s, lopsided).validate()
