import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from paflow import symplectic as sym
from paflow.acceptance import BLOCK_SETTINGS
from paflow.errors import BadParams, NegativeRealEigenvalue, NotSymplectic, SpectrumOnCut

CASES = [(k, p) for k, ps in BLOCK_SETTINGS.items() for p in ps]


@pytest.mark.parametrize("kind,params", CASES)
def test_block_generator(kind, params):
    X, B = sym.block_generator(kind, params)
    h = X.shape[0] // 2
    assert h == sym.block_half_dimension(kind, params)
    J = sym.standard_form(h)
    assert sym.infinitesimal_residual(X, J) < 1e-12
    assert sym.symplectic_residual(B, J) < 1e-10 * max(1, np.abs(B).max() ** 2)
    # closed-form B against a general-purpose exponential
    assert np.allclose(B, expm(X), rtol=1e-11, atol=1e-11)


@pytest.mark.parametrize("kind,params", [
    ("RealPair", {"lam": 1.0}), ("ComplexQuad", {"modulus": 2.0, "theta": 0.0}),
    ("UnitCircleSimple", {"theta": 4.0}), ("UnipotentNonLagrangian", {"size": 3}),
    ("UnitCircleOddNoSplit", {"theta": 0.1, "size": 2}), ("RealJordan", {"lam": 2, "size": 0}),
    ("Hexagonal", {}),
])
def test_bad_params(kind, params):
    with pytest.raises(BadParams):
        sym.block_generator(kind, params)


def test_standard_form():
    J = sym.standard_form(2)
    assert (J.T == -J).all()
    assert np.allclose(J @ J, -np.eye(4))


def _random_symplectic(rng, n, kinds):
    blocks, pos = [], 0
    for kind, params in kinds:
        w = sym.block_half_dimension(kind, params)
        blocks.append(sym.Block(kind, params, tuple(range(pos, pos + w)), tuple(range(n + pos, n + pos + w))))
        pos += w
    _, Bc = sym.canonical_matrix(blocks, n)
    # conjugate by a random symplectic matrix exp(J S), S symmetric
    S = rng.normal(size=(2 * n, 2 * n)) * 0.3
    P = expm(sym.standard_form(n) @ (S + S.T))
    return P @ Bc @ np.linalg.inv(P), P


@pytest.mark.parametrize("seed", range(5))
def test_eigenbasis_reconstructs(seed):
    rng = np.random.default_rng(seed)
    kinds = [("RealPair", {"lam": 4.0}), ("RealPair", {"lam": 1.7}),
             ("UnitCircleSimple", {"theta": 0.8}), ("ComplexQuad", {"modulus": 2.2, "theta": 1.1})]
    B, _ = _random_symplectic(rng, 5, kinds)
    W = sym.standard_form(5)
    dec = sym.symplectic_eigenbasis(B, W)
    P = dec.basis
    assert np.allclose(P.T @ W @ P, W, atol=1e-8)
    _, Bc = sym.canonical_matrix(dec.blocks, 5)
    assert np.allclose(np.linalg.solve(P, B @ P), Bc, atol=1e-7)
    assert [b.kind for b in dec.blocks] == ["RealPair", "RealPair", "UnitCircleSimple", "ComplexQuad"]
    assert dec.blocks[0].params["lam"] == pytest.approx(4.0)
    assert dec.blocks[3].params["theta"] == pytest.approx(1.1)


def test_eigenbasis_rejects_negative_and_nonsymplectic():
    W = sym.standard_form(1)
    with pytest.raises(NegativeRealEigenvalue):
        sym.symplectic_eigenbasis(np.diag([-2.0, -0.5]), W)
    with pytest.raises(NotSymplectic):
        sym.symplectic_eigenbasis(np.diag([2.0, 2.0]), W)


def test_eigenbasis_keeps_mu_plus(example):
    dec = sym.symplectic_eigenbasis(example.B, example.form, mu_plus=example.mu_plus)
    assert np.array_equal(dec.basis[:, 0], example.mu_plus)
    assert dec.blocks[0].kind == "RealPair"
    assert dec.blocks[0].params["lam"] == pytest.approx(example.stretch ** example.k)


def test_principal_log_examples(example):
    g = sym.principal_log(example.B, example.form)
    assert g.exp_residual < 1e-9
    assert g.symplectic_residual < 1e-9
    assert np.allclose(expm(g.X), example.B, atol=1e-9 * np.abs(example.B).max())
    R = np.array([[np.cos(0.4), -np.sin(0.4)], [np.sin(0.4), np.cos(0.4)]])
    assert np.allclose(sym.principal_log(R).X, [[0, -0.4], [0.4, 0]])
    with pytest.raises(SpectrumOnCut):
        sym.principal_log(-np.eye(2))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_principal_log_round_trip(a, b, c):
    X = np.array([[a, b], [c, -a]]) * 0.5
    B = expm(X)
    ev = np.linalg.eigvals(B)
    if np.any((np.abs(ev.imag) < 1e-9) & (ev.real <= 0)) or np.abs(np.angle(ev)).max() > 3.0:
        return
    g = sym.principal_log(B, sym.standard_form(1))
    assert np.allclose(expm(g.X), B, atol=1e-9 * max(1, np.abs(B).max()))
    assert g.symplectic_residual < 1e-8 * max(1, np.abs(g.X).max())
