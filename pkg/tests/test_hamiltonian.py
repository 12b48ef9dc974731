from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paflow import hamiltonian as ham, symplectic as sym
from paflow.acceptance import BLOCK_SETTINGS, cone_points
from paflow.errors import LeftCone, NotSymplectic, ShapeMismatch, ZeroLength
from scipy.linalg import expm


def _grad(f, x, h=1e-5):
    e = np.eye(len(x))
    return np.array([(f(x + h * e[i]) - f(x - h * e[i])) / (2 * h) for i in range(len(x))])


# ------------------------------------------------------------ polynomials

def test_real_pair_polynomial():
    lam = 3.0
    J = sym.standard_form(1)
    for x, y in [(1.0, 2.0), (-0.5, 0.25)]:
        s = np.array([x, y])
        assert ham.evaluate_terms(ham.block_polynomial("RealPair", {"lam": lam}), J @ s) == \
            pytest.approx(-np.log(lam) * x * y)


def test_unit_circle_polynomial():
    th = 0.7
    J = sym.standard_form(1)
    s = np.array([1.5, -2.0])
    val = ham.evaluate_terms(ham.block_polynomial("UnitCircleSimple", {"theta": th}), J @ s)
    assert val == pytest.approx(th / 2 * (1.5 ** 2 + 2.0 ** 2))


@pytest.mark.parametrize("kind,params", [(k, p) for k, ps in BLOCK_SETTINGS.items() for p in ps])
def test_block_polynomials_match_generator(kind, params):
    X, _ = sym.block_generator(kind, params)
    h = X.shape[0] // 2
    J = sym.standard_form(h)
    terms = ham.block_polynomial(kind, params)
    assert all(0 <= i < 2 * h and 0 <= j < 2 * h for _, i, j in terms)
    rng = np.random.default_rng(5)
    for _ in range(20):
        s = rng.normal(size=2 * h)
        assert ham.evaluate_terms(terms, J @ s) == pytest.approx(-0.5 * (X @ s) @ J @ s, abs=1e-10)


def test_identity_gives_zero_potential():
    W = sym.standard_form(2)
    blocks = [sym.Block("UnitCircleSimple", {"theta": 0.0}, (0,), (2,)),
              sym.Block("UnitCircleSimple", {"theta": 0.0}, (1,), (3,))]
    p = ham.potential_from_blocks(blocks, np.eye(4), W)
    assert np.allclose(expm(p.X), np.eye(4))
    assert p(np.array([1.0, 2.0, 3.0, 4.0])) == 0.0


# --------------------------------------------------------------- potential

def test_shipped_potential_terms(example, potential):
    # leading term is the stretch pair
    c, i, j = potential.terms[0]
    h = potential.basis.shape[1] // 2
    assert (i, j) == (0, h)
    assert c == pytest.approx(example.k * np.log(example.stretch))
    assert np.allclose(expm(potential.X), example.B, atol=1e-9 * np.abs(example.B).max())


def test_potential_equals_quadratic_form(example, potential):
    rng = np.random.default_rng(2)
    for _ in range(50):
        s = rng.normal(size=6)
        assert potential(s) == pytest.approx(potential.quadratic_form_value(s), abs=1e-9)


def test_lengths_in_symplectic_basis(potential):
    P = potential.basis
    W = potential.omega
    h = P.shape[1] // 2
    rng = np.random.default_rng(4)
    coords = rng.normal(size=2 * h)
    s = P @ coords
    L = potential.lengths(s)
    assert np.allclose(L[:h], coords[h:], atol=1e-10)
    assert np.allclose(L[h:], -coords[:h], atol=1e-10)
    assert np.allclose(P.T @ W @ P, sym.standard_form(h), atol=1e-9)


def test_gradient_is_flow_velocity(example, potential):
    W = potential.omega
    for s in cone_points(example, 5, np.random.default_rng(9)):
        g = _grad(potential, s)
        v = -potential.X @ s
        # dF(w) = omega(velocity, w) for every w
        assert np.allclose(g, v @ W, rtol=1e-6, atol=1e-6 * np.abs(g).max())


# -------------------------------------------------------------------- flow

def test_time_one_is_inverse_action(example, potential):
    Binv = np.linalg.inv(example.B)
    for s in cone_points(example, 5, np.random.default_rng(0)):
        assert np.allclose(ham.flow(potential, s, 1.0).sigma, Binv @ s, atol=1e-8)
        assert np.allclose(ham.flow(potential, s, 1.0, inverse=True).sigma, example.B @ s, atol=1e-8)


def test_stretch_ray(example, potential):
    h = potential.basis.shape[1] // 2
    b1 = potential.basis[:, h]
    lamk = example.stretch ** example.k
    for t in (0.0, 0.5, 1.3):
        q = ham.flow(potential, b1, t)
        assert np.allclose(q.sigma, lamk ** t * b1, rtol=1e-9)
        assert q.in_cone
    assert abs(potential(2.0 * b1)) < 1e-10


def test_trajectory_conserves_and_flags_cone(example, potential):
    s0 = cone_points(example, 1, np.random.default_rng(1))[0]
    pts, left = ham.trajectory(potential, s0, np.linspace(0, 2, 9))
    F0 = potential(s0)
    assert max(abs(potential(q.sigma) - F0) for q in pts) < 1e-9 * max(1, abs(F0))
    # omega(mu_plus, .) scales by lambda^t along the flow, so it never changes sign
    assert not left
    lamk = example.stretch ** example.k
    for t, q in zip(np.linspace(0, 2, 9), pts):
        assert q.witness == pytest.approx(lamk ** t * pts[0].witness, rel=1e-9)


def test_left_cone(example, potential):
    h = potential.basis.shape[1] // 2
    with pytest.raises(LeftCone):
        ham.flow(potential, -potential.basis[:, h], 0.5)


def test_flow_symplectic(potential):
    for t in (0.3, 1.0, 2.0):
        E = ham.flow_matrix(potential, t)
        assert np.abs(E.T @ potential.omega @ E - potential.omega).max() < 1e-8


# ------------------------------------------------------ simple operations

def test_earthquake_and_lengths(track, space):
    from paflow import tracks
    form = tracks.thurston_form(track, space).form
    a = [Fraction(1), Fraction(-2), Fraction(0), Fraction(3), Fraction(1, 2), Fraction(0)]
    mu = [Fraction(0), Fraction(1), Fraction(1), Fraction(-1), Fraction(0), Fraction(2)]
    s = [Fraction(3), Fraction(1), Fraction(-1), Fraction(2), Fraction(1), Fraction(1, 3)]
    moved = ham.earthquake(np.array(s, dtype=object), np.array(mu, dtype=object), Fraction(1, 7))
    # length is affine along the shear line with slope omega(alpha, mu)
    assert ham.length_of(a, list(moved), form) - ham.length_of(a, s, form) == \
        Fraction(1, 7) * ham.poisson_same_lamination(a, mu, form)
    with pytest.raises(ShapeMismatch):
        ham.earthquake(np.zeros(3), np.zeros(4), 1.0)
    with pytest.raises(ShapeMismatch):
        ham.length_of(a[:5], s, form)


def test_poisson_same_lamination_basics():
    W = sym.standard_form(1)
    assert ham.poisson_same_lamination([1, 0], [0, 1], W) == 1
    assert ham.poisson_same_lamination([1, 0], [1, 0], W) == 0
    with pytest.raises(ShapeMismatch):
        ham.poisson_same_lamination([1], [1, 0], W)


def test_stretch_log_derivative():
    W = sym.standard_form(1)
    s = np.array([2.0, 1.0])
    assert ham.dlog_length_along_stretch_same([1.0, 3.0], s, W) == 1.0
    assert ham.dlog_length_along_stretch_same([1.0, 3.0], 5.0 * s, W) == 1.0
    assert np.allclose(ham.stretch(s, np.log(5.0)), 5.0 * s)
    with pytest.raises(ZeroLength):
        ham.dlog_length_along_stretch_same([2.0, 1.0], s, W)


# --------------------------------------------------------------- Jacobian

def test_jacobian_identity_and_inverse():
    I, Z = np.eye(2), np.zeros((2, 2))
    J, Ji = ham.jacobian_assembly(I, Z, Z, I)
    assert (J == np.eye(4)).all() and (Ji == np.eye(4)).all()
    rng = np.random.default_rng(8)
    S = rng.normal(size=(4, 4))
    M = expm(sym.standard_form(2) @ (S + S.T) * 0.3)
    J, Ji = ham.jacobian_assembly(M[:2, :2], M[:2, 2:], M[2:, :2], M[2:, 2:])
    assert np.allclose(Ji, np.linalg.inv(M), atol=1e-12)


def test_jacobian_not_symplectic():
    I, Z = np.eye(2), np.zeros((2, 2))
    with pytest.raises(NotSymplectic):
        ham.jacobian_assembly(2 * I, Z, Z, I)
    with pytest.raises(ShapeMismatch):
        ham.jacobian_assembly(I, Z, Z, np.eye(3))


# ---------------------------------------------------------------- bracket

def _brute(L, la, lb, lA, lB, cbB, cbA, caB, caA):
    tot = 0.0
    for i in range(len(L)):
        for j in range(len(L)):
            tot += L[i] * L[j] * (la[i] * lA[j] * cbB[i][j] + la[i] * lB[j] * cbA[i][j]
                                  + lb[i] * lA[j] * caB[i][j] + lb[i] * lB[j] * caA[i][j])
    return tot


def test_bracket_zero_cosines():
    z = np.zeros((3, 3))
    assert ham.pa_bracket_evaluate([1, 2, 3], [1, 1, 1], [1, 1, 1], [1, 1, 1], [1, 1, 1], z, z, z, z) == 0.0


def test_bracket_brute_force():
    rng = np.random.default_rng(12)
    L = np.log([5.0, 2.0, 1.3])
    vecs = rng.normal(size=(4, 3))
    C = rng.normal(size=(3, 3))
    mats = [C, C.T, C + C.T, C - C.T]
    got = ham.pa_bracket_evaluate(L, *vecs, *mats)
    assert got == pytest.approx(_brute(L, *vecs, *mats), abs=1e-12)


def test_bracket_on_stretch_line():
    rng = np.random.default_rng(13)
    L = np.log([6.0, 2.5, 1.4])
    t = 0.8
    la = np.array([np.exp(t), 0.0, 0.0])
    lb = np.zeros(3)
    lA, lB = rng.normal(size=(2, 3))
    mats = rng.normal(size=(4, 3, 3))
    # only i = 1 survives, and only the two terms carrying l_alpha_1
    single = np.exp(t) * L[0] * sum(L[j] * (lA[j] * mats[0][0, j] + lB[j] * mats[1][0, j]) for j in range(3))
    assert ham.pa_bracket_evaluate(L, la, lb, lA, lB, *mats) == pytest.approx(single, abs=1e-12)


def test_bracket_leibniz_in_one_space(example):
    """With every cocycle in one space the cosines are omega and the sum is a Poisson bracket."""
    W = example.form
    rng = np.random.default_rng(21)
    al, be, A, B = rng.normal(size=(4, 3, 6))
    L = np.log([4.0, 2.0, 1.5])
    ell = lambda x, s: x @ W @ s
    G = lambda s: sum(L[i] * ell(al[i], s) * ell(be[i], s) for i in range(3))
    H = lambda s: sum(L[j] * ell(A[j], s) * ell(B[j], s) for j in range(3))
    Winv = np.linalg.inv(W)
    Pi = np.linalg.inv(W.T) @ W @ Winv  # {l_x, l_y} = omega(x, y)
    s = rng.normal(size=6)
    oracle = _grad(G, s) @ Pi @ _grad(H, s)
    cos = lambda X, Y: np.array([[x @ W @ y for y in Y] for x in X])
    got = ham.pa_bracket_evaluate(L, [ell(a, s) for a in al], [ell(b, s) for b in be],
                                  [ell(a, s) for a in A], [ell(b, s) for b in B],
                                  cos(be, B), cos(be, A), cos(al, B), cos(al, A))
    assert got == pytest.approx(oracle, rel=1e-6)


def test_bracket_shape_mismatch():
    z = np.zeros((2, 2))
    with pytest.raises(ShapeMismatch):
        ham.pa_bracket_evaluate([1, 2], [1, 1], [1, 1], [1, 1, 1], [1, 1], z, z, z, z)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6), st.floats(-2, 2))
def test_potential_homogeneous_of_degree_two(potential, s, c):
    s = np.array(s)
    assert potential(c * s) == pytest.approx(c * c * potential(s), abs=1e-9 * (1 + abs(potential(s))))
