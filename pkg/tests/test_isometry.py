from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcone import isometry as iso
from symcone import linalg
from symcone.lattice import (
    F, W, R, T, LatticeError, basis_vector, build_surface_model, combo, gram_apply,
    is_primitive, pairing, square,
)

from conftest import lattice_vectors, rational_classes


# --- independent oracles ----------------------------------------------------------

def positive_frame(model):
    """Columns spanning a maximal positive definite subspace, pairwise orthogonal.

    F+W (or W for odd n), R+T and u_j+v_j: 2 + a = 2n - 1 vectors.
    """
    first = combo(model, W=1) if model.parity_eps else combo(model, F=1, W=1)
    cols = [first, combo(model, R=1, T=1)]
    cols += [combo(model, **{f"u{j}": 1, f"v{j}": 1}) for j in range(1, model.a + 1)]
    return np.column_stack(cols)


def spinor_oracle(model, m):
    """det(g) times the orientation character on positive definite subspaces.

    A reflection in a vector of positive square reverses the positive
    orientation (det -1, character -1, product +1); one of negative square keeps
    it (det -1, character +1, product -1).
    """
    x = positive_frame(model)
    theta = linalg.bareiss_det(x.T @ model.gram @ m @ x)
    det = linalg.bareiss_det(m)
    assert theta != 0 and abs(det) == 1
    return det * (1 if theta > 0 else -1)


def same_map(g, h):
    return np.array_equal(g.matrix, h.matrix)


def is_isometry(model, m):
    return (m.T @ model.gram @ m == model.gram).all()


# --- strategies ---------------------------------------------------------------------

@st.composite
def generators(draw, model):
    """Integral generators: f_i, Eichler moves along R, T, u_j, v_j, and
    reflections in roots of the -E8 blocks or in u_j - v_j."""
    kind = draw(st.sampled_from(["f", "eichler", "root"]))
    if kind == "f":
        return iso.make_f(model, draw(st.integers(-4, 4)))
    if kind == "eichler":
        j = draw(st.integers(1, model.a))
        u_name = draw(st.sampled_from(["R", "T", f"u{j}", f"v{j}"]))
        u = combo(model, **{u_name: 1})
        x = draw(lattice_vectors(model, perp_only=True, density=0.1))
        # project x orthogonal to u by killing the partner coordinate
        partner = {"R": T, "T": R, f"u{j}": model.v(j), f"v{j}": model.u(j)}[u_name]
        x[partner] = 0
        return iso.eichler(model, u, x)
    if draw(st.booleans()):
        block = draw(st.integers(0, model.b - 1))
        k = draw(st.integers(0, 7))
        v = basis_vector(model, model.e8_index(block, k))
    else:
        j = draw(st.integers(1, model.a))
        v = combo(model, **{f"u{j}": 1, f"v{j}": -1})
    return iso.reflection(model, v)


@st.composite
def words(draw, model, max_len=20):
    g = iso.identity(model)
    for _ in range(draw(st.integers(0, max_len))):
        g = iso.compose(draw(generators(model)), g)
    return g


# --- examples -----------------------------------------------------------------------

def test_reflection_examples(m3, m4):
    w = basis_vector(m3, W)
    assert list(iso.apply(iso.reflection(m3, w), w)) == list(-w)
    r = iso.reflection(m4, combo(m4, F=1, W=1))
    assert list(iso.apply(r, basis_vector(m4, F))) == list(combo(m4, W=-1))
    assert same_map(iso.compose(r, r), iso.identity(m4))


def test_reflection_rejects_isotropic(m4):
    with pytest.raises(iso.IsometryError):
        iso.reflection(m4, basis_vector(m4, F))


def test_eichler_examples(m4):
    u1 = combo(m4, u1=1)
    assert iso.eichler(m4, combo(m4, R=1), linalg.zeros(m4.rank)).matrix.tolist() == \
        iso.identity(m4).matrix.tolist()
    e = iso.eichler(m4, combo(m4, R=1), u1)
    assert list(iso.apply(e, combo(m4, R=1))) == list(combo(m4, R=1))
    e = iso.eichler(m4, combo(m4, T=1), u1)
    assert list(iso.apply(e, combo(m4, R=1))) == list(combo(m4, R=1, u1=1))


def test_eichler_preconditions(m4):
    with pytest.raises(iso.IsometryError):
        iso.eichler(m4, combo(m4, R=1, T=1), combo(m4, u1=1))
    with pytest.raises(iso.IsometryError):
        iso.eichler(m4, combo(m4, R=1), combo(m4, T=1))


@pytest.mark.parametrize("i", range(-5, 6))
def test_make_f(m3, m4, i):
    for m in (m3, m4):
        f = iso.make_f(m, i)
        assert is_isometry(m, f.matrix)
        assert iso.fixes_F(f)
        assert iso.spinor_norm(f) == 1 == spinor_oracle(m, f.matrix)
        assert list(iso.apply(f, combo(m, W=1))) == list(combo(m, W=1, T=i))
        assert list(iso.apply(f, combo(m, R=1))) == list(combo(m, R=1, F=-i))


def test_make_f_zero_and_inverse(m4):
    assert same_map(iso.make_f(m4, 0), iso.identity(m4))
    assert same_map(iso.compose(iso.make_f(m4, 3), iso.make_f(m4, -3)), iso.identity(m4))
    assert list(iso.apply(iso.make_f(m4, 2), combo(m4, R=1))) == list(combo(m4, R=1, F=-2))


@given(data=st.data(), i=st.integers(-50, 50))
def test_make_f_coefficient_action(model, data, i):
    a, b, c, d = (data.draw(st.fractions(-9, 9, max_denominator=9)) for _ in range(4))
    x = combo(model, F=a, W=b, R=c, T=d)
    assert list(iso.apply(iso.make_f(model, i), x)) == list(combo(model, F=a - i * c, W=b, R=c, T=d + i * b))


def test_negative_root_reflection_not_realizable(m4):
    root = basis_vector(m4, m4.e8_index(0, 0))
    assert square(m4, root) == -2
    r = iso.reflection(m4, root)
    assert iso.fixes_F(r)
    assert iso.spinor_norm(r) == -1 == spinor_oracle(m4, r.matrix)
    assert not iso.is_realizable(r)


def test_identity_spinor(model):
    assert iso.spinor_norm(iso.identity(model)) == 1
    assert iso.reflection_decomposition(iso.identity(model)) == []


@pytest.mark.parametrize("coeffs,delta,trivial", [
    (dict(R=1), 0, True),
    (dict(R=1, T=5), 5, True),
    (dict(u1=1, v1=1), 1, False),
])
def test_map_to_rt_examples(m4, coeffs, delta, trivial):
    x = combo(m4, **coeffs)
    g = iso.map_to_RT(m4, x)
    assert list(iso.apply(g, x)) == list(combo(m4, R=1, T=delta))
    assert (len(g.word) == 0) == trivial
    assert iso.satisfies_star(g) and iso.is_realizable(g)


def test_map_to_rt_rejects(m4):
    with pytest.raises(LatticeError):
        iso.map_to_RT(m4, combo(m4, R=2, T=4))
    with pytest.raises(LatticeError):
        iso.map_to_RT(m4, combo(m4, F=1, R=1))
    with pytest.raises(LatticeError):
        iso.map_to_RT(m4, linalg.zeros(m4.rank))


# --- properties ---------------------------------------------------------------------

@settings(max_examples=20)
@given(data=st.data())
def test_words_preserve_gram(model, data):
    g = data.draw(words(model))
    assert is_isometry(model, g.matrix)
    assert abs(linalg.bareiss_det(g.matrix)) == 1
    assert (iso.replay(model, g.word) == g.matrix).all()


@given(data=st.data())
def test_eichler_composition_law(model, data):
    u = combo(model, R=1)
    x = data.draw(lattice_vectors(model, perp_only=True, density=0.1))
    y = data.draw(lattice_vectors(model, perp_only=True, density=0.1))
    x[T] = y[T] = 0
    lhs = iso.compose(iso.eichler(model, u, x), iso.eichler(model, u, y))
    assert (lhs.matrix == iso.eichler(model, u, x + y).matrix).all()
    inv = iso.eichler(model, u, -x)
    assert same_map(iso.compose(iso.eichler(model, u, x), inv), iso.identity(model))


@settings(max_examples=20)
@given(data=st.data())
def test_spinor_norm_matches_oracle_and_is_multiplicative(model, data):
    g = data.draw(words(model, max_len=8))
    h = data.draw(words(model, max_len=8))
    sg, sh = iso.spinor_norm(g), iso.spinor_norm(h)
    assert sg == spinor_oracle(model, g.matrix)
    assert sh == spinor_oracle(model, h.matrix)
    assert iso.spinor_norm(iso.compose(g, h)) == sg * sh


@settings(max_examples=20)
@given(data=st.data())
def test_reflection_product_reconstructs(model, data):
    g = data.draw(words(model, max_len=6))
    m = linalg.identity(model.rank)
    # g = r_1 ... r_k: apply r_k first, as rank-one updates on the left
    for v in reversed(iso.reflection_decomposition(g)):
        coef = Fraction(2) / square(model, v)
        m = m - np.outer(v, (gram_apply(model, v) @ m) * coef)
    assert (m == g.matrix).all()


@settings(max_examples=20)
@given(data=st.data())
def test_invert(model, data):
    g = data.draw(words(model, max_len=10))
    gi = iso.invert(g)
    assert same_map(iso.compose(g, gi), iso.identity(model))
    assert (iso.replay(model, gi.word) == gi.matrix).all()
    assert iso.is_realizable(gi) == iso.is_realizable(g)
    x = data.draw(rational_classes(model))
    assert list(iso.apply_inverse(g, iso.apply(g, x))) == list(x)
    assert list(iso.apply(iso.identity(model), x)) == list(x)


@given(data=st.data())
def test_map_to_rt_property(model, data):
    x = data.draw(lattice_vectors(model, perp_only=True))
    if not x.any() or not is_primitive(model, x):
        return
    g = iso.map_to_RT(model, x)
    assert list(g.matrix @ x) == list(combo(model, R=1, T=square(model, x) // 2))
    assert iso.satisfies_star(g)
    assert is_isometry(model, g.matrix)
    assert iso.spinor_norm(g) == 1 == spinor_oracle(model, g.matrix)


def test_map_to_rt_large_coordinates():
    m = build_surface_model(5)
    x = combo(m, R=123456, T=-98765, u1=4567, v1=-3, u2=77)
    g = iso.map_to_RT(m, x)
    assert list(g.matrix @ x) == list(combo(m, R=1, T=square(m, x) // 2))
    assert iso.is_realizable(g)
