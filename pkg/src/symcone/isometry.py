"""Isometries of the E(n) lattice: generators, words, orbit normal form, spinor norm.

An :class:`Isometry` carries both its matrix (acting on coordinate column
vectors) and the generator word it came from.  The word is read left to
right as a matrix product, so ``word[-1]`` acts first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from symcone import linalg
from symcone.lattice import (
    F, W, R, T, LatticeError, SurfaceModel, basis_vector, divisibility,
    gram_apply, lattice_vector, pairing, rational_class, square,
    supported_on_perp, xgcd,
)


class IsometryError(ValueError):
    pass


@dataclass(frozen=True)
class Reflection:
    v: tuple


@dataclass(frozen=True)
class Eichler:
    u: tuple
    x: tuple


@dataclass(frozen=True)
class FMap:
    i: int


@dataclass(frozen=True)
class Explicit:
    matrix: tuple  # row-major tuple of row tuples


Generator = Union[Reflection, Eichler, FMap, Explicit]


@dataclass(frozen=True, eq=False)
class Isometry:
    model: SurfaceModel
    matrix: np.ndarray
    word: tuple = ()

    def __call__(self, x):
        return apply(self, x)

    def __eq__(self, other):
        if not isinstance(other, Isometry):
            return NotImplemented
        return (self.model == other.model and self.word == other.word
                and np.array_equal(self.matrix, other.matrix))

    __hash__ = None

    @property
    def is_integral(self) -> bool:
        return linalg.is_integral(self.matrix)


def _tup(x) -> tuple:
    return tuple(x.tolist() if isinstance(x, np.ndarray) else x)


# --- generator matrices -----------------------------------------------------

def _reflect_left(model: SurfaceModel, v: np.ndarray, m: np.ndarray) -> np.ndarray:
    vv = square(model, v)
    if vv == 0:
        raise IsometryError("reflection in an isotropic vector")
    row = gram_apply(model, v) @ m  # v^T G M
    coef = Fraction(2) / Fraction(vv)
    out = m - np.outer(v, row * coef)
    return _normalize(out)


def _eichler_left(model: SurfaceModel, u: np.ndarray, x: np.ndarray, m: np.ndarray) -> np.ndarray:
    urow = gram_apply(model, u) @ m
    xrow = gram_apply(model, x) @ m
    sq = square(model, x)
    half = sq // 2 if sq % 2 == 0 else Fraction(sq, 2)
    out = m + np.outer(x, urow) - np.outer(u, xrow)
    if half:
        out = out - np.outer(u, urow * half)
    return out if isinstance(half, int) else _normalize(out)


def _f_left(model: SurfaceModel, i: int, m: np.ndarray) -> np.ndarray:
    # f_i: W -> W + iT, R -> R - iF; as a matrix, column W gains i in row T
    # and column R gains -i in row F.
    out = m.copy()
    out[T] = m[T] + i * m[W]
    out[F] = m[F] - i * m[R]
    return out


def _normalize(m: np.ndarray) -> np.ndarray:
    out = np.empty(m.shape, dtype=object)
    for idx, v in np.ndenumerate(m):
        out[idx] = int(v) if isinstance(v, Fraction) and v.denominator == 1 else v
    return out


def _apply_generator(model: SurfaceModel, gen: Generator, m: np.ndarray) -> np.ndarray:
    if isinstance(gen, Reflection):
        return _reflect_left(model, linalg.as_object(gen.v), m)
    if isinstance(gen, Eichler):
        return _eichler_left(model, linalg.as_object(gen.u), linalg.as_object(gen.x), m)
    if isinstance(gen, FMap):
        return _f_left(model, gen.i, m)
    if isinstance(gen, Explicit):
        return _normalize(linalg.as_object(gen.matrix) @ m)
    raise TypeError(f"unknown generator {gen!r}")


def replay(model: SurfaceModel, word) -> np.ndarray:
    """Recompute the matrix of a generator word from scratch."""
    m = linalg.identity(model.rank)
    for gen in reversed(tuple(word)):
        _check_generator(model, gen)
        m = _apply_generator(model, gen, m)
    return m


def _check_generator(model: SurfaceModel, gen: Generator) -> None:
    if isinstance(gen, Reflection):
        if len(gen.v) != model.rank:
            raise IsometryError("reflection vector has wrong length")
        if square(model, linalg.as_object(gen.v)) == 0:
            raise IsometryError("reflection in an isotropic vector")
    elif isinstance(gen, Eichler):
        u, x = linalg.as_object(gen.u), linalg.as_object(gen.x)
        if len(u) != model.rank or len(x) != model.rank:
            raise IsometryError("Eichler vectors have wrong length")
        if square(model, u) != 0:
            raise IsometryError("Eichler transvection needs an isotropic u")
        if pairing(model, u, x) != 0:
            raise IsometryError("Eichler transvection needs x orthogonal to u")
    elif isinstance(gen, FMap):
        if not isinstance(gen.i, int):
            raise IsometryError("f_i needs an integer i")
    elif isinstance(gen, Explicit):
        mat = linalg.as_object(gen.matrix)
        if mat.shape != (model.rank, model.rank):
            raise IsometryError("explicit matrix has wrong shape")
        if not preserves_gram(model, mat):
            raise IsometryError("explicit matrix does not preserve the form")


# --- constructors -----------------------------------------------------------

def identity(model: SurfaceModel) -> Isometry:
    return Isometry(model, linalg.identity(model.rank), ())


def reflection(model: SurfaceModel, v) -> Isometry:
    """x -> x - 2 (x.v / v.v) v; rational in general."""
    v = rational_class(model, v)
    v = linalg.as_object([int(c) if c.denominator == 1 else c for c in v])
    gen = Reflection(_tup(v))
    _check_generator(model, gen)
    m = _reflect_left(model, v, linalg.identity(model.rank))
    return Isometry(model, m, (gen,))


def eichler(model: SurfaceModel, u, x) -> Isometry:
    """Eichler transvection y -> y + (y.u)x - (y.x)u - x^2/2 (y.u)u."""
    u = lattice_vector(model, u)
    x = lattice_vector(model, x)
    gen = Eichler(_tup(u), _tup(x))
    _check_generator(model, gen)
    m = _eichler_left(model, u, x, linalg.identity(model.rank))
    if not linalg.is_integral(m):
        raise IsometryError("Eichler transvection is not integral on the lattice")
    return Isometry(model, m, (gen,))


def make_f(model: SurfaceModel, i: int) -> Isometry:
    """F -> F, W -> W + iT, R -> R - iF, T -> T, identity elsewhere."""
    i = int(i)
    return Isometry(model, _f_left(model, i, linalg.identity(model.rank)), (FMap(i),))


def explicit(model: SurfaceModel, matrix) -> Isometry:
    mat = linalg.to_int(linalg.as_object(matrix))
    gen = Explicit(tuple(tuple(r) for r in mat.tolist()))
    _check_generator(model, gen)
    return Isometry(model, mat, (gen,))


# --- algebra ----------------------------------------------------------------

def compose(g: Isometry, h: Isometry) -> Isometry:
    """g after h."""
    if g.model != h.model:
        raise IsometryError("isometries of different lattices")
    return Isometry(g.model, _normalize(g.matrix @ h.matrix), g.word + h.word)


def compose_all(model: SurfaceModel, *gs: Isometry) -> Isometry:
    out = identity(model)
    for g in gs:
        out = compose(out, g)
    return out


def _inverse_generator(model: SurfaceModel, gen: Generator) -> Generator:
    if isinstance(gen, Reflection):
        return gen
    if isinstance(gen, Eichler):
        return Eichler(gen.u, tuple(-c for c in gen.x))
    if isinstance(gen, FMap):
        return FMap(-gen.i)
    if isinstance(gen, Explicit):
        inv = _matrix_inverse(model, linalg.as_object(gen.matrix))
        return Explicit(tuple(tuple(r) for r in linalg.to_int(inv).tolist()))
    raise TypeError(f"unknown generator {gen!r}")


def _matrix_inverse(model: SurfaceModel, m: np.ndarray) -> np.ndarray:
    # M^T G M = G  =>  M^{-1} = G^{-1} M^T G, and G^{-1} is computed exactly
    ginv = _gram_inverse(model)
    return _normalize(ginv @ m.T @ model.gram)


_GINV: dict[int, np.ndarray] = {}


def _gram_inverse(model: SurfaceModel) -> np.ndarray:
    """Exact inverse of the Gram matrix, assembled block by block."""
    if model.n not in _GINV:
        g = model.gram
        inv = linalg.zeros(g.shape)
        blocks = [(0, 2), (2, 4)]
        blocks += [(4 + 2 * j, 6 + 2 * j) for j in range(model.a)]
        start = 4 + 2 * model.a
        blocks += [(start + 8 * k, start + 8 * k + 8) for k in range(model.b)]
        for lo, hi in blocks:
            inv[lo:hi, lo:hi] = linalg.to_int(linalg.inverse(g[lo:hi, lo:hi]))
        _GINV[model.n] = inv
    return _GINV[model.n]


def invert(g: Isometry) -> Isometry:
    word = tuple(_inverse_generator(g.model, gen) for gen in reversed(g.word))
    return Isometry(g.model, _matrix_inverse(g.model, g.matrix), word)


def apply_inverse(g: Isometry, x) -> np.ndarray:
    """g^{-1} x as G^{-1} g^T G x, without forming the inverse matrix."""
    x = np.asarray(x, dtype=object)
    if x.shape != (g.model.rank,):
        raise LatticeError(f"expected a vector of length {g.model.rank}")
    w, d = linalg.common_denominator(x)
    y = _gram_inverse(g.model) @ (g.matrix.T @ gram_apply(g.model, w))
    return _scale_down(y, d)


def apply(g: Isometry, x) -> np.ndarray:
    x = np.asarray(x, dtype=object)
    if x.shape != (g.model.rank,):
        raise LatticeError(f"expected a vector of length {g.model.rank}")
    w, d = linalg.common_denominator(x)
    return _scale_down(g.matrix @ w, d)


def _scale_down(y: np.ndarray, d: int) -> np.ndarray:
    if d == 1:
        return y
    return np.array([Fraction(int(c), d) for c in y], dtype=object)


def preserves_gram(model: SurfaceModel, m: np.ndarray) -> bool:
    m = np.asarray(m, dtype=object)
    if m.shape != (model.rank, model.rank):
        return False
    return np.array_equal(m.T @ gram_apply(model, m), model.gram)


def satisfies_star(g: Isometry) -> bool:
    """Identity on the (F, W) summand: the F and W rows and columns are unit vectors."""
    m = g.matrix
    for idx in (F, W):
        unit = basis_vector(g.model, idx)
        if not (np.array_equal(m[:, idx], unit) and np.array_equal(m[idx, :], unit)):
            return False
    return True


def fixes_F(g: Isometry) -> bool:
    return np.array_equal(g.matrix[:, F], basis_vector(g.model, F))


# --- orbit normal form --------------------------------------------------------

class _Walker:
    """Applies Eichler moves to a vector while recording them."""

    def __init__(self, model: SurfaceModel, x: np.ndarray):
        self.model = model
        self.x = x.copy()
        self.moves: list[Eichler] = []

    def move(self, u_idx: int, y: np.ndarray) -> None:
        if not y.any():
            return
        model = self.model
        u = basis_vector(model, u_idx)
        x = self.x
        xu = pairing(model, x, u)
        xy = pairing(model, x, y)
        half = square(model, y) // 2
        self.x = x + xu * y - xy * u - half * xu * u
        # E(u, y1) E(u, y2) = E(u, y1 + y2)
        if self.moves and self.moves[-1].u == _tup(u):
            merged = linalg.as_object(self.moves[-1].x) + y
            self.moves.pop()
            if merged.any():
                self.moves.append(Eichler(_tup(u), _tup(merged)))
            return
        self.moves.append(Eichler(_tup(u), _tup(y)))

    def plane_op(self, kind: str, k: int) -> None:
        """SL2 row/column operation on X = [[a, c], [-d, b]] with
        a, b, c, d the R, T, u_1, v_1 coefficients."""
        if k == 0:
            return
        model = self.model
        u1, v1 = model.u(1), model.v(1)
        if kind == "row1+=row2":       # a -= k d, c += k b
            self.move(R, basis_vector(model, u1, k))
        elif kind == "row2+=row1":     # b += k c, d -= k a
            self.move(T, basis_vector(model, v1, -k))
        elif kind == "col1+=col2":     # a += k c, d -= k b
            self.move(R, basis_vector(model, v1, -k))
        elif kind == "col2+=col1":     # c += k a, b -= k d
            self.move(T, basis_vector(model, u1, k))
        else:
            raise ValueError(kind)

    def block(self) -> list[list[int]]:
        m = self.model
        x = self.x
        return [[x[R], x[m.u(1)]], [-x[m.v(1)], x[T]]]


def _nearest_quotient(a: int, d: int) -> int:
    """q with |a - q d| <= |d| / 2."""
    q, r = divmod(a, d)
    if 2 * abs(r) > abs(d):
        q += 1
    return q


def _smith_2x2(w: _Walker) -> None:
    """Reduce the (R,T,u_1,v_1) block to diag(g, h) with g = gcd >= 0."""
    while True:
        X = w.block()
        if X[0][0] == 0 and X[1][0] == 0 and X[0][1] == 0 and X[1][1] == 0:
            return
        # bring a nonzero entry to the corner
        if X[0][0] == 0:
            if X[1][0] != 0:
                w.plane_op("row1+=row2", 1)
            elif X[0][1] != 0:
                w.plane_op("col1+=col2", 1)
            else:
                w.plane_op("row1+=row2", 1)  # makes X[0][1] = X[1][1]
            continue
        changed = False
        # column 1 by row operations
        while w.block()[1][0] != 0:
            X = w.block()
            a, d = X[0][0], X[1][0]
            if a != 0 and d % a == 0:
                w.plane_op("row2+=row1", -(d // a))
            else:
                q = _nearest_quotient(a, d)
                w.plane_op("row1+=row2", -q)
                # swap roles: (r1, r2) -> (r2, -r1) via three transvections
                w.plane_op("row2+=row1", -1)
                w.plane_op("row1+=row2", 1)
                w.plane_op("row2+=row1", -1)
            changed = True
        # row 1 by column operations
        while w.block()[0][1] != 0:
            X = w.block()
            a, c = X[0][0], X[0][1]
            if a != 0 and c % a == 0:
                w.plane_op("col2+=col1", -(c // a))
            else:
                q = _nearest_quotient(a, c)
                w.plane_op("col1+=col2", -q)
                w.plane_op("col2+=col1", -1)
                w.plane_op("col1+=col2", 1)
                w.plane_op("col2+=col1", -1)
            changed = True
        if changed:
            continue
        X = w.block()
        g, h = X[0][0], X[1][1]
        if h % g != 0:
            w.plane_op("row1+=row2", 1)
            continue
        if g < 0:
            # -I on the block, a product of transvections
            for _ in range(2):
                w.plane_op("row1+=row2", 1)
                w.plane_op("row2+=row1", -1)
                w.plane_op("row1+=row2", 1)
        return


def map_to_RT(model: SurfaceModel, x) -> Isometry:
    """Eichler word g with (*) and g(x) = R + (x.x/2) T for primitive x orthogonal to F, W."""
    x = lattice_vector(model, x)
    if not supported_on_perp(model, x):
        raise LatticeError("map_to_RT needs x orthogonal to F and W")
    if not x.any() or divisibility(model, x) != 1:
        raise LatticeError("map_to_RT needs a primitive vector")
    delta = square(model, x) // 2
    w = _Walker(model, x)
    _smith_2x2(w)
    if w.x[R] != 1:
        # gcd of the block is > 1 (or block is 0); pull in the rest of the vector
        rest = w.x.copy()
        for idx in (F, W, R, T, model.u(1), model.v(1)):
            rest[idx] = 0
        s = _dual_witness(model, rest)
        # x.u_1 = v_1-coefficient = 0 after the reduction, so this only shifts u_1
        w.move(model.u(1), s)
        _smith_2x2(w)
    if w.x[R] != 1:
        raise IsometryError("orbit reduction failed to reach R-coefficient 1")
    rest = w.x.copy()
    for idx in (F, W, R, T):
        rest[idx] = 0
    w.move(T, -rest)
    target = basis_vector(model, R)
    target[T] = delta
    if not np.array_equal(w.x, target):
        raise IsometryError("orbit reduction did not land on R + delta*T")
    word = tuple(reversed(w.moves))
    return Isometry(model, replay(model, word), word)


def _dual_witness(model: SurfaceModel, z: np.ndarray) -> np.ndarray:
    """Lattice vector s in the support block of z with z.s = divisibility(z)."""
    c = gram_apply(model, z)
    s = linalg.zeros(model.rank)
    g = 0
    coeffs: dict[int, int] = {}
    for j in range(model.rank):
        cj = int(c[j])
        if cj == 0:
            continue
        if g == 0:
            g, coeffs = abs(cj), {j: 1 if cj > 0 else -1}
            continue
        d, p, q = xgcd(g, cj)
        coeffs = {k: p * v for k, v in coeffs.items()}
        coeffs[j] = q
        g = d
    for j, v in coeffs.items():
        s[j] = v
    return s


# --- spinor norm --------------------------------------------------------------

def _cartan_dieudonne(gram: np.ndarray, h: np.ndarray) -> list[np.ndarray]:
    """Reflection vectors v_1..v_k (coordinates in the basis of ``gram``) with
    h = r_{v_1} ... r_{v_k}."""

    def q(a, b):
        return a @ gram @ b

    def reflect(v, vv, m):
        return m - np.outer(v, (v @ gram @ m) * (Fraction(2) / vv))

    vecs, _ = linalg.orthogonal_basis(gram)
    h = linalg.as_object(h)
    found: list[np.ndarray] = []
    for x in vecs:
        hx = h @ x
        if np.array_equal(hx, x):
            continue
        v = hx - x
        vv = q(v, v)
        if vv != 0:
            h = reflect(v, vv, h)
            found.append(v)
        else:
            # h(x) - x isotropic: w = h(x) + x has square 4 x.x != 0
            wv = hx + x
            h = reflect(wv, q(wv, wv), h)
            h = reflect(x, q(x, x), h)
            found.extend([wv, x])
    if not np.array_equal(h, linalg.identity(len(h))):
        raise IsometryError("reflection decomposition did not terminate at the identity")
    return found


def _moved_subspace(model: SurfaceModel, m: np.ndarray) -> np.ndarray | None:
    """Integer basis (columns) of a nondegenerate subspace U containing im(m - 1).

    The isometry preserves U and is the identity on its orthogonal complement.
    """
    d = _normalize(m - linalg.identity(model.rank))
    if not d.any():
        return None
    cols = linalg.column_basis(d)
    k_basis = [linalg.clear_denominators(d[:, c]) for c in cols]
    kmat = np.column_stack(k_basis)
    gram_k = kmat.T @ gram_apply(model, kmat)
    null = linalg.nullspace(gram_k)
    if not null:
        return kmat
    rad = [linalg.clear_denominators(kmat @ nv) for nv in null]
    # complement K0 of the radical inside K
    chosen = list(rad)
    k0 = []
    for v in k_basis:
        if linalg.rank(np.column_stack(chosen + [v])) > len(chosen):
            chosen.append(v)
            k0.append(v)
    # hyperbolic partners: w_j . rad_i = delta_ij, w_j orthogonal to K0
    constraints = np.vstack([gram_apply(model, v) for v in rad + k0])
    partners = []
    for j in range(len(rad)):
        rhs = [int(i == j) for i in range(len(rad) + len(k0))]
        partners.append(linalg.clear_denominators(linalg.solve(constraints, rhs)))
    return np.column_stack(k0 + rad + partners)


def reflection_decomposition(g: Isometry) -> list[np.ndarray]:
    """Rational vectors v_1..v_k with g = r_{v_1} ... r_{v_k} (Cartan-Dieudonne)."""
    model = g.model
    basis = _moved_subspace(model, g.matrix)
    if basis is None:
        return []
    gram_u = basis.T @ gram_apply(model, basis)
    # coordinates of g(b_j) in the basis of U
    image = basis.T @ gram_apply(model, _normalize(g.matrix @ basis))
    h = linalg.inverse(gram_u) @ image
    return [_normalize(basis @ v) for v in _cartan_dieudonne(gram_u, h)]


def spinor_norm(g: Isometry) -> int:
    """Product of sign(v.v) over a reflection decomposition of g."""
    sign = 1
    for v in reflection_decomposition(g):
        if square(g.model, v) < 0:
            sign = -sign
    return sign


def is_realizable(g: Isometry) -> bool:
    """Fixes F (hence c_1) and has spinor norm +1."""
    return fixes_F(g) and spinor_norm(g) == 1
