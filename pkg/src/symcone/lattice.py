"""Intersection lattice of the elliptic surface E(n).

The lattice is written in a fixed basis

    F, W, R, T, u_1, v_1, ..., u_a, v_a, (8 vectors of -E8) x b

with a = 2n - 3 and b = n.  F is the fibre, W the smoothed section class
(W.W = 0 for even n, 1 for odd n), and R, T span a hyperbolic plane.
Vectors are 1-D numpy object arrays of ``int`` (lattice vectors) or
``Fraction`` (rational classes) in this basis order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from symcone import linalg

F, W, R, T = 0, 1, 2, 3

# diagonal 2, -1 on the chain e1-...-e7 and on the edge e5-e8 (0-based below)
E8_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)]


class LatticeError(ValueError):
    pass


def e8_gram() -> np.ndarray:
    g = linalg.zeros((8, 8))
    for i in range(8):
        g[i, i] = 2
    for i, j in E8_EDGES:
        g[i, j] = g[j, i] = -1
    return g


@dataclass(frozen=True, eq=False)
class SurfaceModel:
    n: int
    m: int
    parity_eps: int
    rank: int
    a: int
    b: int
    c1_coeff: int
    gram: np.ndarray = field(repr=False)
    # sparse rows of the Gram matrix: rows[i] = ((j, g_ij), ...)
    rows: tuple = field(repr=False)

    @property
    def spin(self) -> bool:
        return self.n % 2 == 0

    def u(self, j: int) -> int:
        """Index of u_j (1-based j) in the fixed basis."""
        if not 1 <= j <= self.a:
            raise IndexError(j)
        return 4 + 2 * (j - 1)

    def v(self, j: int) -> int:
        return self.u(j) + 1

    def e8_index(self, block: int, k: int) -> int:
        """Index of the k-th vector (0-based) of the given -E8 block (0-based)."""
        if not (0 <= block < self.b and 0 <= k < 8):
            raise IndexError((block, k))
        return 4 + 2 * self.a + 8 * block + k

    def __eq__(self, other):
        if not isinstance(other, SurfaceModel):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.gram, other.gram)

    def __hash__(self):
        return hash(("SurfaceModel", self.n))


@lru_cache(maxsize=None)
def build_surface_model(n: int) -> SurfaceModel:
    if not isinstance(n, int) or n < 3:
        raise LatticeError(f"E(n) requires an integer n >= 3, got {n!r}")
    m = n // 2 if n % 2 == 0 else (n + 1) // 2
    eps = n % 2
    a = 2 * n - 3
    b = n
    rank = 4 + 2 * a + 8 * b
    g = linalg.zeros((rank, rank))
    g[F, W] = g[W, F] = 1
    g[W, W] = eps
    g[R, T] = g[T, R] = 1
    for j in range(a):
        i = 4 + 2 * j
        g[i, i + 1] = g[i + 1, i] = 1
    e8 = e8_gram()
    for k in range(b):
        s = 4 + 2 * a + 8 * k
        g[s:s + 8, s:s + 8] = -e8
    g.setflags(write=False)
    rows = tuple(
        tuple((j, g[i, j]) for j in range(rank) if g[i, j] != 0) for i in range(rank)
    )
    return SurfaceModel(
        n=n, m=m, parity_eps=eps, rank=rank, a=a, b=b, c1_coeff=-(n - 2),
        gram=g, rows=rows,
    )


def _check(model: SurfaceModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=object)
    if x.shape != (model.rank,):
        raise LatticeError(f"expected a vector of length {model.rank}, got shape {x.shape}")
    return x


def lattice_vector(model: SurfaceModel, coords) -> np.ndarray:
    """Validate integer coordinates and return them as an object array."""
    x = _check(model, list(coords))
    if not linalg.is_integral(x):
        raise LatticeError("lattice vectors need integer coordinates")
    return linalg.to_int(x)


def rational_class(model: SurfaceModel, coords) -> np.ndarray:
    x = _check(model, list(coords))
    out = np.empty(model.rank, dtype=object)
    for i, v in enumerate(x):
        if isinstance(v, float):
            raise LatticeError("floating point coordinates are not allowed")
        out[i] = Fraction(v)
    return out


def basis_vector(model: SurfaceModel, index: int, scale=1) -> np.ndarray:
    x = linalg.zeros(model.rank)
    x[index] = scale
    return x


def combo(model: SurfaceModel, **coeffs) -> np.ndarray:
    """Vector from named coefficients, e.g. ``combo(m, F=2, W=3, R=1, T=-1)``.

    Accepted names: F, W, R, T, u1, v1, u2, ... (hyperbolic pairs).
    """
    x = linalg.zeros(model.rank)
    for name, c in coeffs.items():
        if name in ("F", "W", "R", "T"):
            idx = "FWRT".index(name)
        elif name[0] in "uv" and name[1:].isdigit():
            j = int(name[1:])
            idx = model.u(j) if name[0] == "u" else model.v(j)
        else:
            raise KeyError(name)
        x[idx] += c
    return x


def gram_apply(model: SurfaceModel, x) -> np.ndarray:
    """Gram matrix times a vector (or a matrix, column-wise)."""
    x = np.asarray(x, dtype=object)
    out = np.empty_like(x)
    for i, row in enumerate(model.rows):
        acc = 0
        for j, g in row:
            acc = acc + g * x[j]
        out[i] = acc
    return out


def pairing(model: SurfaceModel, x, y):
    x = _check(model, x)
    y = _check(model, y)
    total = 0
    for i, row in enumerate(model.rows):
        xi = x[i]
        if xi == 0:
            continue
        acc = 0
        for j, g in row:
            if y[j]:
                acc += g * y[j]
        total += xi * acc
    return total


def square(model: SurfaceModel, x):
    return pairing(model, x, x)


def divisibility(model: SurfaceModel, x) -> int:
    """gcd of the pairings of x with every basis vector (0 for x = 0)."""
    x = lattice_vector(model, x)
    d = 0
    for v in gram_apply(model, x):
        d = gcd(d, int(v))
    return d


def is_primitive(model: SurfaceModel, x) -> bool:
    return divisibility(model, x) == 1


def decompose(model: SurfaceModel, omega):
    """Split omega = alpha*F + beta*W + omega_perp with omega_perp orthogonal to F and W."""
    omega = rational_class(model, omega)
    beta = pairing(model, omega, basis_vector(model, F))
    alpha = pairing(model, omega, basis_vector(model, W)) - model.parity_eps * beta
    perp = omega.copy()
    perp[F] -= alpha
    perp[W] -= beta
    return Fraction(alpha), Fraction(beta), perp


def supported_on_perp(model: SurfaceModel, x) -> bool:
    return x[F] == 0 and x[W] == 0


def basis_complete(model: SurfaceModel, x) -> np.ndarray:
    """A lattice vector e2 in the (F,W)-orthogonal block with x.e2 = 1."""
    x = lattice_vector(model, x)
    if not supported_on_perp(model, x):
        raise LatticeError("basis_complete needs x supported on the (F,W)-orthogonal block")
    if not x.any() or divisibility(model, x) != 1:
        raise LatticeError("basis_complete needs a primitive vector")
    c = gram_apply(model, x)
    e2 = linalg.zeros(model.rank)
    # a unit entry gives a single-coordinate answer; otherwise extended gcd
    for j in range(2, model.rank):
        if abs(c[j]) == 1:
            e2[j] = int(c[j])
            return e2
    g = 0
    coeffs: dict[int, int] = {}
    for j in range(2, model.rank):
        cj = int(c[j])
        if cj == 0:
            continue
        if g == 0:
            g, coeffs = abs(cj), {j: 1 if cj > 0 else -1}
            continue
        d, s, t = xgcd(g, cj)
        coeffs = {k: s * v for k, v in coeffs.items()}
        coeffs[j] = t
        g = d
        if g == 1:
            break
    for j, v in coeffs.items():
        e2[j] = v
    assert pairing(model, x, e2) == 1
    return e2


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) >= 0 and s*a + t*b = g."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def sup_norm(x) -> Fraction:
    return max((abs(Fraction(v)) for v in x), default=Fraction(0))
