"""Single-field tamperings of a certificate, used by the verifier fuzz tests.

Every mutation changes exactly one serialized field and is chosen so that the
result is a *different claim*: some edits (raising epsilon, moving an Eichler
vector along u) would yield another valid certificate, so those fields are
mutated in a direction that genuinely breaks the claim.
"""

from dataclasses import replace
from fractions import Fraction

import numpy as np

from symcone import isometry as iso
from symcone.certifier import BaseClassConfig, Certificate, pullback_distance
from symcone.lattice import build_surface_model

FIELDS = (
    "n", "epsilon", "sign", "base.alpha0", "base.beta0", "base.gamma0", "base.delta0",
    "base.Z0", "target", "g.word", "g.matrix", "sigma", "N", "inflation", "eta",
)


def _nonzero_rational(rng) -> Fraction:
    num = int(rng.integers(1, 20)) * (1 if rng.random() < 0.5 else -1)
    return Fraction(num, int(rng.integers(1, 8)))


def _bump(vec, rng, k=None) -> np.ndarray:
    out = np.array(vec, dtype=object).copy()
    k = int(rng.integers(len(out))) if k is None else k
    out[k] = out[k] + _nonzero_rational(rng)
    return out


def _mutate_word(g: iso.Isometry, rng) -> iso.Isometry:
    word = list(g.word)
    if not word:
        return iso.Isometry(g.model, g.matrix, (iso.FMap(int(rng.integers(1, 5))),))
    k = int(rng.integers(len(word)))
    gen = word[k]
    if isinstance(gen, iso.FMap):
        word[k] = iso.FMap(gen.i + int(rng.integers(1, 5)))
    elif isinstance(gen, iso.Eichler):
        # bump x where u vanishes; bumps along u itself would give the same map
        free = [j for j, c in enumerate(gen.u) if c == 0]
        x = list(gen.x)
        j = free[int(rng.integers(len(free)))]
        x[j] += int(rng.integers(1, 4))
        word[k] = iso.Eichler(gen.u, tuple(x))
    else:
        word.pop(k)
    return iso.Isometry(g.model, g.matrix, tuple(word))


def mutate(cert: Certificate, field: str, rng) -> Certificate:
    model = cert.model
    base = cert.base
    if field == "n":
        other = model.n + (1 if rng.random() < 0.5 or model.n == 3 else -1)
        return replace(cert, model=build_surface_model(other))
    if field == "epsilon":
        dist = pullback_distance(cert)
        return replace(cert, epsilon=dist * Fraction(int(rng.integers(1, 10)), 10))
    if field == "sign":
        return replace(cert, sign=-cert.sign)
    if field.startswith("base.") and field != "base.Z0":
        name = field[5:]
        value = getattr(base, name)
        # keep the coefficient positive so the base config itself stays well formed
        new = value + abs(_nonzero_rational(rng))
        return replace(cert, base=replace(base, **{name: new}))
    if field == "base.Z0":
        z = base.z0(model).copy()
        k = int(rng.integers(4, model.rank))
        z[k] = z[k] + _nonzero_rational(rng)
        return replace(cert, base=BaseClassConfig(*base.coefficients, Z0=z))
    if field == "target":
        t = np.array(cert.target, dtype=object).copy()
        k = int(rng.integers(model.rank))
        step = 2 * cert.epsilon + abs(_nonzero_rational(rng))
        t[k] = t[k] + (step if rng.random() < 0.5 else -step)
        return replace(cert, target=t)
    if field == "g.word":
        return replace(cert, g=_mutate_word(cert.g, rng))
    if field == "g.matrix":
        m = cert.g.matrix.copy()
        i, j = (int(v) for v in rng.integers(model.rank, size=2))
        m[i, j] += int(rng.integers(1, 5)) * (1 if rng.random() < 0.5 else -1)
        return replace(cert, g=iso.Isometry(model, m, cert.g.word))
    if field == "sigma":
        return replace(cert, sigma=_bump(cert.sigma, rng))
    if field == "N":
        new = cert.N + _nonzero_rational(rng)
        return replace(cert, N=new if new != 0 else cert.N + 1)
    if field == "inflation":
        return replace(cert, inflation=tuple(_bump(cert.inflation, rng)))
    if field == "eta":
        return replace(cert, eta=_bump(cert.eta, rng))
    raise KeyError(field)


def random_mutation(cert: Certificate, rng) -> tuple[str, Certificate]:
    field = FIELDS[int(rng.integers(len(FIELDS)))]
    return field, mutate(cert, field, rng)
