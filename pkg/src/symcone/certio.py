"""Canonical text formats and the independent certificate verifier.

Grammar (one ``key: value`` per line, fields in fixed order)::

    rational   := "0" | "-"? [1-9][0-9]* ( "/" [1-9][0-9]* )?   reduced, denominator > 1
    vector     := rational ( "," rational )*                    basis order F, W, R, T, ...
    generator  := "f " int
                | "eichler " vector ";" vector                  u ; x
                | "reflection " vector
                | "explicit " vector ( ";" vector )*            rows

    certificate :=
        "symcone-certificate 1"
        "n: " int
        "epsilon: " rational
        "sign: " ("1" | "-1")
        "base.alpha0: " rational   ... base.beta0, base.gamma0, base.delta0
        "base.Z0: " vector
        "target: " vector
        isometry-body
        "sigma: " vector
        "N: " rational
        "inflation: " rational "," rational "," rational "," rational
        "eta: " vector
        "end"

    isometry-body :=
        "isometry.rank: " int
        "isometry.word: " int           number of generator lines that follow
        ( "generator: " generator )*
        "isometry.matrix: " int         number of row lines that follow
        ( "row: " vector )*

A standalone isometry file is ``"symcone-isometry 1"``, the isometry body and
``"end"``.  Parsing rejects anything that is not byte-for-byte canonical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from symcone import isometry as iso
from symcone import linalg
from symcone.certifier import BaseClassConfig, Certificate
from symcone.lattice import (
    F, W, R, T, LatticeError, SurfaceModel, basis_vector, build_surface_model,
    gram_apply, pairing, square, sup_norm,
)

CERT_HEADER = "symcone-certificate 1"
ISOMETRY_HEADER = "symcone-isometry 1"
MODEL_HEADER = "symcone-model 1"

_CANON = re.compile(r"-?(0|[1-9][0-9]*)(/[1-9][0-9]*)?\Z")
_LENIENT = re.compile(r"\s*[+-]?[0-9]+(\s*/\s*[0-9]+)?\s*\Z")
_INT = re.compile(r"-?(0|[1-9][0-9]*)\Z")


class FormatError(ValueError):
    pass


# --- rationals and vectors ----------------------------------------------------

def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str, strict: bool = True) -> Fraction:
    """Exact rational from "p" or "p/q".  ``strict`` demands canonical form."""
    if strict:
        if not _CANON.match(text) or text == "-0":
            raise FormatError(f"malformed rational {text!r}")
        if "/" in text:
            p, q = text.split("/")
            value = Fraction(int(p), int(q))
            if value.denominator != int(q) or int(q) == 1 or p == "0":
                raise FormatError(f"non-canonical rational {text!r}")
            return value
        return Fraction(int(text))
    if not _LENIENT.match(text):
        raise FormatError(f"malformed rational {text!r}")
    p, _, q = text.replace(" ", "").partition("/")
    if q and int(q) == 0:
        raise FormatError(f"zero denominator in {text!r}")
    return Fraction(int(p), int(q) if q else 1)


def format_vector(v) -> str:
    return ",".join(format_rational(c) for c in v)


def parse_vector(text: str, rank: int | None = None, strict: bool = True) -> np.ndarray:
    if text == "":
        raise FormatError("empty vector")
    parts = text.split(",")
    vec = np.empty(len(parts), dtype=object)
    for k, part in enumerate(parts):
        vec[k] = parse_rational(part, strict)
    if rank is not None and len(vec) != rank:
        raise FormatError(f"vector has {len(vec)} entries, expected {rank}")
    return vec


def parse_class_text(text: str, rank: int | None = None) -> np.ndarray:
    """Class file: coordinates one per line or comma-separated; '#' starts a comment."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens.extend(t.strip() for t in line.split(",") if t.strip())
    if not tokens:
        raise FormatError("no coordinates found")
    vec = np.empty(len(tokens), dtype=object)
    for k, tok in enumerate(tokens):
        vec[k] = parse_rational(tok, strict=False)
    if rank is not None and len(vec) != rank:
        raise FormatError(f"class has {len(vec)} coordinates, expected {rank}")
    return vec


def format_class_text(v) -> str:
    return "\n".join(format_rational(c) for c in v) + "\n"


def _as_int_vector(vec: np.ndarray) -> np.ndarray:
    if not linalg.is_integral(vec):
        raise FormatError("expected integer entries")
    return linalg.to_int(vec)


# --- model ----------------------------------------------------------------------

def serialize_model(model: SurfaceModel) -> str:
    lines = [MODEL_HEADER, f"n: {model.n}", f"rank: {model.rank}", f"a: {model.a}",
             f"b: {model.b}", f"gram: {model.rank}"]
    lines += [f"row: {format_vector(row)}" for row in model.gram]
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> dict:
    """Parse a serialized model into its raw fields (no rebuilding)."""
    cur = _Cursor(text)
    cur.header(MODEL_HEADER)
    out = {k: cur.int_field(k) for k in ("n", "rank", "a", "b")}
    rows = cur.int_field("gram")
    out["gram"] = np.vstack([_as_int_vector(parse_vector(cur.field("row"), out["rank"]))
                             for _ in range(rows)]) if rows else linalg.zeros((0, 0))
    cur.end()
    return out


# --- isometries -----------------------------------------------------------------

def _format_generator(gen) -> str:
    if isinstance(gen, iso.FMap):
        return f"f {gen.i}"
    if isinstance(gen, iso.Eichler):
        return f"eichler {format_vector(gen.u)};{format_vector(gen.x)}"
    if isinstance(gen, iso.Reflection):
        return f"reflection {format_vector(gen.v)}"
    if isinstance(gen, iso.Explicit):
        return "explicit " + ";".join(format_vector(r) for r in gen.matrix)
    raise TypeError(gen)


def _parse_generator(text: str, rank: int):
    kind, sep, body = text.partition(" ")
    if not sep:
        raise FormatError(f"malformed generator {text!r}")
    if kind == "f":
        if not _INT.match(body):
            raise FormatError(f"malformed f_i parameter {body!r}")
        return iso.FMap(int(body))
    if kind == "eichler":
        parts = body.split(";")
        if len(parts) != 2:
            raise FormatError("eichler generator needs u;x")
        u, x = (_as_int_vector(parse_vector(p, rank)) for p in parts)
        return iso.Eichler(tuple(u.tolist()), tuple(x.tolist()))
    if kind == "reflection":
        v = _as_int_vector(parse_vector(body, rank))
        return iso.Reflection(tuple(v.tolist()))
    if kind == "explicit":
        rows = body.split(";")
        if len(rows) != rank:
            raise FormatError("explicit generator has wrong number of rows")
        mat = tuple(tuple(_as_int_vector(parse_vector(r, rank)).tolist()) for r in rows)
        return iso.Explicit(mat)
    raise FormatError(f"unknown generator type {kind!r}")


def _isometry_lines(g: iso.Isometry) -> list[str]:
    lines = [f"isometry.rank: {g.model.rank}", f"isometry.word: {len(g.word)}"]
    lines += [f"generator: {_format_generator(gen)}" for gen in g.word]
    lines.append(f"isometry.matrix: {g.matrix.shape[0]}")
    lines += [f"row: {format_vector(row)}" for row in g.matrix]
    return lines


def _read_isometry(cur: "_Cursor", model: SurfaceModel) -> iso.Isometry:
    rank = cur.int_field("isometry.rank")
    if rank != model.rank:
        raise FormatError(f"isometry rank {rank} does not match model rank {model.rank}")
    count = cur.int_field("isometry.word")
    word = tuple(_parse_generator(cur.field("generator"), rank) for _ in range(count))
    rows = cur.int_field("isometry.matrix")
    if rows != rank:
        raise FormatError("isometry matrix has wrong number of rows")
    matrix = np.vstack([_as_int_vector(parse_vector(cur.field("row"), rank)) for _ in range(rows)])
    return iso.Isometry(model, matrix, word)


def serialize_isometry(g: iso.Isometry) -> str:
    return "\n".join([ISOMETRY_HEADER, *_isometry_lines(g), "end"]) + "\n"


def parse_isometry(text: str, model: SurfaceModel) -> iso.Isometry:
    cur = _Cursor(text)
    cur.header(ISOMETRY_HEADER)
    g = _read_isometry(cur, model)
    cur.end()
    return g


# --- certificates ---------------------------------------------------------------

def serialize(cert: Certificate) -> bytes:
    model = cert.model
    base = cert.base
    lines = [
        CERT_HEADER,
        f"n: {model.n}",
        f"epsilon: {format_rational(cert.epsilon)}",
        f"sign: {cert.sign}",
        f"base.alpha0: {format_rational(base.alpha0)}",
        f"base.beta0: {format_rational(base.beta0)}",
        f"base.gamma0: {format_rational(base.gamma0)}",
        f"base.delta0: {format_rational(base.delta0)}",
        f"base.Z0: {format_vector(base.z0(model))}",
        f"target: {format_vector(cert.target)}",
        *_isometry_lines(cert.g),
        f"sigma: {format_vector(cert.sigma)}",
        f"N: {format_rational(cert.N)}",
        f"inflation: {format_vector(cert.inflation)}",
        f"eta: {format_vector(cert.eta)}",
        "end",
    ]
    return ("\n".join(lines) + "\n").encode("ascii")


def parse(data: bytes | str) -> Certificate:
    text = data.decode("ascii") if isinstance(data, (bytes, bytearray)) else data
    cur = _Cursor(text)
    cur.header(CERT_HEADER)
    n = cur.int_field("n")
    try:
        model = build_surface_model(n)
    except LatticeError as exc:
        raise FormatError(str(exc)) from exc
    rank = model.rank
    epsilon = parse_rational(cur.field("epsilon"))
    sign = cur.int_field("sign")
    if sign not in (1, -1):
        raise FormatError("sign must be 1 or -1")
    coeffs = [parse_rational(cur.field(f"base.{k}")) for k in ("alpha0", "beta0", "gamma0", "delta0")]
    z0 = parse_vector(cur.field("base.Z0"), rank)
    try:
        base = BaseClassConfig(*coeffs, Z0=z0 if z0.any() else None)
        base.z0(model)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    target = parse_vector(cur.field("target"), rank)
    g = _read_isometry(cur, model)
    sigma = parse_vector(cur.field("sigma"), rank)
    N = parse_rational(cur.field("N"))
    inflation = tuple(parse_vector(cur.field("inflation"), 4))
    eta = parse_vector(cur.field("eta"), rank)
    cur.end()
    return Certificate(model=model, target=_frac(target), epsilon=epsilon, sign=sign, base=base,
                       g=g, sigma=_frac(sigma), N=N, inflation=inflation, eta=_frac(eta))


def _frac(v: np.ndarray) -> np.ndarray:
    return np.array([Fraction(c) for c in v], dtype=object)


class _Cursor:
    def __init__(self, text: str):
        if not text.endswith("\n"):
            raise FormatError("input must end with a newline")
        self.lines = text[:-1].split("\n")
        self.pos = 0

    def _next(self) -> str:
        if self.pos >= len(self.lines):
            raise FormatError("unexpected end of input")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def header(self, expected: str) -> None:
        line = self._next()
        if line != expected:
            raise FormatError(f"expected header {expected!r}, got {line!r}")

    def field(self, key: str) -> str:
        line = self._next()
        prefix = key + ": "
        if not line.startswith(prefix):
            raise FormatError(f"line {self.pos}: expected field {key!r}, got {line[:40]!r}")
        return line[len(prefix):]

    def int_field(self, key: str) -> int:
        value = self.field(key)
        if not _INT.match(value):
            raise FormatError(f"field {key!r} is not a canonical integer: {value!r}")
        return int(value)

    def end(self) -> None:
        if self._next() != "end" or self.pos != len(self.lines):
            raise FormatError("trailing content after certificate")


# --- verification ---------------------------------------------------------------

CHECKS = (
    "model",
    "word_replay",
    "gram_preserved",
    "fixes_F",
    "spinor_norm",
    "inflation_nonnegative",
    "inflation_identity",
    "distance",
    "positivity",
)


@dataclass
class VerificationReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    @property
    def failed(self) -> list[str]:
        return [name for name, ok, _ in self.checks if not ok]

    def format(self) -> str:
        lines = [f"{'PASS' if ok else 'FAIL'}  {name}: {detail}" for name, ok, detail in self.checks]
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "overall": self.overall,
            "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in self.checks],
        }


def verify(cert: Certificate) -> VerificationReport:
    """Replay every claim of a certificate using only its serialized content.

    The Gram matrix is rebuilt from n; the generator's intermediate data
    (A, tau, i) is never consulted.
    """
    report = VerificationReport()
    state: dict = {}

    def run(name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:  # a malformed certificate fails the check, never the verifier
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        report.checks.append((name, bool(ok), detail))

    def model_check():
        model = build_surface_model(cert.model.n)
        state["model"] = model
        if not np.array_equal(cert.model.gram, model.gram):
            return False, "Gram matrix differs from the one rebuilt from n"
        for label, vec in (("target", cert.target), ("sigma", cert.sigma), ("eta", cert.eta)):
            if len(vec) != model.rank:
                return False, f"{label} has length {len(vec)}, expected {model.rank}"
        if np.asarray(cert.g.matrix).shape != (model.rank, model.rank):
            return False, "isometry matrix has wrong shape"
        return True, f"n={model.n} rank={model.rank}"

    def model_():
        return state.get("model") or build_surface_model(cert.model.n)

    def matrix():
        m = np.asarray(cert.g.matrix, dtype=object)
        if not linalg.is_integral(m):
            raise ValueError("isometry matrix is not integral")
        return m

    def replay_check():
        replayed = iso.replay(model_(), cert.g.word)
        if not np.array_equal(replayed, matrix()):
            return False, "word does not replay to the stated matrix"
        return True, f"{len(cert.g.word)} generators"

    def gram_check():
        model = model_()
        m = matrix()
        if not np.array_equal(m.T @ gram_apply(model, m), model.gram):
            return False, "matrix^T G matrix != G"
        state["isometry"] = True
        return True, "matrix^T G matrix = G"

    def fixes_f_check():
        m = matrix()
        if not np.array_equal(m[:, F], basis_vector(model_(), F)):
            return False, "g(F) != F"
        return True, "g(F) = F"

    def spinor_check():
        if not state.get("isometry"):
            return False, "not an isometry; spinor norm undefined"
        s = iso.spinor_norm(iso.Isometry(model_(), matrix()))
        return s == 1, f"spinor norm {s:+d}"

    def nonneg_check():
        r = [Fraction(c) for c in cert.inflation]
        if len(r) != 4:
            return False, "need four inflation coefficients"
        bad = [k for k, c in zip("FWRT", r) if c < 0]
        return not bad, "all >= 0" if not bad else f"negative: {', '.join(bad)}"

    def identity_check():
        model = model_()
        N = Fraction(cert.N)
        if N <= 0:
            return False, "N must be positive"
        omega0 = cert.base.omega0(model)
        rhs = omega0.copy()
        for k, c in zip((F, W, R, T), cert.inflation):
            rhs[k] += Fraction(c)
        if not np.array_equal(N * cert.eta, rhs):
            return False, "N*eta != omega_0 + inflation"
        z0 = cert.base.z0(model)
        if not np.array_equal(cert.sigma + z0 / N, cert.eta):
            return False, "eta != sigma + Z0/N"
        return True, "N*eta = omega_0 + r_F F + r_W W + r_R R + r_T T"

    def distance_check():
        model = model_()
        eps = Fraction(cert.epsilon)
        if eps <= 0:
            return False, "epsilon must be positive"
        if cert.sign not in (1, -1):
            return False, "sign must be +1 or -1"
        m = matrix()
        if state.get("isometry"):
            pulled = iso.apply_inverse(iso.Isometry(model, m), cert.eta)
        else:
            pulled = linalg.solve(m, cert.eta)
        dist = sup_norm(pulled - cert.sign * np.asarray(cert.target, dtype=object))
        return dist <= eps, f"sup distance {format_rational(dist)} vs epsilon {format_rational(eps)}"

    def positivity_check():
        model = model_()
        sq = square(model, cert.eta)
        pf = pairing(model, cert.eta, basis_vector(model, F))
        return sq > 0 and pf > 0, f"eta^2 = {format_rational(sq)}, eta.F = {format_rational(pf)}"

    run("model", model_check)
    run("word_replay", replay_check)
    run("gram_preserved", gram_check)
    run("fixes_F", fixes_f_check)
    run("spinor_norm", spinor_check)
    run("inflation_nonnegative", nonneg_check)
    run("inflation_identity", identity_check)
    run("distance", distance_check)
    run("positivity", positivity_check)
    return report
