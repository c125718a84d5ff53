"""Command-line entry point: ``symcone <command> ...``.

Exit codes are shared by every command: 0 success, 1 verification failure,
2 input error, 3 class (or vector) not certifiable.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from symcone import certio
from symcone import isometry as iso
from symcone import linalg
from symcone.certifier import (
    BaseClassConfig, CertificationError, NotCertifiable, certify, classify, normalize,
)
from symcone.lattice import LatticeError, SurfaceModel, build_surface_model, decompose, square
from symcone.sampling import sample_report

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NOT_CERTIFIABLE = 0, 1, 2, 3

class InputError(Exception):
    pass


@dataclass
class CliConfig:
    n: int | None = None
    epsilon: Fraction = Fraction(1, 1024)
    base_path: Path | None = None
    seed: int = 0
    bound: int = 5
    output: Path | None = None

    def __post_init__(self):
        if self.n is not None and self.n < 3:
            raise InputError(f"E(n) requires n >= 3, got {self.n}")
        if self.epsilon <= 0:
            raise InputError("epsilon must be positive")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        out = getattr(args, "output", None)
        base = getattr(args, "base", None)
        return cls(
            n=getattr(args, "n", None),
            epsilon=_epsilon(getattr(args, "eps", "1/1024")),
            base_path=Path(base) if base else None,
            seed=getattr(args, "seed", 0),
            bound=getattr(args, "bound", 5),
            output=Path(out) if out else None,
        )


def _model(n: int) -> SurfaceModel:
    try:
        return build_surface_model(n)
    except LatticeError as exc:
        raise InputError(str(exc)) from exc


def _read_text(path: Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _read_class(path: Path, model: SurfaceModel):
    try:
        return certio.parse_class_text(_read_text(path), model.rank)
    except certio.FormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _epsilon(text: str) -> Fraction:
    try:
        eps = certio.parse_rational(text, strict=False)
    except certio.FormatError as exc:
        raise InputError(str(exc)) from exc
    if eps <= 0:
        raise InputError("epsilon must be positive")
    return eps


def read_base_config(path: Path, model: SurfaceModel) -> BaseClassConfig:
    """``key: value`` lines with keys alpha0, beta0, gamma0, delta0 and
    optionally Z0 (comma-separated vector).  Missing keys keep their defaults."""
    values: dict = {}
    for raw in _read_text(path).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep or key not in ("alpha0", "beta0", "gamma0", "delta0", "Z0") or key in values:
            raise InputError(f"{path}: bad line {raw!r}")
        try:
            if key == "Z0":
                values[key] = certio.parse_class_text(value, model.rank)
            else:
                values[key] = certio.parse_rational(value, strict=False)
        except certio.FormatError as exc:
            raise InputError(f"{path}: {exc}") from exc
    try:
        base = BaseClassConfig(**values)
        base.z0(model)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return base


# --- commands ---------------------------------------------------------------------

def cmd_model(args, cfg: CliConfig) -> int:
    model = _model(cfg.n)
    g = model.gram
    diag = sorted({int(g[k, k]) for k in range(model.rank)})
    info = {
        "n": model.n,
        "rank": model.rank,
        "a": model.a,
        "b": model.b,
        "parity": model.parity_eps,
        "c1_coefficient": model.c1_coeff,
        "spin": model.spin,
        "gram_nonzeros": sum(len(r) for r in model.rows),
        "gram_diagonal_values": diag,
        "signature": -8 * model.n,
    }
    if args.json:
        print(json.dumps(info, indent=2))
        return EXIT_OK
    print(f"E({model.n}): rank {model.rank}, a = {model.a} hyperbolic pairs, b = {model.b} copies of -E8")
    print(f"parity W.W = {model.parity_eps}, c1 = {model.c1_coeff} F")
    print("spin" if model.spin else "non-spin")
    print(f"Gram: {info['gram_nonzeros']} nonzero entries, diagonal values {diag}, signature {-8 * model.n}")
    if args.full:
        print(certio.serialize_model(model), end="")
    return EXIT_OK


def cmd_classify(args, cfg: CliConfig) -> int:
    model = _model(cfg.n)
    omega = _read_class(args.class_file, model)
    region = classify(model, omega)
    omega_n, sign = normalize(model, omega)
    alpha, beta, perp = decompose(model, omega_n)
    fmt = certio.format_rational
    info = {
        "verdict": region.verdict.value,
        "sign": region.sign,
        "positive": region.positive,
        "certifiable": region.certifiable,
        "square": fmt(square(model, omega)),
        "alpha": fmt(alpha),
        "beta": fmt(beta),
        "perp_square": fmt(square(model, perp)),
    }
    if args.json:
        print(json.dumps(info, indent=2))
    else:
        for k, v in info.items():
            print(f"{k}: {v}")
    return EXIT_OK


def cmd_certify(args, cfg: CliConfig) -> int:
    model = _model(cfg.n)
    omega = _read_class(args.class_file, model)
    base = read_base_config(cfg.base_path, model) if cfg.base_path else BaseClassConfig()
    try:
        cert = certify(model, omega, cfg.epsilon, base)
    except NotCertifiable as exc:
        print(f"not certifiable: region {exc.region.verdict}", file=sys.stderr)
        return EXIT_NOT_CERTIFIABLE
    except CertificationError as exc:
        print(f"certification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    data = certio.serialize(cert)
    report = certio.verify(certio.parse(data))
    out = cfg.output or Path(args.class_file).with_suffix(".cert")
    out.write_bytes(data)
    print(f"wrote {out}")
    print(report.format())
    return EXIT_OK if report.overall else EXIT_VERIFY


def cmd_verify(args, cfg: CliConfig) -> int:
    try:
        data = Path(args.cert_file).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {args.cert_file}: {exc.strerror or exc}") from exc
    try:
        cert = certio.parse(data)
    except (certio.FormatError, UnicodeDecodeError) as exc:
        raise InputError(f"{args.cert_file}: {exc}") from exc
    report = certio.verify(cert)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2))
    else:
        print(report.format())
    return EXIT_OK if report.overall else EXIT_VERIFY


def cmd_orbit(args, cfg: CliConfig) -> int:
    model = _model(cfg.n)
    x = _read_class(args.vector_file, model)
    if not linalg.is_integral(x):
        raise InputError(f"{args.vector_file}: orbit needs integer coordinates")
    try:
        g = iso.map_to_RT(model, x)
    except LatticeError as exc:
        print(f"not in the orbit domain: {exc}", file=sys.stderr)
        return EXIT_NOT_CERTIFIABLE
    print(f"delta: {square(model, x) // 2}")
    print(f"word length: {len(g.word)}")
    if cfg.output:
        cfg.output.write_text(certio.serialize_isometry(g))
        print(f"wrote {cfg.output}")
    return EXIT_OK


def cmd_sample(args, cfg: CliConfig) -> int:
    model = _model(cfg.n)
    if args.count < 0 or cfg.bound < 1 or args.workers < 1:
        raise InputError("count must be >= 0, bound and workers >= 1")
    report = sample_report(model.n, args.count, cfg.seed, cfg.bound, cfg.epsilon,
                           workers=args.workers)
    if args.json:
        print(json.dumps(report.as_dict(args.timings), indent=2))
    else:
        print(report.format(args.timings))
    return EXIT_OK if all(r.certified for r in report.certifiable) else EXIT_VERIFY


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symcone", description="Exact symplectic cone certificates for E(n).")
    p.add_argument("-v", "--verbose", action="store_true", help="log per-sample progress")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("model", help="describe the lattice of E(n)")
    s.add_argument("n", type=int)
    s.add_argument("--json", action="store_true")
    s.add_argument("--full", action="store_true", help="also print the serialized Gram matrix")
    s.set_defaults(func=cmd_model)

    s = sub.add_parser("classify", help="report the cone region of a class")
    s.add_argument("n", type=int)
    s.add_argument("class_file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("certify", help="build and self-check a certificate")
    s.add_argument("n", type=int)
    s.add_argument("class_file")
    s.add_argument("--eps", default="1/1024")
    s.add_argument("--base", help="base class config file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("verify", help="independently verify a certificate file")
    s.add_argument("cert_file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("orbit", help="map a primitive vector to R + delta T")
    s.add_argument("n", type=int)
    s.add_argument("vector_file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("sample", help="seeded sampling report")
    s.add_argument("n", type=int)
    s.add_argument("--count", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bound", type=int, default=5)
    s.add_argument("--eps", default="1/1024")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--json", action="store_true")
    s.add_argument("--timings", action="store_true", help="include wall-clock timings")
    s.set_defaults(func=cmd_sample)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, CliConfig.from_args(args))
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
