"""Seeded random classes and the sampling report.

Every sample ``k`` draws from its own stream ``default_rng([seed, k])`` so
results do not depend on evaluation order or parallelism.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from symcone import certio
from symcone.certifier import CERTIFIABLE, Verdict, certify, classify, pullback_distance
from symcone.lattice import SurfaceModel, build_surface_model, square

log = logging.getLogger(__name__)


def random_rational(rng: np.random.Generator, bound: int) -> Fraction:
    num = int(rng.integers(-bound, bound + 1))
    den = int(rng.integers(1, bound + 1))
    return Fraction(num, den)


def random_class(model: SurfaceModel, rng: np.random.Generator, bound: int = 5,
                 tail_density: float = 0.1) -> np.ndarray:
    """F, W, R, T, u_1, v_1 coordinates are always drawn; every other coordinate
    is nonzero with probability ``tail_density``."""
    x = np.empty(model.rank, dtype=object)
    for k in range(model.rank):
        if k < 6 or rng.random() < tail_density:
            x[k] = random_rational(rng, bound)
        else:
            x[k] = Fraction(0)
    return x


def random_perp(model: SurfaceModel, rng: np.random.Generator, bound: int = 5,
                tail_density: float = 0.1) -> np.ndarray:
    x = random_class(model, rng, bound, tail_density)
    x[0] = x[1] = Fraction(0)
    return x


def class_with_square(model: SurfaceModel, perp: np.ndarray, beta: Fraction,
                      target_sq: Fraction) -> np.ndarray:
    """alpha F + beta W + perp with alpha chosen so that the square is target_sq."""
    beta = Fraction(beta)
    perp_sq = square(model, perp)
    alpha = (Fraction(target_sq) - model.parity_eps * beta * beta - perp_sq) / (2 * beta)
    x = perp.copy()
    x[0], x[1] = alpha, beta
    return x


def random_gap_class(model: SurfaceModel, rng: np.random.Generator, bound: int = 5) -> np.ndarray:
    """Odd n: a class with beta > 0 and 0 < omega^2 <= beta^2."""
    if model.spin:
        raise ValueError("the gap region only exists for odd n")
    beta = Fraction(int(rng.integers(1, bound + 1)), int(rng.integers(1, bound + 1)))
    # omega^2 = t * beta^2 with t in (0, 1], including the boundary t = 1
    t = Fraction(int(rng.integers(1, bound + 1)), bound)
    return class_with_square(model, random_perp(model, rng, bound), beta, t * beta * beta)


def random_certifiable_class(model: SurfaceModel, rng: np.random.Generator, bound: int = 5,
                             tail_density: float = 0.1) -> np.ndarray:
    """Rejection sample until the class is certifiable but not positive,
    i.e. CertifiableSpin (n even) or CertifiableNonSpinGt (n odd)."""
    wanted = Verdict.CERTIFIABLE_SPIN if model.spin else Verdict.CERTIFIABLE_NON_SPIN_GT
    while True:
        x = random_class(model, rng, bound, tail_density)
        if classify(model, x).verdict == wanted:
            return x


@dataclass
class SampleRecord:
    index: int
    verdict: str
    positive: bool
    certified: bool
    distance: Fraction | None
    seconds: float = field(default=0.0, compare=False)
    error: str | None = None


def _evaluate(args) -> SampleRecord:
    n, seed, k, bound, epsilon, tail_density = args
    model = build_surface_model(n)
    rng = np.random.default_rng([seed, k])
    omega = random_class(model, rng, bound, tail_density)
    start = time.perf_counter()
    region = classify(model, omega)
    certified, dist, error = False, None, None
    if region.certifiable:
        try:
            cert = certify(model, omega, epsilon)
            report = certio.verify(cert)
            certified = report.overall
            dist = pullback_distance(cert)
            if not certified:
                error = "verifier rejected: " + ", ".join(report.failed)
        except Exception as exc:  # recorded in the report, never hidden
            error = f"{type(exc).__name__}: {exc}"
    seconds = time.perf_counter() - start
    return SampleRecord(k, region.verdict.value, region.positive, certified, dist, seconds, error)


@dataclass
class SampleReport:
    n: int
    count: int
    seed: int
    bound: int
    epsilon: Fraction
    records: list[SampleRecord]

    @property
    def region_counts(self) -> dict[str, int]:
        counts = Counter(r.verdict for r in self.records)
        return {v.value: counts.get(v.value, 0) for v in Verdict}

    @property
    def certifiable(self) -> list[SampleRecord]:
        return [r for r in self.records if Verdict(r.verdict) in CERTIFIABLE]

    @property
    def certified(self) -> list[SampleRecord]:
        return [r for r in self.records if r.certified]

    @property
    def success_rate(self) -> Fraction | None:
        if not self.certifiable:
            return None
        return Fraction(len(self.certified), len(self.certifiable))

    @property
    def max_distance(self) -> Fraction | None:
        dists = [r.distance for r in self.certified if r.distance is not None]
        return max(dists) if dists else None

    @property
    def conjectural(self) -> list[int]:
        return [r.index for r in self.records if r.verdict == Verdict.CONJECTURAL_NON_SPIN.value]

    @property
    def total_seconds(self) -> float:
        return sum(r.seconds for r in self.records)

    def as_dict(self, timings: bool = False) -> dict:
        fmt = certio.format_rational
        out = {
            "n": self.n,
            "count": self.count,
            "seed": self.seed,
            "bound": self.bound,
            "epsilon": fmt(self.epsilon),
            "regions": self.region_counts,
            "certifiable": len(self.certifiable),
            "certified": len(self.certified),
            "success_rate": None if self.success_rate is None else fmt(self.success_rate),
            "max_distance": None if self.max_distance is None else fmt(self.max_distance),
            "conjectural_not_certified": self.conjectural,
            "failures": [{"index": r.index, "error": r.error} for r in self.records if r.error],
        }
        if timings:
            out["seconds"] = [round(r.seconds, 6) for r in self.records]
            out["total_seconds"] = round(self.total_seconds, 6)
        return out

    def format(self, timings: bool = False) -> str:
        d = self.as_dict(timings)
        lines = [f"sample report: n={d['n']} count={d['count']} seed={d['seed']} "
                 f"bound={d['bound']} epsilon={d['epsilon']}", "regions:"]
        lines += [f"  {name}: {c}" for name, c in d["regions"].items()]
        lines.append(f"certified: {d['certified']}/{d['certifiable']} certifiable"
                     f" (success rate {d['success_rate']})")
        lines.append(f"max verified distance: {d['max_distance']}")
        lines.append("conjectural, not certified: "
                     + (", ".join(map(str, d["conjectural_not_certified"])) or "none"))
        for f in d["failures"]:
            lines.append(f"FAILURE sample {f['index']}: {f['error']}")
        if timings:
            lines.append(f"total seconds: {d['total_seconds']}")
        return "\n".join(lines)


def sample_report(n: int, count: int, seed: int, coefficient_bound: int = 5,
                  epsilon=Fraction(1, 1024), tail_density: float = 0.1,
                  workers: int = 1) -> SampleReport:
    epsilon = Fraction(epsilon)
    build_surface_model(n)
    jobs = [(n, seed, k, coefficient_bound, epsilon, tail_density) for k in range(count)]
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_evaluate, jobs))
    else:
        records = [_evaluate(job) for job in jobs]
    for r in records:
        log.info("sample %d: %s certified=%s %.4fs", r.index, r.verdict, r.certified, r.seconds)
    return SampleReport(n, count, seed, coefficient_bound, epsilon, records)

