"""Classification of classes against the cone regions and certificate synthesis.

A class omega is normalized so that omega.F >= 0, split as
omega = alpha F + beta W + omega_perp, and its remainder omega_perp is
approximated by tau / A with tau a primitive lattice vector.  An Eichler word
phi sends tau to R + delta T, and f_i shifts the F and T coefficients so that

    sigma = (alpha - i/A) F + beta W + (1/A) R + (delta/A + i beta) T

has four positive coefficients and pulls back under g = f_i o phi to
alpha F + beta W + tau/A.  Inflation of the base class by N sigma - omega_0
then yields eta = sigma + Z0/N.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, gcd, isqrt

import numpy as np

from symcone import isometry as iso
from symcone import linalg
from symcone.lattice import (
    F, W, R, T, SurfaceModel, basis_complete, basis_vector, decompose,
    pairing, rational_class, square, sup_norm,
)


class Verdict(str, enum.Enum):
    NOT_POSITIVE_SQUARE = "NotPositiveSquare"
    PERP_TO_C1 = "PerpToC1"
    CERTIFIABLE_SPIN = "CertifiableSpin"
    CERTIFIABLE_POSITIVE = "CertifiablePositive"
    CERTIFIABLE_NON_SPIN_GT = "CertifiableNonSpinGt"
    CONJECTURAL_NON_SPIN = "ConjecturalNonSpin"

    def __str__(self) -> str:
        return self.value


CERTIFIABLE = frozenset({
    Verdict.CERTIFIABLE_SPIN,
    Verdict.CERTIFIABLE_POSITIVE,
    Verdict.CERTIFIABLE_NON_SPIN_GT,
})


@dataclass(frozen=True)
class ConeRegion:
    verdict: Verdict
    sign: int
    positive: bool = False  # alpha, beta and omega_perp^2 all > 0

    @property
    def certifiable(self) -> bool:
        return self.verdict in CERTIFIABLE


class CertificationError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class NotCertifiable(CertificationError):
    def __init__(self, region: ConeRegion):
        super().__init__("classify", f"class lies in region {region.verdict}, which is not certifiable")
        self.region = region


class EscalationBound(CertificationError):
    def __init__(self, cap: int):
        super().__init__("approximate", f"no admissible C up to {cap}")


@dataclass(frozen=True, eq=False)
class BaseClassConfig:
    alpha0: Fraction = Fraction(1)
    beta0: Fraction = Fraction(1)
    gamma0: Fraction = Fraction(1)
    delta0: Fraction = Fraction(1)
    Z0: np.ndarray | None = None  # None means zero

    def __post_init__(self):
        for name in ("alpha0", "beta0", "gamma0", "delta0"):
            value = Fraction(getattr(self, name))
            if value <= 0:
                raise ValueError(f"base coefficient {name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @property
    def coefficients(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.alpha0, self.beta0, self.gamma0, self.delta0)

    def z0(self, model: SurfaceModel) -> np.ndarray:
        if self.Z0 is None:
            return rational_class(model, [0] * model.rank)
        z = rational_class(model, self.Z0)
        if any(z[:4]):
            raise ValueError("Z0 must have zero F, W, R, T coordinates")
        return z

    def omega0(self, model: SurfaceModel) -> np.ndarray:
        out = self.z0(model)
        out[F], out[W], out[R], out[T] = self.coefficients
        return out

    def __eq__(self, other):
        if not isinstance(other, BaseClassConfig):
            return NotImplemented
        za = None if self.Z0 is None or not np.any(self.Z0) else list(self.Z0)
        zb = None if other.Z0 is None or not np.any(other.Z0) else list(other.Z0)
        return self.coefficients == other.coefficients and za == zb


@dataclass(frozen=True, eq=False)
class ApproxResult:
    A: Fraction
    tau: np.ndarray
    delta: int
    i: int
    C: int
    B: Fraction
    mu: np.ndarray
    e2: np.ndarray


@dataclass(frozen=True, eq=False)
class Certificate:
    model: SurfaceModel
    target: np.ndarray
    epsilon: Fraction
    sign: int
    base: BaseClassConfig
    g: iso.Isometry
    sigma: np.ndarray
    N: Fraction
    inflation: tuple  # (r_F, r_W, r_R, r_T)
    eta: np.ndarray
    trace: ApproxResult | None = field(default=None, repr=False)

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return (
            self.model == other.model
            and np.array_equal(self.target, other.target)
            and self.epsilon == other.epsilon
            and self.sign == other.sign
            and self.base == other.base
            and self.g == other.g
            and np.array_equal(self.sigma, other.sigma)
            and self.N == other.N
            and tuple(self.inflation) == tuple(other.inflation)
            and np.array_equal(self.eta, other.eta)
        )

    __hash__ = None


def normalize(model: SurfaceModel, omega) -> tuple[np.ndarray, int]:
    omega = rational_class(model, omega)
    if pairing(model, omega, basis_vector(model, F)) < 0:
        return -omega, -1
    return omega, 1


def classify(model: SurfaceModel, omega) -> ConeRegion:
    omega, sign = normalize(model, omega)
    sq = square(model, omega)
    if sq <= 0:
        return ConeRegion(Verdict.NOT_POSITIVE_SQUARE, sign)
    alpha, beta, perp = decompose(model, omega)
    if beta == 0:
        return ConeRegion(Verdict.PERP_TO_C1, sign)
    positive = alpha > 0 and square(model, perp) > 0
    if positive:
        return ConeRegion(Verdict.CERTIFIABLE_POSITIVE, sign, True)
    if model.spin:
        return ConeRegion(Verdict.CERTIFIABLE_SPIN, sign)
    if sq > beta * beta:
        return ConeRegion(Verdict.CERTIFIABLE_NON_SPIN_GT, sign)
    return ConeRegion(Verdict.CONJECTURAL_NON_SPIN, sign)


def check_alpha_inequality(alpha, beta, perp_sq) -> bool:
    """alpha > -perp_sq / (2 beta), for beta > 0."""
    beta = Fraction(beta)
    if beta <= 0:
        raise ValueError("check_alpha_inequality needs beta > 0")
    return Fraction(alpha) > -Fraction(perp_sq) / (2 * beta)


def _content(perp: np.ndarray) -> tuple[Fraction, np.ndarray]:
    """perp = mu / B with mu primitive integral and B > 0 rational."""
    mu = linalg.clear_denominators(perp)
    # perp and mu are parallel; compare any nonzero coordinate
    j = next(k for k, v in enumerate(mu) if v != 0)
    B = Fraction(mu[j]) / Fraction(perp[j])
    return B, mu


def approximate_remainder(model: SurfaceModel, perp, alpha, beta, eps_half,
                          max_doublings: int = 256) -> ApproxResult:
    """Primitive tau and scale A with tau/A within eps_half of perp (sup norm),
    (tau/A)^2 > perp^2, and an integer i in (-perp^2 A / (2 beta), alpha A)."""
    perp = rational_class(model, perp)
    alpha, beta, eps_half = Fraction(alpha), Fraction(beta), Fraction(eps_half)
    if any(perp[:2]):
        raise CertificationError("approximate", "remainder has F or W components")
    if beta <= 0 or eps_half <= 0:
        raise CertificationError("approximate", "need beta > 0 and a positive tolerance")
    perp_sq = square(model, perp)
    if not check_alpha_inequality(alpha, beta, perp_sq):
        raise CertificationError("approximate", "alpha <= -perp^2/(2 beta)")

    degenerate = not perp.any()
    if degenerate:
        mu, e2 = basis_vector(model, R), basis_vector(model, T)
    else:
        B, mu = _content(perp)
        e2 = basis_complete(model, mu)
    e2_norm = sup_norm(e2)

    C = 1
    for _ in range(max_doublings):
        C *= 2
        if degenerate:
            # tau/A = (C R + T)/C^2 -> 0
            B = Fraction(C)
        A = C * B
        tau = C * mu + e2
        approx = tau * Fraction(1) / A
        dist = sup_norm(approx - perp)
        if dist > eps_half:
            continue
        tau_sq = square(model, tau)
        if Fraction(tau_sq) / (A * A) <= perp_sq:
            continue
        lower = -perp_sq * A / (2 * beta)
        i = _floor(lower) + 1
        if not i < alpha * A:
            continue
        if _gcd_vec(tau) != 1:
            continue
        return ApproxResult(A=A, tau=linalg.to_int(tau), delta=tau_sq // 2, i=i, C=C,
                            B=B, mu=mu, e2=e2)
    raise EscalationBound(2 ** max_doublings)


def _floor(q: Fraction) -> int:
    return q.numerator // q.denominator


def _gcd_vec(v) -> int:
    g = 0
    for c in v:
        g = gcd(g, int(c))
    return g


def build_sigma(model: SurfaceModel, alpha, beta, r: ApproxResult) -> np.ndarray:
    alpha, beta = Fraction(alpha), Fraction(beta)
    sigma = rational_class(model, [0] * model.rank)
    sigma[F] = alpha - Fraction(r.i) / r.A
    sigma[W] = beta
    sigma[R] = 1 / r.A
    sigma[T] = Fraction(r.delta) / r.A + r.i * beta
    if not all(sigma[k] > 0 for k in (F, W, R, T)):
        raise CertificationError("sigma", f"non-positive coefficient in {list(sigma[:4])}")
    return sigma


def _choose_N(model, sigma, base: BaseClassConfig, g, epsilon) -> Fraction:
    coeffs = base.coefficients
    N = max(c / sigma[k] for c, k in zip(coeffs, (F, W, R, T)))
    z0 = base.z0(model)
    if z0.any():
        zn = sup_norm(iso.apply_inverse(g, z0))
        N = max(N, 2 * zn / epsilon)
        # eta^2 = sigma^2 + Z0^2 / N^2 since sigma is orthogonal to Z0
        s2, z2 = square(model, sigma), square(model, z0)
        if s2 + z2 / (N * N) <= 0:
            bound = -z2 / s2
            N = max(N, Fraction(isqrt(ceil(bound)) + 1))
    return Fraction(N)


def certify(model: SurfaceModel, omega, epsilon, base: BaseClassConfig | None = None) -> Certificate:
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise CertificationError("input", "epsilon must be positive")
    base = base or BaseClassConfig()
    target = rational_class(model, omega)
    region = classify(model, target)
    if not region.certifiable:
        raise NotCertifiable(region)
    omega_n, sign = normalize(model, target)
    alpha, beta, perp = decompose(model, omega_n)
    if not check_alpha_inequality(alpha, beta, square(model, perp)):
        raise CertificationError("inequality", "alpha inequality fails on a certifiable class")

    r = approximate_remainder(model, perp, alpha, beta, epsilon / 2)
    try:
        phi = iso.map_to_RT(model, r.tau)
    except (ValueError, iso.IsometryError) as exc:
        raise CertificationError("orbit", str(exc)) from exc
    g = iso.compose(iso.make_f(model, r.i), phi)
    sigma = build_sigma(model, alpha, beta, r)

    N = _choose_N(model, sigma, base, g, epsilon)
    inflation = tuple(N * sigma[k] - c for k, c in zip((F, W, R, T), base.coefficients))
    eta = sigma + base.z0(model) / N

    cert = Certificate(model=model, target=target, epsilon=epsilon, sign=sign, base=base,
                       g=g, sigma=sigma, N=N, inflation=inflation, eta=eta, trace=r)
    _postconditions(cert, omega_n)
    return cert


def _postconditions(cert: Certificate, omega_n: np.ndarray) -> None:
    model = cert.model
    if not iso.is_realizable(cert.g):
        raise CertificationError("postcondition", "isometry is not realizable")
    if min(cert.inflation) < 0:
        raise CertificationError("postcondition", "negative inflation coefficient")
    dist = sup_norm(iso.apply_inverse(cert.g, cert.eta) - omega_n)
    if dist > cert.epsilon:
        raise CertificationError("postcondition", f"pullback distance {dist} exceeds epsilon")
    if not (square(model, cert.eta) > 0 and pairing(model, cert.eta, basis_vector(model, F)) > 0):
        raise CertificationError("postcondition", "eta is not in the positive cone of F")


def pullback_distance(cert: Certificate) -> Fraction:
    return sup_norm(iso.apply_inverse(cert.g, cert.eta) - cert.sign * cert.target)
