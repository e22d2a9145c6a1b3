"""Weak covering of [-1, 1]^d by balls around design points.

The central quantity is C_{d,Z,r}, the fraction of the cube inside the ball
B(Z, r). It is approximated by a normal CDF with a one-term Edgeworth
(skewness) correction built from the moments of ||U - Z||^2 for U uniform on
the cube. For D_{n,delta} the covered fraction reduces, through the Voronoi
cell of (delta, ..., delta), to one such term plus a one-dimensional integral
of (d-1)-dimensional terms; that integral is done by adaptive quadrature.

Monte Carlo estimators here are the independent oracles for all of the above.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .designs import Design, DesignKind, build_dn_delta, build_dn0, nearest_sq_distances
from .sampling import binomial_stderr, check_samples, map_blocks

logger = logging.getLogger(__name__)

QUAD_EPSABS = 1e-8
VALUE_TOL = 1e-6
RADIUS_TOL = 1e-9
_SCAN_POINTS = 65
_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class SolverWarning(RuntimeWarning):
    """The coverage evaluator was not monotone in r beyond tolerance jitter."""


class FractionMethod(str, enum.Enum):
    EDGEWORTH = "EdgeworthApprox"
    MONTE_CARLO = "MonteCarlo"
    EXACT = "ExactSpecial"


class CoverageMethod(str, enum.Enum):
    THEOREM3 = "Theorem3Approx"
    MONTE_CARLO = "MonteCarlo"
    LOWER = "LowerBound"
    UPPER = "UpperBound"


class Regime(str, enum.Enum):
    R_LE_DELTA = "RLeDelta"
    MID = "Mid"
    R_GE_1_PLUS_DELTA = "RGe1PlusDelta"


@dataclass(frozen=True)
class ApproxMoments:
    """Mean, variance and third central moment of ||U - Z||^2."""

    mu: float
    sigma_sq: float
    mu3: float


@dataclass(frozen=True)
class BallCubeFraction:
    value: float
    method: FractionMethod
    stderr: float
    z_norm_sq: float
    r: float
    d: int


COVERAGE_CSV_HEADER = ("d", "delta", "r", "R", "gamma", "value", "method", "regime", "stderr", "samples", "seed")


@dataclass(frozen=True)
class CoverageResult:
    value: float
    method: CoverageMethod
    d: int
    r: float
    delta: Optional[float] = None
    regime: Optional[Regime] = None
    stderr: float = 0.0
    samples: int = 0
    seed: int = 0
    n: Optional[int] = None
    gamma: Optional[float] = None

    @property
    def R(self) -> float:
        n = self.n if self.n is not None else 1 << (self.d - 1)
        return normalized_radius(n, self.d, self.r)

    def csv_row(self) -> list:
        return [
            self.d,
            "" if self.delta is None else format(self.delta, ".17g"),
            format(self.r, ".17g"),
            format(self.R, ".17g"),
            "" if self.gamma is None else format(self.gamma, ".17g"),
            format(self.value, ".17g"),
            self.method.value,
            "" if self.regime is None else self.regime.value,
            format(self.stderr, ".17g"),
            self.samples,
            self.seed,
        ]

    @classmethod
    def from_csv_row(cls, row) -> "CoverageResult":
        rec = dict(zip(COVERAGE_CSV_HEADER, row))
        d = int(rec["d"])
        r = float(rec["r"])
        R = float(rec["R"])
        # recover n from the stored normalisation: R = n^(1/d) r / (2 sqrt d)
        n = None
        if r > 0:
            n = int(round((2.0 * math.sqrt(d) * R / r) ** d))
        return cls(
            value=float(rec["value"]),
            method=CoverageMethod(rec["method"]),
            d=d,
            r=r,
            delta=float(rec["delta"]) if rec["delta"] else None,
            regime=Regime(rec["regime"]) if rec["regime"] else None,
            stderr=float(rec["stderr"]),
            samples=int(rec["samples"]),
            seed=int(rec["seed"]),
            n=n,
            gamma=float(rec["gamma"]) if rec["gamma"] else None,
        )


RADIUS_CSV_HEADER = ("d", "delta", "gamma", "r", "R", "thickness", "solver_tol")


@dataclass(frozen=True)
class RadiusSolution:
    d: int
    delta: Optional[float]
    gamma: float
    r: float
    R: float
    thickness: float
    solver_tol: float

    def csv_row(self) -> list:
        return [
            self.d,
            "" if self.delta is None else format(self.delta, ".17g"),
            format(self.gamma, ".17g"),
            format(self.r, ".17g"),
            format(self.R, ".17g"),
            format(self.thickness, ".17g"),
            format(self.solver_tol, ".17g"),
        ]

    @classmethod
    def from_csv_row(cls, row) -> "RadiusSolution":
        rec = dict(zip(RADIUS_CSV_HEADER, row))
        return cls(
            d=int(rec["d"]),
            delta=float(rec["delta"]) if rec["delta"] else None,
            gamma=float(rec["gamma"]),
            r=float(rec["r"]),
            R=float(rec["R"]),
            thickness=float(rec["thickness"]),
            solver_tol=float(rec["solver_tol"]),
        )


# -- normalisations -----------------------------------------------------------


def normalized_radius(n: int, d: int, r: float) -> float:
    """R = n^(1/d) r / (2 sqrt d); safe for n far beyond float range."""
    if n < 1 or d < 1 or r < 0:
        raise ValueError("normalized_radius needs n >= 1, d >= 1, r >= 0")
    return math.exp(math.log(n) / d) * r / (2.0 * math.sqrt(d))


def thickness(d: int, R: float, log: bool = False) -> float:
    """Normalised thickness (sqrt(d) R)^d, or its natural log when ``log``."""
    if d < 1 or R < 0:
        raise ValueError("thickness needs d >= 1 and R >= 0")
    if log:
        return -math.inf if R == 0 else d * (0.5 * math.log(d) + math.log(R))
    try:
        return (math.sqrt(d) * R) ** d
    except OverflowError:
        return math.inf


def _dn_delta_n(d: int) -> int:
    return 1 << (d - 1)


# -- C_{d,Z,r}: moments, Edgeworth approximation, exact corner cases -----------


def ball_cube_moments(d: int, z_norm_sq: float) -> ApproxMoments:
    if d < 1 or z_norm_sq < 0:
        raise ValueError("ball_cube_moments needs d >= 1 and ||Z||^2 >= 0")
    return ApproxMoments(
        mu=z_norm_sq + d / 3.0,
        sigma_sq=4.0 / 3.0 * (z_norm_sq + d / 15.0),
        mu3=16.0 / 15.0 * (z_norm_sq + d / 63.0),
    )


def normal_cdf(t: float) -> float:
    return 0.5 * math.erfc(-t / _SQRT2)


def normal_pdf(t: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * t * t)


def edgeworth_t(d: int, z_norm_sq: float, r: float) -> float:
    """Standardised radius (r^2 - mu) / sigma for ||U - Z||^2."""
    return _SQRT3 * (r * r - z_norm_sq - d / 3.0) / (2.0 * math.sqrt(z_norm_sq + d / 15.0))


def edgeworth_correction(d: int, z_norm_sq: float, t: float) -> float:
    """Skewness term mu3 / (6 sigma^3) * (1 - t^2) phi(t)."""
    s = z_norm_sq + d / 15.0
    coef = (z_norm_sq + d / 63.0) / (5.0 * _SQRT3 * s * math.sqrt(s))
    return coef * (1.0 - t * t) * normal_pdf(t)


def _edgeworth(d: int, z_norm_sq: float, r: float) -> float:
    t = edgeworth_t(d, z_norm_sq, r)
    value = normal_cdf(t) + edgeworth_correction(d, z_norm_sq, t)
    return min(1.0, max(0.0, value))


def approx_ball_cube_fraction(d: int, z_norm_sq: float, r: float) -> BallCubeFraction:
    """Edgeworth-corrected normal approximation of C_{d,Z,r}, clamped to [0, 1]."""
    if d < 1 or z_norm_sq < 0 or r < 0:
        raise ValueError("approx_ball_cube_fraction needs d >= 1 and nonnegative ||Z||^2, r")
    return BallCubeFraction(_edgeworth(d, z_norm_sq, r), FractionMethod.EDGEWORTH, 0.0, z_norm_sq, r, d)


def _inner_ball_fraction(d: int, r: float) -> float:
    """vol(B_d(r)) / 2^d, for a ball lying inside the cube."""
    if r == 0.0:
        return 0.0
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0) + d * math.log(0.5 * r))


def _split_center_special(d: int, head: float, tail: float, r: float) -> Optional[float]:
    """0 or 1 when B(Z, r) misses or swallows the cube, Z = (head, tail, ..., tail).

    Balls lying inside the cube are left to the approximation: switching to
    the exact volume there would put a jump into r -> C at the switch point.
    """
    gap = max(abs(head) - 1.0, 0.0) ** 2 + (d - 1) * max(abs(tail) - 1.0, 0.0) ** 2
    if r * r <= gap:
        return 0.0
    far = (abs(head) + 1.0) ** 2 + (d - 1) * (abs(tail) + 1.0) ** 2
    if r * r >= far:
        return 1.0
    return None


def exact_special_fraction(Z, r: float) -> Optional[BallCubeFraction]:
    """C_{d,Z,r} when geometry gives it exactly (ball misses, swallows or lies
    inside the cube), else ``None``."""
    Z = np.atleast_1d(np.asarray(Z, dtype=float))
    d = Z.size
    gap = float((np.maximum(np.abs(Z) - 1.0, 0.0) ** 2).sum())
    far = float(((np.abs(Z) + 1.0) ** 2).sum())
    z2 = float(Z @ Z)
    if r * r <= gap:
        value = 0.0
    elif r * r >= far:
        value = 1.0
    elif r <= 1.0 - float(np.max(np.abs(Z))):
        value = _inner_ball_fraction(d, r)
    else:
        return None
    return BallCubeFraction(value, FractionMethod.EXACT, 0.0, z2, r, d)


def _fraction(d: int, head: float, tail: float, r: float) -> float:
    """C_{d,Z,r} for Z = (head, tail, ..., tail) via exact special cases, else Edgeworth."""
    if d == 0:
        return 1.0
    special = _split_center_special(d, head, tail, r)
    if special is not None:
        return special
    return _edgeworth(d, head * head + (d - 1) * tail * tail, r)


# -- Monte Carlo oracles --------------------------------------------------------


def mc_ball_cube_fraction(d: int, Z, r: float, samples: int, seed: int, workers: int = 1) -> BallCubeFraction:
    """Fraction of uniform cube samples with ||X - Z|| <= r."""
    check_samples(samples)
    Z = np.asarray(Z, dtype=float)
    if Z.shape != (d,):
        raise ValueError(f"center must have {d} coordinates")
    r2 = r * r

    def hits(x: np.ndarray) -> int:
        diff = x - Z
        return int(np.count_nonzero((diff * diff).sum(axis=1) <= r2))

    p = sum(map_blocks(hits, d, samples, seed, workers)) / samples
    return BallCubeFraction(p, FractionMethod.MONTE_CARLO, binomial_stderr(p, samples), float(Z @ Z), r, d)


def sample_sq_distances(design: Design, samples: int, seed: int, workers: int = 1) -> np.ndarray:
    """Squared nearest-point distances for uniform samples, in block order."""
    check_samples(samples)
    blocks = map_blocks(lambda x: nearest_sq_distances(x, design), design.d, samples, seed, workers)
    return np.concatenate(blocks)


def _regime(delta: Optional[float], r: float) -> Optional[Regime]:
    if delta is None:
        return None
    if r <= delta:
        return Regime.R_LE_DELTA
    if r >= 1.0 + delta:
        return Regime.R_GE_1_PLUS_DELTA
    return Regime.MID


def _empirical_cdf(sorted_sq: np.ndarray, r: float) -> float:
    return np.searchsorted(sorted_sq, r * r, side="right") / sorted_sq.size


def mc_coverage_curve(
    design: Design, r_values: Sequence[float], samples: int, seed: int, workers: int = 1
) -> List[CoverageResult]:
    """MC coverage C_d(design, r) for every r, all from one shared sample set."""
    sq = np.sort(sample_sq_distances(design, samples, seed, workers))
    out = []
    for r in r_values:
        p = float(_empirical_cdf(sq, float(r)))
        out.append(
            CoverageResult(
                value=p,
                method=CoverageMethod.MONTE_CARLO,
                d=design.d,
                r=float(r),
                delta=design.delta,
                regime=_regime(design.delta, float(r)) if design.kind is DesignKind.DN_DELTA else None,
                stderr=binomial_stderr(p, samples),
                samples=samples,
                seed=seed,
                n=design.n,
            )
        )
    return out


def mc_coverage(design: Design, r: float, samples: int, seed: int, workers: int = 1) -> CoverageResult:
    return mc_coverage_curve(design, [r], samples, seed, workers)[0]


def distance_cdf_curve(
    design: Design, r_grid: Sequence[float], samples: int, seed: int, workers: int = 1
) -> List[Tuple[float, float]]:
    """Empirical CDF of the nearest distance on ``r_grid``, paired with normalised R."""
    r_grid = [float(r) for r in r_grid]
    if any(b < a for a, b in zip(r_grid, r_grid[1:])):
        raise ValueError("r_grid must be sorted ascending")
    sq = np.sort(sample_sq_distances(design, samples, seed, workers))
    return [(normalized_radius(design.n, design.d, r), float(_empirical_cdf(sq, r))) for r in r_grid]


# -- D_{n,delta}: closed-form reduction + approximation ------------------------


def _check_inputs(d: int, delta: float, r: float) -> None:
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if r < 0:
        raise ValueError(f"radius must be nonnegative, got {r}")


def _wedge_integrand(d: int, delta: float, r: float) -> Callable[[float], float]:
    b = 2.0 * delta - 1.0
    m = d - 1
    r2 = r * r

    def f(t: float) -> float:
        if t >= 1.0:
            return 0.0
        # (1-t)^(d-1) in log space; underflow means the slice carries no volume
        weight = math.exp(m * math.log1p(-t)) if m else 1.0
        if weight == 0.0:
            return 0.0
        scale = 1.0 - t
        center = (b - t) / scale
        rho = 2.0 * math.sqrt(max(r2 - (t + delta) ** 2, 0.0)) / scale
        return _fraction(m, center, center, rho) * weight

    return f


def _wedge_integral(d: int, delta: float, r: float) -> float:
    upper = min(r - delta, 1.0)
    if upper <= 0.0:
        return 0.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, err = integrate.quad(
            _wedge_integrand(d, delta, r), 0.0, upper, epsabs=QUAD_EPSABS, epsrel=0.0, limit=500
        )
    if caught:
        logger.debug("quadrature d=%d delta=%g r=%g: est. error %.2g (%s)", d, delta, r, err, caught[0].message)
    return value


def coverage_dn_delta(d: int, delta: float, r: float) -> CoverageResult:
    """Approximate C_d(D_{n,delta}, r) through the Voronoi-cell reduction.

    r <= delta: the ball stays inside the unit cube C0, giving C_{d, 2delta-1, 2r} / 2.
    Otherwise the wedges U_j add d times an integral over slices t of
    (d-1)-dimensional ball/cube fractions weighted by (1-t)^(d-1), for t up
    to min(r - delta, 1).
    """
    _check_inputs(d, delta, r)
    regime = _regime(delta, r)
    b = 2.0 * delta - 1.0
    main = _fraction(d, b, b, 2.0 * r)
    if regime is Regime.R_LE_DELTA:
        value = 0.5 * main
    else:
        value = 0.5 * (main + d * _wedge_integral(d, delta, r))
    return CoverageResult(
        value=min(1.0, max(0.0, value)),
        method=CoverageMethod.THEOREM3,
        d=d,
        r=r,
        delta=delta,
        regime=regime,
        n=_dn_delta_n(d),
    )


def coverage_bounds(d: int, delta: float, r: float) -> Tuple[float, float]:
    """Lower and upper bounds on C_d(D_{n,delta}, r) from the unit cube C0 and its neighbour C1."""
    _check_inputs(d, delta, r)
    b = 2.0 * delta - 1.0
    upper = _fraction(d, b, b, 2.0 * r)
    neighbour = _fraction(d, 2.0 * delta + 1.0, b, 2.0 * r)
    return 0.5 * (upper + neighbour), upper


# -- radii -----------------------------------------------------------------------


def _solve_radius(
    f: Callable[[float], float], target: float, r_max: float, value_tol: float, radius_tol: float
) -> Tuple[float, float]:
    """Smallest r in [0, r_max] with f(r) reaching ``target`` (bisection on the last crossing)."""
    grid = np.linspace(0.0, r_max, _SCAN_POINTS)
    values = np.array([f(float(r)) for r in grid])
    jitter = float(np.max(np.maximum.accumulate(values) - values))
    tol = value_tol
    if jitter > value_tol:
        tol = jitter
        warnings.warn(
            f"coverage not monotone in r (drop {jitter:.3g}); widening tolerance to {tol:.3g}",
            SolverWarning,
            stacklevel=3,
        )
    if values[0] >= target:
        return 0.0, tol
    below = np.nonzero(values < target)[0]
    k = int(below[-1])
    if k == len(grid) - 1:
        raise ValueError(f"coverage {values[-1]:.6g} never reaches {target:.6g} on [0, {r_max:.6g}]")
    lo, hi = float(grid[k]), float(grid[k + 1])
    while hi - lo > radius_tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm < target:
            lo = mid
        else:
            hi = mid
        if abs(fm - target) <= value_tol:
            return mid, tol
    return hi, tol


def _solution(d: int, delta: Optional[float], gamma: float, r: float, n: int, tol: float) -> RadiusSolution:
    R = normalized_radius(n, d, r)
    return RadiusSolution(d=d, delta=delta, gamma=gamma, r=r, R=R, thickness=thickness(d, R), solver_tol=tol)


def radius_for_coverage(
    d: int,
    delta: float,
    gamma: float,
    method: CoverageMethod = CoverageMethod.THEOREM3,
    samples: int = 10**6,
    seed: int = 0,
    workers: int = 1,
) -> RadiusSolution:
    """Smallest r with C_d(D_{n,delta}, r) = 1 - gamma."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    _check_inputs(d, delta, 0.0)
    if method is CoverageMethod.THEOREM3:
        f = lambda r: coverage_dn_delta(d, delta, r).value  # noqa: E731
    elif method is CoverageMethod.MONTE_CARLO:
        design = build_dn_delta(d, delta, materialize=False)
        return radius_for_design(design, gamma, samples, seed, workers)
    else:
        raise ValueError(f"unsupported solver method {method}")
    r, tol = _solve_radius(f, 1.0 - gamma, 2.0 * math.sqrt(d), VALUE_TOL, RADIUS_TOL)
    return _solution(d, delta, gamma, r, _dn_delta_n(d), tol)


def radius_for_design(design: Design, gamma: float, samples: int, seed: int, workers: int = 1) -> RadiusSolution:
    """MC radius solve on any design: bisection on the empirical coverage of one sample set."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    sq = np.sort(sample_sq_distances(design, samples, seed, workers))
    f = lambda r: float(_empirical_cdf(sq, r))  # noqa: E731
    r_max = math.sqrt(float(sq[-1])) * (1.0 + 1e-12) + 1e-12
    r, tol = _solve_radius(f, 1.0 - gamma, r_max, VALUE_TOL, RADIUS_TOL)
    return _solution(design.d, design.delta, gamma, r, design.n, tol)


def full_cover_radius(kind: DesignKind, d: int, delta: Optional[float] = None) -> RadiusSolution:
    """Radius of complete coverage: farthest point of a Voronoi cell from its centre."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    if kind is DesignKind.DN_DELTA:
        if delta is None or not 0.0 <= delta <= 1.0:
            raise ValueError("DnDelta needs delta in [0, 1]")
        r = math.sqrt(max(d * delta * delta, (1.0 + delta) ** 2 + (d - 1) * (1.0 - delta) ** 2))
        n = _dn_delta_n(d)
    elif kind is DesignKind.DN0:
        r = math.sqrt(d) / 2.0
        n = 1 << d
        delta = None
    else:
        raise ValueError(f"no closed-form covering radius for {kind.value}")
    return _solution(d, delta, 0.0, r, n, 0.0)


def design_for(kind: DesignKind, d: int, delta: Optional[float] = None) -> Design:
    """Implicit (closed-form) design object for the structured families."""
    if kind is DesignKind.DN_DELTA:
        return build_dn_delta(d, float(delta), materialize=False)
    if kind is DesignKind.DN0:
        return build_dn0(d, materialize=False)
    raise ValueError(f"{kind.value} designs need explicit points")
