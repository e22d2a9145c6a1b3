"""Mean squared quantization error of designs in [-1, 1]^d.

``theta`` is E min_i ||X - Z_i||^2 for X uniform on the cube; ``Q_d`` is the
size- and dimension-free version n^(2/d) * theta / (4d).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .designs import Design, nearest_sq_distances
from .sampling import check_samples, map_blocks, mean_and_stderr


class QuantMethod(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    MONTE_CARLO = "MonteCarlo"


QUANT_CSV_HEADER = ("design", "d", "n", "delta", "method", "theta", "qd", "stderr", "samples", "seed")


@dataclass(frozen=True)
class QuantizationReport:
    design: str
    d: int
    n: int
    delta: float | None
    theta: float
    qd: float
    method: QuantMethod
    stderr: float = 0.0
    samples: int = 0
    seed: int = 0

    def csv_row(self) -> list:
        return [
            self.design,
            self.d,
            self.n,
            "" if self.delta is None else format(self.delta, ".17g"),
            self.method.value,
            format(self.theta, ".17g"),
            format(self.qd, ".17g"),
            format(self.stderr, ".17g"),
            self.samples,
            self.seed,
        ]

    @classmethod
    def from_csv_row(cls, row) -> "QuantizationReport":
        rec = dict(zip(QUANT_CSV_HEADER, row))
        return cls(
            design=rec["design"],
            d=int(rec["d"]),
            n=int(rec["n"]),
            delta=float(rec["delta"]) if rec["delta"] else None,
            theta=float(rec["theta"]),
            qd=float(rec["qd"]),
            method=QuantMethod(rec["method"]),
            stderr=float(rec["stderr"]),
            samples=int(rec["samples"]),
            seed=int(rec["seed"]),
        )


def _check_delta(delta: float) -> None:
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")


def _check_dim(d: int) -> None:
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")


def theta_dn_delta(d: int, delta: float) -> float:
    """Closed-form quantization error d(delta^2 - delta + 1/3) + 2 delta/(d+1)."""
    _check_dim(d)
    _check_delta(delta)
    return d * (delta * delta - delta + 1.0 / 3.0) + 2.0 * delta / (d + 1)


def qd_dn_delta(d: int, delta: float) -> float:
    _check_dim(d)
    _check_delta(delta)
    return 2.0 ** (-2.0 / d) * (delta * delta - delta + 1.0 / 3.0 + 2.0 * delta / (d * (d + 1)))


def optimal_delta(d: int) -> float:
    """The delta minimising theta (and Q_d) for D_{n,delta}: 1/2 - 1/(d(d+1))."""
    _check_dim(d)
    return 0.5 - 1.0 / (d * (d + 1))


def qd_optimal(d: int) -> float:
    _check_dim(d)
    return 2.0 ** (-2.0 / d) * (1.0 / 12.0 + (d * d + d - 1.0) / ((d + 1.0) ** 2 * d * d))


def theta_dn0(d: int) -> float:
    """theta for the 2^d vertices of [-1/2, 1/2]^d: each unit cell contributes 1/12 per axis."""
    _check_dim(d)
    return d / 12.0


def qd_dn0(d: int) -> float:
    _check_dim(d)
    return 1.0 / 12.0


def qd_normalize(d: int, n: int, theta: float) -> float:
    if d < 1 or n < 1 or theta < 0:
        raise ValueError("qd_normalize needs d >= 1, n >= 1 and theta >= 0")
    return n ** (2.0 / d) * theta / (4.0 * d)


def closed_form_report(d: int, delta: float) -> QuantizationReport:
    theta = theta_dn_delta(d, delta)
    return QuantizationReport(
        design="dn-delta",
        d=d,
        n=1 << (d - 1),
        delta=delta,
        theta=theta,
        qd=qd_dn_delta(d, delta),
        method=QuantMethod.CLOSED_FORM,
    )


def mc_quantization(design: Design, samples: int, seed: int, workers: int = 1) -> QuantizationReport:
    """Monte Carlo estimate of theta(design) with its standard error."""
    check_samples(samples)
    blocks = map_blocks(lambda x: nearest_sq_distances(x, design), design.d, samples, seed, workers)
    theta, stderr = mean_and_stderr(blocks)
    scale = qd_normalize(design.d, design.n, 1.0)
    return QuantizationReport(
        design=design.label,
        d=design.d,
        n=design.n,
        delta=design.delta,
        theta=theta,
        qd=theta * scale,
        method=QuantMethod.MONTE_CARLO,
        stderr=stderr,
        samples=samples,
        seed=seed,
    )


def delta_grid_minimizer(d: int, step: float = 1e-4) -> float:
    """Brute-force argmin of qd_dn_delta over a delta grid on [0, 1]."""
    grid = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    values = [qd_dn_delta(d, float(g)) for g in grid]
    return float(grid[int(np.argmin(values))])


def crossover_dimension(d_max: int = 50) -> int | None:
    """Smallest d >= 2 from which D_{n,delta*} beats 1/12 up to ``d_max``."""
    for d in range(2, d_max + 1):
        if all(qd_optimal(k) < 1.0 / 12.0 for k in range(d, d_max + 1)):
            return d
    return None
