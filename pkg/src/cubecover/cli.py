"""Command-line front end: table and curve reproduction as CSV, plus self-checks.

Subcommands
-----------
quant-table   normalised quantization error Q_d for the three design families
cover-table   normalised weak-covering radii R_{1-gamma} and full-cover radii R_1
curve         C_d(D_{n,delta}, r): approximation, Monte Carlo and bounds over an (r, delta) grid
cdf           empirical CDF of the normalised nearest distance for chosen designs
validate      invariant checks across all modules, pass/fail per line
eval          quantization and covering summary for a single design

Every Monte Carlo quantity is block-seeded, so output is byte-identical for a
given seed whatever ``--workers`` is.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from . import coverage as cov
from . import designs
from . import quantization as quant
from . import sobol
from .designs import Design, DesignKind
from .sampling import MIN_SAMPLES, map_blocks, mean_and_stderr

logger = logging.getLogger("cubecover")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3

COMMANDS = ("quant-table", "cover-table", "curve", "cdf", "validate", "eval")
MC_COMMANDS = frozenset({"quant-table", "cover-table", "curve", "cdf", "validate", "eval"})

QUANT_TABLE_HEADER = ("d", "design", "qd", "stderr", "method")
COVER_TABLE_HEADER = ("d", "design", "delta", "gamma", "R", "r", "thickness", "method")
CURVE_HEADER = ("d", "delta", "r", "approx", "mc", "mc_stderr", "lower", "upper")
CDF_HEADER = ("design", "R", "cdf")
EVAL_HEADER = ("design", "d", "n", "delta", "qd", "qd_stderr", "gamma", "R_gamma", "R_1")

TABLE_DIMS = (5, 7, 10, 15, 20)
SOBOL_N = 1024

# per-command defaults used when a flag is left unset
_DEFAULTS = {
    "quant-table": {"d": TABLE_DIMS, "samples": 10**6},
    "cover-table": {"d": TABLE_DIMS, "samples": 10**6, "delta_grid": (0.40, 0.60, 0.005)},
    "curve": {"d": (5,), "samples": 10**6, "delta_grid": (0.0, 1.0, 0.01), "r": (0.7, 0.8, 0.9, 1.0, 1.1)},
    "cdf": {"d": (10,), "samples": 10**6, "designs": ("dn-delta", "dn0", "sobol")},
    "validate": {"d": (3, 4, 5, 6, 7, 8), "samples": 2 * 10**5},
    "eval": {"d": (10,), "samples": 10**6, "designs": ("dn-delta",)},
}


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class InputFileError(Exception):
    """A design or table file exists but cannot be parsed."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    d_list: Tuple[int, ...]
    gamma: float = 0.01
    r_list: Tuple[float, ...] = ()
    delta_grid: Tuple[float, float, float] = (0.0, 1.0, 0.01)
    samples: int = 10**6
    seed: int = 0
    output_path: Optional[str] = None
    design: Tuple[str, ...] = ()
    delta: Optional[float] = None
    sobol_n: int = SOBOL_N
    r_grid: Tuple[float, float, float] = (0.0, 1.0, 0.01)
    workers: int = 1
    direction_numbers: Optional[str] = None
    table: Optional[sobol.DirectionTable] = field(default=None, repr=False)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.d_list:
            raise UsageError("--d: need at least one dimension")
        if any(d < 1 for d in self.d_list):
            raise UsageError("--d: dimensions must be positive")
        for name, (start, stop, step) in (("delta", self.delta_grid), ("R-grid", self.r_grid)):
            if step <= 0:
                raise UsageError(f"{name} step must be positive")
            if stop < start:
                raise UsageError(f"{name} grid is empty (stop < start)")
        if self.command in MC_COMMANDS and self.samples < MIN_SAMPLES:
            raise UsageError(f"--samples must be at least {MIN_SAMPLES}")
        if not 0.0 < self.gamma < 1.0:
            raise UsageError("--gamma must lie in (0, 1)")
        if self.workers < 1:
            raise UsageError("--workers must be positive")
        if self.sobol_n < 1:
            raise UsageError("--sobol-n must be positive")

    @property
    def deltas(self) -> List[float]:
        return grid_values(*self.delta_grid)


# -- parsing helpers ---------------------------------------------------------------


def grid_values(start: float, stop: float, step: float) -> List[float]:
    """Inclusive arithmetic grid, rounded so 0.1-type steps land on decimals."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def parse_int_list(text: str) -> Tuple[int, ...]:
    """``"5,7,10"`` or ``"3-8"`` or a mix of both."""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def parse_float_list(text: str) -> Tuple[float, ...]:
    """``"0.7,0.9"`` or ``"start:stop:step"``."""
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"expected start:stop:step, got {text!r}")
        return tuple(grid_values(*parts))
    return tuple(float(p) for p in text.split(",") if p.strip())


def _parse_triple(text: str) -> Tuple[float, float, float]:
    parts = [float(p) for p in text.split(":")]
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:step, got {text!r}")
    return parts[0], parts[1], parts[2]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", help="dimensions, e.g. 5,7,10 or 3-8")
    common.add_argument("--gamma", type=float, default=0.01, help="uncovered fraction (default 0.01)")
    common.add_argument("--r", help="radii, comma list or start:stop:step")
    common.add_argument("--delta", type=float, help="delta for dn-delta designs (default: optimal delta)")
    common.add_argument("--delta-start", type=float)
    common.add_argument("--delta-stop", type=float)
    common.add_argument("--delta-step", type=float)
    common.add_argument("--R-grid", dest="r_grid", help="normalised-radius grid start:stop:step for cdf")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument(
        "--design",
        action="append",
        help="dn-delta, dn0, sobol or custom:<csv>; repeat or comma-separate",
    )
    common.add_argument("--sobol-n", type=int, default=SOBOL_N, help="points in the Sobol design")
    common.add_argument("--direction-numbers", help="direction-number table for the Sobol design")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo blocks")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="cubecover", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "quant-table": "normalised quantization error for the design families",
        "cover-table": "normalised covering radii R_{1-gamma} and R_1",
        "curve": "coverage approximation vs Monte Carlo and bounds",
        "cdf": "empirical CDF of the normalised nearest distance",
        "validate": "run invariant checks",
        "eval": "summarise one design",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    defaults = _DEFAULTS[args.command]
    try:
        d_list = parse_int_list(args.d) if args.d is not None else tuple(defaults["d"])
        r_list = parse_float_list(args.r) if args.r is not None else tuple(defaults.get("r", ()))
        r_grid = _parse_triple(args.r_grid) if args.r_grid else (0.0, 1.0, 0.01)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    start, stop, step = defaults.get("delta_grid", (0.0, 1.0, 0.01))
    delta_grid = (
        start if args.delta_start is None else args.delta_start,
        stop if args.delta_stop is None else args.delta_stop,
        step if args.delta_step is None else args.delta_step,
    )
    selectors: List[str] = []
    for item in args.design or defaults.get("designs", ()):
        selectors.extend(s.strip() for s in item.split(",") if s.strip())
    return RunConfig(
        command=args.command,
        d_list=d_list,
        gamma=args.gamma,
        r_list=r_list,
        delta_grid=delta_grid,
        samples=args.samples if args.samples is not None else defaults["samples"],
        seed=args.seed,
        output_path=args.out,
        design=tuple(selectors),
        delta=args.delta,
        sobol_n=args.sobol_n,
        r_grid=r_grid,
        workers=args.workers,
        direction_numbers=args.direction_numbers,
    )


# -- design selection ------------------------------------------------------------


def _sobol_table(config: RunConfig) -> sobol.DirectionTable:
    if config.table is None:
        if config.direction_numbers:
            config.table = sobol.load_direction_numbers(config.direction_numbers)
        else:
            config.table = sobol.default_table()
    return config.table


def resolve_design(selector: str, d: int, config: RunConfig) -> Design:
    """Turn a ``--design`` selector into a design in dimension ``d``."""
    if selector == "dn-delta":
        delta = quant.optimal_delta(d) if config.delta is None else config.delta
        return designs.build_dn_delta(d, delta, materialize=False)
    if selector == "dn0":
        return designs.build_dn0(d, materialize=False)
    if selector == "sobol":
        return sobol.sobol_design(d, config.sobol_n, _sobol_table(config))
    if selector.startswith("custom:"):
        try:
            design = designs.read_design_csv(selector[len("custom:") :])
        except ValueError as exc:
            raise InputFileError(str(exc)) from exc
        if design.d != d:
            raise UsageError(f"{selector}: design has d={design.d}, requested d={d}")
        return design
    raise UsageError(f"unknown design selector {selector!r}")


def _selector_name(selector: str) -> str:
    return selector.split(":", 1)[0] if selector.startswith("custom:") else selector


# -- commands -----------------------------------------------------------------------


def _g6(x: Optional[float]) -> str:
    return "" if x is None else format(float(x), ".6g")


def _g17(x: Optional[float]) -> str:
    return "" if x is None else format(float(x), ".17g")


def cmd_quant_table(config: RunConfig) -> List[List[str]]:
    rows = [list(QUANT_TABLE_HEADER)]
    for d in config.d_list:
        rows.append([str(d), "dn-delta*", _g6(quant.qd_optimal(d)), _g6(0.0), quant.QuantMethod.CLOSED_FORM.value])
        rows.append([str(d), "dn0", _g6(quant.qd_dn0(d)), _g6(0.0), quant.QuantMethod.CLOSED_FORM.value])
        design = sobol.sobol_design(d, config.sobol_n, _sobol_table(config))
        rep = quant.mc_quantization(design, config.samples, config.seed, config.workers)
        rows.append([str(d), "sobol", _g6(rep.qd), _g6(rep.stderr * quant.qd_normalize(d, design.n, 1.0)), rep.method.value])
    return rows


def grid_optimal_delta(d: int, gamma: float, deltas: Sequence[float]) -> cov.RadiusSolution:
    """Delta on the grid with the smallest approximate R_{1-gamma}; first one wins ties."""
    best = None
    for delta in deltas:
        sol = cov.radius_for_coverage(d, delta, gamma)
        if best is None or sol.R < best.R:
            best = sol
    return best


def cmd_cover_table(config: RunConfig) -> List[List[str]]:
    rows = [list(COVER_TABLE_HEADER)]
    gamma = config.gamma

    def emit(d, name, delta, sol, method):
        rows.append([str(d), name, _g6(delta), _g6(sol.gamma), _g6(sol.R), _g6(sol.r), _g6(sol.thickness), method])

    approx = cov.CoverageMethod.THEOREM3.value
    mc = cov.CoverageMethod.MONTE_CARLO.value
    for d in config.d_list:
        opt = grid_optimal_delta(d, gamma, config.deltas)
        emit(d, "dn-delta-opt", opt.delta, opt, approx)
        emit(d, "dn-delta-1/2", 0.5, cov.radius_for_coverage(d, 0.5, gamma), approx)
        dn0 = designs.build_dn0(d, materialize=False)
        emit(d, "dn0", None, cov.radius_for_design(dn0, gamma, config.samples, config.seed, config.workers), mc)
        sob = sobol.sobol_design(d, config.sobol_n, _sobol_table(config))
        emit(d, "sobol", None, cov.radius_for_design(sob, gamma, config.samples, config.seed, config.workers), mc)
        emit(d, "dn-delta-opt", opt.delta, cov.full_cover_radius(DesignKind.DN_DELTA, d, opt.delta), "Exact")
        emit(d, "dn-delta-1/2", 0.5, cov.full_cover_radius(DesignKind.DN_DELTA, d, 0.5), "Exact")
        emit(d, "dn0", None, cov.full_cover_radius(DesignKind.DN0, d), "Exact")
    return rows


def cmd_curve(config: RunConfig) -> List[List[str]]:
    if not config.r_list:
        raise UsageError("--r: need at least one radius")
    if any(r < 0 for r in config.r_list):
        raise UsageError("--r: radii must be nonnegative")
    rows = [list(CURVE_HEADER)]
    for d in config.d_list:
        for delta in config.deltas:
            if not 0.0 <= delta <= 1.0:
                raise UsageError(f"delta {delta} outside [0, 1]")
            design = designs.build_dn_delta(d, delta, materialize=False)
            mc = cov.mc_coverage_curve(design, config.r_list, config.samples, config.seed, config.workers)
            for r, m in zip(config.r_list, mc):
                approx = cov.coverage_dn_delta(d, delta, r).value
                lower, upper = cov.coverage_bounds(d, delta, r)
                rows.append([str(d), _g17(delta), _g17(r), _g17(approx), _g17(m.value), _g17(m.stderr), _g17(lower), _g17(upper)])
    return rows


def cmd_cdf(config: RunConfig) -> List[List[str]]:
    if len(config.d_list) != 1:
        raise UsageError("cdf takes a single --d")
    d = config.d_list[0]
    R_grid = grid_values(*config.r_grid)
    rows = [list(CDF_HEADER)]
    for selector in config.design:
        design = resolve_design(selector, d, config)
        # shared R-grid, mapped to each design's own radius scale
        scale = cov.normalized_radius(design.n, d, 1.0)
        r_grid = [R / scale for R in R_grid]
        curve = cov.distance_cdf_curve(design, r_grid, config.samples, config.seed, config.workers)
        for R, (_, p) in zip(R_grid, curve):
            rows.append([_selector_name(selector), _g6(R), _g6(p)])
    return rows


def cmd_eval(config: RunConfig) -> List[List[str]]:
    rows = [list(EVAL_HEADER)]
    for d in config.d_list:
        for selector in config.design:
            design = resolve_design(selector, d, config)
            rep = quant.mc_quantization(design, config.samples, config.seed, config.workers)
            sol = cov.radius_for_design(design, config.gamma, config.samples, config.seed, config.workers)
            r1 = None
            if design.kind in (DesignKind.DN_DELTA, DesignKind.DN0):
                r1 = cov.full_cover_radius(design.kind, d, design.delta).R
            scale = quant.qd_normalize(d, design.n, 1.0)
            rows.append(
                [_selector_name(selector), str(d), str(design.n), _g6(design.delta), _g6(rep.qd),
                 _g6(rep.stderr * scale), _g6(config.gamma), _g6(sol.R), _g6(r1)]
            )
    return rows


# -- validate ---------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _check_quant_mc(config: RunConfig) -> List[Check]:
    """Closed-form theta against MC within 3 sigma; one reseed allowed over the grid."""
    out = []
    reseeds = 0
    for d in config.d_list:
        for delta in (0.0, 0.3, 0.5, quant.optimal_delta(d), 0.7, 1.0):
            theta = quant.theta_dn_delta(d, delta)
            design = designs.build_dn_delta(d, delta, materialize=False)
            rep = quant.mc_quantization(design, config.samples, config.seed, config.workers)
            ok = abs(rep.theta - theta) <= 3.0 * rep.stderr
            note = ""
            if not ok and reseeds == 0:
                reseeds += 1
                rep = quant.mc_quantization(design, config.samples, config.seed + 1, config.workers)
                ok = abs(rep.theta - theta) <= 3.0 * rep.stderr
                note = " (reseeded)"
            out.append(
                Check(
                    f"quant_mc d={d} delta={delta:.6g}",
                    ok,
                    f"theta={theta:.6g} mc={rep.theta:.6g} |diff|={abs(rep.theta - theta):.3g} 3se={3 * rep.stderr:.3g}{note}",
                )
            )
    return out


def _check_optimal_delta(config: RunConfig) -> List[Check]:
    out = []
    for d in sorted(set(config.d_list) | {10, 20}):
        star = quant.optimal_delta(d)
        grid = quant.delta_grid_minimizer(d)
        out.append(Check(f"optimal_delta d={d}", abs(star - grid) <= 1e-4 + 1e-12, f"delta*={star:.6g} grid={grid:.6g}"))
        qd_star = quant.qd_dn_delta(d, star)
        out.append(
            Check(
                f"qd_optimal d={d}",
                abs(quant.qd_optimal(d) - qd_star) <= 1e-14 * qd_star,
                f"closed={quant.qd_optimal(d):.10g} at_delta*={qd_star:.10g}",
            )
        )
    return out


def _check_crossover() -> List[Check]:
    below = [d for d in range(7, 51) if quant.qd_optimal(d) >= 1.0 / 12.0]
    above = [d for d in range(3, 7) if quant.qd_optimal(d) <= 1.0 / 12.0]
    tail = [d for d in range(15, 100) if not quant.qd_optimal(d) < quant.qd_optimal(d + 1) < 1.0 / 12.0]
    return [
        Check("qd_optimal below 1/12 for d=7..50", not below, f"violations={below}"),
        Check("qd_optimal above 1/12 for d=3..6", not above, f"violations={above}"),
        Check("qd_optimal increasing on d=15..100", not tail, f"violations={tail}"),
    ]


def _check_voronoi(config: RunConfig) -> List[Check]:
    out = []
    for d in config.d_list:
        hits = map_blocks(
            lambda x: (designs.membership_codes(x) != designs.OUTSIDE_CODE).astype(float),
            d, config.samples, config.seed, config.workers,
        )
        frac, se = mean_and_stderr(hits)
        target = 2.0 ** (1 - d)
        out.append(
            Check(f"voronoi_volume d={d}", abs(frac - target) <= 4.0 * se, f"frac={frac:.6g} target={target:.6g} 4se={4 * se:.3g}")
        )

        def disagree(x, d=d):
            delta = 0.3 + 0.4 * ((d % 3) / 2.0)
            design = designs.build_dn_delta(d, delta, materialize=False)
            inside = designs.membership_codes(x) != designs.OUTSIDE_CODE
            to_z1 = ((x - delta) ** 2).sum(axis=1)
            best = designs.nearest_sq_distances(x, design)
            z1_nearest = to_z1 <= best + 1e-12
            return np.array([np.count_nonzero(inside != z1_nearest)], dtype=float)

        bad = int(sum(b[0] for b in map_blocks(disagree, d, config.samples, config.seed + 7, config.workers)))
        out.append(Check(f"voronoi_vs_nearest d={d}", bad == 0, f"disagreements={bad}"))
    return out


def _check_nearest_rule(config: RunConfig) -> List[Check]:
    out = []
    rng = np.random.Generator(np.random.PCG64(config.seed))
    for d in config.d_list:
        x = rng.uniform(-1.0, 1.0, size=(10**4, d))
        for delta in (0.3, 0.7):
            design = designs.build_dn_delta(d, delta)
            fast = designs.nearest_sq_distances(x, design)
            slow = designs.linear_scan_sq_distances(x, design.coords)
            out.append(Check(f"nearest_rule d={d} delta={delta}", bool(np.array_equal(fast, slow)), f"max|diff|={np.max(np.abs(fast - slow)):.3g}"))
    return out


def _central_moments_quad(z: float) -> Tuple[float, float, float]:
    def m(k, mean=0.0):
        val, _ = integrate.quad(lambda u: ((u - z) ** 2 - mean) ** k / 2.0, -1.0, 1.0, epsabs=1e-13, epsrel=1e-13)
        return val

    mu = m(1)
    return mu, m(2, mu), m(3, mu)


def _check_moments() -> List[Check]:
    out = []
    for z in (0.0, 0.25, 0.5, 1.0):
        mom = cov.ball_cube_moments(1, z * z)
        ref = _central_moments_quad(z)
        err = max(abs(a - b) for a, b in zip((mom.mu, mom.sigma_sq, mom.mu3), ref))
        out.append(Check(f"moments z={z}", err <= 1e-10, f"max|diff|={err:.3g}"))
    return out


def _check_coverage_structure(config: RunConfig) -> List[Check]:
    out = []
    for d in config.d_list:
        for delta in (0.25, 0.5, 0.75):
            jumps = []
            for r0 in (delta, 1.0 + delta):
                lo = cov.coverage_dn_delta(d, delta, r0 * (1.0 - 1e-12)).value
                hi = cov.coverage_dn_delta(d, delta, r0 * (1.0 + 1e-12)).value
                jumps.append(abs(hi - lo))
            out.append(Check(f"regime_continuity d={d} delta={delta}", max(jumps) <= 1e-6, f"max jump={max(jumps):.3g}"))
            r_grid = np.linspace(0.0, 2.0 * math.sqrt(d), 201)
            vals = np.array([cov.coverage_dn_delta(d, delta, float(r)).value for r in r_grid])
            drop = float(np.max(np.maximum.accumulate(vals) - vals))
            out.append(Check(f"monotone_in_r d={d} delta={delta}", drop <= 1e-6, f"max drop={drop:.3g}"))
    for d, z2 in ((3, 0.0), (10, 2.5)):
        worst = max(
            abs(cov.normal_cdf(t) + cov.edgeworth_correction(d, z2, t) - cov.normal_cdf(t)) for t in (-1.0, 1.0)
        )
        out.append(Check(f"edgeworth_zero_at_t=+-1 d={d}", worst == 0.0, f"max correction={worst:.3g}"))
    return out


def _check_stieltjes(config: RunConfig) -> List[Check]:
    out = []
    for d in config.d_list[:2]:
        design = designs.build_dn_delta(d, quant.optimal_delta(d), materialize=False)
        sq = cov.sample_sq_distances(design, config.samples, config.seed, config.workers)
        mean, _ = mean_and_stderr([sq])
        # E rho^2 as the Stieltjes sum of r^2 against the empirical CDF jumps
        values, counts = np.unique(sq, return_counts=True)
        stieltjes = float(np.sum(values * counts) / sq.size)
        rel = abs(mean - stieltjes) / mean
        out.append(Check(f"mean_vs_stieltjes d={d}", rel <= 1e-12, f"mean={mean:.10g} stieltjes={stieltjes:.10g}"))
    return out


def _check_sobol(config: RunConfig) -> List[Check]:
    table = _sobol_table(config)
    d = min(10, table.max_dim)
    pts = sobol.sobol_points(d, 1 << 10, table)
    # the balanced 2^k-point net is the skipped zero point plus the first 2^k - 1 points
    net = np.vstack([np.zeros((1, d)), pts])
    bad = [k for k in range(1, 11) if not np.all((net[: 1 << k] < 0.5).sum(axis=0) == 1 << (k - 1))]
    drift = float(np.max(np.abs(pts.mean(axis=0) - 0.5)))
    return [
        Check(f"sobol_dyadic_balance d={d}", not bad, f"failing k={bad}"),
        Check(f"sobol_coordinate_means d={d}", drift <= 1e-3, f"max|mean-0.5|={drift:.3g}"),
    ]


def run_checks(config: RunConfig) -> List[Check]:
    checks: List[Check] = []
    checks += _check_quant_mc(config)
    checks += _check_optimal_delta(config)
    checks += _check_crossover()
    checks += _check_voronoi(config)
    checks += _check_nearest_rule(config)
    checks += _check_moments()
    checks += _check_coverage_structure(config)
    checks += _check_stieltjes(config)
    checks += _check_sobol(config)
    return checks


def cmd_validate(config: RunConfig) -> str:
    checks = run_checks(config)
    failed = sum(not c.passed for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    report = "\n".join(lines) + "\n"
    if failed:
        raise ValidationFailure(report)
    return report


# -- entry point ---------------------------------------------------------------------


def _render(rows: List[List[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


_HANDLERS: dict = {
    "quant-table": cmd_quant_table,
    "cover-table": cmd_cover_table,
    "curve": cmd_curve,
    "cdf": cmd_cdf,
    "eval": cmd_eval,
}


def run(config: RunConfig) -> str:
    """Execute a configured command and return its text output."""
    if config.command == "validate":
        return cmd_validate(config)
    return _render(_HANDLERS[config.command](config))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = config_from_args(args)
        text = run(config)
        _write(text, config.output_path)
    except ValidationFailure as exc:
        report = str(exc)
        try:
            _write(report, args.out)
        except OSError:
            sys.stdout.write(report)
        return EXIT_VALIDATION
    except (UsageError, designs.CapacityError) as exc:
        print(f"cubecover: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cubecover: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except sobol.DirectionNumberError as exc:
        print(f"cubecover: bad direction-number file: {exc}", file=sys.stderr)
        return EXIT_IO
    except InputFileError as exc:
        print(f"cubecover: bad design file: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"cubecover: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
