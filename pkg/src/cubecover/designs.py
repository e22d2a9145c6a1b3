"""Point designs in [-1, 1]^d and their nearest-point geometry.

Two structured families are built here:

* ``DnDelta``: the 2^(d-1) vertices of [-delta, delta]^d carrying an even number
  of negative coordinates (the checkerboard parity class).
* ``Dn0``: all 2^d vertices of [-1/2, 1/2]^d.

Both have closed-form nearest-vertex rules, so Monte Carlo work on them never
needs the explicit point list. Designs above ``MAX_ENUMERATION_DIM`` can be
built with ``materialize=False`` and still answer distance queries.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from os import PathLike
from typing import Optional, Union

import numpy as np

MAX_ENUMERATION_DIM = 25

_SCAN_CHUNK = 4096
_GRAM_CHUNK = 512


class CapacityError(ValueError):
    """Raised when an explicit point list would exceed the enumeration cap."""


class DesignKind(str, enum.Enum):
    DN_DELTA = "DnDelta"
    DN0 = "Dn0"
    SOBOL = "Sobol"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class Design:
    """An n-point design in R^d.

    ``points`` is ``None`` for implicit (closed-form only) designs; accessing
    :attr:`coords` on one raises :class:`CapacityError`.
    """

    kind: DesignKind
    d: int
    n: int
    delta: Optional[float] = None
    points: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def materialized(self) -> bool:
        return self.points is not None

    @property
    def coords(self) -> np.ndarray:
        if self.points is None:
            raise CapacityError(
                f"{self.kind.value} design in d={self.d} is implicit; "
                f"explicit points are only built for d <= {MAX_ENUMERATION_DIM}"
            )
        return self.points

    @property
    def label(self) -> str:
        if self.kind is DesignKind.DN_DELTA:
            return f"DnDelta(delta={self.delta:.6g})"
        return self.kind.value


def _frozen(points: np.ndarray) -> np.ndarray:
    points = np.ascontiguousarray(points, dtype=float)
    points.setflags(write=False)
    return points


def _check_dim(d: int, materialize: bool, max_dim: int) -> None:
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    if materialize and d > max_dim:
        raise CapacityError(
            f"refusing to enumerate 2^{d} vertices (cap d <= {max_dim}); "
            "pass materialize=False for closed-form queries only"
        )


def _sign_masks(d: int) -> np.ndarray:
    """Rows of +-1 for every bit mask 0..2^d-1; bit k set means coordinate k is negative."""
    masks = np.arange(1 << d, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(d, dtype=np.int64)) & 1
    return 1 - 2 * bits


def build_dn_delta(
    d: int,
    delta: float,
    materialize: bool = True,
    max_dim: int = MAX_ENUMERATION_DIM,
) -> Design:
    """Even-parity vertices of [-delta, delta]^d, first point ``(delta, ..., delta)``.

    Examples
    --------
    >>> build_dn_delta(2, 0.5).coords.tolist()
    [[0.5, 0.5], [-0.5, -0.5]]
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    _check_dim(d, materialize, max_dim)
    points = None
    if materialize:
        signs = _sign_masks(d)
        even = (signs < 0).sum(axis=1) % 2 == 0
        points = _frozen(signs[even] * float(delta))
    return Design(DesignKind.DN_DELTA, d, 1 << (d - 1), float(delta), points)


def build_dn0(d: int, materialize: bool = True, max_dim: int = MAX_ENUMERATION_DIM) -> Design:
    """All 2^d vertices of [-1/2, 1/2]^d."""
    _check_dim(d, materialize, max_dim)
    points = _frozen(_sign_masks(d) * 0.5) if materialize else None
    return Design(DesignKind.DN0, d, 1 << d, None, points)


def custom_design(points, kind: DesignKind = DesignKind.CUSTOM) -> Design:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("a design needs at least one point given as an (n, d) array")
    if np.any(np.abs(points) > 1.0):
        raise ValueError("design points must lie in [-1, 1]^d")
    return Design(kind, points.shape[1], points.shape[0], None, _frozen(points))


# -- nearest-point queries ---------------------------------------------------


def _as_batch(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != d:
        raise ValueError(f"dimension mismatch: point has {x.shape[-1]} coordinates, design has d={d}")
    return x


def nearest_dn_delta_vertex(x: np.ndarray, delta: float) -> np.ndarray:
    """Nearest even-parity vertex of [-delta, delta]^d for each row of ``x``.

    Coordinates take the sign of x; if that leaves an odd number of minus
    signs, the coordinate with the smallest |x_i| is flipped (cost 4*delta*|x_i|).
    """
    x = np.atleast_2d(x)
    signs = np.where(x >= 0.0, 1.0, -1.0)
    odd = (signs < 0).sum(axis=1) % 2 == 1
    if np.any(odd):
        rows = np.nonzero(odd)[0]
        cols = np.argmin(np.abs(x[rows]), axis=1)
        signs[rows, cols] *= -1.0
    return signs * delta


def nearest_dn0_vertex(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return np.where(x >= 0.0, 0.5, -0.5)


def _sq_norm_rows(diff: np.ndarray) -> np.ndarray:
    return (diff * diff).sum(axis=-1)


def _dn_delta_sq_distances(x: np.ndarray, delta: float) -> np.ndarray:
    """Squared distance to the nearest vertex of D_{n,delta}.

    When several coordinates share the smallest |x_i|, each possible parity
    repair is equally near but the float sums differ in the last bit; all of
    them are evaluated and the smallest kept, so the result matches a linear
    scan exactly.
    """
    out = _sq_norm_rows(x - nearest_dn_delta_vertex(x, delta))
    ax = np.abs(x)
    odd = (x < 0.0).sum(axis=1) % 2 == 1
    tied = odd & ((ax == ax.min(axis=1, keepdims=True)).sum(axis=1) > 1)
    for row in np.nonzero(tied)[0]:
        signs = np.where(x[row] >= 0.0, 1.0, -1.0)
        for col in np.nonzero(ax[row] == ax[row].min())[0]:
            flipped = signs.copy()
            flipped[col] *= -1.0
            out[row] = min(out[row], _sq_norm_rows(x[row] - flipped * delta))
    return out


def linear_scan_sq_distances(x: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Brute-force min_i ||x - Z_i||^2 by comparing every row against every point."""
    x = np.atleast_2d(x)
    out = np.empty(x.shape[0])
    step = max(1, _SCAN_CHUNK * 16 // max(points.shape[0], 1))
    for lo in range(0, x.shape[0], step):
        diff = x[lo : lo + step, None, :] - points[None, :, :]
        out[lo : lo + step] = _sq_norm_rows(diff).min(axis=1)
    return out


def _generic_sq_distances(x: np.ndarray, points: np.ndarray) -> np.ndarray:
    # argmin through the Gram expansion, exact distance recomputed for the winner
    sq_pts = _sq_norm_rows(points)
    gram = np.ascontiguousarray(-2.0 * points.T)
    out = np.empty(x.shape[0])
    for lo in range(0, x.shape[0], _GRAM_CHUNK):
        chunk = x[lo : lo + _GRAM_CHUNK]
        score = chunk @ gram
        score += sq_pts
        best = points[np.argmin(score, axis=1)]
        out[lo : lo + _GRAM_CHUNK] = _sq_norm_rows(chunk - best)
    return out


def nearest_sq_distances(x, design: Design) -> np.ndarray:
    """Squared distance from every row of ``x`` to its nearest design point."""
    x = np.atleast_2d(_as_batch(x, design.d))
    if design.kind is DesignKind.DN_DELTA:
        return _dn_delta_sq_distances(x, design.delta)
    if design.kind is DesignKind.DN0:
        return _sq_norm_rows(x - nearest_dn0_vertex(x))
    return _generic_sq_distances(x, design.coords)


def nearest_sq_distance(x, design: Design) -> float:
    """min_i ||x - Z_i||^2 for a single point ``x``.

    >>> round(nearest_sq_distance([-0.2, 0.5, 0.9], build_dn_delta(3, 0.5)), 12)
    0.65
    """
    x = _as_batch(x, design.d)
    if x.ndim != 1:
        raise ValueError("expected a single point; use nearest_sq_distances for batches")
    return float(nearest_sq_distances(x[None, :], design)[0])


# -- Voronoi cell of Z_1 = (delta, ..., delta) --------------------------------


class Region(str, enum.Enum):
    C0 = "C0"
    U = "U"
    OUTSIDE = "OutsideV1"


@dataclass(frozen=True)
class VoronoiMembership:
    region: Region
    index: Optional[int]
    point: tuple

    @property
    def name(self) -> str:
        return f"U_{self.index}" if self.region is Region.U else self.region.value


OUTSIDE_CODE = -1


def membership_codes(x: np.ndarray) -> np.ndarray:
    """Vectorized cell classification: 0 for C0, j in 1..d for U_j, -1 outside.

    Boundary points go to the lowest-index qualifying region (C0 first).
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    m, d = x.shape
    codes = np.full(m, OUTSIDE_CODE, dtype=np.int64)
    in_c0 = np.all((x >= 0.0) & (x <= 1.0), axis=1)
    codes[in_c0] = 0

    j = np.argmin(x, axis=1)
    xj = x[np.arange(m), j]
    if d > 1:
        others = x.copy()
        others[np.arange(m), j] = np.inf
        second = others.min(axis=1)
        ok_others = (second >= -xj) & np.all(x <= 1.0, axis=1)
    else:
        ok_others = np.ones(m, dtype=bool)
    in_u = (~in_c0) & (xj >= -1.0) & (xj <= 0.0) & ok_others
    codes[in_u] = j[in_u] + 1
    return codes


def voronoi_membership(x, d: int) -> VoronoiMembership:
    """Classify ``x`` against the Voronoi cell of (delta, ..., delta) in D_{n,delta}.

    The cell is the unit cube C0 plus d wedges U_j and does not depend on delta.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (d,):
        raise ValueError(f"expected a point with {d} coordinates, got shape {x.shape}")
    if np.any(np.abs(x) > 1.0):
        raise ValueError("point lies outside [-1, 1]^d")
    code = int(membership_codes(x[None, :])[0])
    point = tuple(float(v) for v in x)
    if code == 0:
        return VoronoiMembership(Region.C0, None, point)
    if code == OUTSIDE_CODE:
        return VoronoiMembership(Region.OUTSIDE, None, point)
    return VoronoiMembership(Region.U, code, point)


# -- CSV ----------------------------------------------------------------------


def write_design_csv(design: Design, path: Union[str, PathLike]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(design.d)])
        for row in design.coords:
            writer.writerow([format(float(v), ".17g") for v in row])


def read_design_csv(path: Union[str, PathLike]) -> Design:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise ValueError(f"{path}: empty design file")
        expected = [f"x{i + 1}" for i in range(len(header))]
        if [h.strip() for h in header] != expected:
            raise ValueError(f"{path}: header must be {','.join(expected)}")
        rows = [[float(v) for v in row] for row in reader if row]
    if any(len(r) != len(header) for r in rows):
        raise ValueError(f"{path}: ragged rows")
    return custom_design(np.array(rows, dtype=float))
