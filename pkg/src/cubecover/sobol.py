"""Unscrambled Sobol points (Gray-code order) and the comparison design S_n.

Direction numbers come in the usual whitespace-delimited text format: one
header line, then rows ``d s a m_1 ... m_s`` for dimensions 2, 3, ...; the
first dimension is the van der Corput sequence and is never listed. A table
for the first 1000 dimensions ships with the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from os import PathLike
from typing import Optional, Tuple, Union

import numpy as np

from .designs import Design, DesignKind, custom_design

BITS = 32
_SCALE = 2.0**-BITS


class DirectionNumberError(ValueError):
    pass


@dataclass(frozen=True)
class DirectionRecord:
    dim: int
    degree: int
    poly: int
    m: Tuple[int, ...]


@dataclass(frozen=True)
class DirectionTable:
    records: Tuple[DirectionRecord, ...]

    @property
    def max_dim(self) -> int:
        return len(self.records) + 1


def parse_direction_numbers(text: str, source: str = "<string>") -> DirectionTable:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DirectionNumberError(f"{source}: empty direction-number file")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            fields = [int(tok) for tok in line.split()]
        except ValueError:
            raise DirectionNumberError(f"{source}:{lineno}: non-integer field") from None
        if len(fields) < 4:
            raise DirectionNumberError(f"{source}:{lineno}: expected 'd s a m_1 ... m_s'")
        dim, degree, poly, m = fields[0], fields[1], fields[2], tuple(fields[3:])
        if degree < 1 or len(m) != degree:
            raise DirectionNumberError(f"{source}:{lineno}: degree {degree} but {len(m)} initial values")
        if dim != len(records) + 2:
            raise DirectionNumberError(f"{source}:{lineno}: dimension {dim} out of sequence")
        if not 0 <= poly < 1 << max(degree - 1, 0):
            raise DirectionNumberError(f"{source}:{lineno}: polynomial code {poly} too large for degree {degree}")
        for i, mi in enumerate(m, start=1):
            if mi % 2 == 0:
                raise DirectionNumberError(f"{source}:{lineno}: m_{i} = {mi} is even")
            if not 0 < mi < 1 << i:
                raise DirectionNumberError(f"{source}:{lineno}: m_{i} = {mi} must be below 2^{i}")
        records.append(DirectionRecord(dim, degree, poly, m))
    if not records:
        raise DirectionNumberError(f"{source}: no direction-number rows")
    return DirectionTable(tuple(records))


def load_direction_numbers(path: Union[str, PathLike]) -> DirectionTable:
    with open(path) as fh:
        return parse_direction_numbers(fh.read(), str(path))


_DEFAULT: Optional[DirectionTable] = None


def default_table() -> DirectionTable:
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("cubecover").joinpath("data/direction_numbers.txt").read_text()
        _DEFAULT = parse_direction_numbers(text, "direction_numbers.txt")
    return _DEFAULT


def _direction_integers(record: Optional[DirectionRecord]) -> np.ndarray:
    """V_k = m_k * 2^(BITS-k) for k = 1..BITS."""
    if record is None:
        m = [1] * BITS
    else:
        s, a = record.degree, record.poly
        m = list(record.m)
        for k in range(s, BITS):
            new = m[k - s] ^ (m[k - s] << s)
            for i in range(1, s):
                if (a >> (s - 1 - i)) & 1:
                    new ^= m[k - i] << i
            m.append(new)
    return np.array([mk << (BITS - k) for k, mk in enumerate(m[:BITS], start=1)], dtype=np.uint64)


def sobol_points(d: int, n: int, table: Optional[DirectionTable] = None) -> np.ndarray:
    """First ``n`` Sobol points in [0, 1)^d, skipping the all-zeros point.

    >>> sobol_points(1, 3).ravel().tolist()
    [0.5, 0.75, 0.25]
    """
    table = table or default_table()
    if d < 1 or n < 1:
        raise ValueError("sobol_points needs d >= 1 and n >= 1")
    if d > table.max_dim:
        raise ValueError(f"direction table covers {table.max_dim} dimensions, {d} requested")
    if n >= 1 << BITS:
        raise ValueError(f"at most 2^{BITS} - 1 points supported")
    v = np.stack([_direction_integers(None)] + [_direction_integers(rec) for rec in table.records[: d - 1]], axis=1)

    # Gray-code step i flips direction number ctz(i), i = 1..n
    i = np.arange(1, n + 1, dtype=np.int64)
    ctz = np.log2(i & -i).astype(np.int64)
    x = np.bitwise_xor.accumulate(v[ctz], axis=0)
    return x.astype(np.float64) * _SCALE


def sobol_design(d: int, n: int, table: Optional[DirectionTable] = None) -> Design:
    """S_n: Sobol points mapped to [-1, 1)^d by x -> 2x - 1."""
    return custom_design(2.0 * sobol_points(d, n, table) - 1.0, kind=DesignKind.SOBOL)
