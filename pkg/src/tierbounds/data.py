"""Observed-data container and CSV round-trip.

A table holds the observed variables O = (W, X, A, Y).  Potential
outcomes produced by the simulator live in a separate object so that
estimator code physically cannot read them.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Malformed or degenerate input data."""


@dataclass
class ObservationTable:
    """Columnar table of observations (w*, x, a, y).

    ``w`` maps covariate names (``w1``, ``w2``, ...) to float arrays;
    ``x`` is the integer stratum label, ``a`` the binary exposure.
    """

    w: dict[str, np.ndarray]
    x: np.ndarray
    a: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.y)
        for name, col in self.w.items():
            if len(col) != n:
                raise DataError(f"column {name!r} has length {len(col)}, expected {n}")
        if len(self.x) != n or len(self.a) != n:
            raise DataError("x/a/y column lengths differ")
        if not np.isin(self.a, (0, 1)).all():
            raise DataError("exposure column 'a' must be binary 0/1")

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def strata(self) -> np.ndarray:
        return np.unique(self.x)

    def columns(self) -> dict[str, np.ndarray]:
        """All covariate columns available to basis terms (w*, x, a)."""
        cols = dict(self.w)
        cols["x"] = self.x.astype(float)
        cols["a"] = self.a.astype(float)
        return cols

    def subset(self, mask: np.ndarray) -> "ObservationTable":
        return ObservationTable(
            w={k: v[mask] for k, v in self.w.items()},
            x=self.x[mask], a=self.a[mask], y=self.y[mask],
        )

    def take(self, idx: np.ndarray) -> "ObservationTable":
        return ObservationTable(
            w={k: v[idx] for k, v in self.w.items()},
            x=self.x[idx], a=self.a[idx], y=self.y[idx],
        )

    def to_csv(self, path, oracle: "PotentialOutcomes | None" = None) -> None:
        names = sorted(self.w, key=_w_order)
        header = names + ["x", "a", "y"]
        cols = [self.w[k] for k in names] + [self.x, self.a, self.y]
        if oracle is not None:
            header += ["y0", "y1"]
            cols += [oracle.y0, oracle.y1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in zip(*cols):
                writer.writerow([_fmt(v) for v in row])

    @classmethod
    def from_csv(cls, path) -> "ObservationTable":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file") from None
            rows = list(reader)
        required = {"x", "a", "y"}
        missing = required - set(header)
        if missing:
            raise DataError(f"{path}: missing columns {sorted(missing)}")
        data = {h: np.array([r[i] for r in rows], dtype=float)
                for i, h in enumerate(header)}
        w = {k: v for k, v in data.items()
             if k.startswith("w") and k not in ("x", "a", "y")}
        if not w:
            raise DataError(f"{path}: no covariate columns (expected w1, w2, ...)")
        a = data["a"]
        if not np.isin(a, (0.0, 1.0)).all():
            raise DataError(f"{path}: exposure column 'a' is not binary")
        return cls(w=w, x=data["x"].astype(int), a=a.astype(int), y=data["y"])


@dataclass
class PotentialOutcomes:
    """Oracle-only columns; never passed to estimators."""

    y0: np.ndarray
    y1: np.ndarray


def _w_order(name: str):
    suffix = name[1:]
    return (0, int(suffix)) if suffix.isdigit() else (1, name)


def _fmt(v) -> str:
    if float(v) == int(v):
        return str(int(v))
    return repr(float(v))
