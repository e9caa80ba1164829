"""Spectral measures of Hermitian blocks and their large-k expansions.

For a degree-k block Q the measure of a test function f is the trace of
f(Q).  Two deliberately independent evaluation paths are kept side by
side: a trace-of-powers path for polynomial f (no eigensolve involved)
and an eigensolve path for arbitrary f.  They agree to within float error
and serve as mutual oracles in the test suite.

Scaled measures (2 pi / k)^m * trace f(Q) admit an expansion in powers of
1/k; fit_expansion recovers the leading coefficients by least squares on
a window of k values, and richardson_limit accelerates a single sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import pi
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EigensolveError,
    IllConditionedFitError,
    PolynomialDegreeError,
    ValidationError,
)
from .hardy_sphere import ToeplitzBlock

__all__ = [
    "TestFunction",
    "AsymptoticFit",
    "measure_poly",
    "measure_eigen",
    "scaled_measure",
    "fit_expansion",
    "richardson_limit",
    "richardson_table",
    "write_measure_csv",
]

MAX_TRACE_DEGREE = 16
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class TestFunction:
    """Real test function applied to a spectrum.

    Either a polynomial given by ascending coefficients (the trace-power
    path needs this form) or a plain callable tagged with the interval it
    was designed for.
    """

    __test__ = False  # keep pytest from collecting this as a test case

    kind: str
    coeffs: tuple[float, ...] | None = None
    fn: Callable | None = None
    support: tuple[float, float] | None = None
    label: str = ""

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], label: str = "") -> "TestFunction":
        cs = tuple(float(c) for c in coeffs)
        if not cs:
            raise ValidationError("polynomial needs at least one coefficient", operation="spectral.TestFunction")
        return cls(kind="polynomial", coeffs=cs, label=label or "poly" + str(list(cs)))

    @classmethod
    def sampled(cls, fn: Callable, support: tuple[float, float] = (0.0, 1.0), label: str = "sampled") -> "TestFunction":
        return cls(kind="sampled", fn=fn, support=(float(support[0]), float(support[1])), label=label)

    @property
    def degree(self) -> int:
        if self.coeffs is None:
            raise ValidationError("not a polynomial test function", operation="spectral.TestFunction")
        return len(self.coeffs) - 1

    def __call__(self, x):
        if self.kind == "polynomial":
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x)
            for c in reversed(self.coeffs):
                out = out * x + c
            return out if out.ndim else float(out)
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return float(self.fn(float(arr)))
        try:
            vals = np.asarray(self.fn(arr), dtype=float)
            if vals.shape == arr.shape:
                return vals
        except (TypeError, ValueError):
            pass
        return np.array([float(self.fn(float(v))) for v in arr])


def measure_poly(block: ToeplitzBlock, f: TestFunction) -> float:
    """trace f(Q) for polynomial f via iterated matrix products.

    No eigensolve: tr Q^j is accumulated from explicit powers, which makes
    this path an independent check on measure_eigen.  Degree is capped at
    MAX_TRACE_DEGREE.
    """
    if f.kind != "polynomial":
        raise ValidationError("measure_poly requires a polynomial test function", operation="spectral.measure_poly")
    if f.degree > MAX_TRACE_DEGREE:
        raise PolynomialDegreeError(
            f"degree {f.degree} exceeds the trace-power cap {MAX_TRACE_DEGREE}",
            operation="spectral.measure_poly",
        )
    q = block.matrix
    total = f.coeffs[0] * block.dim
    power = None
    for j in range(1, f.degree + 1):
        power = q if power is None else power @ q
        if f.coeffs[j]:
            total += f.coeffs[j] * float(np.trace(power).real)
    return float(total)


def measure_eigen(block: ToeplitzBlock, f: TestFunction) -> float:
    """trace f(Q) through the Hermitian eigendecomposition."""
    try:
        lam = np.linalg.eigvalsh(block.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolveError(
            f"eigensolve failed to converge on the k={block.k} block (dim {block.dim})",
            operation="spectral.measure_eigen",
        ) from exc
    return float(np.sum(f(lam)))


def scaled_measure(value: float, m: int, k: int) -> float:
    """(2 pi / k)^m * value, the normalization under which measures converge."""
    if m < 0:
        raise ValidationError("power m must be non-negative", operation="spectral.scaled_measure")
    if k < 1:
        raise ValidationError("k must be positive", operation="spectral.scaled_measure")
    return (2.0 * pi / k) ** m * float(value)


@dataclass(frozen=True)
class AsymptoticFit:
    """Least-squares expansion of a sequence in powers of 1/k."""

    coefficients: tuple[float, ...]
    residual_norm: float
    ks: tuple[int, ...]
    order: int
    condition: float
    c0_uncertainty: float

    @property
    def c0(self) -> float:
        return self.coefficients[0]

    def to_json(self) -> dict:
        return {
            "c": [float(c) for c in self.coefficients],
            "residual": float(self.residual_norm),
            "k_range": [int(min(self.ks)), int(max(self.ks))],
        }


def _lstsq_powers(ks: np.ndarray, ys: np.ndarray, order: int) -> tuple[np.ndarray, float, float]:
    design = np.vander(1.0 / ks, N=order + 1, increasing=True)
    cond = float(np.linalg.cond(design))
    if cond > CONDITION_LIMIT:
        raise IllConditionedFitError(
            f"design matrix condition {cond:.3e} exceeds {CONDITION_LIMIT:.0e}; widen the k range",
            operation="spectral.fit_expansion",
        )
    coef, *_ = np.linalg.lstsq(design, ys, rcond=None)
    residual = float(np.max(np.abs(design @ coef - ys)))
    return coef, residual, cond


def fit_expansion(samples: Sequence[tuple[int, float]], order: int = 2) -> AsymptoticFit:
    """Fit value(k) ~ c_0 + c_1/k + ... + c_order/k^order.

    Needs at least order+2 distinct k values, all >= 2*order, so the
    columns stay distinguishable; a condition number beyond 1e12 is
    rejected rather than silently returning garbage.  The c0 uncertainty
    is estimated by refitting on the upper half of the window.
    """
    if order < 0:
        raise ValidationError("order must be non-negative", operation="spectral.fit_expansion")
    pairs = sorted((int(k), float(v)) for k, v in samples)
    ks = np.array([k for k, _ in pairs], dtype=float)
    ys = np.array([v for _, v in pairs], dtype=float)
    if len(set(ks.tolist())) < order + 2:
        raise ValidationError(
            f"need at least {order + 2} distinct k values for order {order}",
            operation="spectral.fit_expansion",
        )
    if ks.min() < 2 * order:
        raise ValidationError(
            f"k values must be at least {2 * order} for order {order}",
            operation="spectral.fit_expansion",
        )
    coef, residual, cond = _lstsq_powers(ks, ys, order)

    half = len(ks) // 2
    if len(ks) - half >= order + 2:
        sub_coef, _, _ = _lstsq_powers(ks[half:], ys[half:], order)
        unc = abs(float(sub_coef[0]) - float(coef[0]))
    else:
        unc = residual
    return AsymptoticFit(
        coefficients=tuple(float(c) for c in coef),
        residual_norm=residual,
        ks=tuple(int(k) for k in ks),
        order=order,
        condition=cond,
        c0_uncertainty=float(unc),
    )


def richardson_limit(ks: Sequence[int], values: Sequence, order: int):
    """Neville extrapolation of value(k) to k -> infinity in powers of 1/k.

    Uses the last order+1 entries.  When every value is exact (int or
    Fraction) the whole tableau is computed in rational arithmetic and the
    result is a Fraction; float input gives a float.
    """
    if order < 0:
        raise ValidationError("order must be non-negative", operation="spectral.richardson_limit")
    if len(ks) != len(values):
        raise ValidationError("ks and values must have equal length", operation="spectral.richardson_limit")
    if len(ks) < order + 1:
        raise ValidationError(f"need at least {order + 1} entries for order {order}", operation="spectral.richardson_limit")
    ks = list(ks)[len(ks) - order - 1:]
    vals = list(values)[len(values) - order - 1:]
    if len(set(ks)) != len(ks):
        raise ValidationError("k values must be distinct", operation="spectral.richardson_limit")
    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    if exact:
        xs = [Fraction(1, int(k)) for k in ks]
        t = [Fraction(v) for v in vals]
    else:
        xs = [1.0 / float(k) for k in ks]
        t = [float(v) for v in vals]
    npts = len(t)
    for m in range(1, npts):
        for i in range(npts - 1, m - 1, -1):
            t[i] = (xs[i - m] * t[i] - xs[i] * t[i - 1]) / (xs[i - m] - xs[i])
    return t[-1]


def richardson_table(samples: Sequence[tuple[int, float]], order: int = 1) -> list[list[float]]:
    """Full acceleration tableau, columns 0..order, for small orders (<= 3).

    Column m holds the m-step accelerated values; the last entry of the
    last column is the best estimate.  Higher orders amplify noise in
    eigensolve-derived data, hence the cap.
    """
    if not 0 <= order <= 3:
        raise ValidationError("table order must be between 0 and 3", operation="spectral.richardson_table")
    pairs = sorted((int(k), v) for k, v in samples)
    ks = [k for k, _ in pairs]
    if len(ks) < order + 1:
        raise ValidationError(f"need at least {order + 1} samples", operation="spectral.richardson_table")
    xs = [1.0 / k for k in ks]
    cols = [[float(v) for _, v in pairs]]
    for m in range(1, order + 1):
        prev = cols[-1]  # prev[j] is the window ending at index j+m-1
        nxt = []
        for i in range(m, len(ks)):
            j = i - m
            nxt.append((xs[j] * prev[j + 1] - xs[i] * prev[j]) / (xs[j] - xs[i]))
        cols.append(nxt)
    return cols


def write_measure_csv(path, rows: Sequence[dict]) -> None:
    """Dump measure samples with the standard column set."""
    import csv

    cols = ["n", "k", "m", "f_id", "mu", "scaled_mu"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow([row["n"], row["k"], row["m"], row["f_id"], repr(float(row["mu"])), repr(float(row["scaled_mu"]))])
