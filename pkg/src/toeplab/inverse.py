"""Pointwise symbol recovery from finite-level spectra.

Along the ray beta = k a through a rational simplex point a, the exact
eigenvalues lambda_{k a} of an invariant symbol converge to g(a) with a
power-series tail in 1/k.  Sampling the ray at multiples of the
denominator of a and extrapolating in 1/k therefore reads the symbol off
spectra computed at finitely many levels, which is an inverse problem:
nothing but the spectra (indexed by weight) enters.

The same data separates symbols: two symbols differing at a rational
point give different labeled spectra at every sufficiently divisible
level, even when coordinate symmetry makes the unlabeled multisets
match.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from math import lcm, log
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError
from .multiindex import MultiIndex
from .spectral import richardson_limit
from .toric import EquivariantSpectrum

__all__ = [
    "ExtrapolationResult",
    "RayResult",
    "Reconstruction",
    "DistinguishReport",
    "extrapolate_ray",
    "ray_levels",
    "reconstruct",
    "spectral_distinguishability",
    "loglog_slope",
]


@dataclass(frozen=True)
class ExtrapolationResult:
    limit: float
    error: float  # last-order correction size; an estimate, not a bound
    low_confidence: bool


def extrapolate_ray(ks: Sequence[int], values: Sequence, order: int) -> ExtrapolationResult:
    """Accelerated limit of a ray series with a self-reported error size.

    ``order`` 0 takes the last value as-is.  Otherwise the reported error
    is the gap between the order and order-1 accelerated limits, and the
    result is flagged low confidence when that correction exceeds the
    last raw increment of the series, the usual signature of the tableau
    amplifying noise instead of cancelling terms.
    """
    if order < 0:
        raise ValidationError("order must be nonnegative", operation="inverse.extrapolate_ray")
    needed = max(2, order + 1)
    if len(ks) != len(values) or len(ks) < needed:
        raise ValidationError(
            f"need at least {needed} ray samples for order {order}",
            operation="inverse.extrapolate_ray",
        )
    if order == 0:
        limit = values[-1]
        return ExtrapolationResult(limit=float(limit), error=float(abs(values[-1] - values[-2])), low_confidence=False)
    limit = richardson_limit(ks, values, order)
    prev = richardson_limit(ks, values, order - 1)
    err = abs(limit - prev)
    raw = abs(values[-1] - values[-2])
    return ExtrapolationResult(limit=float(limit), error=float(err), low_confidence=bool(err > raw > 0))


def ray_levels(denominator: int, k_max: int, spacing: str = "geometric") -> list[int]:
    """Levels at which the ray through a point of given denominator is integral.

    "all" returns every multiple of the denominator up to k_max;
    "geometric" halves downward from the largest multiple, keeping the
    series length logarithmic in k_max.
    """
    q = int(denominator)
    if q < 1 or k_max < 1:
        raise ValidationError("denominator and k_max must be positive", operation="inverse.ray_levels")
    if spacing == "all":
        return list(range(q, k_max + 1, q))
    if spacing == "geometric":
        ks = []
        k = q * (k_max // q)
        while k >= q:
            ks.append(k)
            k = q * (k // (2 * q))
        return ks[::-1]
    raise ValidationError("spacing must be 'all' or 'geometric'", operation="inverse.ray_levels")


@dataclass(frozen=True)
class RayResult:
    point: tuple[Fraction, ...]
    ks: tuple[int, ...]
    values: tuple[float, ...]
    estimate: float | None
    error: float | None
    low_confidence: bool
    missing: bool


@dataclass(frozen=True)
class Reconstruction:
    n: int
    k_max: int
    order: int
    spacing: str
    rays: tuple[RayResult, ...]

    def estimates(self) -> dict[tuple[Fraction, ...], float]:
        return {r.point: r.estimate for r in self.rays if not r.missing}

    def max_error(self, truth: Callable) -> float:
        errs = [abs(r.estimate - float(truth(r.point))) for r in self.rays if not r.missing]
        if not errs:
            raise ValidationError("every grid point is missing", operation="inverse.Reconstruction")
        return max(errs)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["point", "levels", "estimate", "error", "low_confidence", "missing"])
            for r in self.rays:
                w.writerow([
                    " ".join(str(c) for c in r.point),
                    " ".join(map(str, r.ks)),
                    "" if r.estimate is None else repr(r.estimate),
                    "" if r.error is None else repr(r.error),
                    int(r.low_confidence),
                    int(r.missing),
                ])


def _as_point(pt, n: int) -> tuple[Fraction, ...]:
    point = tuple(Fraction(c) for c in pt)
    if len(point) != n:
        raise ValidationError("grid point length must equal n", operation="inverse.reconstruct")
    if any(c < 0 for c in point) or sum(point) != 1:
        raise ValidationError(f"grid point {pt} is not on the unit simplex", operation="inverse.reconstruct")
    return point


def reconstruct(
    oracle: Callable[[int], EquivariantSpectrum],
    n: int,
    grid: Sequence,
    k_max: int,
    order: int = 1,
    spacing: str = "geometric",
) -> Reconstruction:
    """Recover symbol values on rational simplex points from spectra alone.

    ``oracle`` maps a level k to the equivariant spectrum of that level;
    it is consulted once per distinct level.  A grid point whose ray
    meets fewer than max(2, order + 1) usable levels is reported missing
    rather than extrapolated.  Exact rational eigenvalues feed the exact
    acceleration path, so "all" spacing with a high order reaches
    roundoff-limited accuracy.
    """
    points = [_as_point(pt, n) for pt in grid]
    cache: dict[int, EquivariantSpectrum] = {}

    def spectrum(k: int) -> EquivariantSpectrum:
        if k not in cache:
            cache[k] = oracle(k)
        return cache[k]

    rays = []
    for point in points:
        q = lcm(*(c.denominator for c in point))
        ks = ray_levels(q, k_max, spacing)
        if len(ks) < max(2, order + 1):
            rays.append(RayResult(
                point=point, ks=tuple(ks), values=tuple(float('nan') for _ in ks),
                estimate=None, error=None, low_confidence=False, missing=True,
            ))
            continue
        lams = []
        for k in ks:
            beta: MultiIndex = tuple(int(c * k) for c in point)
            lams.append(spectrum(k).eigenvalue_of(beta))
        res = extrapolate_ray(ks, lams, order)
        rays.append(RayResult(
            point=point, ks=tuple(ks), values=tuple(float(v) for v in lams),
            estimate=res.limit, error=res.error, low_confidence=res.low_confidence, missing=False,
        ))
    return Reconstruction(n=n, k_max=k_max, order=order, spacing=spacing, rays=tuple(rays))


@dataclass(frozen=True)
class DistinguishReport:
    k_max: int
    tol: float
    first_labeled_difference: int | None
    first_multiset_difference: int | None

    @property
    def labeled_differ(self) -> bool:
        return self.first_labeled_difference is not None

    @property
    def multiset_differ(self) -> bool:
        return self.first_multiset_difference is not None

    def to_json(self) -> dict:
        return {
            "k_max": self.k_max,
            "tol": self.tol,
            "labeled_differ": self.labeled_differ,
            "first_labeled_difference": self.first_labeled_difference,
            "multiset_differ": self.multiset_differ,
            "first_multiset_difference": self.first_multiset_difference,
        }


def spectral_distinguishability(
    oracle_a: Callable[[int], EquivariantSpectrum],
    oracle_b: Callable[[int], EquivariantSpectrum],
    k_max: int,
    tol: float = 1e-12,
) -> DistinguishReport:
    """Compare two spectral families, labeled and as multisets.

    Labeled comparison matches eigenvalues on equal weights beta;
    multiset comparison sorts each level's eigenvalues first, so
    coordinate-permuted symbols tie there while still separating in the
    labeled sense.
    """
    if k_max < 1:
        raise ValidationError("k_max must be positive", operation="inverse.spectral_distinguishability")
    first_labeled = None
    first_multiset = None
    for k in range(1, k_max + 1):
        sa = oracle_a(k)
        sb = oracle_b(k)
        da = dict(zip((b for b, _ in sa.entries), sa.lambdas_exact))
        db = dict(zip((b for b, _ in sb.entries), sb.lambdas_exact))
        if first_labeled is None:
            if set(da) != set(db) or any(abs(float(da[b] - db[b])) > tol for b in da):
                first_labeled = k
        if first_multiset is None:
            la, lb = sorted(da.values()), sorted(db.values())
            if len(la) != len(lb) or any(abs(float(x - y)) > tol for x, y in zip(la, lb)):
                first_multiset = k
        if first_labeled is not None and first_multiset is not None:
            break
    return DistinguishReport(
        k_max=k_max, tol=tol,
        first_labeled_difference=first_labeled,
        first_multiset_difference=first_multiset,
    )


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x; the observed decay rate."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValidationError("need at least two points", operation="inverse.loglog_slope")
    if any(x <= 0 for x in xs) or any(y <= 0 for y in ys):
        raise ValidationError("log-log slope needs positive data", operation="inverse.loglog_slope")
    lx = np.array([log(x) for x in xs])
    ly = np.array([log(y) for y in ys])
    lx -= lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))