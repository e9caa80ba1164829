"""Equivariant spectra over subtorus weight fibers.

An invariant polynomial symbol acts diagonally on monomials, so the block
attached to a subtorus level decomposes by the lattice fiber
{beta >= 0 : Bt beta = k alpha}: its spectrum is the multiset of exact
eigenvalues lambda_beta over fiber points.  Scaled by (2 pi / k)^(n-d)
the measures converge to an integral over the level polytope
P = {a >= 0 : Bt a = alpha}, provided P is compact with simple vertices
whose column minors are unimodular.  This module computes the spectra,
runs that regularity check exactly, and estimates the limit integral by
a volume fit plus rejection sampling, giving an oracle that never sees
the operator side.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from math import pi
from typing import Sequence

import numpy as np

from ._exact import det_int, integer_nullspace, solve_rectangular
from .errors import (
    RegularityError,
    SamplerEfficiencyError,
    UnboundedFiberError,
    ValidationError,
)
from .hardy_sphere import InvariantSymbol, invariant_eigenvalue
from .multiindex import (
    MultiIndex,
    SubtorusData,
    diagonal_circle,
    enumerate_fiber,
    fiber_polytope_vertices,
    full_torus,
    recession_pointed,
)
from .spectral import TestFunction, fit_expansion, scaled_measure

__all__ = [
    "EquivariantSpectrum",
    "VertexReport",
    "RegularFreeReport",
    "EXAMPLE_SUBTORI",
    "equivariant_spectrum",
    "fiber_measure",
    "fiber_measure_exact",
    "fiber_measure_series",
    "fiber_volume",
    "regular_free_check",
    "theorem2_leading",
]


@dataclass(frozen=True)
class EquivariantSpectrum:
    """Eigenvalues of an invariant symbol on one weight fiber."""

    sub: SubtorusData
    k: int
    entries: tuple[tuple[MultiIndex, float], ...]
    lambdas_exact: tuple[Fraction, ...]

    @property
    def count(self) -> int:
        return len(self.entries)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([lam for _, lam in self.entries])

    def eigenvalue_of(self, beta: Sequence[int]) -> Fraction:
        key = tuple(int(b) for b in beta)
        for (b, _), lam in zip(self.entries, self.lambdas_exact):
            if b == key:
                return lam
        raise ValidationError(f"beta {key} is not on the fiber", operation="toric.EquivariantSpectrum")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["idx", "beta", "eigenvalue"])
            for i, (beta, lam) in enumerate(self.entries):
                w.writerow([i, " ".join(map(str, beta)), repr(lam)])


def equivariant_spectrum(symbol: InvariantSymbol, sub: SubtorusData, k: int) -> EquivariantSpectrum:
    """Exact spectrum of the symbol on the level-k fiber, graded-lex order."""
    if not isinstance(symbol, InvariantSymbol):
        raise ValidationError("equivariant spectra need an invariant symbol", operation="toric.equivariant_spectrum")
    if symbol.n != sub.n:
        raise ValidationError("symbol and subtorus dimensions differ", operation="toric.equivariant_spectrum")
    fiber = enumerate_fiber(sub, k)
    lams = [invariant_eigenvalue(symbol, beta) for beta in fiber]
    return EquivariantSpectrum(
        sub=sub,
        k=k,
        entries=tuple((beta, float(lam)) for beta, lam in zip(fiber, lams)),
        lambdas_exact=tuple(lams),
    )


def fiber_measure(spectrum: EquivariantSpectrum, f: TestFunction) -> float:
    """sum_beta f(lambda_beta) over the fiber."""
    if spectrum.count == 0:
        return 0.0
    return float(np.sum(np.asarray(f(spectrum.eigenvalues), dtype=float)))


def fiber_measure_exact(spectrum: EquivariantSpectrum, coeffs: Sequence) -> Fraction:
    """Exact fiber measure of a polynomial test function, ascending coeffs."""
    cs = [Fraction(c) for c in coeffs]
    total = Fraction(0)
    for lam in spectrum.lambdas_exact:
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * lam + c
        total += acc
    return total


def fiber_measure_series(
    symbol: InvariantSymbol, f: TestFunction, sub: SubtorusData, k_list: Sequence[int]
) -> list[tuple[int, int, float, float]]:
    """(k, fiber size, measure, scaled measure) rows for a k window."""
    m = sub.n - sub.d
    rows = []
    for k in k_list:
        spec = equivariant_spectrum(symbol, sub, k)
        mu = fiber_measure(spec, f)
        rows.append((k, spec.count, mu, scaled_measure(mu, m, k)))
    return rows


def fiber_volume(sub: SubtorusData, k_list: Sequence[int] | None = None) -> float:
    """Limit of (2 pi / k)^(n-d) * #fiber(k).

    Fiber counts grow polynomially of degree n - d for the lattice
    polytopes handled here, so a fit at that order recovers the limit to
    float accuracy.
    """
    if not recession_pointed(sub):
        raise UnboundedFiberError("level polytope is unbounded", operation="toric.fiber_volume")
    m = sub.n - sub.d
    if k_list is None:
        k_list = range(4, 41)
    ks = sorted(set(int(k) for k in k_list))
    if len(ks) < m + 2:
        raise ValidationError(f"need at least {m + 2} k values", operation="toric.fiber_volume")
    samples = [(k, (2.0 * pi / k) ** m * len(enumerate_fiber(sub, k))) for k in ks]
    return fit_expansion(samples, order=m).c0


@dataclass(frozen=True)
class VertexReport:
    vertex: tuple[Fraction, ...]
    support: tuple[int, ...]
    minor: int | None
    free: bool


@dataclass(frozen=True)
class RegularFreeReport:
    ok: bool
    vertices: tuple[VertexReport, ...]
    message: str

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "message": self.message,
            "vertices": [
                {
                    "vertex": [str(c) for c in v.vertex],
                    "support": list(v.support),
                    "minor": v.minor,
                    "free": v.free,
                }
                for v in self.vertices
            ],
        }


def regular_free_check(sub: SubtorusData) -> RegularFreeReport:
    """Simplicity and unimodularity of the level polytope, vertex by vertex.

    A vertex passes when its support has exactly d coordinates and the
    corresponding d x d minor of Bt has determinant +-1; a smaller
    support means the vertex is degenerate and the check fails there.
    """
    if not recession_pointed(sub):
        raise UnboundedFiberError("level polytope is unbounded", operation="toric.regular_free_check")
    verts = fiber_polytope_vertices(sub, level=1)
    if not verts:
        raise ValidationError("level polytope is empty", operation="toric.regular_free_check")
    reports = []
    bad = None
    for v in verts:
        support = tuple(i for i, c in enumerate(v) if c != 0)
        if len(support) < sub.d:
            reports.append(VertexReport(vertex=v, support=support, minor=None, free=False))
            bad = bad or f"vertex {tuple(map(str, v))} is degenerate (support {support})"
            continue
        minor = abs(det_int([[sub.weight_matrix[r][c] for c in support] for r in range(sub.d)]))
        free = minor == 1
        reports.append(VertexReport(vertex=v, support=support, minor=minor, free=free))
        if not free:
            bad = bad or f"vertex {tuple(map(str, v))} has minor {minor}"
    ok = all(r.free for r in reports)
    message = "all vertices simple with unimodular minors" if ok else bad
    return RegularFreeReport(ok=ok, vertices=tuple(reports), message=message)


def _vertex_y_coordinates(
    verts: list[tuple[Fraction, ...]], basis: list[list[int]], a0: tuple[Fraction, ...]
) -> list[list[Fraction]]:
    n = len(a0)
    rows = [[Fraction(basis[j][i]) for j in range(len(basis))] for i in range(n)]
    out = []
    for v in verts:
        rhs = [v[i] - a0[i] for i in range(n)]
        y = solve_rectangular(rows, rhs)
        if y is None:
            raise ValidationError("vertex outside the nullspace chart", operation="toric.theorem2_leading")
        out.append(y)
    return out


def theorem2_leading(
    symbol: InvariantSymbol,
    f: TestFunction,
    sub: SubtorusData,
    samples: int = 200_000,
    seed: int = 0,
    batch_size: int = 100_000,
    volume: float | None = None,
) -> tuple[float, float]:
    """Operator-free prediction of the scaled-measure limit, with stderr.

    The limit is V * E[f(g(a / |a|_1))] with a uniform on the level
    polytope; eigenvalues live near g(beta / |beta|), so polytope points
    are renormalized onto the simplex before evaluation (the degree
    |beta| need not be constant across one fiber).  V comes from the
    fiber count fit unless supplied.  Sampling rejects from the bounding
    box of the polytope in primitive nullspace coordinates, where the
    uniform measure matches the count normalization; the mean itself is
    chart-independent.  Requires the regular-free check to pass.  d = n
    has a zero-dimensional fiber and returns the exact point evaluation
    with stderr 0.
    """
    if not isinstance(symbol, InvariantSymbol):
        raise ValidationError("the limit oracle needs an invariant symbol", operation="toric.theorem2_leading")
    report = regular_free_check(sub)
    if not report.ok:
        raise RegularityError(report.message, operation="toric.theorem2_leading")
    verts = [r.vertex for r in report.vertices]
    if all(c == 0 for c in verts[0]):
        raise ValidationError("level polytope touches the origin", operation="toric.theorem2_leading")
    m = sub.n - sub.d
    if m == 0:
        a = np.array([float(c) for c in verts[0]])
        return float(f(symbol.evaluate(a / a.sum()))), 0.0
    if samples < 10_000:
        raise ValidationError("need at least 1e4 samples", operation="toric.theorem2_leading")
    basis = integer_nullspace([list(row) for row in sub.weight_matrix])
    a0 = verts[0]
    ys = _vertex_y_coordinates(verts, basis, a0)
    lo = [min(y[j] for y in ys) for j in range(m)]
    hi = [max(y[j] for y in ys) for j in range(m)]
    if any(l == h for l, h in zip(lo, hi)):
        raise ValidationError("level polytope is lower-dimensional", operation="toric.theorem2_leading")
    lo_f = np.array([float(v) for v in lo])
    hi_f = np.array([float(v) for v in hi])
    chart = np.array([[float(basis[j][i]) for j in range(m)] for i in range(sub.n)])
    a0_f = np.array([float(c) for c in a0])

    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    accepted = 0
    drawn = 0
    while accepted < samples:
        y = rng.uniform(lo_f, hi_f, size=(batch_size, m))
        pts = a0_f + y @ chart.T
        keep = pts[np.all(pts >= 0.0, axis=1)]
        drawn += batch_size
        if accepted + len(keep) > samples:
            keep = keep[: samples - accepted]
        if len(keep):
            keep = keep / keep.sum(axis=1, keepdims=True)
            vals = np.asarray(f(symbol.eval_array(keep)), dtype=float)
            total += float(np.sum(vals))
            total_sq += float(np.sum(vals * vals))
            accepted += len(keep)
        if drawn >= 50_000 and accepted / drawn < 1e-4:
            raise SamplerEfficiencyError(
                f"acceptance rate {accepted / drawn:.2e} below 1e-4",
                operation="toric.theorem2_leading",
            )
    vol = fiber_volume(sub) if volume is None else float(volume)
    mean = total / samples
    var = max(0.0, (total_sq - samples * mean * mean) / (samples - 1))
    stderr = (var / samples) ** 0.5
    return vol * mean, vol * stderr


EXAMPLE_SUBTORI: dict[str, SubtorusData] = {
    "diagonal_circle_2": diagonal_circle(2),
    "diagonal_circle_3": diagonal_circle(3),
    "product_of_lines": SubtorusData(
        n=4, d=2, weight_matrix=((1, 1, 0, 0), (0, 0, 1, 1)), alpha=(1, 1)
    ),
    "weighted_line": SubtorusData(n=2, d=1, weight_matrix=((1, 2),), alpha=(2,)),
    "full_torus_12": full_torus((1, 2)),
}
