"""Leading-coefficient oracles on the reduced space.

The scaled measures of the spectral module converge to an integral of the
test function composed with the symbol over a compact reduced space.  For
the full sphere that space fibers over the unit simplex carrying the
uniform (Dirichlet) distribution of a = (|z_1|^2, ..., |z_n|^2)/|z|^2, and
its total volume under this package's calibration is

    sigma_vol(n) = (2 pi)^(n-1) / (n-1)!.

Two independent evaluations of the leading coefficient are provided:

* c0_sphere_mc: Monte Carlo over uniform sphere points, works for any
  symbol, returns (estimate, stderr);
* c0_simplex_quad: midpoint rule on a uniform simplicial refinement of
  the simplex, deterministic, O(mesh^-2), invariant symbols only.

calibrate_volume recovers sigma_vol(n) from dimension counts alone, which
pins the constant without any integral.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from math import factorial, pi
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .hardy_sphere import InvariantSymbol, SymbolPoly
from .multiindex import SubtorusData, dimension_of_degree_space
from .spectral import TestFunction, fit_expansion

__all__ = [
    "ReducedSpaceSpec",
    "sphere_sigma_volume",
    "moment_map",
    "sample_sphere",
    "c0_sphere_mc",
    "c0_simplex_quad",
    "calibrate_volume",
    "c0_result_json",
]


def sphere_sigma_volume(n: int) -> float:
    """(2 pi)^(n-1) / (n-1)!, the calibrated reduced-space volume."""
    if n < 1:
        raise ValidationError("n must be positive", operation="reduction.sphere_sigma_volume")
    return (2.0 * pi) ** (n - 1) / factorial(n - 1)


@dataclass(frozen=True)
class ReducedSpaceSpec:
    """Which reduced space a leading coefficient refers to."""

    kind: str  # "sphere" or "toric_fiber"
    n: int
    sigma_volume: float
    sub: SubtorusData | None = None

    def __post_init__(self):
        if self.kind not in ("sphere", "toric_fiber"):
            raise ValidationError("kind must be 'sphere' or 'toric_fiber'", operation="reduction.ReducedSpaceSpec")
        if self.kind == "toric_fiber" and self.sub is None:
            raise ValidationError("toric_fiber spec needs subtorus data", operation="reduction.ReducedSpaceSpec")

    @classmethod
    def sphere(cls, n: int) -> "ReducedSpaceSpec":
        return cls(kind="sphere", n=n, sigma_volume=sphere_sigma_volume(n))


def moment_map(z: Sequence[complex]) -> tuple[float, ...]:
    """Squared coordinate sizes (|z_1|^2, ..., |z_n|^2)."""
    return tuple(float(abs(zi)) ** 2 for zi in z)


def sample_sphere(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform points on the unit sphere of C^n, shape (size, n) complex.

    Each point consumes a contiguous block of 2n normal draws, so for a
    fixed seed the sample stream is independent of batching.
    """
    w = rng.standard_normal((size, n, 2))
    z = w[..., 0] + 1j * w[..., 1]
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return z


def _symbol_values(symbol, z: np.ndarray) -> np.ndarray:
    if isinstance(symbol, SymbolPoly):
        return symbol.evaluate(z).real
    if isinstance(symbol, InvariantSymbol):
        a = np.abs(z) ** 2
        return symbol.eval_array(a)
    raise ValidationError("symbol must be SymbolPoly or InvariantSymbol", operation="reduction.c0_sphere_mc")


def c0_sphere_mc(
    symbol,
    f: TestFunction,
    n: int,
    samples: int = 1_000_000,
    seed: int = 0,
    batch_size: int = 250_000,
) -> tuple[float, float]:
    """Monte Carlo leading coefficient sigma_vol(n) * E[f(F(z))].

    Draws are batched; the sample stream for a fixed seed is independent
    of the batch size, and only summation grouping (machine epsilon)
    distinguishes results across batchings.
    """
    if samples < 10_000:
        raise ValidationError("need at least 1e4 samples", operation="reduction.c0_sphere_mc")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        size = min(batch_size, samples - done)
        z = sample_sphere(n, size, rng)
        vals = np.asarray(f(_symbol_values(symbol, z)), dtype=float)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        done += size
    mean = total / samples
    var = max(0.0, (total_sq - samples * mean * mean) / (samples - 1))
    stderr = (var / samples) ** 0.5
    vol = sphere_sigma_volume(n)
    return vol * mean, vol * stderr


def _staircase_cells(p: int, mesh: int) -> np.ndarray:
    """Centroids of the uniform refinement of the simplex, in simplex coords.

    The (n-1)-simplex is parametrized by the staircase region
    1 >= x_1 >= ... >= x_p >= 0 (p = n-1); its refinement at scale 1/mesh
    consists of the lattice path simplices (v, perm) with v weakly
    decreasing and perm incrementing tied coordinates left to right.
    There are mesh^p cells of equal volume.  Returns an array of centroid
    barycentric coordinates, shape (mesh^p, p+1).
    """
    cells = []
    for v in product(range(mesh), repeat=p):
        if any(v[i] < v[i + 1] for i in range(p - 1)):
            continue
        ties = [i for i in range(p - 1) if v[i] == v[i + 1]]
        for perm in permutations(range(p)):
            pos = [0] * p
            for idx, coord in enumerate(perm):
                pos[coord] = idx
            if any(pos[i] > pos[i + 1] for i in ties):
                continue
            # vertices of the path simplex, accumulated in place
            centroid = np.array(v, dtype=float)
            step = np.array(v, dtype=float)
            for coord in perm:
                step[coord] += 1.0
                centroid += step
            centroid /= (p + 1) * mesh
            x = centroid
            bary = np.empty(p + 1)
            bary[0] = 1.0 - x[0]
            for i in range(1, p):
                bary[i] = x[i - 1] - x[i]
            bary[p] = x[p - 1]
            cells.append(bary)
    return np.array(cells)


def c0_simplex_quad(symbol: InvariantSymbol, f: TestFunction, n: int, mesh: int = 32) -> float:
    """Deterministic leading coefficient for invariant symbols.

    Returns (2 pi)^(n-1) * integral over the unit simplex of f(g(a)), the
    simplex carrying Lebesgue measure of total mass 1/(n-1)!.  Midpoint
    (centroid) evaluation on the uniform refinement converges at
    O(mesh^-2); f = 1 returns sigma_vol(n) exactly.
    """
    if not isinstance(symbol, InvariantSymbol):
        raise ValidationError("simplex quadrature needs an invariant symbol", operation="reduction.c0_simplex_quad")
    if mesh < 8:
        raise ValidationError("mesh must be at least 8 subdivisions per edge", operation="reduction.c0_simplex_quad")
    if n < 1:
        raise ValidationError("n must be positive", operation="reduction.c0_simplex_quad")
    if n == 1:
        return float(f(symbol.evaluate((1.0,))))
    pts = _staircase_cells(n - 1, mesh)
    vals = np.asarray(f(symbol.eval_array(pts)), dtype=float)
    return float(np.mean(vals)) * sphere_sigma_volume(n)


def calibrate_volume(n: int, k_list: Sequence[int] | None = None) -> float:
    """Reduced-space volume from dimension counts.

    (2 pi / k)^(n-1) * C(k+n-1, n-1) is a degree-(n-1) polynomial in 1/k
    whose constant term is sigma_vol(n); fitting at that order recovers it
    to float accuracy.  The window must span at least a decade.
    """
    if n < 1:
        raise ValidationError("n must be positive", operation="reduction.calibrate_volume")
    if n == 1:
        return 1.0
    if k_list is None:
        k_list = range(6, 61)
    ks = sorted(set(int(k) for k in k_list))
    if not ks or ks[0] < 1:
        raise ValidationError("k values must be positive", operation="reduction.calibrate_volume")
    if ks[-1] < 10 * ks[0]:
        raise ValidationError("k window must span at least a decade", operation="reduction.calibrate_volume")
    samples = [(k, (2.0 * pi / k) ** (n - 1) * dimension_of_degree_space(n, k)) for k in ks]
    return fit_expansion(samples, order=n - 1).c0


def c0_result_json(c0: float, stderr: float, samples: int, seed: int) -> dict:
    """Standard serialization of a Monte Carlo leading-coefficient run."""
    return {"c0": float(c0), "stderr": float(stderr), "samples": int(samples), "seed": int(seed)}
