"""Gaussian-times-Fourier model states and their quadrature checks.

The local model for an invariant operator near a free orbit acts on
states indexed by a nonzero integer frequency vector m, each a Gaussian
in the transverse variable y whose width is set by the Euclidean size
|m|, times the torus character e^(i m.theta):

    f_m(y, theta) = (|m|/pi)^(kdim/4) (2 pi)^(-l/2)
                    * exp(-|y|^2 |m| / 2) * exp(i m.theta).

These are exactly orthonormal, and the frame operator built from them is
the reproducing projector of the model space.  This module evaluates the
states, forms their Gram matrix under a Gauss-Hermite x trapezoid rule,
and measures how far the discretized frame is from an isometry; the
defects shrink spectrally in the Hermite count and vanish at machine
precision once the angular rule resolves every frequency difference.
Annihilation by y_j |m| + d/dy_j pins the Gaussian width independently
of any integral.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product
from math import pi
from typing import Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "ModelIndex",
    "QuadratureSpec",
    "IsometryReport",
    "fm_normalization",
    "fm_eval",
    "gram_matrix",
    "check_isometry",
    "annihilation_residual",
]


@dataclass(frozen=True)
class ModelIndex:
    """One model state: frequency vector m != 0 and transverse dimension."""

    m: tuple[int, ...]
    k_dim: int

    def __post_init__(self):
        if not self.m or not all(isinstance(c, int) for c in self.m):
            raise ValidationError("m must be a nonempty integer tuple", operation="canonical_model.ModelIndex")
        if all(c == 0 for c in self.m):
            raise ValidationError("m = 0 has no normalizable state", operation="canonical_model.ModelIndex")
        if self.k_dim < 0:
            raise ValidationError("k_dim must be nonnegative", operation="canonical_model.ModelIndex")

    @property
    def l_dim(self) -> int:
        return len(self.m)

    @property
    def frequency(self) -> float:
        """Euclidean size |m|, the Gaussian width parameter."""
        return float(np.hypot.reduce([float(c) for c in self.m]))


def fm_normalization(idx: ModelIndex) -> float:
    """(|m|/pi)^(kdim/4) (2 pi)^(-l/2), making the state unit norm."""
    return (idx.frequency / pi) ** (idx.k_dim / 4) * (2 * pi) ** (-idx.l_dim / 2)


def fm_eval(idx: ModelIndex, y, theta) -> np.ndarray:
    """Evaluate the state; broadcasts over leading axes of y and theta."""
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if y.shape[-1:] != (idx.k_dim,) and idx.k_dim > 0:
        raise ValidationError("y must have k_dim trailing coordinates", operation="canonical_model.fm_eval")
    if theta.shape[-1:] != (idx.l_dim,):
        raise ValidationError("theta must have l_dim trailing coordinates", operation="canonical_model.fm_eval")
    mu = idx.frequency
    y_sq = np.sum(y * y, axis=-1) if idx.k_dim > 0 else 0.0
    phase = np.tensordot(theta, np.array(idx.m, dtype=float), axes=([-1], [0]))
    return fm_normalization(idx) * np.exp(-0.5 * mu * y_sq) * np.exp(1j * phase)


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Hermite count per y axis and trapezoid count per angle."""

    hermite_points: int = 64
    fourier_points: int = 24

    def __post_init__(self):
        if self.hermite_points < 2 or self.fourier_points < 2:
            raise ValidationError("quadrature needs at least two points per axis", operation="canonical_model.QuadratureSpec")


def _shared_dims(indices: Sequence[ModelIndex]) -> tuple[int, int]:
    if not indices:
        raise ValidationError("need at least one model index", operation="canonical_model.gram_matrix")
    k_dim = indices[0].k_dim
    l_dim = indices[0].l_dim
    if any(i.k_dim != k_dim or i.l_dim != l_dim for i in indices):
        raise ValidationError("all indices must share k_dim and l_dim", operation="canonical_model.gram_matrix")
    return k_dim, l_dim


def _design_matrix(indices: Sequence[ModelIndex], quad: QuadratureSpec):
    """Grid points, weights and state values on the tensor rule.

    The Hermite rule carries generic weights w e^(t^2), so it integrates
    plain functions of t, not just polynomial-times-Gaussian ones; the
    angular rule is the uniform trapezoid, exact for every frequency
    difference below the point count.
    """
    k_dim, l_dim = _shared_dims(indices)
    max_freq = max(abs(c) for i in indices for c in i.m)
    if quad.hermite_points < 20 and k_dim > 0:
        warnings.warn("fewer than 20 Hermite points; Gaussian overlaps may be unresolved", stacklevel=3)
    if quad.fourier_points < 4 * max_freq:
        warnings.warn("fewer than 4 max|m_j| angular points; trapezoid rule may alias", stacklevel=3)
    t, w = np.polynomial.hermite.hermgauss(quad.hermite_points)
    w_open = w * np.exp(t * t)
    angles = 2 * pi * np.arange(quad.fourier_points) / quad.fourier_points
    w_ang = 2 * pi / quad.fourier_points

    axes_pts = [t] * k_dim + [angles] * l_dim
    axes_wts = [w_open] * k_dim + [np.full(quad.fourier_points, w_ang)] * l_dim
    grid = np.array(list(product(*axes_pts)))
    weights = np.array([float(np.prod(ws)) for ws in product(*axes_wts)])
    y = grid[:, :k_dim]
    theta = grid[:, k_dim:]
    F = np.column_stack([fm_eval(idx, y, theta) for idx in indices])
    return y, theta, weights, F


def gram_matrix(indices: Sequence[ModelIndex], quad: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """Inner products of the states under the tensor quadrature rule."""
    _, _, weights, F = _design_matrix(indices, quad)
    return F.conj().T @ (weights[:, None] * F)


@dataclass(frozen=True)
class IsometryReport:
    quad: QuadratureSpec
    states: int
    grid_points: int
    max_gram_offdiag: float
    max_gram_diag_error: float
    max_idempotency_defect: float
    max_selfadjoint_defect: float

    @property
    def ok(self) -> bool:
        return max(self.max_gram_offdiag, self.max_gram_diag_error) < 1e-8

    def to_json(self) -> dict:
        return {
            "quad": {"hermite_points": self.quad.hermite_points, "fourier_points": self.quad.fourier_points},
            "states": self.states,
            "grid_points": self.grid_points,
            "max_gram_offdiag": self.max_gram_offdiag,
            "max_gram_diag_error": self.max_gram_diag_error,
            "max_idempotency_defect": self.max_idempotency_defect,
            "max_selfadjoint_defect": self.max_selfadjoint_defect,
            "ok": self.ok,
        }


def check_isometry(indices: Sequence[ModelIndex], quad: QuadratureSpec = QuadratureSpec()) -> IsometryReport:
    """Orthonormality of the states and projector quality of their frame.

    Builds Pi = F F^H W on the grid and reports the largest entries of
    G - I, Pi^2 - Pi and W Pi - (W Pi)^H.  Dense check; grids above 4096
    points are refused.
    """
    _, _, weights, F = _design_matrix(indices, quad)
    if len(weights) > 4096:
        raise ValidationError("grid too large for the dense isometry check", operation="canonical_model.check_isometry")
    B = F.conj().T * weights[None, :]
    G = B @ F
    off = G - np.diag(np.diag(G))
    proj = F @ B
    idem = proj @ proj - proj
    wp = weights[:, None] * proj
    return IsometryReport(
        quad=quad,
        states=F.shape[1],
        grid_points=len(weights),
        max_gram_offdiag=float(np.max(np.abs(off))) if F.shape[1] > 1 else 0.0,
        max_gram_diag_error=float(np.max(np.abs(np.diag(G) - 1.0))),
        max_idempotency_defect=float(np.max(np.abs(idem))),
        max_selfadjoint_defect=float(np.max(np.abs(wp - wp.conj().T))),
    )


def annihilation_residual(idx: ModelIndex, y, theta, step: float = 1e-3) -> float:
    """Largest relative residual of (d/dy_j + y_j |m|) f_m at one point.

    Central differences in each transverse coordinate; O(step^2) for the
    true state, order-one for a state with the wrong Gaussian width.
    """
    if idx.k_dim == 0:
        raise ValidationError("no transverse directions to check", operation="canonical_model.annihilation_residual")
    y = np.asarray(y, dtype=float).reshape(idx.k_dim)
    theta = np.asarray(theta, dtype=float).reshape(idx.l_dim)
    base = fm_eval(idx, y, theta)
    scale = abs(base)
    if scale == 0.0:
        raise ValidationError("state vanishes at the base point", operation="canonical_model.annihilation_residual")
    mu = idx.frequency
    worst = 0.0
    for j in range(idx.k_dim):
        e = np.zeros(idx.k_dim)
        e[j] = step
        deriv = (fm_eval(idx, y + e, theta) - fm_eval(idx, y - e, theta)) / (2 * step)
        worst = max(worst, abs(deriv + y[j] * mu * base) / scale)
    return worst