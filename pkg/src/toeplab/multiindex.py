"""Multi-index enumeration and integer torus-weight data.

A multi-index is a tuple of non-negative integers.  The degree-k basis of
the weight space on n complex coordinates is the set {beta : |beta| = k},
listed in graded lexicographic order (largest first entry first).  A
subtorus of the standard n-torus is described by its integer weight matrix
acting on the coordinates; the fiber of that action at level k collects
the lattice points beta with  Bt beta = k alpha.

All arithmetic in this module is exact: Python integers and Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, floor
from typing import Iterator, Sequence

from . import _exact
from .errors import UnboundedFiberError, ValidationError

MultiIndex = tuple[int, ...]

__all__ = [
    "MultiIndex",
    "SubtorusData",
    "degree",
    "grlex_key",
    "enumerate_degree",
    "enumerate_fiber",
    "fiber_count_growth",
    "fiber_polytope_vertices",
    "recession_pointed",
    "diagonal_circle",
    "full_torus",
]


def degree(mi: Sequence[int]) -> int:
    return sum(mi)


def grlex_key(mi: Sequence[int]):
    """Sort key for graded lexicographic order, largest leading entry first."""
    return (sum(mi), tuple(-e for e in mi))


def _compositions(n: int, k: int) -> Iterator[MultiIndex]:
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _compositions(n - 1, k - first):
            yield (first,) + rest


def enumerate_degree(n: int, k: int) -> list[MultiIndex]:
    """All multi-indices with n entries and total degree k, graded-lex order.

    The list has length C(k+n-1, n-1); the order is the contract other
    modules rely on when they index matrix rows by multi-index.
    """
    if n < 1:
        raise ValidationError("need at least one coordinate", operation="multiindex.enumerate_degree")
    if k < 0:
        raise ValidationError("degree must be non-negative", operation="multiindex.enumerate_degree")
    return list(_compositions(n, k))


@dataclass(frozen=True)
class SubtorusData:
    """Weights of a d-dimensional subtorus of the n-torus, plus a level.

    weight_matrix is the d x n integer matrix Bt whose row j gives the
    weights of the j-th circle factor on the n coordinates; alpha is the
    integer level the moment map is held at.  Requires full row rank d <= n.
    """

    n: int
    d: int
    weight_matrix: tuple[tuple[int, ...], ...]
    alpha: tuple[int, ...]

    def __post_init__(self):
        if not (1 <= self.d <= self.n):
            raise ValidationError("need 1 <= d <= n", operation="multiindex.SubtorusData")
        if len(self.weight_matrix) != self.d or any(len(r) != self.n for r in self.weight_matrix):
            raise ValidationError("weight matrix must be d x n", operation="multiindex.SubtorusData")
        if len(self.alpha) != self.d:
            raise ValidationError("alpha must have d entries", operation="multiindex.SubtorusData")
        if any(not isinstance(x, int) for r in self.weight_matrix for x in r):
            raise ValidationError("weights must be integers", operation="multiindex.SubtorusData")
        if any(not isinstance(x, int) for x in self.alpha):
            raise ValidationError("alpha must be integral", operation="multiindex.SubtorusData")
        if _exact.rank(self.weight_matrix) != self.d:
            raise ValidationError("weight matrix must have full row rank", operation="multiindex.SubtorusData")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "Bt": [list(r) for r in self.weight_matrix],
            "alpha": list(self.alpha),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SubtorusData":
        if not isinstance(obj, dict):
            raise ValidationError("subtorus record must be an object", operation="multiindex.SubtorusData")
        keys = {"n", "d", "Bt", "alpha"}
        missing = keys - obj.keys()
        extra = obj.keys() - keys
        if missing:
            raise ValidationError(f"subtorus record missing fields: {sorted(missing)}", operation="multiindex.SubtorusData")
        if extra:
            raise ValidationError(f"subtorus record has unknown fields: {sorted(extra)}", operation="multiindex.SubtorusData")
        try:
            return cls(
                n=int(obj["n"]),
                d=int(obj["d"]),
                weight_matrix=tuple(tuple(int(x) for x in row) for row in obj["Bt"]),
                alpha=tuple(int(x) for x in obj["alpha"]),
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed subtorus record: {exc}", operation="multiindex.SubtorusData") from exc


def diagonal_circle(n: int) -> SubtorusData:
    """The diagonal circle acting with weight 1 on every coordinate."""
    return SubtorusData(n=n, d=1, weight_matrix=((1,) * n,), alpha=(1,))


def full_torus(alpha: Sequence[int]) -> SubtorusData:
    """The full torus (d = n), pinned at level alpha."""
    n = len(alpha)
    eye = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    return SubtorusData(n=n, d=n, weight_matrix=eye, alpha=tuple(int(a) for a in alpha))


@lru_cache(maxsize=None)
def _recession_pointed_cached(weight_matrix: tuple[tuple[int, ...], ...]) -> bool:
    """True when {x >= 0 : Bt x = 0} = {0}.

    The cone is nontrivial iff the standard-form system
    [Bt; 1...1] x = (0,...,0,1), x >= 0 is feasible, and a feasible system
    has a basic solution supported on linearly independent columns.  We
    enumerate those supports exactly; desk-scale n keeps this cheap.
    """
    d = len(weight_matrix)
    n = len(weight_matrix[0])
    rows = [list(r) for r in weight_matrix] + [[1] * n]
    rhs = [0] * d + [1]
    for size in range(1, min(n, d + 1) + 1):
        for support in combinations(range(n), size):
            sub_rows = [[row[i] for i in support] for row in rows]
            if _exact.rank(sub_rows) != size:
                continue
            x = _exact.solve_rectangular(sub_rows, rhs)
            if x is not None and all(v >= 0 for v in x):
                return False
    return True


def recession_pointed(sub: SubtorusData) -> bool:
    """Whether every level polytope {x >= 0 : Bt x = c} is compact."""
    return _recession_pointed_cached(sub.weight_matrix)


def fiber_polytope_vertices(sub: SubtorusData, level: int = 1) -> list[tuple[Fraction, ...]]:
    """Vertices of {x >= 0 : Bt x = level * alpha}, exactly.

    Every vertex is the unique solution of a square subsystem on an
    invertible set of d columns, so enumerating column bases finds all of
    them; duplicates from degenerate vertices are merged.
    """
    Bt = sub.weight_matrix
    target = [level * a for a in sub.alpha]
    seen: dict[tuple[Fraction, ...], None] = {}
    for support in combinations(range(sub.n), sub.d):
        block = [[row[i] for i in support] for row in Bt]
        if _exact.det_int([list(r) for r in block]) == 0:
            continue
        x = _exact.solve_square(block, target)
        if x is None or any(v < 0 for v in x):
            continue
        vertex = [Fraction(0)] * sub.n
        for i, v in zip(support, x):
            vertex[i] = v
        seen[tuple(vertex)] = None
    return sorted(seen.keys())


def enumerate_fiber(sub: SubtorusData, k: int) -> list[MultiIndex]:
    """Lattice points beta >= 0 with Bt beta = k * alpha, graded-lex order.

    Raises UnboundedFiberError when the recession cone of the level
    polytope is nontrivial, since the lattice set is then infinite.
    """
    if k < 1:
        raise ValidationError("level multiplier k must be >= 1", operation="multiindex.enumerate_fiber")
    if not recession_pointed(sub):
        raise UnboundedFiberError(
            f"weight fiber at level {k} is unbounded: the recession cone of "
            f"{{x >= 0 : Bt x = k alpha}} contains a nonzero ray",
            operation="multiindex.enumerate_fiber",
        )
    vertices = fiber_polytope_vertices(sub, level=1)
    if not vertices:
        return []
    n, d = sub.n, sub.d
    Bt = sub.weight_matrix
    target = [k * a for a in sub.alpha]
    bounds = [floor(k * max(v[i] for v in vertices)) for i in range(n)]

    # suffix_lo[r][j], suffix_hi[r][j]: achievable range of
    # sum_{i >= j} x_i * Bt[r][i] over the coordinate boxes.
    suffix_lo = [[0] * (n + 1) for _ in range(d)]
    suffix_hi = [[0] * (n + 1) for _ in range(d)]
    for r in range(d):
        for j in range(n - 1, -1, -1):
            w = Bt[r][j]
            lo = w * bounds[j] if w < 0 else 0
            hi = w * bounds[j] if w > 0 else 0
            suffix_lo[r][j] = suffix_lo[r][j + 1] + lo
            suffix_hi[r][j] = suffix_hi[r][j + 1] + hi

    out: list[MultiIndex] = []
    partial = [0] * n

    def extend(j: int, residual: list[int]) -> None:
        if j == n:
            if all(v == 0 for v in residual):
                out.append(tuple(partial))
            return
        for r in range(d):
            if not (suffix_lo[r][j] <= residual[r] <= suffix_hi[r][j]):
                return
        col = [Bt[r][j] for r in range(d)]
        for val in range(bounds[j] + 1):
            partial[j] = val
            extend(j + 1, [residual[r] - val * col[r] for r in range(d)])
        partial[j] = 0

    extend(0, target)
    out.sort(key=grlex_key)
    return out


def fiber_count_growth(sub: SubtorusData, k_list: Sequence[int]) -> list[tuple[int, int]]:
    """Pairs (k, #fiber(k)); propagates the unbounded-fiber error."""
    return [(k, len(enumerate_fiber(sub, k))) for k in k_list]


def dimension_of_degree_space(n: int, k: int) -> int:
    """C(k+n-1, n-1) without enumerating."""
    return comb(k + n - 1, n - 1)
