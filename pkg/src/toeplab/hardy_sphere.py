"""Monomial norms and multiplication-projection blocks on the odd sphere.

Monomials z^mu restricted to the unit sphere in C^n are orthogonal for the
rotation-invariant probability measure, with squared norms

    h(mu) = (n-1)! mu! / (n-1+|mu|)!         (h(0) = 1).

Compressing multiplication by a degree-zero symbol

    F(z) = sum_t c_t z^{gamma_t} conj(z)^{delta_t} / |z|^{|gamma_t|+|delta_t|}

to the span of degree-k monomials produces, in the orthonormalized basis,
the Hermitian matrix with entries

    Q[beta, alpha] = sum_{t : alpha+gamma_t = beta+delta_t}
                     c_t h(alpha+gamma_t) / sqrt(h(alpha) h(beta)).

Symbols whose terms all have gamma = delta depend only on the squared
coordinate sizes a_i = |z_i|^2 / |z|^2; their blocks are diagonal with
exactly rational entries, kept here as Fractions end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, isqrt
from typing import Callable, Sequence

import numpy as np

from .errors import SymbolFormatError, ValidationError
from .multiindex import MultiIndex, enumerate_degree, grlex_key

__all__ = [
    "monomial_norm",
    "SymbolPoly",
    "InvariantSymbol",
    "ToeplitzBlock",
    "assemble_block",
    "invariant_eigenvalue",
]


def monomial_norm(mu: Sequence[int], n: int) -> Fraction:
    """Exact squared norm of z^mu on the unit sphere of C^n.

    Normalized so the constant monomial has norm one.  Example values:
    h((1,0), 2) = 1/2 and h((1,1), 2) = 1/6.
    """
    mu = tuple(int(e) for e in mu)
    if len(mu) != n:
        raise ValidationError("multi-index length must equal n", operation="hardy_sphere.monomial_norm")
    if any(e < 0 for e in mu):
        raise ValidationError("multi-index entries must be non-negative", operation="hardy_sphere.monomial_norm")
    num = factorial(n - 1)
    for e in mu:
        num *= factorial(e)
    return Fraction(num, factorial(n - 1 + sum(mu)))


def _norm_ratio(alpha: Sequence[int], gamma: Sequence[int], n: int) -> Fraction:
    """h(alpha+gamma)/h(alpha) as a product of small integer factors."""
    num = 1
    for a, g in zip(alpha, gamma):
        for t in range(1, g + 1):
            num *= a + t
    den = 1
    base = n - 1 + sum(alpha)
    for s in range(1, sum(gamma) + 1):
        den *= base + s
    return Fraction(num, den)


def _sqrt_fraction(q: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None."""
    if q < 0:
        return None
    pn, pd = isqrt(q.numerator), isqrt(q.denominator)
    if pn * pn == q.numerator and pd * pd == q.denominator:
        return Fraction(pn, pd)
    return None


def _as_multiindex(mi) -> MultiIndex:
    t = tuple(int(e) for e in mi)
    if any(e < 0 for e in t):
        raise SymbolFormatError("multi-index entries must be non-negative", operation="hardy_sphere.SymbolPoly")
    return t


@dataclass(frozen=True)
class SymbolPoly:
    """Degree-zero polynomial symbol, stored term by term.

    Each term is (gamma, delta, coeff) with |gamma| = |delta|; the whole
    term list must be closed under (gamma, delta, c) -> (delta, gamma,
    conj(c)), which makes the assembled block Hermitian.  Coefficients may
    be int, float, Fraction or complex; they are kept as given so exact
    inputs stay exact.
    """

    terms: tuple[tuple[MultiIndex, MultiIndex, complex], ...]

    def __post_init__(self):
        if not self.terms:
            raise SymbolFormatError("symbol needs at least one term", operation="hardy_sphere.SymbolPoly")
        n = len(self.terms[0][0])
        merged: dict[tuple[MultiIndex, MultiIndex], complex] = {}
        for gamma, delta, c in self.terms:
            if len(gamma) != n or len(delta) != n:
                raise SymbolFormatError("all terms must share the coordinate count", operation="hardy_sphere.SymbolPoly")
            if sum(gamma) != sum(delta):
                raise SymbolFormatError(
                    f"term ({gamma}, {delta}) is not degree balanced: |gamma| != |delta|",
                    operation="hardy_sphere.SymbolPoly",
                )
            merged[(gamma, delta)] = merged.get((gamma, delta), 0) + c
        for (gamma, delta), c in merged.items():
            cc = merged.get((delta, gamma))
            if cc is None or cc != c.conjugate():
                raise SymbolFormatError(
                    f"missing or mismatched conjugate partner for term ({gamma}, {delta})",
                    operation="hardy_sphere.SymbolPoly",
                )

    @classmethod
    def from_terms(cls, terms, hermitize: bool = False) -> "SymbolPoly":
        """Build from (gamma, delta, coeff) triples.

        With hermitize=True each off-diagonal term gets its conjugate
        partner added automatically; diagonal terms must be real.
        """
        norm = [( _as_multiindex(g), _as_multiindex(d), c) for g, d, c in terms]
        if hermitize:
            extra = []
            have = {(g, d) for g, d, _ in norm}
            for g, d, c in norm:
                if g == d:
                    if c.imag != 0:
                        raise SymbolFormatError("diagonal term coefficient must be real", operation="hardy_sphere.SymbolPoly")
                elif (d, g) not in have:
                    extra.append((d, g, c.conjugate()))
            norm += extra
        return cls(terms=tuple(norm))

    @classmethod
    def constant(cls, value: float, n: int) -> "SymbolPoly":
        zero = (0,) * n
        return cls(terms=((zero, zero, value),))

    @property
    def n(self) -> int:
        return len(self.terms[0][0])

    @property
    def is_invariant(self) -> bool:
        return all(g == d for g, d, _ in self.terms)

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """Value at unit-sphere points; z has shape (n,) or (N, n)."""
        z = np.asarray(z, dtype=complex)
        single = z.ndim == 1
        pts = z[None, :] if single else z
        total = np.zeros(pts.shape[0], dtype=complex)
        zc = np.conj(pts)
        for gamma, delta, c in self.terms:
            term = np.ones(pts.shape[0], dtype=complex)
            for i, (g, d) in enumerate(zip(gamma, delta)):
                if g:
                    term *= pts[:, i] ** g
                if d:
                    term *= zc[:, i] ** d
            total += complex(c) * term
        return total[0] if single else total

    def permuted(self, perm: Sequence[int]) -> "SymbolPoly":
        """Relabel coordinates: entry i of the new symbol is old perm[i]."""
        p = tuple(perm)
        return SymbolPoly(terms=tuple(
            (tuple(g[j] for j in p), tuple(d[j] for j in p), c) for g, d, c in self.terms
        ))

    def to_json(self) -> dict:
        return {"terms": [
            {"gamma": list(g), "delta": list(d), "re": float(c.real), "im": float(c.imag)}
            for g, d, c in self.terms
        ]}

    @classmethod
    def from_json(cls, obj: dict) -> "SymbolPoly":
        if not isinstance(obj, dict) or set(obj) != {"terms"}:
            raise ValidationError("symbol record must be {'terms': [...]}", operation="hardy_sphere.SymbolPoly")
        terms = []
        for t in obj["terms"]:
            if not isinstance(t, dict) or set(t) != {"gamma", "delta", "re", "im"}:
                raise ValidationError("symbol term must have fields gamma, delta, re, im", operation="hardy_sphere.SymbolPoly")
            c = complex(float(t["re"]), float(t["im"]))
            terms.append((_as_multiindex(t["gamma"]), _as_multiindex(t["delta"]), c if c.imag else c.real))
        return cls.from_terms(terms)


@dataclass(frozen=True)
class InvariantSymbol:
    """Symbol depending only on a = (|z_1|^2, ..., |z_n|^2) / |z|^2.

    ``evaluator`` maps a point of the unit simplex to a real value; when
    the symbol is polynomial, ``poly`` holds its monomial form as exact
    (gamma, coefficient) pairs and the compressed block is diagonal with
    eigenvalue sum_gamma c_gamma h(alpha+gamma)/h(alpha) on z^alpha.
    """

    n: int
    evaluator: Callable = field(compare=False)
    poly: tuple[tuple[MultiIndex, Fraction], ...] | None = None

    @classmethod
    def from_poly(cls, terms, n: int) -> "InvariantSymbol":
        poly = tuple(( _as_multiindex(g), Fraction(c)) for g, c in terms)
        for g, _ in poly:
            if len(g) != n:
                raise SymbolFormatError("term length must equal n", operation="hardy_sphere.InvariantSymbol")

        def evaluator(a):
            a = np.asarray(a, dtype=float)
            single = a.ndim == 1
            pts = a[None, :] if single else a
            out = np.zeros(pts.shape[0])
            for g, c in poly:
                term = np.full(pts.shape[0], float(c))
                for i, e in enumerate(g):
                    if e:
                        term *= pts[:, i] ** e
                out += term
            return float(out[0]) if single else out

        return cls(n=n, evaluator=evaluator, poly=poly)

    @classmethod
    def from_callable(cls, fn: Callable, n: int) -> "InvariantSymbol":
        return cls(n=n, evaluator=fn, poly=None)

    @classmethod
    def coordinate(cls, i: int, n: int) -> "InvariantSymbol":
        """The symbol a_i = |z_i|^2 / |z|^2."""
        g = tuple(1 if j == i else 0 for j in range(n))
        return cls.from_poly([(g, 1)], n)

    def evaluate(self, a) -> float:
        return float(self.evaluator(np.asarray(a, dtype=float)))

    def eval_array(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        out = self.evaluator(pts)
        if np.ndim(out) == 0 or (hasattr(out, "shape") and out.shape != pts.shape[:1]):
            # evaluator is scalar-only; fall back to a row loop
            return np.array([float(self.evaluator(row)) for row in pts])
        return np.asarray(out, dtype=float)

    def to_symbol_poly(self) -> SymbolPoly:
        if self.poly is None:
            raise SymbolFormatError(
                "symbol has no polynomial form; only polynomial invariant symbols assemble to blocks",
                operation="hardy_sphere.InvariantSymbol",
            )
        return SymbolPoly(terms=tuple((g, g, c) for g, c in self.poly))

    def permuted(self, perm: Sequence[int]) -> "InvariantSymbol":
        if self.poly is None:
            raise SymbolFormatError("cannot permute a callable-only symbol", operation="hardy_sphere.InvariantSymbol")
        p = tuple(perm)
        return InvariantSymbol.from_poly(
            [(tuple(g[j] for j in p), c) for g, c in self.poly], self.n
        )


@dataclass(frozen=True)
class ToeplitzBlock:
    """Compressed multiplication block on the degree-k monomial basis.

    ``basis`` lists the multi-indices in graded-lex order; ``matrix`` is
    the Hermitian complex matrix in the orthonormalized basis.  When every
    diagonal-touching term of the symbol has an exactly-representable real
    coefficient, ``exact_diagonal`` carries the diagonal as Fractions and
    the float diagonal is its rounded image.
    """

    n: int
    k: int
    basis: tuple[MultiIndex, ...]
    matrix: np.ndarray
    exact_diagonal: tuple[Fraction, ...] | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def hermiticity_defect(self) -> float:
        m = self.matrix
        scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
        return float(np.max(np.abs(m - m.conj().T)) / scale) if m.size else 0.0

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "row_beta", "col_alpha", "re", "im"])
            for i, beta in enumerate(self.basis):
                for j, alpha in enumerate(self.basis):
                    v = self.matrix[i, j]
                    w.writerow([i, j, " ".join(map(str, beta)), " ".join(map(str, alpha)),
                                repr(float(v.real)), repr(float(v.imag))])


def assemble_block(symbol: SymbolPoly, n: int, k: int) -> ToeplitzBlock:
    """Assemble the degree-k block of a polynomial symbol.

    Each term (gamma, delta, c) couples alpha to beta = alpha + gamma -
    delta, so assembly is O(#terms * dim).  Entry magnitudes involve
    sqrt(h(alpha+gamma)^2 / (h(alpha) h(beta))); the radicand is computed
    exactly and the root taken exactly whenever it is a perfect square,
    so diagonal entries (always rational) incur no rounding before the
    final float conversion.
    """
    if symbol.n != n:
        raise SymbolFormatError("symbol coordinate count does not match n", operation="hardy_sphere.assemble_block")
    if k < 0:
        raise ValidationError("degree k must be non-negative", operation="hardy_sphere.assemble_block")
    basis = tuple(enumerate_degree(n, k))
    index = {mi: i for i, mi in enumerate(basis)}
    dim = len(basis)
    matrix = np.zeros((dim, dim), dtype=complex)
    diag = [Fraction(0)] * dim

    for gamma, delta, c in symbol.terms:
        shift = tuple(g - d for g, d in zip(gamma, delta))
        for j, alpha in enumerate(basis):
            beta = tuple(a + s for a, s in zip(alpha, shift))
            if any(b < 0 for b in beta):
                continue
            i = index[beta]
            r_alpha = _norm_ratio(alpha, gamma, n)
            if i == j:
                # gamma == delta here; Hermitian closure forces c real
                diag[j] += Fraction(c.real) * r_alpha
            else:
                r_beta = _norm_ratio(beta, delta, n)
                root = _sqrt_fraction(r_alpha * r_beta)
                mag = float(root) if root is not None else float(np.sqrt(float(r_alpha * r_beta)))
                matrix[i, j] += complex(c) * mag

    for j in range(dim):
        matrix[j, j] = float(diag[j])
    return ToeplitzBlock(n=n, k=k, basis=basis, matrix=matrix, exact_diagonal=tuple(diag))


def invariant_eigenvalue(symbol: InvariantSymbol, alpha: Sequence[int]) -> Fraction:
    """Exact eigenvalue of a polynomial invariant symbol on z^alpha.

        lambda_alpha = sum_gamma c_gamma h(alpha+gamma) / h(alpha)

    For F = a_1 on two coordinates this is (alpha_1 + 1) / (k + 2) with
    k = |alpha|; for F = a_1^2 it is
    (alpha_1 + 2)(alpha_1 + 1) / ((k + 3)(k + 2)).
    """
    if symbol.poly is None:
        raise SymbolFormatError(
            "eigenvalues need the polynomial form of the symbol",
            operation="hardy_sphere.invariant_eigenvalue",
        )
    alpha = tuple(int(e) for e in alpha)
    if len(alpha) != symbol.n:
        raise ValidationError("alpha length must equal n", operation="hardy_sphere.invariant_eigenvalue")
    total = Fraction(0)
    for gamma, c in symbol.poly:
        total += c * _norm_ratio(alpha, gamma, symbol.n)
    return total
