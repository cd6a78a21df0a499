"""Sparse multivariate polynomial algebra over complex coordinates.

Polynomials are stored as sparse mappings from exponent tuples to complex
coefficients.  Storage is canonical: zero coefficients are dropped and terms
are kept in graded-lexicographic order, so equal polynomials compare equal
and every evaluation sums terms in the same order (bit-reproducible).

Two kinds of objects are provided: ``ScalarPoly`` (one complex-valued
polynomial in n variables) and ``VectorPoly`` (an n-tuple of scalar
polynomials, i.e. a polynomial self-map of C^n).  Vector norms throughout
the package use the max of coordinate moduli; see ``linf``.
"""

from __future__ import annotations

import math
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

MultiIndex = tuple[int, ...]

Coeff = complex


def grlex_key(alpha: MultiIndex) -> tuple[int, MultiIndex]:
    """Sort key for graded-lexicographic term order (total degree, then lex)."""
    return (sum(alpha), alpha)


def multi_indices(dim: int, order: int) -> Iterable[MultiIndex]:
    """Yield all exponent tuples of length ``dim`` with entries summing to ``order``.

    Yielded in lexicographic order, so iterating orders 0, 1, 2, ... visits
    multi-indices in graded-lexicographic order overall.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        yield (order,)
        return
    for first in range(order + 1):
        for rest in multi_indices(dim - 1, order - first):
            yield (first,) + rest


def _validate_alpha(alpha: Sequence[int], dim: int) -> MultiIndex:
    tup = tuple(int(a) for a in alpha)
    if len(tup) != dim:
        raise ValueError(f"exponent tuple {tup} has length {len(tup)}, expected {dim}")
    if any(a < 0 for a in tup):
        raise ValueError(f"exponent tuple {tup} has a negative entry")
    return tup


class ScalarPoly:
    """A sparse complex polynomial in ``dim`` variables.

    ``terms`` may be a mapping or an iterable of ``(alpha, coeff)`` pairs;
    repeated exponents are summed.  The stored form is canonical: exact-zero
    coefficients are dropped and keys are sorted graded-lexicographically.
    """

    def __init__(self, dim: int, terms: Mapping | Iterable = ()):
        dim = int(dim)
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self._dim = dim
        acc: dict[MultiIndex, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for alpha, c in items:
            key = _validate_alpha(alpha, dim)
            c = complex(c)
            if key in acc:
                acc[key] += c
            else:
                acc[key] = c
        self._terms: dict[MultiIndex, complex] = {
            a: acc[a] for a in sorted(acc, key=grlex_key) if acc[a] != 0
        }
        self._degree = max((sum(a) for a in self._terms), default=0)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "ScalarPoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value: complex) -> "ScalarPoly":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def monomial(cls, dim: int, alpha: Sequence[int], coeff: complex = 1.0) -> "ScalarPoly":
        """The single-term polynomial ``coeff * x^alpha``."""
        return cls(dim, {tuple(alpha): coeff})

    @classmethod
    def variable(cls, dim: int, index: int) -> "ScalarPoly":
        """The coordinate functional x_index (0-based)."""
        if not 0 <= index < dim:
            raise ValueError(f"variable index {index} out of range for dim {dim}")
        alpha = [0] * dim
        alpha[index] = 1
        return cls(dim, {tuple(alpha): 1.0})

    # -- basic queries -------------------------------------------------

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> dict[MultiIndex, complex]:
        """A copy of the canonical term mapping (grlex key order)."""
        return dict(self._terms)

    @property
    def degree(self) -> int:
        """Maximum total degree over stored terms (0 for the zero polynomial)."""
        return self._degree

    def is_zero(self) -> bool:
        return not self._terms

    def lowest_degree(self) -> int | None:
        """Minimum total degree over stored terms, or None for the zero polynomial."""
        return min((sum(a) for a in self._terms), default=None)

    def coefficient(self, alpha: Sequence[int]) -> complex:
        return self._terms.get(_validate_alpha(alpha, self._dim), 0j)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def homogeneous_degree(self) -> int | None:
        """The common total degree of all terms, or None if mixed or zero."""
        degs = {sum(a) for a in self._terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def is_homogeneous(self, degree: int | None = None) -> bool:
        d = self.homogeneous_degree()
        if d is None:
            return self.is_zero()
        return degree is None or d == degree

    # -- algebra -------------------------------------------------------

    def _require_same_dim(self, other: "ScalarPoly") -> None:
        if self._dim != other._dim:
            raise ValueError(f"dimension mismatch: {self._dim} vs {other._dim}")

    def __add__(self, other):
        if isinstance(other, ScalarPoly):
            self._require_same_dim(other)
            acc = dict(self._terms)
            for a, c in other._terms.items():
                acc[a] = acc.get(a, 0j) + c
            return ScalarPoly(self._dim, acc)
        if isinstance(other, (int, float, complex)):
            return self + ScalarPoly.constant(self._dim, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return ScalarPoly(self._dim, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = ScalarPoly.constant(self._dim, other)
        if not isinstance(other, ScalarPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return ScalarPoly(self._dim, {a: c * other for a, c in self._terms.items()})
        if isinstance(other, ScalarPoly):
            self._require_same_dim(other)
            acc: dict[MultiIndex, complex] = {}
            for a, ca in self._terms.items():
                for b, cb in other._terms.items():
                    key = tuple(x + y for x, y in zip(a, b))
                    acc[key] = acc.get(key, 0j) + ca * cb
            return ScalarPoly(self._dim, acc)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ScalarPoly):
            return NotImplemented
        return self._dim == other._dim and self._terms == other._terms

    # -- calculus on the truncated algebra ------------------------------

    def evaluate(self, x: Sequence[complex]) -> complex:
        """Evaluate at a point by direct term summation.

        Terms are summed in the canonical graded-lexicographic order, so the
        result is bit-for-bit reproducible for a given polynomial and point.
        """
        if len(x) != self._dim:
            raise ValueError(f"point has length {len(x)}, expected {self._dim}")
        xs = [complex(v) for v in x]
        total = 0j
        for alpha, c in self._terms.items():
            val = c
            for xi, a in zip(xs, alpha):
                if a:
                    val *= xi ** a
            total += val
        return total

    def homogeneous_part(self, k: int) -> "ScalarPoly":
        """The sum of stored terms with total degree exactly ``k``."""
        if k < 0:
            raise ValueError("degree must be >= 0")
        return ScalarPoly(self._dim, {a: c for a, c in self._terms.items() if sum(a) == k})

    def truncate(self, max_degree: int) -> "ScalarPoly":
        """Drop all terms of total degree greater than ``max_degree``."""
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        return ScalarPoly(self._dim, {a: c for a, c in self._terms.items() if sum(a) <= max_degree})

    def compose(self, inner: "VectorPoly", max_degree: int) -> "ScalarPoly":
        """Substitute ``inner`` into this polynomial, truncated to ``max_degree``.

        Computed by iterated truncated multiplication of cached powers of the
        inner components.  Eager truncation is exact for the retained degrees
        because term degrees only add under multiplication.  If ``inner`` has
        a nonzero constant part the truncation can silently absorb discarded
        high-degree information, so that case is rejected unless no
        truncation can occur at all.
        """
        if not isinstance(inner, VectorPoly):
            raise TypeError("inner map must be a VectorPoly")
        if inner.dim != self._dim:
            raise ValueError(f"dimension mismatch: {self._dim} vs {inner.dim}")
        _check_compose_precondition(self.degree, inner, max_degree)
        return self._compose_unchecked(inner, max_degree, _PowerCache(inner, max_degree))

    def _compose_unchecked(self, inner: "VectorPoly", max_degree: int,
                           cache: "_PowerCache") -> "ScalarPoly":
        result = ScalarPoly.zero(inner.dim)
        for alpha, c in self._terms.items():
            prod = ScalarPoly.constant(inner.dim, c)
            for i, a in enumerate(alpha):
                if a:
                    prod = (prod * cache.power(i, a)).truncate(max_degree)
                    if prod.is_zero():
                        break
            result = result + prod
        return result

    # -- display ---------------------------------------------------------

    def to_string(self, chop: float = 0.0) -> str:
        """Human-readable form; coefficients with magnitude <= chop are hidden."""
        parts = []
        for alpha, c in self._terms.items():
            if chop and abs(c) <= chop:
                continue
            mono = " ".join(
                f"x{i + 1}" + (f"^{a}" if a > 1 else "")
                for i, a in enumerate(alpha) if a
            )
            coeff = _format_coeff(c)
            parts.append(f"{coeff} {mono}".strip() if mono else coeff)
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"ScalarPoly({self._dim}, {self.to_string()})"


def _format_coeff(c: complex) -> str:
    return repr(c.real) if c.imag == 0 else repr(c)


class _PowerCache:
    """Truncated powers of the components of an inner map, computed on demand."""

    def __init__(self, inner: "VectorPoly", max_degree: int):
        self._inner = inner
        self._max_degree = max_degree
        self._powers: dict[tuple[int, int], ScalarPoly] = {}

    def power(self, index: int, exponent: int) -> ScalarPoly:
        key = (index, exponent)
        if key not in self._powers:
            if exponent == 1:
                self._powers[key] = self._inner.components[index].truncate(self._max_degree)
            else:
                prev = self.power(index, exponent - 1)
                self._powers[key] = (prev * self._inner.components[index]).truncate(self._max_degree)
        return self._powers[key]


def _check_compose_precondition(outer_degree: int, inner: "VectorPoly", max_degree: int) -> None:
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    const = inner.constant_vector()
    if np.any(const != 0) and max_degree < outer_degree * inner.degree:
        raise ValueError(
            "inner map has a nonzero constant part; composition under truncation "
            "would silently discard contributing terms"
        )


class VectorPoly:
    """A polynomial self-map of C^n: one ScalarPoly per output component."""

    def __init__(self, components: Sequence[ScalarPoly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("need at least one component")
        n = len(comps)
        for i, c in enumerate(comps):
            if not isinstance(c, ScalarPoly):
                raise TypeError(f"component {i} is not a ScalarPoly")
            if c.dim != n:
                raise ValueError(
                    f"component {i} has dim {c.dim}; a self-map of C^{n} needs dim {n}"
                )
        self._components = comps

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "VectorPoly":
        return cls([ScalarPoly.zero(dim) for _ in range(dim)])

    @classmethod
    def identity(cls, dim: int) -> "VectorPoly":
        return cls([ScalarPoly.variable(dim, i) for i in range(dim)])

    @classmethod
    def diagonal(cls, values: Sequence[complex]) -> "VectorPoly":
        """The linear map x -> (values[0] x_0, ..., values[n-1] x_{n-1})."""
        n = len(values)
        return cls([ScalarPoly.variable(n, i) * complex(values[i]) for i in range(n)])

    @classmethod
    def from_linear(cls, matrix) -> "VectorPoly":
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        n = m.shape[0]
        comps = []
        for i in range(n):
            terms = {}
            for j in range(n):
                if m[i, j] != 0:
                    alpha = [0] * n
                    alpha[j] = 1
                    terms[tuple(alpha)] = complex(m[i, j])
            comps.append(ScalarPoly(n, terms))
        return cls(comps)

    @classmethod
    def from_terms(cls, dim: int, entries: Iterable[tuple[int, Sequence[int], complex]]) -> "VectorPoly":
        """Build from ``(component, alpha, coeff)`` triples with 0-based components."""
        buckets: list[dict] = [dict() for _ in range(dim)]
        for comp, alpha, coeff in entries:
            if not 0 <= comp < dim:
                raise ValueError(f"component index {comp} out of range for dim {dim}")
            key = _validate_alpha(alpha, dim)
            buckets[comp][key] = buckets[comp].get(key, 0j) + complex(coeff)
        return cls([ScalarPoly(dim, b) for b in buckets])

    # -- queries ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self._components)

    @property
    def components(self) -> tuple[ScalarPoly, ...]:
        return self._components

    @property
    def degree(self) -> int:
        return max(c.degree for c in self._components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self._components)

    def lowest_degree(self) -> int | None:
        lows = [c.lowest_degree() for c in self._components if not c.is_zero()]
        return min(lows) if lows else None

    def max_abs_coeff(self) -> float:
        return max(c.max_abs_coeff() for c in self._components)

    def constant_vector(self) -> np.ndarray:
        return np.array([c.coefficient((0,) * self.dim) for c in self._components])

    def linear_matrix(self) -> np.ndarray:
        """The n-by-n matrix of degree-1 coefficients."""
        n = self.dim
        out = np.zeros((n, n), dtype=complex)
        for i, comp in enumerate(self._components):
            for alpha, c in comp.terms.items():
                if sum(alpha) == 1:
                    out[i, alpha.index(1)] = c
        return out

    # -- algebra ---------------------------------------------------------

    def _require_same_dim(self, other: "VectorPoly") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if isinstance(other, VectorPoly):
            self._require_same_dim(other)
            return VectorPoly([a + b for a, b in zip(self._components, other._components)])
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, VectorPoly):
            self._require_same_dim(other)
            return VectorPoly([a - b for a, b in zip(self._components, other._components)])
        return NotImplemented

    def __neg__(self):
        return VectorPoly([-c for c in self._components])

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, complex)):
            return VectorPoly([c * scalar for c in self._components])
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VectorPoly):
            return NotImplemented
        return self._components == other._components

    def evaluate(self, x: Sequence[complex]) -> np.ndarray:
        return np.array([c.evaluate(x) for c in self._components])

    def homogeneous_part(self, k: int) -> "VectorPoly":
        return VectorPoly([c.homogeneous_part(k) for c in self._components])

    def truncate(self, max_degree: int) -> "VectorPoly":
        return VectorPoly([c.truncate(max_degree) for c in self._components])

    def compose(self, inner: "VectorPoly", max_degree: int) -> "VectorPoly":
        """This map after ``inner``, truncated to total degree ``max_degree``."""
        if not isinstance(inner, VectorPoly):
            raise TypeError("inner map must be a VectorPoly")
        self._require_same_dim(inner)
        _check_compose_precondition(self.degree, inner, max_degree)
        cache = _PowerCache(inner, max_degree)
        return VectorPoly(
            [c._compose_unchecked(inner, max_degree, cache) for c in self._components]
        )

    def matrix_apply(self, matrix) -> "VectorPoly":
        """Left-multiply by a matrix: component i becomes sum_j M[i,j] * comp_j."""
        m = np.asarray(matrix, dtype=complex)
        n = self.dim
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match dim {n}")
        comps = []
        for i in range(n):
            acc = ScalarPoly.zero(n)
            for j in range(n):
                if m[i, j] != 0:
                    acc = acc + self._components[j] * complex(m[i, j])
            comps.append(acc)
        return VectorPoly(comps)

    def to_string(self, chop: float = 0.0) -> str:
        return "(" + ", ".join(c.to_string(chop) for c in self._components) + ")"

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"VectorPoly{self.to_string()}"


# -- symmetric multilinear forms ------------------------------------------


def polarize(p: ScalarPoly, vectors: Sequence[Sequence[complex]]) -> complex:
    """Evaluate the symmetric multilinear form of a homogeneous polynomial.

    For p homogeneous of degree m and arguments v_1, ..., v_m this returns
    the unique symmetric m-linear form A with A(x, ..., x) = p(x), evaluated
    via the sign-sum polarization identity (2^m terms).
    """
    m = len(vectors)
    if p.is_zero():
        return 0j
    if not p.is_homogeneous(m):
        raise ValueError(
            f"polynomial is not homogeneous of degree {m} (degree {p.homogeneous_degree()})"
        )
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    for v in vecs:
        if v.shape != (p.dim,):
            raise ValueError(f"argument vector has shape {v.shape}, expected ({p.dim},)")
    total = 0j
    for signs in product((1.0, -1.0), repeat=m):
        point = np.zeros(p.dim, dtype=complex)
        for s, v in zip(signs, vecs):
            point = point + s * v
        total += math.prod(signs) * p.evaluate(point)
    return total / (2 ** m * math.factorial(m))


# -- norms and sampling ----------------------------------------------------


def linf(x: Sequence[complex]) -> float:
    """Max of coordinate moduli: the vector norm used throughout the package."""
    return float(np.max(np.abs(np.asarray(x, dtype=complex))))


def sphere_points(dim: int, count: int, seed: int) -> np.ndarray:
    """Deterministic quasi-uniform points on the unit sphere of ``linf``.

    Coordinates are drawn uniformly from the complex unit box and each point
    is scaled so its largest coordinate modulus is exactly 1.  Returns an
    array of shape (count, dim).
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, (count, dim)) + 1j * rng.uniform(-1.0, 1.0, (count, dim))
    for k in range(count):
        norm = np.max(np.abs(pts[k]))
        if norm < 1e-12:
            pts[k] = np.zeros(dim, dtype=complex)
            pts[k][0] = 1.0
        else:
            pts[k] = pts[k] / norm
    return pts


def sup_norm_estimate(p: VectorPoly, samples: int = 1024, seed: int = 0) -> float:
    """Lower bound on sup of ``linf(p(x))`` over the unit sphere, by sampling."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    best = 0.0
    for x in sphere_points(p.dim, samples, seed):
        val = linf(p.evaluate(x))
        if val > best:
            best = val
    return best
