"""Signless forest-sum formulas for determinants, minors, cofactors,
characteristic polynomials and eigenvector components.

Every routine accepts either a :class:`GeneralizedAdjacencyMatrix` or an
already built :class:`AugmentedDigraph`, and works for any scalar type that
supports ``+`` and ``*`` (signs are applied only where a formula needs them).
Indices are zero-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InvalidIndex, ZeroDenominator
from .graph_core import (
    AugmentedDigraph,
    ForestQuery,
    GeneralizedAdjacencyMatrix,
    build_augmented,
    forest_sums,
    matrix_digraph,
)
from .scalars import is_zero, one_like, signed


@dataclass(frozen=True)
class CharPolynomial:
    """Polynomial in lambda; ``coeffs[k]`` multiplies ``lambda**k``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, lam):
        # Horner
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * lam + c
        return acc

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)


@dataclass(frozen=True)
class EigenvectorResult:
    n: int
    lam: object
    components: tuple
    denominator: object


def _augment(g) -> AugmentedDigraph:
    if isinstance(g, AugmentedDigraph):
        return g
    return build_augmented(g)


def _check_index(i: int, size: int) -> None:
    if not isinstance(i, int) or not 0 <= i < size:
        raise InvalidIndex(f"index {i} outside 0..{size - 1}")


def _sums(h, roots, k, path, workers, include_zero_arcs):
    q = ForestQuery(required_roots=roots, k=k, path=path, include_zero_arcs=include_zero_arcs)
    return forest_sums(h, q, workers)


def _poly_from_sums(sums, length: int) -> CharPolynomial:
    return CharPolynomial(tuple(sums[k] for k in range(length)))


def char_poly(g, *, workers: Optional[int] = None, include_zero_arcs: bool = False) -> CharPolynomial:
    """Coefficients of det(lambda*I - G) from sink-rooted forests of G-dagger.

    ``coeffs[k]`` is the productivity sum over forests whose roots are the sink
    plus ``k`` ordinary vertices.
    """
    h = _augment(g)
    sums = _sums(h, {h.dagger}, None, None, workers, include_zero_arcs)
    return _poly_from_sums(sums, h.n + 1)


def determinant(g, *, workers: Optional[int] = None, include_zero_arcs: bool = False):
    h = _augment(g)
    total = _sums(h, {h.dagger}, 0, None, workers, include_zero_arcs)[0]
    return signed(total, h.n % 2 == 1)


def diagonal_minor_det(g, removed: Sequence[int], *, workers: Optional[int] = None,
                       include_zero_arcs: bool = False):
    """Determinant of G with the rows and columns in ``removed`` struck out.

    Striking every index gives the empty determinant 1.
    """
    h = _augment(g)
    removed = set(removed)
    for r in removed:
        _check_index(r, h.n)
    total = _sums(h, {h.dagger} | removed, 0, None, workers, include_zero_arcs)[0]
    return signed(total, (h.n - len(removed)) % 2 == 1)


def denominator_poly(g, n: int, *, workers: Optional[int] = None,
                     include_zero_arcs: bool = False) -> CharPolynomial:
    """det(lambda*I - G_nn) as a degree N-1 polynomial (row/column n struck)."""
    h = _augment(g)
    _check_index(n, h.n)
    sums = _sums(h, {h.dagger, n}, None, None, workers, include_zero_arcs)
    return _poly_from_sums(sums, h.n)


def numerator_poly(g, n: int, m: int, *, workers: Optional[int] = None,
                   include_zero_arcs: bool = False) -> CharPolynomial:
    """Cramer numerator for component m with pivot n.

    Sums forests rooted at {sink, n} that contain the walk m -> n.  The
    result has N-1 coefficients (degree at most N-2): a forest with every
    vertex but m a root cannot hold that walk.
    """
    h = _augment(g)
    _check_index(n, h.n)
    _check_index(m, h.n)
    if n == m:
        raise InvalidIndex("numerator needs two distinct indices")
    sums = _sums(h, {h.dagger, n}, None, (m, n), workers, include_zero_arcs)
    return _poly_from_sums(sums, h.n - 1)


def cofactor(g, n: int, m: int, *, workers: Optional[int] = None, include_zero_arcs: bool = False):
    """Signed cofactor (algebraic adjunct) of entry g[n][m].

    Off the diagonal this is (-1)**(N-1) times the productivity sum over
    forests rooted at {sink, n} containing the walk m -> n.  The sign
    (-1)**(N+m-n-1) would give the unsigned minor (row n, column m deleted)
    rather than the cofactor that the Laplace expansion needs.
    """
    h = _augment(g)
    _check_index(n, h.n)
    _check_index(m, h.n)
    if n == m:
        return diagonal_minor_det(h, [n], workers=workers, include_zero_arcs=include_zero_arcs)
    total = _sums(h, {h.dagger, n}, 0, (m, n), workers, include_zero_arcs)[0]
    return signed(total, (h.n - 1) % 2 == 1)


def eigenvector_components(g, lam, n: int, transpose: bool = False, *,
                           workers: Optional[int] = None,
                           include_zero_arcs: bool = False) -> EigenvectorResult:
    """Eigenvector for a simple eigenvalue ``lam`` normalized so that v[n] = 1.

    With ``transpose`` the result is the eigenvector of G^T (a left
    eigenvector of G): only the numerator changes, to forests rooted at
    {sink, m} containing the walk n -> m.

    Raises ZeroDenominator when det(lam*I - G_nn) vanishes.  For a simple
    eigenvalue that determinant is proportional to v[n] * u[n] (u the left
    eigenvector), so the pivot must be nonzero in both; a multiple eigenvalue
    makes it vanish for every pivot.
    """
    h = _augment(g)
    _check_index(n, h.n)
    opts = dict(workers=workers, include_zero_arcs=include_zero_arcs)
    den = denominator_poly(h, n, **opts)(lam)
    if is_zero(den):
        raise ZeroDenominator(
            f"det(lambda*I - G_nn) is zero at pivot {n}; try another pivot "
            "or check that the eigenvalue is simple")
    components = []
    for m in range(h.n):
        if m == n:
            components.append(one_like(den))
            continue
        num = numerator_poly(h, m, n, **opts) if transpose else numerator_poly(h, n, m, **opts)
        components.append(num(lam) / den)
    return EigenvectorResult(n=n, lam=lam, components=tuple(components), denominator=den)


def kirchhoff_matrix(g: GeneralizedAdjacencyMatrix) -> GeneralizedAdjacencyMatrix:
    """C = D - G with D the diagonal of row sums (diagonal of G included)."""
    rows = []
    for i in range(g.n):
        row_sum = g.zero()
        for j in range(g.n):
            row_sum = row_sum + g[i, j]
        rows.append(tuple((row_sum if i == j else g.zero()) - g[i, j] for j in range(g.n)))
    return GeneralizedAdjacencyMatrix(tuple(rows))


def kirchhoff_char_poly(g: GeneralizedAdjacencyMatrix, *, workers: Optional[int] = None,
                        include_zero_arcs: bool = False) -> CharPolynomial:
    """det(lambda*I - C) from spanning forests of G itself (no sink vertex).

    The lambda**k coefficient is (-1)**(N+k) times the productivity sum over
    forests with exactly k trees; there are no forests with zero trees, so the
    constant term is zero.
    """
    h = matrix_digraph(g)
    sums = forest_sums(h, ForestQuery(k=None, include_zero_arcs=include_zero_arcs), workers)
    return CharPolynomial(tuple(
        signed(sums[k], (g.n + k) % 2 == 1) if k in sums.by_k else sums.zero
        for k in range(g.n + 1)))
