"""Signed reference formulas used to check the forest sums, plus numerics.

Nothing here goes through the augmented digraph: the cycle-cover expansion
uses G as-is (diagonal entries become one-vertex dicircuits), and the
Leibniz expansions work on the matrix directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, TooLarge
from .forest_calculus import CharPolynomial
from .graph_core import GeneralizedAdjacencyMatrix
from .scalars import is_zero

MAX_LEIBNIZ_N = 10


@dataclass(frozen=True)
class LinearSubgraph:
    """Vertex-disjoint dicircuits, each a tuple of vertices in cycle order."""

    cycles: tuple

    @property
    def p(self) -> int:
        return len(self.cycles)

    @property
    def vertex_count(self) -> int:
        return sum(len(c) for c in self.cycles)

    @property
    def arcs(self) -> list:
        return [(c[i], c[(i + 1) % len(c)]) for c in self.cycles for i in range(len(c))]


def linear_subgraphs(g: GeneralizedAdjacencyMatrix, size: int, skip_zero: bool = True):
    """Yield every linear subgraph of ``g`` covering exactly ``size`` vertices.

    Each dicircuit is generated from its smallest vertex, so every
    permutation-with-support is produced once.
    """
    n = g.n

    def nonzero(i, j):
        return not (skip_zero and is_zero(g[i, j]))

    def circuits_from(start, allowed):
        # simple dicircuits through start using only vertices > start from allowed
        stack = [(start, (start,))]
        while stack:
            v, walk = stack.pop()
            if nonzero(v, start) and (len(walk) > 1 or v == start):
                yield walk
            for w in sorted(allowed, reverse=True):
                if w > start and w not in walk and nonzero(v, w):
                    stack.append((w, walk + (w,)))

    def rec(available, chosen, covered):
        if covered == size:
            yield LinearSubgraph(tuple(chosen))
            return
        if not available or covered + len(available) < size:
            return
        first = min(available)
        rest = available - {first}
        # first left uncovered
        yield from rec(rest, chosen, covered)
        for cyc in circuits_from(first, rest):
            if covered + len(cyc) <= size:
                yield from rec(rest - set(cyc), chosen + [cyc], covered + len(cyc))

    yield from rec(frozenset(range(n)), [], 0)


def cycle_cover_char_poly(g: GeneralizedAdjacencyMatrix) -> CharPolynomial:
    """det(lambda*I - G) with a_i = sum over i-vertex linear subgraphs of (-1)**p * weight."""
    n = g.n
    coeffs = [g.zero()] * (n + 1)
    coeffs[n] = g.one()
    for i in range(1, n + 1):
        a = g.zero()
        for sub in linear_subgraphs(g, i):
            w = g.one()
            for u, v in sub.arcs:
                w = w * g[u, v]
            a = a + (-w if sub.p % 2 else w)
        coeffs[n - i] = a
    return CharPolynomial(tuple(coeffs))


def _parity(perm) -> int:
    seen = [False] * len(perm)
    odd = 0
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            odd ^= (length - 1) & 1
    return odd


def perm_expansion_det(g: GeneralizedAdjacencyMatrix):
    n = g.n
    if n > MAX_LEIBNIZ_N:
        raise TooLarge(f"Leibniz expansion limited to N <= {MAX_LEIBNIZ_N}, got {n}")
    total = g.zero()
    for perm in itertools.permutations(range(n)):
        term = g.one()
        for i, j in enumerate(perm):
            term = term * g[i, j]
        total = total - term if _parity(perm) else total + term
    return total


def _poly_mul(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def perm_expansion_char_poly(g: GeneralizedAdjacencyMatrix) -> CharPolynomial:
    """det(lambda*I - G) by Leibniz expansion over polynomial entries."""
    n = g.n
    if n > MAX_LEIBNIZ_N:
        raise TooLarge(f"Leibniz expansion limited to N <= {MAX_LEIBNIZ_N}, got {n}")
    zero, one = g.zero(), g.one()
    total = [zero] * (n + 1)
    for perm in itertools.permutations(range(n)):
        term = [one]
        for i, j in enumerate(perm):
            entry = [-g[i, j], one] if i == j else [-g[i, j]]
            term = _poly_mul(term, entry, zero)
        sign = _parity(perm)
        for k, c in enumerate(term):
            total[k] = total[k] - c if sign else total[k] + c
    return CharPolynomial(tuple(total))


def residual(g: GeneralizedAdjacencyMatrix, lam, v) -> float:
    """Max-norm of (lambda*I - G) v."""
    a = np.array(g.entries, dtype=complex)
    v = np.asarray(v, dtype=complex)
    r = complex(lam) * v - a @ v
    return float(np.max(np.abs(r))) if r.size else 0.0


def inf_norm(g: GeneralizedAdjacencyMatrix) -> float:
    a = np.array(g.entries, dtype=complex)
    return float(np.max(np.sum(np.abs(a), axis=1)))


def numeric_eigenpairs(g: GeneralizedAdjacencyMatrix, left: bool = False) -> list:
    """All (eigenvalue, eigenvector) pairs from a dense LAPACK eigensolve.

    ``left=True`` returns eigenvectors of G^T instead.
    """
    if g.n > 50:
        raise TooLarge("dense eigensolve limited to N <= 50")
    a = np.array(g.entries, dtype=float)
    if left:
        a = a.T
    try:
        w, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return [(w[i], vecs[:, i]) for i in range(len(w))]
