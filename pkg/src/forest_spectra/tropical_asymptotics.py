"""Leading-order spectra of sub-generators with entries m * exp(-V / eps).

Forest productivities of a sub-generator (nonnegative rates, nonnegative
killing) are all nonnegative, so the leading exponential order of each
characteristic coefficient is a minimum-weight forest problem and no
cancellation can occur.  :class:`AsymptoticScalar` encodes that
(min, +) arithmetic with prefactors, and the generic forest sums do the rest.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
import numpy as np

from .errors import DegenerateSlopes, InputError, NegationAttempted, UnderflowWarning
from .forest_calculus import char_poly
from .graph_core import (
    AugmentedDigraph,
    ForestQuery,
    GeneralizedAdjacencyMatrix,
    enumerate_forests,
)
from .scalars import to_fraction

INF = math.inf


@dataclass(frozen=True)
class AsymptoticScalar:
    """Leading term ``prefactor * exp(-order / eps)`` of a nonnegative quantity.

    Sums keep the smaller order (adding prefactors on an exact tie),
    products add orders and multiply prefactors.  Subtraction is refused.
    """

    order: object
    prefactor: object

    def __post_init__(self):
        if self.order != INF:
            object.__setattr__(self, "order", to_fraction(self.order))
            if not self.prefactor > 0:
                raise ValueError("finite order requires a positive prefactor")

    @classmethod
    def zero(cls) -> "AsymptoticScalar":
        return cls(INF, 0)

    @classmethod
    def one(cls) -> "AsymptoticScalar":
        return cls(Fraction(0), 1)

    def is_zero(self) -> bool:
        return self.order == INF

    def __add__(self, other):
        if not isinstance(other, AsymptoticScalar):
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.order < other.order:
            return self
        if other.order < self.order:
            return other
        return AsymptoticScalar(self.order, self.prefactor + other.prefactor)

    def __mul__(self, other):
        if not isinstance(other, AsymptoticScalar):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return AsymptoticScalar.zero()
        return AsymptoticScalar(self.order + other.order, self.prefactor * other.prefactor)

    def __neg__(self):
        raise NegationAttempted("asymptotic scalars are signless; negation is undefined")

    def __sub__(self, other):
        raise NegationAttempted("asymptotic scalars are signless; subtraction is undefined")

    __rsub__ = __sub__

    def value(self, eps: float) -> float:
        if self.is_zero():
            return 0.0
        return float(self.prefactor) * math.exp(-float(self.order) / eps)

    def to_json(self) -> dict:
        return {"V": "inf" if self.is_zero() else str(self.order),
                "m": float(self.prefactor)}


@dataclass(frozen=True)
class ExponentialMarkovInput:
    """Rates ``m_ij exp(-V_ij/eps)`` between states and killing rates per state.

    ``arcs`` maps ``(i, j)``, i != j, to ``(V, m)``; ``killing`` maps ``i`` to
    ``(V, m)``.  Missing entries are absent arcs.  The diagonal is implied by
    zero total outflow: M_ii = -killing_i - sum_j M_ij.
    """

    n: int
    arcs: dict
    killing: dict = field(default_factory=dict)

    def __post_init__(self):
        arcs = {}
        for (i, j), (v, m) in self.arcs.items():
            if i == j:
                raise InputError(f"loop ({i}, {i}) not allowed; the diagonal is implied")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InputError(f"arc ({i}, {j}) outside 0..{self.n - 1}")
            arcs[(i, j)] = self._check(v, m)
        killing = {}
        for i, (v, m) in self.killing.items():
            if not 0 <= i < self.n:
                raise InputError(f"killing state {i} outside 0..{self.n - 1}")
            killing[i] = self._check(v, m)
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "killing", killing)

    @staticmethod
    def _check(v, m):
        v = to_fraction(v)
        if v < 0:
            raise InputError("exponential orders must be nonnegative")
        if not m > 0:
            raise InputError("prefactors must be positive")
        return v, m

    def augmented(self) -> AugmentedDigraph:
        """G-dagger with asymptotic weights; the sink is index ``n``."""
        weights = {(i, j): AsymptoticScalar(v, m) for (i, j), (v, m) in self.arcs.items()}
        for i, (v, m) in self.killing.items():
            weights[(i, self.n)] = AsymptoticScalar(v, m)
        return AugmentedDigraph(n_vertices=self.n + 1, arcs=weights, unit=AsymptoticScalar.one())

    def augmented_at_epsilon(self, eps: float) -> AugmentedDigraph:
        """G-dagger with Float64 rates at ``eps``, built without forming the diagonal."""
        weights = {(i, j): float(m) * math.exp(-float(v) / eps)
                   for (i, j), (v, m) in self.arcs.items()}
        for i, (v, m) in self.killing.items():
            weights[(i, self.n)] = float(m) * math.exp(-float(v) / eps)
        return AugmentedDigraph(n_vertices=self.n + 1, arcs=weights, unit=1.0)


def realize_at_epsilon(inp: ExponentialMarkovInput, eps: float) -> GeneralizedAdjacencyMatrix:
    if not eps > 0:
        raise InputError("eps must be positive")
    n = inp.n
    rows = [[0.0] * n for _ in range(n)]
    underflow = []

    def rate(v, m, where):
        x = float(m) * math.exp(-float(v) / eps)
        if x == 0.0:
            underflow.append(where)
        return x

    for (i, j), (v, m) in inp.arcs.items():
        rows[i][j] = rate(v, m, (i, j))
    for i in range(n):
        out = sum(rows[i][j] for j in range(n) if j != i)
        kill = rate(*inp.killing[i], (i, "dagger")) if i in inp.killing else 0.0
        rows[i][i] = -kill - out
    if underflow:
        warnings.warn(f"entries underflow to zero at eps={eps}: {underflow}", UnderflowWarning,
                      stacklevel=2)
    return GeneralizedAdjacencyMatrix.from_rows(rows)


def tropical_char_poly(inp: ExponentialMarkovInput) -> list:
    """Leading (order, prefactor) of every characteristic coefficient, k = 0..N."""
    return list(char_poly(inp.augmented()).coeffs)


def extreme_forests(inp: ExponentialMarkovInput) -> list:
    """Per k, the minimum total order and every forest attaining it.

    Computed by explicit enumeration and comparison, independently of the
    asymptotic-scalar arithmetic.  Entries are ``(order, prefactor, forests)``
    with ``order = inf`` when no forest exists.
    """
    h = inp.augmented()
    out = []
    for k in range(inp.n + 1):
        best, pref, witnesses = INF, 0, []
        for f in enumerate_forests(h, ForestQuery(required_roots={inp.n}, k=k)):
            order = sum((h.arcs[a].order for a in f.arcs), Fraction(0))
            weight = 1
            for a in f.arcs:
                weight = weight * h.arcs[a].prefactor
            if order < best:
                best, pref, witnesses = order, weight, [f]
            elif order == best:
                pref = pref + weight
                witnesses.append(f)
        out.append((best, pref, witnesses))
    return out


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the points (k, V_k).

    ``exponents[k-1]`` is the hull slope V_{k-1} - V_k read off the segment
    covering [k-1, k]; ``segments`` lists (exponent, multiplicity).
    """

    vertices: tuple
    exponents: tuple
    segments: tuple
    convexity_ok: bool


def newton_polygon(orders: Sequence) -> NewtonPolygon:
    orders = [INF if o == INF else to_fraction(o) for o in orders]
    if orders[-1] != 0:
        raise InputError("the leading coefficient must have order 0")
    pts = [(k, v) for k, v in enumerate(orders) if v != INF]
    hull = []
    for p in pts:
        # pop while the last turn is not strictly convex from below
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    exponents = [INF] * (len(orders) - 1)
    segments = []
    if hull[0][0] > 0:
        segments.append((INF, hull[0][0]))
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y1 - y2) / (x2 - x1)
        segments.append((slope, x2 - x1))
        for k in range(x1 + 1, x2 + 1):
            exponents[k - 1] = slope
    on_hull = all(v != INF for v in orders) and all(
        orders[k] == orders[k - 1] - exponents[k - 1] for k in range(1, len(orders)))
    return NewtonPolygon(tuple(hull), tuple(exponents), tuple(segments), on_hull)


@dataclass(frozen=True)
class EigenvalueAsymptotic:
    """lambda_k ~ Lambda * exp(-exponent / eps)."""

    k: int
    exponent: Fraction
    Lambda: float


@dataclass(frozen=True)
class AsymptoticSpectrum:
    coefficient_orders: tuple
    newton_polygon: NewtonPolygon
    eigenvalues: tuple
    convexity_ok: bool
    segments: tuple = ()


def eigenvalue_asymptotics(coefficients: Sequence[AsymptoticScalar]) -> AsymptoticSpectrum:
    """Per-eigenvalue exponent V_{k-1} - V_k and prefactor -m_{k-1}/m_k.

    The prefactor comes from balancing the two dominant terms
    a_k lambda^k + a_{k-1} lambda^{k-1}.  Requires strictly convex orders;
    otherwise DegenerateSlopes carries the hull segments.
    """
    coefficients = list(coefficients)
    poly = newton_polygon([c.order for c in coefficients])
    exps = poly.exponents
    if not poly.convexity_ok:
        raise DegenerateSlopes("coefficient orders are not convex or include a zero coefficient",
                               poly.segments)
    if any(exps[i] == exps[i + 1] for i in range(len(exps) - 1)):
        raise DegenerateSlopes("coincident hull slopes; only segment multiplicities are defined",
                               poly.segments)
    eig = []
    for k in range(1, len(coefficients)):
        lam = -float(coefficients[k - 1].prefactor) / float(coefficients[k].prefactor)
        eig.append(EigenvalueAsymptotic(k, exps[k - 1], lam))
    eig.sort(key=lambda e: e.exponent, reverse=True)
    return AsymptoticSpectrum(tuple(coefficients), poly, tuple(eig), True, poly.segments)


def tropical_spectrum(inp: ExponentialMarkovInput) -> AsymptoticSpectrum:
    """Coefficient orders, Newton polygon and, when simple, eigenvalue asymptotics."""
    coeffs = tropical_char_poly(inp)
    try:
        return eigenvalue_asymptotics(coeffs)
    except DegenerateSlopes:
        poly = newton_polygon([c.order for c in coeffs])
        return AsymptoticSpectrum(tuple(coeffs), poly, (), poly.convexity_ok, poly.segments)


def _root_precision(coeffs) -> int:
    nonzero = [abs(c) for c in coeffs if c != 0]
    span = math.log10(max(nonzero)) - math.log10(min(nonzero))
    return 30 + int(math.ceil(span))


def eigenvalues_at_epsilon(inp: ExponentialMarkovInput, eps: float, method: str = "forest") -> list:
    """Eigenvalues of the realized matrix, sorted by increasing magnitude.

    ``method="forest"`` evaluates the characteristic coefficients as sums of
    nonnegative Float64 forest products (no cancellation) and finds the roots
    in multiprecision.  ``method="dense"`` runs LAPACK on the Float64 matrix,
    which loses the slow eigenvalues once the rates span more than about
    sixteen decades.
    """
    if method == "dense":
        a = np.array(realize_at_epsilon(inp, eps).entries, dtype=float)
        w = np.linalg.eigvals(a)
        return sorted((complex(x) for x in w), key=abs)
    if method != "forest":
        raise InputError(f"unknown method {method!r}")
    coeffs = char_poly(inp.augmented_at_epsilon(eps), workers=1).coeffs
    zeros = 0
    while zeros < len(coeffs) - 1 and coeffs[zeros] == 0:
        zeros += 1
    trimmed = list(coeffs[zeros:])
    roots = [0j] * zeros
    if len(trimmed) > 1:
        dps = _root_precision(trimmed)
        with mpmath.workdps(dps):
            found = mpmath.polyroots(list(reversed(trimmed)), maxsteps=50 * dps, extraprec=2 * dps)
            roots += [complex(r) for r in found]
    return sorted(roots, key=abs)


@dataclass(frozen=True)
class ValidationRow:
    k: int
    predicted_exponent: Fraction
    estimated_exponent: float
    exponent_rel_error: float
    predicted_Lambda: float
    estimated_Lambda: float
    prefactor_rel_error: float
    eigenvalues: tuple


def validate_asymptotics(inp: ExponentialMarkovInput, eps_list: Sequence[float],
                         method: str = "forest", spectrum: Optional[AsymptoticSpectrum] = None) -> list:
    """Compare predicted asymptotics with eigenvalues computed at finite eps.

    The exponent is estimated from y(eps) = -eps*ln|lambda(eps)| by a
    least-squares line in eps extrapolated to eps = 0; the prefactor is
    lambda(eps) * exp(exponent/eps) at the smallest eps, using the predicted
    exponent.
    """
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 2 or any(e <= 0 for e in eps_list):
        raise InputError("need at least two positive eps values")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise InputError("eps values must be strictly decreasing")
    spectrum = spectrum or tropical_spectrum(inp)
    if not spectrum.eigenvalues:
        raise DegenerateSlopes("no per-eigenvalue asymptotics to validate", spectrum.segments)
    # predicted eigenvalues are sorted by exponent descending, i.e. magnitude ascending
    per_eps = [eigenvalues_at_epsilon(inp, e, method) for e in eps_list]
    xs = np.array(eps_list)
    rows = []
    for idx, pred in enumerate(spectrum.eigenvalues):
        lams = [vals[idx] for vals in per_eps]
        ys = np.array([-e * math.log(abs(lam)) if lam != 0 else math.inf
                       for e, lam in zip(eps_list, lams)])
        if np.all(np.isfinite(ys)):
            slope, intercept = np.polyfit(xs, ys, 1)
            est_exp = float(intercept)
        else:
            est_exp = math.inf
        exp_err = abs(est_exp - float(pred.exponent)) / max(abs(float(pred.exponent)), 1e-300)
        lam_small = lams[-1]
        est_pref = (lam_small * math.exp(float(pred.exponent) / eps_list[-1])).real
        pref_err = abs(est_pref - pred.Lambda) / abs(pred.Lambda)
        rows.append(ValidationRow(pred.k, pred.exponent, est_exp, exp_err, pred.Lambda,
                                  est_pref, pref_err, tuple(lams)))
    return rows
