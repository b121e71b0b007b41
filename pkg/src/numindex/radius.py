"""Numerical radius, absolute numerical radius and polynomial radius.

Three backends behind one entry point:

* ``ascent``    -- multi-start sphere maximization of |J(x) . Tx| over the
                   dense all-coordinates-nonzero set, where the canonical
                   norming functional J is a closed form of x;
* ``enumerate`` -- exact finite enumeration on flat l1 / linf spaces;
* ``grid``      -- brute-force dense sphere sweep for small dimensions,
                   used as the independent oracle.

Every estimate carries a norming-pair witness from which the value can be
re-derived, so reported values are certified lower bounds of the radius.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .operators import (HomogeneousPolynomial, Operator, _as_rng, poly_apply)
from .optimize import maximize_on_sphere
from .spaces import (COMPLEX, REAL, DegenerateInput, NormingPair,
                     SpaceDescriptor, eval_pair, lp, norm, norming_functional)

#: default restart budget for the ascent backend
DEFAULT_RESTARTS = 64

GRID_DIM_CAP_REAL = 3
GRID_DIM_CAP_COMPLEX = 2


class BudgetExceeded(ValueError):
    """Grid oracle requested beyond its dimension cap."""


@dataclass(frozen=True)
class RadiusEstimate:
    value: float
    witness: NormingPair
    method: str               # ascent | enumerate | grid
    guarantee: str            # certified-lower-bound | exact-enumeration
    evals: int


def _estimate_at(T: Operator, x: np.ndarray, method: str, guarantee: str,
                 evals: int) -> RadiusEstimate:
    pair = NormingPair.at(T.descriptor, x)
    value = abs(eval_pair(pair.xstar, T.matrix @ pair.x))
    return RadiusEstimate(float(value), pair, method, guarantee, evals)


def radius_objective(T: Operator):
    """x (unit) -> |J(x) . Tx|, the quantity whose sup over Pi(X) is nu(T)."""
    desc = T.descriptor
    m = T.matrix

    def g(x: np.ndarray) -> float:
        f = norming_functional(desc, x)
        return abs(eval_pair(f, m @ x))

    return g


def numerical_radius(T: Operator, method: str = "auto",
                     budget: int = DEFAULT_RESTARTS,
                     rng=None, resolution: int = 2000,
                     extra_starts=()) -> RadiusEstimate:
    """Supremum estimate of |x*(Tx)| over norming pairs.

    ``auto`` dispatch: flat (or uniformly nested) l1/linf -> enumerate;
    everything else -> ascent.  The grid backend must be requested
    explicitly and is capped at small dimension.
    """
    desc = T.descriptor
    if method == "auto":
        u = desc.uniform_exponent
        method = "enumerate" if u in (1.0, math.inf) else "ascent"
    if method == "enumerate":
        return radius_enumerate(T)
    if method == "grid":
        return radius_grid_oracle(T, resolution)
    if method == "ascent":
        return radius_ascent(T, budget=budget, rng=rng, extra_starts=extra_starts)
    raise ValueError(f"unknown radius method {method!r}")


def radius_ascent(T: Operator, budget: int = DEFAULT_RESTARTS, rng=None,
                  extra_starts=()) -> RadiusEstimate:
    """Multi-start local maximization of |J(x) . Tx| over the unit sphere."""
    rng = _as_rng(rng)
    x, _, evals = maximize_on_sphere(T.descriptor, radius_objective(T), rng,
                                     restarts=budget, extra_starts=extra_starts)
    return _estimate_at(T, x, "ascent", "certified-lower-bound", evals)


# ---------------------------------------------------------------------------
# exact enumeration on flat l1 / linf
# ---------------------------------------------------------------------------

def _sgn(z, dtype):
    a = abs(z)
    if a == 0:
        return dtype(1)
    return dtype(z / a)


def radius_enumerate(T: Operator) -> RadiusEstimate:
    """Exhaustive maximization over the finite candidate set of extreme
    points and compatible face functionals (flat p in {1, inf} only).

    For l1^m the sup runs over x = sigma e_i with the face functional phase
    pattern aligned entrywise; for linf^m dually.  The candidate set is
    conjectured-complete and validated against the grid oracle by
    :func:`enumeration_selfcheck` (run in the test suite).
    """
    desc = T.descriptor
    flat = _as_uniform_flat(desc)
    if flat is None or flat.p not in (1.0, math.inf):
        raise DegenerateInput("enumeration needs a flat (or uniformly nested) "
                              "l1/linf descriptor")
    p = flat.p
    m = T.matrix
    d = desc.total_dim
    dt = complex if desc.field == COMPLEX else float
    best = (-1.0, None, None)
    for i in range(d):
        if p == 1:
            # x = e_i, f_i = 1, free coordinates aligned with column i
            val = abs(m[i, i]) + sum(abs(m[j, i]) for j in range(d) if j != i)
            x = np.zeros(d, dtype=desc.dtype)
            x[i] = 1.0
            f = np.empty(d, dtype=desc.dtype)
            si = _sgn(m[i, i], dt)
            for j in range(d):
                f[j] = 1.0 if j == i else np.conj(_sgn(m[j, i], dt)) * si
        else:
            # f = e_i, x_i = 1, partner coordinates aligned with row i
            val = abs(m[i, i]) + sum(abs(m[i, j]) for j in range(d) if j != i)
            f = np.zeros(d, dtype=desc.dtype)
            f[i] = 1.0
            x = np.empty(d, dtype=desc.dtype)
            si = _sgn(m[i, i], dt)
            for j in range(d):
                x[j] = 1.0 if j == i else np.conj(_sgn(m[i, j], dt)) * si
        if val > best[0] + 1e-15:
            best = (val, x, f)
    val, x, f = best
    pair = NormingPair(x, f, _pair_slack(desc, x, f))
    return RadiusEstimate(float(val), pair, "enumerate", "exact-enumeration", d)


def _pair_slack(desc, x, f) -> float:
    from .spaces import dual_descriptor
    return float(max(abs(norm(desc, x) - 1.0),
                     abs(norm(dual_descriptor(desc), f) - 1.0),
                     abs(eval_pair(f, x) - 1.0)))


def _as_uniform_flat(desc: SpaceDescriptor) -> SpaceDescriptor | None:
    """Flat descriptor isometric to ``desc`` when all exponents agree."""
    u = desc.uniform_exponent
    if u is None:
        return None
    if desc.is_flat:
        return desc
    return lp(u, desc.total_dim, desc.field)


# ---------------------------------------------------------------------------
# grid oracle
# ---------------------------------------------------------------------------

def radius_grid_oracle(T: Operator, resolution: int = 2000,
                       absolute: bool = False) -> RadiusEstimate:
    """Deterministic dense sphere sweep; independent lower-bound oracle.

    Real descriptors up to dimension 3, complex up to dimension 2.  The
    value never decreases when the resolution doubles (the angle grids are
    nested).  With ``absolute=True`` the swept quantity is the absolute
    numerical radius integrand (flat spaces only).
    """
    desc = T.descriptor
    d = desc.total_dim
    cap = GRID_DIM_CAP_COMPLEX if desc.field == COMPLEX else GRID_DIM_CAP_REAL
    if d > cap:
        raise BudgetExceeded(
            f"grid oracle capped at dimension {cap} for {desc.field} spaces")
    if desc.field == COMPLEX:
        xs = _complex_grid(resolution) if d == 2 else np.ones((1, 1), dtype=complex)
    else:
        xs = _grid_points(desc, resolution)
    if desc.is_flat and not absolute:
        val, x = _grid_sweep_flat(T, xs)
    elif desc.is_flat and absolute:
        val, x = _grid_sweep_flat_absolute(T, xs)
    else:
        val, x = _grid_sweep_generic(T, xs)
    if absolute:
        pair = NormingPair.at(desc, x)
        return RadiusEstimate(float(val), pair, "grid",
                              "certified-lower-bound", len(xs))
    est = _estimate_at(T, x, "grid", "certified-lower-bound", len(xs))
    if est.value < val - 1e-12:
        # canonical selection lost a face maximum; keep the swept value with
        # the explicit face functional as witness
        f = _best_face_functional(desc, x, T.matrix @ x)
        pair = NormingPair(x, f, _pair_slack(desc, x, f))
        est = RadiusEstimate(float(val), pair, "grid",
                             "certified-lower-bound", len(xs))
    return est


def _complex_grid(resolution: int) -> np.ndarray:
    n = max(int(math.isqrt(resolution)), 8)
    t = np.linspace(0.0, np.pi / 2, n + 1)
    ph = np.linspace(0.0, 2 * np.pi, 2 * n, endpoint=False)
    TT, PP = np.meshgrid(t, ph, indexing="ij")
    # global phase fixed: first coordinate real nonnegative
    return np.column_stack([np.cos(TT).ravel().astype(complex),
                            (np.sin(TT) * np.exp(1j * PP)).ravel()])


def _normalize_rows(desc: SpaceDescriptor, xs: np.ndarray) -> np.ndarray:
    p = desc.p
    a = np.abs(xs)
    if p == math.inf:
        ns = a.max(axis=1)
    elif p == 1:
        ns = a.sum(axis=1)
    else:
        ns = (a ** p).sum(axis=1) ** (1.0 / p)
    return xs / ns[:, None]


def _grid_sweep_flat(T: Operator, xs: np.ndarray):
    desc = T.descriptor
    p = desc.p
    xs = _normalize_rows(desc, xs.astype(desc.dtype))
    ys = xs @ T.matrix.T
    a = np.abs(xs)
    if 1 < p < math.inf:
        fs = np.where(a > 0, a ** (p - 1.0) * np.conj(np.where(a > 0, xs, 1)) /
                      np.where(a > 0, a, 1.0), 0.0)
        vals = np.abs((fs * ys).sum(axis=1))
    elif p == 1:
        sgn = np.where(a > 0, np.conj(xs) / np.where(a > 0, a, 1.0), 0.0)
        fixed = (sgn * ys).sum(axis=1)
        free = (np.abs(ys) * (a == 0)).sum(axis=1)
        vals = np.abs(fixed) + free
    else:  # p == inf: face extremes are sign(conj(x_i)) e_i over argmax coords
        amax = a.max(axis=1)
        mask = a >= amax[:, None] - 1e-15
        cand = np.abs(ys) * mask
        vals = cand.max(axis=1)
    k = int(np.argmax(vals))
    return float(vals[k]), xs[k]


def _grid_sweep_flat_absolute(T: Operator, xs: np.ndarray):
    desc = T.descriptor
    p = desc.p
    xs = _normalize_rows(desc, xs.astype(desc.dtype))
    ys = xs @ T.matrix.T
    w = np.ones_like(np.abs(xs)) if p == 1 else np.abs(xs) ** (p - 1.0)
    vals = (w * np.abs(ys)).sum(axis=1)
    k = int(np.argmax(vals))
    return float(vals[k]), xs[k]


def _grid_sweep_generic(T: Operator, xs: np.ndarray):
    desc = T.descriptor
    g = radius_objective(T)
    best, bx = -1.0, None
    for row in xs.astype(desc.dtype):
        n = norm(desc, row)
        if n == 0:
            continue
        x = row / n
        v = g(x)
        if v > best + 1e-15:
            best, bx = v, x
    return best, bx


def _best_face_functional(desc: SpaceDescriptor, x: np.ndarray,
                          y: np.ndarray) -> np.ndarray:
    """Maximizer of |f(y)| over the dual face at x (flat p in {1, inf})."""
    a = np.abs(x)
    f = np.zeros(desc.total_dim, dtype=desc.dtype)
    if desc.p == 1:
        fixed = sum(np.conj(x[i]) / a[i] * y[i] for i in range(len(x)) if a[i] > 0)
        s = _sgn(fixed, complex if desc.field == COMPLEX else float)
        for i in range(len(x)):
            if a[i] > 0:
                f[i] = np.conj(x[i]) / a[i]
            else:
                f[i] = np.conj(_sgn(y[i], complex if desc.field == COMPLEX else float)) * s
    elif desc.p == math.inf:
        idx = [i for i in range(len(x)) if a[i] >= a.max() - 1e-15]
        i = max(idx, key=lambda i: abs(y[i]))
        f[i] = np.conj(x[i]) / a[i]
    else:
        return norming_functional(desc, x)
    return f


# ---------------------------------------------------------------------------
# absolute numerical radius
# ---------------------------------------------------------------------------

def absolute_radius_objective(T: Operator):
    """x (unit, flat lp^m) -> sum_i |x_i|^{p-1} |(Tx)_i| (weight 1 at p=1)."""
    desc = T.descriptor
    p = desc.p
    m = T.matrix

    def h(x: np.ndarray) -> float:
        ax = np.abs(x)
        w = np.ones_like(ax) if p == 1 else ax ** (p - 1.0)
        return float((w * np.abs(m @ x)).sum())

    return h


def absolute_radius(T: Operator, budget: int = DEFAULT_RESTARTS, rng=None,
                    method: str = "ascent", resolution: int = 2000,
                    extra_starts=()) -> RadiusEstimate:
    """Absolute numerical radius |nu|(T) on a flat lp^m, 1 <= p < inf."""
    desc = T.descriptor
    if not desc.is_flat or desc.p == math.inf:
        raise DegenerateInput("absolute radius needs a flat lp^m with finite p")
    if method == "grid":
        return radius_grid_oracle(T, resolution, absolute=True)
    rng = _as_rng(rng)
    x, val, evals = maximize_on_sphere(desc, absolute_radius_objective(T), rng,
                                       restarts=budget, extra_starts=extra_starts)
    pair = NormingPair.at(desc, x)
    return RadiusEstimate(float(val), pair, "ascent",
                          "certified-lower-bound", evals)


# ---------------------------------------------------------------------------
# polynomial numerical radius
# ---------------------------------------------------------------------------

def poly_radius(P: HomogeneousPolynomial, budget: int = DEFAULT_RESTARTS,
                rng=None, method: str = "ascent",
                resolution: int = 2000) -> RadiusEstimate:
    """nu(P) = sup |J(x) . P(x)| over the unit sphere."""
    desc = P.descriptor
    if method == "grid":
        cap = GRID_DIM_CAP_COMPLEX if desc.field == COMPLEX else GRID_DIM_CAP_REAL
        if desc.total_dim > cap:
            raise BudgetExceeded(f"grid oracle capped at dimension {cap}")
        xs = _grid_points(desc, resolution)
        g = _poly_objective(P)
        best, bx = -1.0, None
        for row in xs.astype(desc.dtype):
            n = norm(desc, row)
            if n == 0:
                continue
            x = row / n
            v = g(x)
            if v > best + 1e-15:
                best, bx = v, x
        pair = NormingPair.at(desc, bx)
        return RadiusEstimate(float(best), pair, "grid",
                              "certified-lower-bound", len(xs))
    rng = _as_rng(rng)
    x, _, evals = maximize_on_sphere(desc, _poly_objective(P), rng,
                                     restarts=budget)
    pair = NormingPair.at(desc, x)
    value = abs(eval_pair(pair.xstar, poly_apply(P, pair.x)))
    return RadiusEstimate(float(value), pair, "ascent",
                          "certified-lower-bound", evals)


def _poly_objective(P: HomogeneousPolynomial):
    desc = P.descriptor

    def g(x: np.ndarray) -> float:
        f = norming_functional(desc, x)
        return abs(eval_pair(f, poly_apply(P, x)))

    return g


def poly_norm(P: HomogeneousPolynomial, budget: int = DEFAULT_RESTARTS,
              rng=None):
    """sup ||P(x)|| over the unit sphere (certified lower bound)."""
    desc = P.descriptor
    rng = _as_rng(rng)

    def g(x):
        return norm(desc, poly_apply(P, x))

    x, val, evals = maximize_on_sphere(desc, g, rng, restarts=budget)
    return float(val), x


def _grid_points(desc: SpaceDescriptor, resolution: int) -> np.ndarray:
    """Real direction grid, always including the +-1/0 kink directions so
    the sweep is sharp at the extreme points of l1/linf balls."""
    d = desc.total_dim
    if desc.field == COMPLEX:
        return _complex_grid(resolution)
    corners = np.array([c for c in itertools.product((-1.0, 0.0, 1.0), repeat=d)
                        if any(c)])
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        th = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
        xs = np.column_stack([np.cos(th), np.sin(th)])
    else:
        n = max(int(math.isqrt(resolution)) + 1, 16)
        th = np.linspace(0.0, np.pi, n + 1)
        ph = np.linspace(0.0, 2 * np.pi, 2 * n, endpoint=False)
        TH, PH = np.meshgrid(th, ph, indexing="ij")
        xs = np.column_stack([(np.sin(TH) * np.cos(PH)).ravel(),
                              (np.sin(TH) * np.sin(PH)).ravel(),
                              np.cos(TH).ravel()])
        xs = xs[np.abs(xs).sum(axis=1) > 1e-12]
    return np.vstack([xs, corners])


def enumeration_selfcheck(seed: int = 7, cases: int = 10,
                          resolution: int = 4000, tol: float = 5e-3) -> float:
    """Oracle-equivalence pretest for the enumeration candidate set.

    Compares enumeration with the grid oracle on random 2x2 operators for
    p in {1, inf}.  The grid oracle is itself a lower bound, so the fatal
    direction is grid > enumerate (a candidate was missed); the reverse
    gap only reflects grid discretization and is checked coarsely.
    Raises on disagreement; returns the worst observed gap.
    """
    worst = 0.0
    rng = np.random.default_rng(seed)
    for p in (1.0, math.inf):
        desc = lp(p, 2)
        for _ in range(cases):
            T = Operator(rng.standard_normal((2, 2)), desc)
            a = radius_enumerate(T).value
            b = radius_grid_oracle(T, resolution).value
            worst = max(worst, abs(a - b))
            if b > a + 1e-9 or abs(a - b) > tol:
                raise AssertionError(
                    f"enumeration candidate set disagrees with the grid oracle "
                    f"at p={p}: enumerate={a}, grid={b}")
    return worst
