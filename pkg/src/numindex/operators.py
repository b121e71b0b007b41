"""Dense operators on descriptor spaces.

Matrices act on the depth-first leaf coordinates of a descriptor.
Operator norms for smooth exponents come from a duality-map fixed-point
iteration (the power-method generalization); flat l1/linf norms are
exact column/row enumerations.  All reported norm values are certified
lower bounds attained by the stored witness.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import spaces
from .spaces import (COMPLEX, REAL, DegenerateInput, DescriptorMismatch,
                     SpaceDescriptor, descriptor_to_text, dual_descriptor,
                     norm, norming_functional, parse_descriptor,
                     projection_matrix, unit_sphere_sample)

OP_NORM_MAX_ITERS = 500
OP_NORM_VALUE_TOL = 1e-10

#: dense symmetric tensors only make sense at desk scale
POLY_TENSOR_CAP = 100_000


@dataclass(frozen=True)
class Operator:
    """Square matrix bound to a descriptor (domain = codomain)."""

    matrix: np.ndarray
    descriptor: SpaceDescriptor

    def __post_init__(self):
        m = np.asarray(self.matrix)
        d = self.descriptor.total_dim
        if m.shape != (d, d):
            raise DescriptorMismatch(
                f"matrix shape {m.shape} on a space of dimension {d}")
        if self.descriptor.field == REAL and np.iscomplexobj(m):
            if np.any(m.imag != 0):
                raise DescriptorMismatch("complex matrix on a real descriptor")
            m = m.real
        object.__setattr__(self, "matrix", m.astype(self.descriptor.dtype))

    @property
    def field(self) -> str:
        return self.descriptor.field

    @property
    def dim(self) -> int:
        return self.descriptor.total_dim


@dataclass(frozen=True)
class OperatorNormEstimate:
    value: float
    witness: np.ndarray       # unit vector with ||T w|| = value (up to defect)
    method: str               # ascent | grid | exact
    defect: float


def identity(desc: SpaceDescriptor) -> Operator:
    return Operator(np.eye(desc.total_dim, dtype=desc.dtype), desc)


def apply(T: Operator, v: np.ndarray) -> np.ndarray:
    v = spaces.check_vector(T.descriptor, v)
    return T.matrix @ v


def adjoint(T: Operator) -> Operator:
    """Transpose (real) / conjugate transpose (complex) on the dual space."""
    m = T.matrix.conj().T if T.field == COMPLEX else T.matrix.T
    return Operator(m, dual_descriptor(T.descriptor))


def op_norm(T: Operator, budget: int = 16,
            rng: np.random.Generator | int | None = None) -> OperatorNormEstimate:
    """Certified lower bound of ||T|| with a near-attaining witness.

    Flat l1/linf descriptors are exact (column/row enumeration); otherwise a
    duality-map fixed-point iteration x <- J*(T^adj J(Tx)) runs from ``budget``
    starts (coordinate directions first, then random samples).
    """
    desc = T.descriptor
    if desc.is_flat and desc.p == 1:
        col = np.abs(T.matrix).sum(axis=0)
        j = int(np.argmax(col))
        w = np.zeros(desc.total_dim, dtype=desc.dtype)
        w[j] = 1.0
        return OperatorNormEstimate(float(col[j]), w, "exact", 0.0)
    if desc.is_flat and desc.p == math.inf:
        row = np.abs(T.matrix).sum(axis=1)
        i = int(np.argmax(row))
        w = np.conj(_signs(T.matrix[i]))
        return OperatorNormEstimate(float(row[i]), w, "exact", 0.0)

    rng = _as_rng(rng)
    ddual = dual_descriptor(desc)
    starts = list(np.eye(desc.total_dim, dtype=desc.dtype))
    while len(starts) < max(budget, 1):
        starts.append(unit_sphere_sample(desc, rng))
    starts = starts[:max(budget, 1)]

    best_val, best_x, best_defect = -1.0, starts[0], np.inf
    for x0 in starts:
        x = np.asarray(x0, dtype=desc.dtype)
        n0 = norm(desc, x)
        if n0 == 0:
            continue
        x = x / n0
        val = norm(desc, T.matrix @ x)
        defect = np.inf
        for _ in range(OP_NORM_MAX_ITERS):
            y = T.matrix @ x
            ny = norm(desc, y)
            if ny == 0.0:
                val, defect = 0.0, 0.0
                break
            f = norming_functional(desc, y / ny)
            g = T.matrix.T @ f            # bilinear adjoint of the pairing
            ng = norm(ddual, g)
            if ng == 0.0:
                defect = 0.0
                break
            x_new = norming_functional(ddual, g / ng)
            new_val = norm(desc, T.matrix @ x_new)
            defect = abs(new_val - val)
            if new_val < val:            # nonsmooth kink; keep the best seen
                break
            x, val = x_new, new_val
            if defect < OP_NORM_VALUE_TOL:
                break
        if val > best_val + 1e-15:
            best_val, best_x, best_defect = val, x, defect
    return OperatorNormEstimate(float(best_val), best_x, "ascent", float(best_defect))


def _signs(row: np.ndarray) -> np.ndarray:
    a = np.abs(row)
    out = np.where(a > 0, row / np.where(a > 0, a, 1.0), 1.0)
    return out.astype(row.dtype)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def rank_one(desc: SpaceDescriptor, f: np.ndarray, y: np.ndarray) -> Operator:
    """T(x) = (f . x) y as a matrix; ||T|| = ||f||_dual ||y||."""
    f = np.asarray(f, dtype=desc.dtype)
    y = spaces.check_vector(desc, y)
    if f.shape != (desc.total_dim,):
        raise DescriptorMismatch("functional length mismatch")
    return Operator(np.outer(y, f), desc)


def rank_r_sample(desc: SpaceDescriptor, r: int,
                  rng: np.random.Generator | int | None = None) -> Operator:
    """Random operator of rank <= r, rescaled to op-norm estimate 1."""
    if not (1 <= r <= desc.total_dim):
        raise DegenerateInput(f"rank {r} out of range 1..{desc.total_dim}")
    rng = _as_rng(rng)
    ddual = dual_descriptor(desc)
    m = np.zeros((desc.total_dim, desc.total_dim), dtype=desc.dtype)
    for _ in range(r):
        f = unit_sphere_sample(ddual, rng)
        y = unit_sphere_sample(desc, rng)
        m += np.outer(y, f)
    T = Operator(m, desc)
    est = op_norm(T, budget=8, rng=rng)
    if est.value == 0.0:
        raise DegenerateInput("degenerate rank-r sample")
    return Operator(m / est.value, desc)


@dataclass(frozen=True)
class CoordinateProjection:
    """Norm-one projection onto a subset of top-level blocks."""

    operator: Operator
    kept: tuple[int, ...]
    sub_descriptor: SpaceDescriptor
    embed: np.ndarray        # full_dim x sub_dim, 0/1 leaf selector


def coordinate_projection(desc: SpaceDescriptor, keep) -> CoordinateProjection:
    mat = projection_matrix(desc, keep)
    kept = tuple(sorted(set(keep)))
    if len(kept) == len(desc.children):
        sub = desc
    elif len(kept) == 1:
        sub = desc.children[kept[0]]
    else:
        sub = spaces.psum(desc.p, [desc.children[i] for i in kept], desc.field)
    rows = []
    for i in kept:
        o, d = desc.child_spans[i]
        rows.extend(range(o, o + d))
    embed = np.zeros((desc.total_dim, sub.total_dim), dtype=desc.dtype)
    for c, r in enumerate(rows):
        embed[r, c] = 1.0
    return CoordinateProjection(Operator(mat, desc), kept, sub, embed)


def compose_with_projection(L: Operator, Q: CoordinateProjection) -> Operator:
    """L on the kept block composed with Q, as an operator on the full space."""
    if L.descriptor != Q.sub_descriptor:
        raise DescriptorMismatch("operator does not act on the projected block")
    E = Q.embed
    return Operator(E @ L.matrix @ E.T, Q.operator.descriptor)


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """k-homogeneous polynomial map P(x) = A(x, ..., x) on a descriptor.

    The coefficient tensor has shape (dim,) * (k+1): output index first,
    then k symmetric input indices (symmetrized at construction).
    """

    degree: int
    tensor: np.ndarray
    descriptor: SpaceDescriptor

    def __post_init__(self):
        k = self.degree
        d = self.descriptor.total_dim
        if k < 1:
            raise DegenerateInput("degree must be >= 1")
        if d ** k > POLY_TENSOR_CAP:
            raise DegenerateInput(f"tensor size {d}^{k} exceeds cap {POLY_TENSOR_CAP}")
        t = np.asarray(self.tensor, dtype=self.descriptor.dtype)
        if t.shape != (d,) * (k + 1):
            raise DescriptorMismatch(
                f"tensor shape {t.shape}, expected {(d,) * (k + 1)}")
        object.__setattr__(self, "tensor", _symmetrize(t, k))


def _symmetrize(t: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return t
    perms = list(itertools.permutations(range(1, k + 1)))
    acc = np.zeros_like(t)
    for perm in perms:
        acc += np.transpose(t, (0,) + perm)
    return acc / len(perms)


def poly_from_operator(T: Operator) -> HomogeneousPolynomial:
    return HomogeneousPolynomial(1, T.matrix, T.descriptor)


def poly_apply(P: HomogeneousPolynomial, v: np.ndarray) -> np.ndarray:
    """Contract the symmetric tensor with k copies of v."""
    v = spaces.check_vector(P.descriptor, v)
    out = P.tensor
    for _ in range(P.degree):
        out = out @ v
    return out


# ---------------------------------------------------------------------------
# JSON matrix exchange
# ---------------------------------------------------------------------------

def operator_to_json(T: Operator) -> str:
    if T.field == COMPLEX:
        entries = [[z.real, z.imag] for z in T.matrix.ravel()]
    else:
        entries = [float(x) for x in T.matrix.ravel()]
    return json.dumps({"descriptor": descriptor_to_text(T.descriptor),
                       "field": T.field,
                       "matrix": entries}, sort_keys=True)


def operator_from_json(text: str, descriptor: SpaceDescriptor | None = None) -> Operator:
    obj = json.loads(text)
    field = obj.get("field", REAL)
    desc = descriptor or parse_descriptor(obj["descriptor"], field=field)
    d = desc.total_dim
    raw = obj["matrix"]
    if len(raw) != d * d:
        raise DescriptorMismatch(
            f"matrix field has {len(raw)} entries, expected {d * d}")
    if field == COMPLEX:
        flat = np.array([complex(re, im) for re, im in raw])
    else:
        flat = np.array(raw, dtype=float)
    return Operator(flat.reshape(d, d), desc)
