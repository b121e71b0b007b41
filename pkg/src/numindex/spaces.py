"""Finite-dimensional Banach spaces built from nested p-sums.

A space is described by a recursive tree: scalar leaves combined by
PSum nodes with exponent p in [1, inf].  Coordinates are flattened
depth-first left-to-right, so every vector on a descriptor is a plain
numpy array of length ``total_dim``.

Functionals are coordinate arrays as well; the pairing is bilinear
(no conjugation).  In the complex case the conjugation lives inside
the norming-functional construction, so that f . x = ||x|| comes out
real and nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

REAL = "real"
COMPLEX = "complex"

#: default tolerance for exact algebraic identities
DEFAULT_TOL = 1e-9


class SpaceError(ValueError):
    """Base class for space-layer errors."""


class DescriptorMismatch(SpaceError):
    """Vector/functional/operator does not fit the descriptor."""


class DegenerateInput(SpaceError):
    """Zero vector, empty keep-set, or similar degenerate input."""


def conjugate_exponent(p: float) -> float:
    """Hoelder conjugate with the 1 <-> inf pair handled exactly.

    The generic q = p/(p-1) picks up a few ulps of roundoff when conjugated
    twice (4 -> 4/3 -> 4.000...001), so descriptor equality compares
    exponents with a relative tolerance rather than bitwise.
    """
    if p == 1:
        return math.inf
    if p == math.inf:
        return 1.0
    if p == 2:
        return 2.0
    return p / (p - 1.0)


def _p_close(a: float, b: float) -> bool:
    if a == b:
        return True
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0)


@dataclass(frozen=True, eq=False)
class SpaceDescriptor:
    """Node of a p-sum tree.  A leaf has ``children == ()`` and ``p is None``.

    Equality compares exponents within relative tolerance 1e-12 so that
    conjugate-exponent round trips (which lose a few ulps) still compare
    equal; the hash rounds exponents accordingly.
    """

    p: float | None
    children: tuple["SpaceDescriptor", ...] = ()
    field: str = REAL

    def __eq__(self, other):
        if not isinstance(other, SpaceDescriptor):
            return NotImplemented
        if self.field != other.field or len(self.children) != len(other.children):
            return False
        if self.is_leaf:
            return other.is_leaf
        if other.is_leaf or not _p_close(self.p, other.p):
            return False
        return all(a == b for a, b in zip(self.children, other.children))

    def __hash__(self):
        key = None if self.is_leaf else (
            "inf" if self.p == math.inf else round(self.p, 9))
        return hash((key, self.children, self.field))

    def __post_init__(self):
        if self.field not in (REAL, COMPLEX):
            raise SpaceError(f"unknown scalar field {self.field!r}")
        if self.is_leaf:
            if self.p is not None:
                raise SpaceError("leaf node must not carry an exponent")
        else:
            if self.p is None or not (1.0 <= self.p):
                raise SpaceError(f"exponent must lie in [1, inf], got {self.p!r}")
            for c in self.children:
                if c.field != self.field:
                    raise SpaceError("mixed scalar fields in one descriptor")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @cached_property
    def total_dim(self) -> int:
        if self.is_leaf:
            return 1
        return sum(c.total_dim for c in self.children)

    @cached_property
    def is_flat(self) -> bool:
        """True when every child is a scalar leaf (an lp^m space)."""
        return (not self.is_leaf) and all(c.is_leaf for c in self.children)

    @cached_property
    def child_spans(self) -> tuple[tuple[int, int], ...]:
        """(offset, length) of each top-level child in leaf order."""
        spans = []
        off = 0
        for c in self.children:
            spans.append((off, c.total_dim))
            off += c.total_dim
        return tuple(spans)

    @cached_property
    def exponents(self) -> tuple[float, ...]:
        """All PSum exponents in the tree, root first."""
        if self.is_leaf:
            return ()
        out = [self.p]
        for c in self.children:
            out.extend(c.exponents)
        return tuple(out)

    def is_smooth(self) -> bool:
        """Every exponent strictly between 1 and inf."""
        return all(1.0 < p < math.inf for p in self.exponents)

    @cached_property
    def uniform_exponent(self) -> float | None:
        """If all PSum nodes share one exponent p, the tree is isometric to
        flat lp^total_dim; returns p, else None."""
        ps = set(self.exponents)
        return ps.pop() if len(ps) == 1 else None

    @property
    def dtype(self):
        return np.complex128 if self.field == COMPLEX else np.float64

    def __repr__(self):
        return f"SpaceDescriptor({descriptor_to_text(self)})"


def scalar(field: str = REAL) -> SpaceDescriptor:
    return SpaceDescriptor(None, (), field)


def lp(p: float, dim: int, field: str = REAL) -> SpaceDescriptor:
    """The flat space lp^dim.  At dim = 1 every exponent gives the same
    (scalar) space, so the leaf is returned and text round-trips stay exact."""
    if dim < 1:
        raise SpaceError("dim must be >= 1")
    if not (1.0 <= float(p)):
        raise SpaceError(f"exponent must lie in [1, inf], got {p!r}")
    if dim == 1:
        return scalar(field)
    return SpaceDescriptor(float(p), tuple(scalar(field) for _ in range(dim)), field)


def psum(p: float, children, field: str | None = None) -> SpaceDescriptor:
    children = tuple(children)
    if not children:
        raise SpaceError("psum needs at least one child")
    if field is None:
        field = children[0].field
    children = tuple(_refield(c, field) for c in children)
    return SpaceDescriptor(float(p), children, field)


def _refield(desc: SpaceDescriptor, field: str) -> SpaceDescriptor:
    if desc.field == field:
        return desc
    return SpaceDescriptor(desc.p, tuple(_refield(c, field) for c in desc.children), field)


def tower(p_list, block_dims=None, field: str = REAL) -> SpaceDescriptor:
    """Mixed-exponent nesting X_{n+1} = X_n (+)_{p_n} Y_{n+1}.

    ``p_list[k]`` is the exponent joining level k+1 to level k+2; blocks
    default to scalar lines.  Returns the outermost level.
    """
    dims = list(block_dims) if block_dims is not None else [1] * (len(p_list) + 1)
    if len(dims) != len(p_list) + 1:
        raise SpaceError("need one more block than exponents")
    x = lp(2, dims[0], field) if dims[0] > 1 else scalar(field)
    for p, d in zip(p_list, dims[1:]):
        y = lp(2, d, field) if d > 1 else scalar(field)
        x = psum(p, (x, y), field)
    return x


def tower_levels(desc: SpaceDescriptor) -> list[SpaceDescriptor]:
    """Levels of a first-child nested tower, innermost first (root last)."""
    levels = [desc]
    node = desc
    while not node.is_leaf and not node.children[0].is_leaf:
        node = node.children[0]
        levels.append(node)
    levels.reverse()
    return levels


# ---------------------------------------------------------------------------
# norms and duality
# ---------------------------------------------------------------------------

def check_vector(desc: SpaceDescriptor, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v)
    if v.shape != (desc.total_dim,):
        raise DescriptorMismatch(
            f"vector of shape {v.shape} on a space of dimension {desc.total_dim}")
    if desc.field == REAL and np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise DescriptorMismatch("complex coordinates on a real descriptor")
        v = v.real
    return v.astype(desc.dtype, copy=False)


def norm(desc: SpaceDescriptor, v: np.ndarray) -> float:
    """Recursive p-sum norm of ``v`` on ``desc``."""
    v = check_vector(desc, v)
    return _node_norm(desc, v)


def _combine(p: float, block_norms: np.ndarray) -> float:
    if p == math.inf:
        return float(np.max(block_norms))
    if p == 1:
        return float(np.sum(block_norms))
    return float(np.sum(block_norms ** p) ** (1.0 / p))


def _node_norm(desc: SpaceDescriptor, v: np.ndarray) -> float:
    if desc.is_leaf:
        return float(abs(v[0]))
    if desc.is_flat:
        a = np.abs(v)
        return _combine(desc.p, a)
    ns = np.array([_node_norm(c, v[o:o + d]) for c, (o, d) in
                   zip(desc.children, desc.child_spans)])
    return _combine(desc.p, ns)


def dual_descriptor(desc: SpaceDescriptor) -> SpaceDescriptor:
    """Same tree shape with every exponent conjugated; an involution."""
    if desc.is_leaf:
        return desc
    return SpaceDescriptor(conjugate_exponent(desc.p),
                           tuple(dual_descriptor(c) for c in desc.children),
                           desc.field)


def dual_norm(desc: SpaceDescriptor, f: np.ndarray) -> float:
    """Norm of a functional on ``desc``, i.e. the primal norm on the
    conjugate-exponent tree."""
    return norm(dual_descriptor(desc), f)


def eval_pair(f: np.ndarray, v: np.ndarray):
    """Bilinear dual pairing sum(f_i v_i); no conjugation."""
    f = np.asarray(f)
    v = np.asarray(v)
    if f.shape != v.shape:
        raise DescriptorMismatch("functional/vector length mismatch")
    val = complex(np.dot(f, v))
    return val if val.imag != 0 else val.real


def _sign(z):
    a = abs(z)
    return z / a if a > 0 else type(z)(1)


def norming_functional(desc: SpaceDescriptor, x: np.ndarray) -> np.ndarray:
    """Canonical norming functional: unit dual norm with f . x = ||x||.

    Smooth blocks use the weight ||x_s||^{p-1} / ||x||^{p-1}; p = 1 puts the
    block functional on every nonzero block (zero on zero blocks); p = inf
    puts full weight on the lowest-index max-norm block.  Complex leaves use
    conj(x_i)/|x_i| so the pairing with x comes out real.
    """
    x = check_vector(desc, x)
    n = _node_norm(desc, x)
    if n == 0.0:
        raise DegenerateInput("norming functional of the zero vector")
    f, _ = _norming(desc, x)
    return f


def _norming(desc: SpaceDescriptor, x: np.ndarray):
    """Return (f, n) with n the block norm and, when n > 0, f of unit dual
    norm on the block satisfying f . x = n.  Zero blocks yield f = 0."""
    if desc.is_leaf:
        n = float(abs(x[0]))
        if n == 0.0:
            return np.zeros(1, dtype=desc.dtype), 0.0
        f = np.array([np.conj(x[0]) / n], dtype=desc.dtype)
        return f, n
    parts = [_norming(c, x[o:o + d]) for c, (o, d) in
             zip(desc.children, desc.child_spans)]
    ns = np.array([p[1] for p in parts])
    total = _combine(desc.p, ns)
    f = np.zeros(desc.total_dim, dtype=desc.dtype)
    if total == 0.0:
        return f, 0.0
    if desc.p == 1:
        for (o, d), (fs, nb) in zip(desc.child_spans, parts):
            if nb > 0:
                f[o:o + d] = fs
    elif desc.p == math.inf:
        i = int(np.argmax(ns))          # lowest index wins ties
        o, d = desc.child_spans[i]
        f[o:o + d] = parts[i][0]
    else:
        for (o, d), (fs, nb) in zip(desc.child_spans, parts):
            if nb > 0:
                f[o:o + d] = (nb / total) ** (desc.p - 1.0) * fs
    return f, total


@dataclass(frozen=True)
class NormingPair:
    """Element of Pi(X): unit vector, unit functional, f . x = 1."""

    x: np.ndarray
    xstar: np.ndarray
    slack: float

    @staticmethod
    def at(desc: SpaceDescriptor, x: np.ndarray) -> "NormingPair":
        """Norming pair through the canonical duality map at x / ||x||."""
        x = check_vector(desc, x)
        n = _node_norm(desc, x)
        if n == 0.0:
            raise DegenerateInput("norming pair at the zero vector")
        u = x / n
        f = norming_functional(desc, u)
        slack = max(abs(_node_norm(desc, u) - 1.0),
                    abs(norm(dual_descriptor(desc), f) - 1.0),
                    abs(eval_pair(f, u) - 1.0))
        return NormingPair(u, f, float(slack))


def projection_matrix(desc: SpaceDescriptor, keep) -> np.ndarray:
    """0/1 diagonal matrix preserving the kept top-level blocks."""
    keep = sorted(set(keep))
    if desc.is_leaf:
        raise SpaceError("coordinate projection needs a PSum root")
    if not keep:
        raise DegenerateInput("empty keep-set")
    if keep[0] < 0 or keep[-1] >= len(desc.children):
        raise SpaceError(f"block index out of range 0..{len(desc.children) - 1}")
    diag = np.zeros(desc.total_dim, dtype=desc.dtype)
    for i in keep:
        o, d = desc.child_spans[i]
        diag[o:o + d] = 1.0
    return np.diag(diag)


def unit_sphere_sample(desc: SpaceDescriptor, rng: np.random.Generator) -> np.ndarray:
    """Gaussian direction normalized to ||x|| = 1; almost surely all
    coordinates are nonzero, so samples lie in the dense smooth-point set."""
    while True:
        g = rng.standard_normal(desc.total_dim)
        if desc.field == COMPLEX:
            g = g + 1j * rng.standard_normal(desc.total_dim)
        if np.all(g != 0):
            break
    return g / _node_norm(desc, g.astype(desc.dtype))


# ---------------------------------------------------------------------------
# text format:  lp(p=2,dim=3)  |  psum(p=inf,[lp(p=1,dim=2),lp(p=2,dim=1)])
# field selected by field=real|complex at the root.
# ---------------------------------------------------------------------------

def _fmt_p(p: float) -> str:
    if p == math.inf:
        return "inf"
    if p == int(p):
        return str(int(p))
    return repr(p)


def descriptor_to_text(desc: SpaceDescriptor, root: bool = True) -> str:
    suffix = f",field={desc.field}" if root and desc.field != REAL else ""
    if desc.is_leaf:
        return f"lp(p=2,dim=1{suffix})"
    if desc.is_flat:
        return f"lp(p={_fmt_p(desc.p)},dim={desc.total_dim}{suffix})"
    inner = ",".join(descriptor_to_text(c, root=False) for c in desc.children)
    return f"psum(p={_fmt_p(desc.p)},[{inner}]{suffix})"


class _Parser:
    def __init__(self, text: str):
        self.text = text.replace(" ", "")
        self.i = 0

    def error(self, what: str):
        raise SpaceError(f"descriptor parse error at position {self.i}: {what} "
                         f"(in {self.text!r})")

    def expect(self, tok: str):
        if not self.text.startswith(tok, self.i):
            self.error(f"expected {tok!r}")
        self.i += len(tok)

    def peek(self, tok: str) -> bool:
        return self.text.startswith(tok, self.i)

    def number(self) -> float:
        if self.peek("inf"):
            self.i += 3
            return math.inf
        j = self.i
        while j < len(self.text) and (self.text[j].isdigit() or self.text[j] in ".eE+-"):
            j += 1
        if j == self.i:
            self.error("expected a number")
        try:
            val = float(self.text[self.i:j])
        except ValueError:
            self.error(f"bad number {self.text[self.i:j]!r}")
        self.i = j
        return val

    def field_opt(self) -> str | None:
        if self.peek(",field="):
            self.i += len(",field=")
            for f in (REAL, COMPLEX):
                if self.peek(f):
                    self.i += len(f)
                    return f
            self.error("field must be real or complex")
        return None

    def space(self, field: str):
        if self.peek("lp("):
            self.expect("lp(")
            self.expect("p=")
            p = self.number()
            self.expect(",dim=")
            dim = self.number()
            if dim != int(dim) or dim < 1:
                self.error("dim must be a positive integer")
            f = self.field_opt() or field
            self.expect(")")
            return lp(p, int(dim), f)
        if self.peek("psum("):
            self.expect("psum(")
            self.expect("p=")
            p = self.number()
            self.expect(",[")
            children = [self.space(field)]
            while self.peek(","):
                if self.peek(",field="):
                    break
                self.expect(",")
                children.append(self.space(field))
            self.expect("]")
            f = self.field_opt() or field
            self.expect(")")
            return psum(p, children, f)
        self.error("expected lp( or psum(")


def parse_descriptor(text: str, field: str | None = None) -> SpaceDescriptor:
    """Parse the descriptor text format; ``field`` overrides the default
    real field but not an explicit field= in the text."""
    parser = _Parser(text)
    # peek the trailing root field first so children inherit it
    root_field = field or REAL
    if ",field=complex" in parser.text:
        root_field = COMPLEX
    elif ",field=real" in parser.text:
        root_field = REAL
    desc = parser.space(root_field)
    if parser.i != len(parser.text):
        parser.error("trailing characters")
    return _refield(desc, root_field)
