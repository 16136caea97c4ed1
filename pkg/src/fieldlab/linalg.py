"""Complex linear algebra over finite spaces with diagonal weighted inner products.

Every vector space carries a basis label and the diagonal of its Gram matrix, so
``<u, v> = sum(conj(u) * gram * v)``.  Operators are stored either as dense
``ndarray`` or as ``scipy.sparse`` CSR arrays; the two representations are
interchangeable for every operation here.

Operators built on a particle-number-truncated Fock basis may carry a ``lost``
mask over their domain: ``lost[c]`` is set when the image of basis column ``c``
had components outside the retained basis and was cut.  The mask propagates
through composition, sums and tensor products so that truncation is never
silent.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ShapeError

__all__ = [
    "Space",
    "SCALARS",
    "tensor_space",
    "StateVec",
    "LinOp",
    "dagger",
    "tensor",
    "compose",
    "comm",
    "opnorm_max",
    "deviation",
    "fit_scalar",
    "identity",
    "zeros",
    "swap",
    "ket",
    "bra",
    "inner",
    "root_of_unity",
    "unit_roots",
    "to_coo_text",
    "from_coo_text",
]


@dataclass(frozen=True, eq=False)
class Space:
    """A finite-dimensional space with an orthogonal coordinate basis.

    ``gram`` holds the squared norms of the coordinate basis vectors.
    """

    label: str
    gram: np.ndarray

    @classmethod
    def uniform(cls, label: str, dim: int, weight: float = 1.0) -> "Space":
        return cls(label, np.full(dim, float(weight)))

    @property
    def dim(self) -> int:
        return int(self.gram.shape[0])

    def compatible(self, other: "Space") -> bool:
        return self.dim == other.dim and np.allclose(self.gram, other.gram, rtol=1e-12, atol=0)

    def __repr__(self) -> str:
        return f"Space({self.label!r}, dim={self.dim})"


SCALARS = Space("C", np.ones(1))


def tensor_space(*spaces: Space) -> Space:
    label = "⊗".join(s.label for s in spaces)
    gram = functools.reduce(np.kron, [s.gram for s in spaces])
    return Space(label, gram)


def _check(a: Space, b: Space, what: str) -> None:
    if not a.compatible(b):
        raise ShapeError(f"{what}: {a!r} does not match {b!r}")


class StateVec:
    """A vector in a weighted space.  ``truncated`` records a cutoff hit."""

    __slots__ = ("space", "data", "truncated")

    def __init__(self, space: Space, data, truncated: bool = False):
        data = np.asarray(data, dtype=complex).reshape(-1)
        if data.shape[0] != space.dim:
            raise ShapeError(f"vector of length {data.shape[0]} in {space!r}")
        self.space = space
        self.data = data
        self.truncated = bool(truncated)

    def __add__(self, other: "StateVec") -> "StateVec":
        _check(self.space, other.space, "add")
        return StateVec(self.space, self.data + other.data, self.truncated or other.truncated)

    def __sub__(self, other: "StateVec") -> "StateVec":
        return self + (-1) * other

    def __mul__(self, c) -> "StateVec":
        return StateVec(self.space, c * self.data, self.truncated)

    __rmul__ = __mul__

    def __neg__(self) -> "StateVec":
        return (-1) * self

    def norm2(self) -> float:
        return float(np.real(inner(self, self)))

    def __repr__(self) -> str:
        return f"StateVec({self.space.label!r}, dim={self.space.dim})"


def inner(f: StateVec, g: StateVec) -> complex:
    """Weighted inner product, conjugate-linear in ``f``."""
    _check(f.space, g.space, "inner")
    return complex(np.sum(np.conj(f.data) * f.space.gram * g.data))


class LinOp:
    """A linear map ``dom -> cod`` stored as a dense or CSR matrix."""

    __slots__ = ("mat", "dom", "cod", "lost")

    def __init__(self, mat, dom: Space, cod: Space, lost=None):
        if sp.issparse(mat):
            mat = sp.csr_array(mat, dtype=complex)
        else:
            mat = np.asarray(mat, dtype=complex)
            if mat.ndim != 2:
                raise ShapeError("operator matrix must be 2-dimensional")
        if mat.shape != (cod.dim, dom.dim):
            raise ShapeError(f"matrix shape {mat.shape} for {dom!r} -> {cod!r}")
        if lost is not None:
            lost = np.asarray(lost, dtype=bool)
            if not lost.any():
                lost = None
        self.mat = mat
        self.dom = dom
        self.cod = cod
        self.lost = lost

    @property
    def shape(self):
        return self.mat.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.mat)

    @property
    def truncated(self) -> bool:
        return self.lost is not None

    def dense(self) -> np.ndarray:
        return self.mat.toarray() if self.is_sparse else self.mat

    def sparse(self):
        return self.mat if self.is_sparse else sp.csr_array(self.mat)

    def as_dense(self) -> "LinOp":
        return LinOp(self.dense(), self.dom, self.cod, self.lost)

    def as_sparse(self) -> "LinOp":
        return LinOp(self.sparse(), self.dom, self.cod, self.lost)

    def entry(self, i: int, j: int) -> complex:
        return complex(self.mat[i, j])

    def __matmul__(self, other):
        if isinstance(other, StateVec):
            _check(self.dom, other.space, "apply")
            hit = self.lost is not None and bool(np.any(self.lost & (other.data != 0)))
            out = self.mat @ other.data
            return StateVec(self.cod, np.asarray(out).reshape(-1), other.truncated or hit)
        return compose(self, other)

    def __add__(self, other: "LinOp") -> "LinOp":
        _check(self.dom, other.dom, "add (domain)")
        _check(self.cod, other.cod, "add (codomain)")
        return LinOp(_msum(self.mat, other.mat), self.dom, self.cod, _or(self.lost, other.lost))

    def __sub__(self, other: "LinOp") -> "LinOp":
        return self + (-1) * other

    def __mul__(self, c) -> "LinOp":
        if isinstance(c, (LinOp, StateVec)):
            return NotImplemented
        return LinOp(self.mat * complex(c), self.dom, self.cod, self.lost)

    __rmul__ = __mul__

    def __neg__(self) -> "LinOp":
        return (-1) * self

    def __repr__(self) -> str:
        kind = "sparse" if self.is_sparse else "dense"
        return f"LinOp({self.dom.label} -> {self.cod.label}, {self.shape}, {kind})"


def _msum(a, b):
    if sp.issparse(a) and sp.issparse(b):
        return (a + b).tocsr()
    return _as_array(a) + _as_array(b)


def _as_array(m):
    return m.toarray() if sp.issparse(m) else m


def _or(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a | b


def compose(A: LinOp, B: LinOp) -> LinOp:
    """``A ∘ B``."""
    _check(A.dom, B.cod, "compose")
    mat = A.mat @ B.mat
    if sp.issparse(mat):
        mat = mat.tocsr()
    lost = B.lost
    if A.lost is not None:
        absB = abs(B.mat)
        reach = np.asarray(absB.T @ A.lost.astype(float)).reshape(-1) > 0
        lost = _or(lost, reach)
    return LinOp(mat, B.dom, A.cod, lost)


def dagger(A: LinOp) -> LinOp:
    """Adjoint with respect to the weighted inner products of domain and codomain.

    A truncated operator has unknown matrix elements from outside the retained
    basis, so every column of its adjoint is marked lost.
    """
    g_dom, g_cod = A.dom.gram, A.cod.gram
    if A.is_sparse:
        mat = sp.diags_array(1.0 / g_dom) @ A.mat.conj().T @ sp.diags_array(g_cod)
        mat = mat.tocsr()
    else:
        mat = (A.mat.conj().T * g_cod[None, :]) / g_dom[:, None]
    lost = None if A.lost is None else np.ones(A.cod.dim, dtype=bool)
    return LinOp(mat, A.cod, A.dom, lost)


def tensor(*ops: LinOp) -> LinOp:
    return functools.reduce(_tensor2, ops)


def _tensor2(A: LinOp, B: LinOp) -> LinOp:
    if A.is_sparse or B.is_sparse:
        mat = sp.kron(A.sparse(), B.sparse(), format="csr")
    else:
        mat = np.kron(A.mat, B.mat)
    lost = None
    if A.lost is not None or B.lost is not None:
        la = A.lost if A.lost is not None else np.zeros(A.dom.dim, dtype=bool)
        lb = B.lost if B.lost is not None else np.zeros(B.dom.dim, dtype=bool)
        lost = np.logical_or.outer(la, lb).reshape(-1)
    return LinOp(mat, tensor_space(A.dom, B.dom), tensor_space(A.cod, B.cod), lost)


def comm(A: LinOp, B: LinOp) -> LinOp:
    """``AB - BA``."""
    return compose(A, B) - compose(B, A)


def opnorm_max(A) -> float:
    """Largest absolute matrix entry."""
    m = A.mat if isinstance(A, LinOp) else A
    if sp.issparse(m):
        return float(np.abs(m.data).max()) if m.nnz else 0.0
    m = np.asarray(m)
    return float(np.abs(m).max()) if m.size else 0.0


def deviation(A: LinOp, B: LinOp) -> float:
    return opnorm_max(A - B)


def fit_scalar(lhs, rhs):
    """Least-squares ``lam`` minimising ``|lhs - lam * rhs|``; returns ``(lam, max residual)``."""
    L = _flat(lhs)
    R = _flat(rhs)
    rr = np.vdot(R, R)
    lam = complex(np.vdot(R, L) / rr) if abs(rr) > 0 else 0j
    return lam, float(np.abs(L - lam * R).max()) if L.size else 0.0


def _flat(x):
    if isinstance(x, LinOp):
        x = x.mat
    elif isinstance(x, StateVec):
        x = x.data
    return np.asarray(_as_array(x)).reshape(-1)


def identity(space: Space, sparse: bool = True) -> LinOp:
    if sparse:
        return LinOp(sp.eye_array(space.dim, dtype=complex, format="csr"), space, space)
    return LinOp(np.eye(space.dim, dtype=complex), space, space)


def zeros(dom: Space, cod: Space, sparse: bool = True) -> LinOp:
    if sparse:
        return LinOp(sp.csr_array((cod.dim, dom.dim), dtype=complex), dom, cod)
    return LinOp(np.zeros((cod.dim, dom.dim), dtype=complex), dom, cod)


def swap(V: Space, W: Space) -> LinOp:
    """The symmetry ``V⊗W -> W⊗V``."""
    dv, dw = V.dim, W.dim
    src = np.arange(dv * dw)
    i, j = np.divmod(src, dw)
    dst = j * dv + i
    mat = sp.csr_array((np.ones(dv * dw, dtype=complex), (dst, src)), shape=(dv * dw, dv * dw))
    return LinOp(mat, tensor_space(V, W), tensor_space(W, V))


def ket(v: StateVec) -> LinOp:
    """The state ``v`` as a map ``C -> V``."""
    return LinOp(v.data.reshape(-1, 1), SCALARS, v.space)


def bra(v: StateVec) -> LinOp:
    """The effect ``<v|`` as a map ``V -> C``."""
    return dagger(ket(v))


@functools.lru_cache(maxsize=None)
def unit_roots(M: int) -> np.ndarray:
    """``exp(2 pi i r / M)`` for ``r = 0..M-1``, read-only."""
    r = np.arange(M)
    table = np.cos(2 * np.pi * r / M) + 1j * np.sin(2 * np.pi * r / M)
    table[0] = 1.0
    table.setflags(write=False)
    return table


def root_of_unity(r, M: int):
    """``exp(2 pi i r / M)`` for integer (array) ``r``, looked up from a fixed table."""
    return unit_roots(M)[np.mod(r, M)]


def to_coo_text(A: LinOp, name: str = "") -> str:
    """Coordinate-list dump: a header line then ``row col re im`` per nonzero."""
    coo = A.sparse().tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [f"# {name} {A.cod.dim}x{A.dom.dim} cod={A.cod.label} dom={A.dom.label}".rstrip()]
    lines.append("row,col,re,im")
    for t in order:
        v = coo.data[t]
        lines.append(f"{coo.row[t]},{coo.col[t]},{float(v.real)!r},{float(v.imag)!r}")
    return "\n".join(lines) + "\n"


def from_coo_text(text: str, dom: Space, cod: Space) -> LinOp:
    rows, cols, vals = [], [], []
    for line in text.splitlines():
        if not line or line.startswith("#") or line.startswith("row"):
            continue
        r, c, re, im = line.split(",")
        rows.append(int(r))
        cols.append(int(c))
        vals.append(complex(float(re), float(im)))
    mat = sp.csr_array((np.array(vals, dtype=complex), (rows, cols)), shape=(cod.dim, dom.dim))
    return LinOp(mat, dom, cod)
