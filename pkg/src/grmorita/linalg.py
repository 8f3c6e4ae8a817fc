"""Dense exact linear algebra over prime fields F_p.

Matrices are plain ``numpy`` integer arrays with entries in ``[0, p)``; the
modulus travels alongside as an explicit argument.  Vectors are columns
whenever a matrix acts on them (``m @ v``), and rows when they are stacked
as a spanning set of a :class:`Subspace`.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

__all__ = [
    "DimensionMismatch",
    "as_matrix",
    "matmul",
    "rref",
    "rref_pivots",
    "rank",
    "kernel",
    "image",
    "solve",
    "inverse",
    "Subspace",
    "CoordinateSystem",
]

_INT64_LIMIT = 2**63 - 1


class DimensionMismatch(ValueError):
    """Operands live in ambient spaces of different dimension."""


def as_matrix(m, p: int, shape: Optional[tuple] = None) -> np.ndarray:
    a = np.array(m, dtype=np.int64)
    if shape is not None:
        a = a.reshape(shape)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    return a % p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """``a @ b mod p`` without int64 overflow for large moduli."""
    inner = a.shape[-1] if a.ndim else 1
    if (p - 1) ** 2 * max(inner, 1) < _INT64_LIMIT:
        return (a @ b) % p
    r = (a.astype(object) @ b.astype(object)) % p
    return r.astype(np.int64)


_SMALL = 400


def _rref_small(a: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """List-based elimination; numpy call overhead dominates for tiny matrices."""
    rows, cols = a.shape
    m = a.tolist()
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        k = next((i for i in range(r, rows) if m[i][c]), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        row = m[r]
        lead = row[c]
        if lead != 1:
            inv = pow(lead, -1, p)
            row = m[r] = [x * inv % p for x in row]
        for i in range(rows):
            f = m[i][c]
            if i != r and f:
                mi = m[i]
                m[i] = [(x - f * y) % p for x, y in zip(mi, row)]
        pivots.append(c)
        r += 1
    return np.array(m, dtype=np.int64).reshape(rows, cols), tuple(pivots)


def rref_pivots(m, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row-echelon form and pivot columns (zero rows kept at the bottom)."""
    a = np.array(m, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    rows, cols = a.shape
    if rows * cols <= _SMALL and p <= 3037000499:
        return _rref_small(a, p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r] = (a[r] * pow(lead, -1, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            if p > 3037000499:  # (p-1)^2 no longer fits in int64
                upd = (np.outer(col[hit].astype(object), a[r].astype(object)) % p).astype(np.int64)
            else:
                upd = np.outer(col[hit], a[r]) % p
            a[hit] = (a[hit] - upd) % p
        pivots.append(c)
        r += 1
    return a, tuple(pivots)


def rref(m, p: int) -> np.ndarray:
    return rref_pivots(m, p)[0]


def rank(m, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref_pivots(m, p)[1])


def kernel(m, p: int) -> "Subspace":
    """Right null space ``{v : m v = 0}``."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return Subspace.full(cols, p)
    r, piv = rref_pivots(m, p)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for row, c in enumerate(piv):
            basis[t, c] = (-r[row, f]) % p
    return Subspace(basis, p, cols)


def image(m, p: int) -> "Subspace":
    """Column space of ``m`` as a subspace of F_p^{rows}."""
    m = np.asarray(m, dtype=np.int64)
    return Subspace(m.T, p, m.shape[0])


def solve(m, rhs, p: int) -> Optional[np.ndarray]:
    """Some ``v`` with ``m v = rhs``, or ``None`` when the system is inconsistent."""
    m = np.asarray(m, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1)
    rows, cols = m.shape
    if rhs.shape[0] != rows:
        raise DimensionMismatch(f"rhs has length {rhs.shape[0]}, expected {rows}")
    aug = np.concatenate([m.reshape(rows, cols), rhs.reshape(rows, 1)], axis=1)
    r, piv = rref_pivots(aug, p)
    if cols in piv:
        return None
    v = np.zeros(cols, dtype=np.int64)
    for row, c in enumerate(piv):
        v[c] = r[row, cols]
    return v


def inverse(m, p: int) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    if m.shape != (n, n):
        raise DimensionMismatch("inverse of a non-square matrix")
    r, piv = rref_pivots(np.concatenate([m, np.eye(n, dtype=np.int64)], axis=1), p)
    if piv[:n] != tuple(range(n)) or len(piv) < n:
        raise ValueError("matrix is singular")
    return r[:, n:].copy()


class Subspace:
    """A subspace of F_p^n stored by its canonical RREF basis.

    Two equal subspaces always carry identical ``basis`` arrays, so equality
    and hashing are structural.
    """

    __slots__ = ("basis", "pivots", "p", "ambient_dim", "_key")

    def __init__(self, vectors, p: int, ambient_dim: int):
        vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, ambient_dim) if ambient_dim else np.zeros((0, 0), dtype=np.int64)
        if vecs.shape[0] == 0 or ambient_dim == 0:
            basis = np.zeros((0, ambient_dim), dtype=np.int64)
            piv: tuple[int, ...] = ()
        else:
            r, piv = rref_pivots(vecs, p)
            basis = r[: len(piv)].copy()
        basis.setflags(write=False)
        self.basis = basis
        self.pivots = piv
        self.p = p
        self.ambient_dim = ambient_dim
        self._key = (p, ambient_dim, basis.tobytes())

    @classmethod
    def zero(cls, n: int, p: int) -> "Subspace":
        return cls(np.zeros((0, n), dtype=np.int64), p, n)

    @classmethod
    def full(cls, n: int, p: int) -> "Subspace":
        return cls(np.eye(n, dtype=np.int64), p, n)

    @classmethod
    def span(cls, vectors: Iterable, p: int, n: int) -> "Subspace":
        vecs = [np.asarray(v, dtype=np.int64).reshape(-1) for v in vectors]
        if not vecs:
            return cls.zero(n, p)
        return cls(np.stack(vecs), p, n)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def _check(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim or self.p != other.p:
            raise DimensionMismatch(
                f"ambient F_{self.p}^{self.ambient_dim} vs F_{other.p}^{other.ambient_dim}"
            )

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, p={self.p})"

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return Subspace(np.concatenate([self.basis, other.basis]), self.p, self.ambient_dim)

    def annihilator(self) -> "Subspace":
        """``{w : <v, w> = 0 for all v}`` under the standard dot product."""
        if self.dim == 0:
            return Subspace.full(self.ambient_dim, self.p)
        return kernel(self.basis, self.p)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.p)
        duals = np.concatenate([self.annihilator().basis, other.annihilator().basis])
        if duals.shape[0] == 0:
            return Subspace.full(self.ambient_dim, self.p)
        return kernel(duals, self.p)

    intersection = __and__

    def reduce(self, v) -> np.ndarray:
        """``v`` minus its component along the basis; zero iff ``v`` is a member."""
        v = np.array(v, dtype=np.int64).reshape(-1) % self.p
        for row, c in enumerate(self.pivots):
            if v[c]:
                v = (v - v[c] * self.basis[row]) % self.p
        return v

    def reduce_many(self, vs: np.ndarray) -> np.ndarray:
        """Row-wise :meth:`reduce` on a stack of row vectors."""
        vs = np.array(vs, dtype=np.int64) % self.p
        for row, c in enumerate(self.pivots):
            coef = vs[:, c].copy()
            hit = np.flatnonzero(coef)
            if hit.size:
                vs[hit] = (vs[hit] - np.outer(coef[hit], self.basis[row])) % self.p
        return vs

    def member(self, v) -> bool:
        return not self.reduce(v).any()

    def __contains__(self, v) -> bool:
        return self.member(v)

    def contains(self, other: "Subspace") -> bool:
        self._check(other)
        if other.dim == 0:
            return True
        return not self.reduce_many(other.basis).any()

    def __le__(self, other: "Subspace") -> bool:
        return other.contains(self)

    def coords(self, v) -> np.ndarray:
        """Coordinates of a member in the canonical basis (read off the pivots)."""
        v = np.asarray(v, dtype=np.int64).reshape(-1) % self.p
        return v[list(self.pivots)].copy()

    def complement_columns(self) -> tuple[int, ...]:
        piv = set(self.pivots)
        return tuple(c for c in range(self.ambient_dim) if c not in piv)

    def quotient_projection(self) -> np.ndarray:
        """Matrix of F_p^n -> F_p^n / self in the non-pivot coordinates."""
        free = self.complement_columns()
        pr = np.zeros((len(free), self.ambient_dim), dtype=np.int64)
        for t, c in enumerate(free):
            pr[t, c] = 1
        for row, c in enumerate(self.pivots):
            pr[:, c] = (-self.basis[row, list(free)]) % self.p
        return pr

    def quotient_lift(self) -> np.ndarray:
        """Section of :meth:`quotient_projection` by standard basis vectors."""
        free = self.complement_columns()
        lift = np.zeros((self.ambient_dim, len(free)), dtype=np.int64)
        for t, c in enumerate(free):
            lift[c, t] = 1
        return lift


class CoordinateSystem:
    """Coordinates with respect to independent columns of ``basis`` (n x k)."""

    def __init__(self, basis: np.ndarray, p: int):
        basis = np.asarray(basis, dtype=np.int64) % p
        self.basis = basis
        self.p = p
        n, k = basis.shape
        self.k = k
        if k == 0:
            self._rows: list[int] = []
            self._inv = np.zeros((0, 0), dtype=np.int64)
            return
        _, piv = rref_pivots(basis.T, p)
        if len(piv) != k:
            raise ValueError("basis columns are linearly dependent")
        self._rows = list(piv)
        self._inv = inverse(basis[self._rows, :], p)

    def coords_many(self, vs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates for each column of ``vs`` plus a membership mask."""
        vs = np.asarray(vs, dtype=np.int64) % self.p
        if vs.ndim == 1:
            vs = vs.reshape(-1, 1)
        if self.k == 0:
            return np.zeros((0, vs.shape[1]), dtype=np.int64), ~vs.any(axis=0)
        x = matmul(self._inv, vs[self._rows, :], self.p)
        ok = (matmul(self.basis, x, self.p) == vs).all(axis=0)
        return x, ok

    def coords(self, v) -> Optional[np.ndarray]:
        x, ok = self.coords_many(np.asarray(v).reshape(-1, 1))
        return x[:, 0] if ok[0] else None
