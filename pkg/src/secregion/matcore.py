"""Dense symmetric-matrix numerics for small covariance algebra.

Everything in this package runs on real symmetric matrices of dimension
up to ~8 (input covariances, noise covariances, channel grams, KKT
multipliers).  This module provides the eigendecomposition and the
handful of derived operations the rest of the package needs:

- ``sym_eig``      eigendecomposition via cyclic Jacobi rotations
- ``logdet``       log-determinant of a positive definite matrix (nats)
- ``is_psd``       positive-semidefinite test with explicit tolerance
- ``loewner_leq``  partial-order test A <= B (B - A PSD)
- ``psd_project``  Frobenius-nearest PSD matrix (eigenvalue clipping)
- ``sym_inverse``  inverse of a positive definite matrix

Jacobi is exact to ~1e-15 at these sizes and has no dependency beyond
numpy array storage.  Positive-definiteness uses one shared relative
tolerance ``TOL_PD`` so every caller agrees on what counts as singular.

All values are immutable after construction and all functions are pure,
so everything here is safe to share between concurrent tasks.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimMismatch, InvalidMatrix, NotPositiveDefinite

# Shared relative cutoff for "strictly positive definite".
TOL_PD = 1e-12

_SWEEP_LIMIT = 64
_OFF_STOP = 1e-14


class SymMatrix:
    """Immutable real symmetric matrix.

    Construction symmetrizes the input via (A + A^T)/2 so that storage is
    exactly symmetric; downstream algebraic identities are only meaningful
    on exactly symmetric entries.  Entries must be finite.
    """

    __slots__ = ("_m",)

    def __init__(self, entries):
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidMatrix(f"expected a square matrix, got shape {m.shape}")
        if not np.isfinite(m).all():
            raise InvalidMatrix("matrix entries must be finite")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        self._m = m

    @classmethod
    def _wrap(cls, m):
        # Internal: adopt an already-symmetric float array without checks.
        self = object.__new__(cls)
        m.setflags(write=False)
        self._m = m
        return self

    @classmethod
    def identity(cls, dim):
        return cls._wrap(np.eye(dim))

    @classmethod
    def zero(cls, dim):
        return cls._wrap(np.zeros((dim, dim)))

    @classmethod
    def diagonal(cls, values):
        return cls._wrap(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self):
        return self._m.shape[0]

    @property
    def array(self):
        """Read-only (dim, dim) view of the entries."""
        return self._m

    def max_abs(self):
        return float(np.max(np.abs(self._m)))

    def __add__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise DimMismatch(f"dim {self.dim} vs {other.dim}")
        return SymMatrix._wrap(self._m + other._m)

    def __sub__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise DimMismatch(f"dim {self.dim} vs {other.dim}")
        return SymMatrix._wrap(self._m - other._m)

    def __mul__(self, scalar):
        return SymMatrix._wrap(self._m * float(scalar))

    __rmul__ = __mul__

    def __repr__(self):
        return f"SymMatrix({self._m.tolist()!r})"


def _eig2(m):
    # 2x2 case: a single Jacobi rotation diagonalizes exactly.
    app = m[0, 0]
    aqq = m[1, 1]
    apq = m[0, 1]
    if apq == 0.0:
        if app <= aqq:
            return np.array([app, aqq]), np.eye(2)
        return np.array([aqq, app]), np.array([[0.0, 1.0], [1.0, 0.0]])
    theta = (aqq - app) / (2.0 * apq)
    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    w1 = app - t * apq
    w2 = aqq + t * apq
    if w1 <= w2:
        return np.array([w1, w2]), np.array([[c, s], [-s, c]])
    return np.array([w2, w1]), np.array([[s, c], [c, -s]])


def _jacobi_eig(arr):
    """Cyclic Jacobi eigendecomposition of a symmetric float array.

    Returns (eigenvalues ascending, orthonormal eigenvector columns).
    """
    n = arr.shape[0]
    if n == 1:
        return np.array([arr[0, 0]]), np.ones((1, 1))
    if n == 2:
        return _eig2(arr)
    m = np.array(arr, dtype=float)
    v = np.eye(n)
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return np.zeros(n), v
    stop = _OFF_STOP * scale
    skip = 0.1 * stop
    for _ in range(_SWEEP_LIMIT):
        off = 0.0
        for i in range(n - 1):
            row = np.max(np.abs(m[i, i + 1:]))
            if row > off:
                off = row
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                colp = m[:, p].copy()
                colq = m[:, q].copy()
                m[:, p] = c * colp - s * colq
                m[:, q] = s * colp + c * colq
                rowp = m[p, :].copy()
                rowq = m[q, :].copy()
                m[p, :] = c * rowp - s * rowq
                m[q, :] = s * rowp + c * rowq
                m[p, q] = 0.0
                m[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    w = np.diag(m).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def sym_eig(a: SymMatrix):
    """Eigendecomposition A = V diag(w) V^T with w ascending."""
    return _jacobi_eig(a.array)


def _pd_floor(w):
    # Smallest eigenvalue a matrix with spectrum w may have and still count
    # as positive definite: TOL_PD relative to the spectral magnitude.
    return TOL_PD * max(1.0, float(np.max(np.abs(w))))


def _logdet_from_w(w):
    if w[0] <= _pd_floor(w):
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    return float(np.sum(np.log(w)))


def logdet(a: SymMatrix):
    """Natural-log determinant of a positive definite matrix."""
    w, _ = _jacobi_eig(a.array)
    return _logdet_from_w(w)


def is_psd(a: SymMatrix, tol: float):
    """True iff the smallest eigenvalue is >= -tol."""
    w, _ = _jacobi_eig(a.array)
    return bool(w[0] >= -tol)


def min_eig(a: SymMatrix):
    """Smallest eigenvalue (convenience for dominance/activity checks)."""
    w, _ = _jacobi_eig(a.array)
    return float(w[0])


def loewner_leq(a: SymMatrix, b: SymMatrix, tol: float):
    """Partial-order test A <= B, i.e. B - A PSD within tol."""
    if a.dim != b.dim:
        raise DimMismatch(f"dim {a.dim} vs {b.dim}")
    return is_psd(b - a, tol)


def psd_project(a: SymMatrix):
    """Frobenius-nearest PSD matrix: clip negative eigenvalues to zero."""
    w, v = _jacobi_eig(a.array)
    if w[0] >= 0.0:
        return a
    return SymMatrix._wrap(_clip_from_eig(w, v))


def _psd_clip(arr):
    w, v = _jacobi_eig(arr)
    if w[0] >= 0.0:
        return arr
    return _clip_from_eig(w, v)


def _clip_from_eig(w, v):
    m = (v * np.maximum(w, 0.0)) @ v.T
    return 0.5 * (m + m.T)


def sym_inverse(a: SymMatrix):
    """Inverse of a positive definite matrix, symmetrized."""
    return SymMatrix._wrap(_inv_pd(a.array))


def _inv_pd(arr):
    w, v = _jacobi_eig(arr)
    if w[0] <= _pd_floor(w):
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    m = (v / w) @ v.T
    return 0.5 * (m + m.T)
