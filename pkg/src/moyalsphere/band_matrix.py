"""Truncated matrix-basis algebra for general (non-radial) functions on the Moyal plane.

A function ``sum_{mn} c_mn f_mn`` is stored as the ``N x N`` complex matrix
``c``. Star products are matrix products. The derivatives of the matrix basis
are shifts with square-root weights, which in matrix form read

    del  c = c L - L c,        delbar c = L^T c - c L^T,

with ``L`` the lowering matrix ``L[j+1, j] = sqrt((j+1)/theta)``. Both are
derivations of the truncated algebra, so the Leibniz rule holds exactly.
What truncation breaks is agreement with the infinite series: entries near
the edge miss contributions from levels ``>= N``. Every value carries
``valid``, the size of the leading block that is still trusted. Derivatives
shrink it by one, products and inverses by a caller-chosen margin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diag_series import DiagSeries
from .errors import ParameterMismatch, Singular


@dataclass(frozen=True)
class BandMatrix:
    """Coefficients ``c[m, n]`` of ``sum c_mn f_mn`` truncated to ``N x N``.

    ``theta`` may be negative: the shift weights then become imaginary,
    which is how the curvature pipeline is evaluated at ``-theta``.
    """

    theta: float
    entries: np.ndarray
    valid: int

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("entries must be a square matrix")
        if self.theta == 0:
            raise ValueError("theta must be nonzero")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "valid", max(0, min(int(self.valid), e.shape[0])))

    @property
    def dim_n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, theta, n):
        return cls(theta, np.eye(n), n)

    @classmethod
    def zeros(cls, theta, n):
        return cls(theta, np.zeros((n, n)), n)

    def block(self, n=None):
        """Leading ``n x n`` block (default: the valid window)."""
        n = self.valid if n is None else n
        return self.entries[:n, :n]

    def diagonal(self, n=None):
        return np.diag(self.block(n)).copy()

    def is_hermitian(self, atol=1e-12, n=None):
        b = self.block(n)
        return np.allclose(b, b.conj().T, rtol=0, atol=atol)

    def __add__(self, other):
        _check(self, other)
        return BandMatrix(self.theta, self.entries + other.entries, min(self.valid, other.valid))

    def __sub__(self, other):
        _check(self, other)
        return BandMatrix(self.theta, self.entries - other.entries, min(self.valid, other.valid))

    def __neg__(self):
        return BandMatrix(self.theta, -self.entries, self.valid)

    def scale(self, c):
        return BandMatrix(self.theta, c * self.entries, self.valid)

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other):
        return bm_star_mul(self, other)


def _check(a, b):
    if a.theta != b.theta:
        raise ParameterMismatch(f"theta differs: {a.theta} vs {b.theta}")
    if a.dim_n != b.dim_n:
        raise ParameterMismatch(f"truncation differs: {a.dim_n} vs {b.dim_n}")


def bm_from_diag(a: DiagSeries, n: int) -> BandMatrix:
    """Embed a 2D diagonal series as ``diag(a(0), ..., a(n-1))``."""
    if a.half_dim != 1:
        raise ValueError("only 2D (half_dim == 1) series embed into the plane algebra")
    return BandMatrix(a.theta, np.diag(a.coeff(np.arange(n)).astype(complex)), n)


def bm_star_mul(a: BandMatrix, b: BandMatrix, margin=0) -> BandMatrix:
    """Star product = matrix product of the truncated coefficient matrices."""
    _check(a, b)
    return BandMatrix(a.theta, a.entries @ b.entries, min(a.valid, b.valid) - margin)


def lowering(theta, n):
    """``L[j+1, j] = sqrt((j+1)/theta)``; complex for negative ``theta``."""
    w = np.sqrt(np.arange(1, n) / complex(theta))
    return np.diag(w, k=-1)


def bm_del(a: BandMatrix) -> BandMatrix:
    """Holomorphic derivative ``del = (d_x1 - i d_x2)/sqrt(2)``."""
    L = lowering(a.theta, a.dim_n)
    c = a.entries
    return BandMatrix(a.theta, c @ L - L @ c, a.valid - 1)


def bm_delbar(a: BandMatrix) -> BandMatrix:
    """Antiholomorphic derivative ``delbar = (d_x1 + i d_x2)/sqrt(2)``."""
    L = lowering(a.theta, a.dim_n)
    Lt = L.T
    c = a.entries
    return BandMatrix(a.theta, Lt @ c - c @ Lt, a.valid - 1)


def bm_deriv(a: BandMatrix, axis: int) -> BandMatrix:
    """Partial derivative along ``x1`` (``axis=1``) or ``x2`` (``axis=2``)."""
    d, db = bm_del(a).entries, bm_delbar(a).entries
    if axis == 1:
        e = (d + db) / np.sqrt(2.0)
    elif axis == 2:
        e = (db - d) / (np.sqrt(2.0) * 1j)
    else:
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    return BandMatrix(a.theta, e, a.valid - 1)


def bm_star_inv(a: BandMatrix, margin=0, cond_max=1e14) -> BandMatrix:
    """Inverse of the truncated matrix.

    Exact on the whole block for diagonal input. For banded input the
    leading block approximates the infinite inverse only away from the edge;
    ``margin`` records how much of the window to give up.
    """
    c = a.entries
    if not np.all(np.isfinite(c)):
        raise Singular("non-finite entries")
    if np.count_nonzero(c - np.diag(np.diag(c))) == 0:
        d = np.diag(c)
        if np.any(d == 0):
            raise Singular(f"zero diagonal entry at level {int(np.flatnonzero(d == 0)[0])}")
        return BandMatrix(a.theta, np.diag(1.0 / d), a.valid - margin)
    cond = np.linalg.cond(c)
    if not np.isfinite(cond) or cond > cond_max:
        raise Singular(f"condition number {cond:.3e} exceeds {cond_max:.1e}")
    try:
        inv = np.linalg.solve(c, np.eye(a.dim_n))
    except np.linalg.LinAlgError as exc:
        raise Singular(str(exc)) from exc
    return BandMatrix(a.theta, inv, a.valid - margin)


@dataclass(frozen=True)
class StructureConstants:
    """Nonzero frame structure functions in two dimensions.

    ``ciji[(i, j)] = -h * d_j(h) * h^-1`` and ``cijj[(i, j)] = h * d_i(h) * h^-1``
    for ``i != j``, with ``[e_i, e_j] = sum_k c_ijk e_k``.
    """

    ciji: dict
    cijj: dict

    def get(self, i, j, k):
        if i == j:
            return None
        if k == i:
            return self.ciji[(i, j)]
        if k == j:
            return self.cijj[(i, j)]
        return None


def structure_constants(h: BandMatrix, h_inv: BandMatrix = None) -> StructureConstants:
    h_inv = bm_star_inv(h) if h_inv is None else h_inv
    dh = {i: bm_deriv(h, i) for i in (1, 2)}
    p = {i: h @ dh[i] @ h_inv for i in (1, 2)}
    ciji, cijj = {}, {}
    for i in (1, 2):
        for j in (1, 2):
            if i != j:
                ciji[(i, j)] = -p[j]
                cijj[(i, j)] = p[i]
    return StructureConstants(ciji, cijj)


def frame_apply(h: BandMatrix, i: int, f: BandMatrix) -> BandMatrix:
    """Frame vector ``e_i = h * d_i`` acting on ``f``."""
    return h @ bm_deriv(f, i)


def scalar_curvature_generic(h: BandMatrix, window=None) -> BandMatrix:
    """Scalar curvature of the metric ``h^-2 (dx1^2 + dx2^2)`` from the frame formula.

    Evaluates ``2 e_i c_ijj - c_kii c_kjj - c_ijk c_ijk / 4 - c_ijk c_ikj / 2``
    (all products are star products, indices summed over ``{1, 2}``) from the
    structure functions of ``e_i = h * d_i``. The result's ``valid`` is set
    to ``window`` (default ``N // 2``).
    """
    n = h.dim_n
    window = n // 2 if window is None else window
    c = structure_constants(h)
    idx = (1, 2)
    total = BandMatrix.zeros(h.theta, n)

    def cget(i, j, k):
        return c.get(i, j, k)

    for i in idx:
        for j in idx:
            cij = cget(i, j, j)
            if cij is not None:
                total = total + frame_apply(h, i, cij).scale(2.0)
    for k in idx:
        for i in idx:
            for j in idx:
                a, b = cget(k, i, i), cget(k, j, j)
                if a is not None and b is not None:
                    total = total - a @ b
    for i in idx:
        for j in idx:
            for k in idx:
                a = cget(i, j, k)
                if a is None:
                    continue
                total = total - (a @ a).scale(0.25)
                b = cget(i, k, j)
                if b is not None:
                    total = total - (a @ b).scale(0.5)
    return BandMatrix(h.theta, total.entries, window)
