"""Dense complex hermitian matrix calculus.

The central value type is :class:`HermitianMatrix`, an immutable dense
complex matrix stored in exactly hermitized form, optionally carrying a
factorization of its space into tensor subsystems.  Subsystems are always
listed in "output before input" order, so a map from H to K lives on K (x) H
with ``subsystem_dims = (dim_K, dim_H)``.

Everything here is a pure function of its arguments: eigendecompositions,
functional calculus (square roots, pseudo-inverse square roots, positive and
negative parts), tensor products, partial traces, and the trace / operator
norms.  The real parametrization ``hvec``/``hunvec`` maps a d x d hermitian
matrix to d^2 real coordinates so that the trace inner product becomes the
Euclidean one; the conic solver and the section machinery are built on it.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass

import numpy as np

from .errors import DomainError, NumericalError, ShapeError

# Asymmetry above this (relative) is rejected when strict construction is on.
STRICT_HERMITICITY_TOL = 1e-8
# Eigenvalue cutoff for supports and pseudo-inverses, relative to
# max(1, largest eigenvalue).  Keeps the support-restricted limit of
# b^{-1/2} x b^{-1/2} well conditioned.
SUPPORT_CUTOFF = 1e-10


def _as_complex_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """An element of the real vector space of hermitian matrices.

    Construction hermitizes the input, ``x := (x + x^*)/2``.  With
    ``strict=True`` an asymmetry above ``STRICT_HERMITICITY_TOL`` (relative
    to the largest entry) raises instead.  ``subsystem_dims`` is an ordered
    tuple of factor dimensions whose product must equal ``dim``; the empty
    tuple means a single unstructured system.
    """

    entries: np.ndarray
    subsystem_dims: tuple[int, ...] = ()
    strict: InitVar[bool] = False

    def __post_init__(self, strict: bool):
        arr = _as_complex_matrix(self.entries)
        scale = float(np.max(np.abs(arr))) if arr.size else 0.0
        asym = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
        if strict and asym > STRICT_HERMITICITY_TOL * max(1.0, scale):
            raise ShapeError(
                f"matrix is not hermitian: asymmetry {asym:.3e} exceeds "
                f"{STRICT_HERMITICITY_TOL:.0e} * max(1, |entries|)"
            )
        arr = (arr + arr.conj().T) / 2
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        dims = tuple(int(d) for d in self.subsystem_dims)
        if any(d < 1 for d in dims):
            raise ShapeError(f"subsystem dimensions must be positive, got {dims}")
        if dims and math.prod(dims) != arr.shape[0]:
            raise ShapeError(
                f"product of subsystem dims {dims} does not match dim {arr.shape[0]}"
            )
        object.__setattr__(self, "subsystem_dims", dims)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        """Effective subsystem dimensions; ``(dim,)`` when unstructured."""
        return self.subsystem_dims if self.subsystem_dims else (self.dim,)

    def with_dims(self, subsystem_dims) -> HermitianMatrix:
        return HermitianMatrix(self.entries, tuple(subsystem_dims))

    # -- arithmetic (real linear structure of the hermitian space) ----------

    def _binary_dims(self, other: HermitianMatrix) -> tuple[int, ...]:
        if self.dim != other.dim:
            raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return self.subsystem_dims or other.subsystem_dims

    def __add__(self, other: HermitianMatrix) -> HermitianMatrix:
        return HermitianMatrix(self.entries + other.entries, self._binary_dims(other))

    def __radd__(self, other) -> HermitianMatrix:
        if isinstance(other, (int, float)) and other == 0:  # supports sum()
            return self
        return NotImplemented

    def __sub__(self, other: HermitianMatrix) -> HermitianMatrix:
        return HermitianMatrix(self.entries - other.entries, self._binary_dims(other))

    def __neg__(self) -> HermitianMatrix:
        return HermitianMatrix(-self.entries, self.subsystem_dims)

    def __mul__(self, scalar) -> HermitianMatrix:
        s = float(scalar)
        return HermitianMatrix(self.entries * s, self.subsystem_dims)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> HermitianMatrix:
        return self * (1.0 / float(scalar))

    def allclose(self, other: HermitianMatrix, tol: float = 1e-10) -> bool:
        return self.dim == other.dim and bool(
            np.allclose(self.entries, other.entries, atol=tol, rtol=tol)
        )

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim}, subsystem_dims={self.subsystem_dims})"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigendecomposition with eigenvalues sorted in descending order.

    ``eigenvectors`` holds the corresponding orthonormal eigenvectors as
    columns, so ``x = U diag(w) U^*``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def herm(data, dims=None, strict: bool = False) -> HermitianMatrix:
    """Build a :class:`HermitianMatrix` from any array-like."""
    if isinstance(data, HermitianMatrix):
        return data.with_dims(dims) if dims is not None else data
    return HermitianMatrix(np.asarray(data, dtype=complex), tuple(dims or ()), strict)


def identity(dims) -> HermitianMatrix:
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    return HermitianMatrix(np.eye(math.prod(dims)), dims if len(dims) > 1 else ())


def zeros(dims) -> HermitianMatrix:
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    d = math.prod(dims)
    return HermitianMatrix(np.zeros((d, d)), dims if len(dims) > 1 else ())


def outer(vector, dims=None) -> HermitianMatrix:
    """Rank-one projector-like matrix |v><v| (unnormalized)."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    return herm(np.outer(v, v.conj()), dims)


def diag(values, dims=None) -> HermitianMatrix:
    return herm(np.diag(np.asarray(values, dtype=float)), dims)


def trace_pair(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """Trace inner product Tr(a b), real for hermitian arguments."""
    return float(np.vdot(b.entries, a.entries).real)


def trace(x: HermitianMatrix) -> float:
    return float(np.trace(x.entries).real)


def frobenius_norm(x: HermitianMatrix) -> float:
    return float(np.linalg.norm(x.entries))


# -- eigendecomposition and functional calculus -----------------------------


def eig(x: HermitianMatrix) -> Spectrum:
    """Full eigendecomposition, eigenvalues descending."""
    try:
        w, u = np.linalg.eigh(x.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    return Spectrum(w[::-1].copy(), u[:, ::-1].copy())


def eigenvalues(x: HermitianMatrix) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(x.entries)[::-1].copy()
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc


def trace_norm(x: HermitianMatrix) -> float:
    """Sum of absolute eigenvalues; equals Tr x on PSD input."""
    return float(np.sum(np.abs(eigenvalues(x))))


def op_norm(x: HermitianMatrix) -> float:
    """Largest absolute eigenvalue."""
    w = eigenvalues(x)
    return float(np.max(np.abs(w))) if w.size else 0.0


def psd_check(x: HermitianMatrix, tol: float = 1e-9) -> bool:
    """True iff the smallest eigenvalue is >= -tol * (1 + op_norm(x))."""
    w = eigenvalues(x)
    return bool(w[-1] >= -tol * (1.0 + float(np.max(np.abs(w)))))


def _support_cutoff(w: np.ndarray) -> float:
    top = float(w[0]) if w.size else 0.0
    return SUPPORT_CUTOFF * max(1.0, top)


def support_projection(x: HermitianMatrix, cutoff: float | None = None) -> HermitianMatrix:
    """Orthogonal projection onto eigenspaces with eigenvalue above cutoff.

    Default cutoff is ``SUPPORT_CUTOFF * max(1, largest eigenvalue)``.
    """
    s = eig(x)
    if cutoff is None:
        cutoff = _support_cutoff(s.eigenvalues)
    keep = s.eigenvalues > cutoff
    u = s.eigenvectors[:, keep]
    return HermitianMatrix(u @ u.conj().T, x.subsystem_dims)


def abs_pos_neg(x: HermitianMatrix) -> tuple[HermitianMatrix, HermitianMatrix, HermitianMatrix]:
    """Return (|x|, x_+, x_-) with x = x_+ - x_-, |x| = x_+ + x_-, x_+ x_- = 0."""
    s = eig(x)
    pos = np.clip(s.eigenvalues, 0.0, None)
    neg = np.clip(-s.eigenvalues, 0.0, None)
    u = s.eigenvectors
    x_pos = HermitianMatrix((u * pos) @ u.conj().T, x.subsystem_dims)
    x_neg = HermitianMatrix((u * neg) @ u.conj().T, x.subsystem_dims)
    x_abs = HermitianMatrix((u * (pos + neg)) @ u.conj().T, x.subsystem_dims)
    return x_abs, x_pos, x_neg


def _psd_eigenvalues(x: HermitianMatrix, tol: float) -> Spectrum:
    s = eig(x)
    low = float(s.eigenvalues[-1])
    if low < -tol * (1.0 + abs(float(s.eigenvalues[0]))):
        raise DomainError(f"matrix has negative eigenvalue {low:.3e}, not PSD within {tol:.0e}")
    return Spectrum(np.clip(s.eigenvalues, 0.0, None), s.eigenvectors)


def sqrt_psd(x: HermitianMatrix, tol: float = 1e-9) -> HermitianMatrix:
    """Principal square root of a PSD matrix."""
    s = _psd_eigenvalues(x, tol)
    u = s.eigenvectors
    return HermitianMatrix((u * np.sqrt(s.eigenvalues)) @ u.conj().T, x.subsystem_dims)


def pinv_sqrt(x: HermitianMatrix, tol: float = 1e-9) -> HermitianMatrix:
    """Pseudo-inverse square root: eigenvalues above the support cutoff are
    mapped to 1/sqrt, the rest to zero."""
    s = _psd_eigenvalues(x, tol)
    cutoff = _support_cutoff(s.eigenvalues)
    inv = np.where(s.eigenvalues > cutoff, 1.0 / np.sqrt(np.maximum(s.eigenvalues, cutoff)), 0.0)
    u = s.eigenvectors
    return HermitianMatrix((u * inv) @ u.conj().T, x.subsystem_dims)


def pinv(x: HermitianMatrix, tol: float = 1e-9) -> HermitianMatrix:
    """Moore-Penrose inverse of a PSD matrix via the same cutoff rule."""
    s = _psd_eigenvalues(x, tol)
    cutoff = _support_cutoff(s.eigenvalues)
    inv = np.where(s.eigenvalues > cutoff, 1.0 / np.maximum(s.eigenvalues, cutoff), 0.0)
    u = s.eigenvectors
    return HermitianMatrix((u * inv) @ u.conj().T, x.subsystem_dims)


def conjugate(a: HermitianMatrix, m: np.ndarray | HermitianMatrix) -> HermitianMatrix:
    """m a m^* for a (possibly rectangular) complex matrix m."""
    mm = m.entries if isinstance(m, HermitianMatrix) else np.asarray(m, dtype=complex)
    return HermitianMatrix(mm @ a.entries @ mm.conj().T)


# -- tensor algebra ----------------------------------------------------------


def tensor(x: HermitianMatrix, y: HermitianMatrix) -> HermitianMatrix:
    return HermitianMatrix(np.kron(x.entries, y.entries), x.dims + y.dims)


def partial_trace(x: HermitianMatrix, subsystem_index: int) -> HermitianMatrix:
    """Trace out the named tensor factor.

    Satisfies the adjointness Tr((I (x) a) x) = Tr(a Tr_K x) when the first
    factor K is traced out, and the analogous identity for any index.
    """
    dims = x.subsystem_dims
    if not dims:
        raise ShapeError("partial_trace requires subsystem_dims to be set")
    n = len(dims)
    k = int(subsystem_index)
    if not 0 <= k < n:
        raise ShapeError(f"subsystem index {k} out of range for {dims}")
    tens = x.entries.reshape(dims + dims)
    out = np.trace(tens, axis1=k, axis2=n + k)
    rest = dims[:k] + dims[k + 1 :]
    d = math.prod(rest) if rest else 1
    return HermitianMatrix(out.reshape(d, d), rest if len(rest) > 1 else ())


def transpose_in_basis(x: HermitianMatrix) -> HermitianMatrix:
    """Entrywise transpose in the fixed computational basis."""
    return HermitianMatrix(x.entries.T.copy(), x.subsystem_dims)


# -- real parametrization ----------------------------------------------------

_TRIU_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}
_SQRT2 = math.sqrt(2.0)


def _triu(d: int) -> tuple[np.ndarray, np.ndarray]:
    got = _TRIU_CACHE.get(d)
    if got is None:
        got = np.triu_indices(d, k=1)
        _TRIU_CACHE[d] = got
    return got


def hvec(x: HermitianMatrix | np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a hermitian matrix.

    Diagonal entries come first, then sqrt(2)-scaled real and imaginary
    parts of the upper triangle; Tr(x y) = hvec(x) . hvec(y).
    """
    arr = x.entries if isinstance(x, HermitianMatrix) else np.asarray(x, dtype=complex)
    d = arr.shape[0]
    iu, ju = _triu(d)
    out = np.empty(d * d)
    out[:d] = arr.diagonal().real
    off = arr[iu, ju]
    m = off.shape[0]
    out[d : d + m] = _SQRT2 * off.real
    out[d + m :] = _SQRT2 * off.imag
    return out


def hunvec(v: np.ndarray, d: int) -> np.ndarray:
    """Inverse of :func:`hvec`, returning a raw complex ndarray."""
    iu, ju = _triu(d)
    m = d * (d - 1) // 2
    x = np.zeros((d, d), dtype=complex)
    x[np.arange(d), np.arange(d)] = v[:d]
    off = (v[d : d + m] + 1j * v[d + m :]) / _SQRT2
    x[iu, ju] = off
    x[ju, iu] = off.conj()
    return x


def hunvec_matrix(v: np.ndarray, d: int, dims=()) -> HermitianMatrix:
    return HermitianMatrix(hunvec(v, d), tuple(dims))


# -- JSON wire format --------------------------------------------------------


def matrix_to_json(x: HermitianMatrix) -> dict:
    """Serialize as {"dims": [...], "matrix": [[[re, im], ...], ...]}."""
    arr = x.entries
    return {
        "dims": list(x.dims),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in arr],
    }


def matrix_from_json(obj, strict: bool = False) -> HermitianMatrix:
    if not isinstance(obj, dict):
        raise ShapeError("matrix JSON must be an object with 'dims' and 'matrix'")
    for key in ("dims", "matrix"):
        if key not in obj:
            raise ShapeError(f"matrix JSON is missing the '{key}' field")
    dims = tuple(int(d) for d in obj["dims"])
    rows = obj["matrix"]
    try:
        arr = np.array([[complex(c[0], c[1]) for c in row] for row in rows], dtype=complex)
    except (TypeError, IndexError) as exc:
        raise ShapeError(f"field 'matrix' is not a nested [re, im] array: {exc}") from exc
    d = math.prod(dims)
    if arr.shape != (d, d):
        raise ShapeError(f"field 'matrix' has shape {arr.shape}, expected ({d}, {d})")
    return HermitianMatrix(arr, dims if len(dims) > 1 else (), strict)
