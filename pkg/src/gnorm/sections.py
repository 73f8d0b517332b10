"""Affine descriptions of compact convex slices of the PSD cone.

A *section* here is a set B = {x >= 0 : x in span, Tr(x n) = 1} described by
an orthonormal (trace inner product) spanning basis of its linear hull
together with a PSD normalizing matrix n that evaluates to one on every
member.  Concrete families:

* all density matrices (``states_section``),
* a single PSD matrix (``singleton_section``),
* Choi matrices of channels (``channels_section``), of sequential networks
  (``comb_section``) and, generally, of maps sending a given section into
  density matrices (``generalized_section``),
* block-diagonal embeddings of measurements whose effects sum into the dual
  section (``povm_section``).

Every section carries a positive-definite interior point.  When the
construction data admits no positive-definite member, the section is
automatically compressed onto the support of the best achievable member (an
isometry recorded in ``embedding``) and flagged ``restricted``; all queries
accept matrices in the original space and translate.

The *dual section* of B collects every PSD matrix pairing to one with all of
B; duality is an involution on sections with positive-definite members, and
``dual_section`` realizes it from the stored affine data alone.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import solver
from .errors import EmptySectionError, ShapeError, ValidationError
from .hermitian import (
    HermitianMatrix,
    eig,
    frobenius_norm,
    herm,
    hunvec_matrix,
    hvec,
    identity,
    pinv,
    psd_check,
    support_projection,
    tensor,
    trace_pair,
    transpose_in_basis,
)

GRAM_SCHMIDT_DROP_TOL = 1e-9
DEFAULT_MEMBERSHIP_TOL = 1e-8
# A candidate interior point counts as positive definite above this floor.
FAITHFUL_EIG_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Section:
    """Immutable affine description of one section.

    ``span_basis`` is trace-orthonormal; ``normalizer`` pairs to 1 with every
    member; ``interior_point`` is a positive-definite member.  ``embedding``
    (an isometry, columns orthonormal) is set when the section was compressed
    onto a support subspace; matrices supplied by callers then live in the
    original space of dimension ``original_dim``.
    """

    span_basis: tuple[HermitianMatrix, ...]
    normalizer: HermitianMatrix
    interior_point: HermitianMatrix
    label: str
    subsystem_dims: tuple[int, ...] = ()
    descriptor: dict | None = None
    embedding: np.ndarray | None = None
    original_dim: int | None = None
    original_subsystem_dims: tuple[int, ...] = ()
    restricted: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ambient_dim(self) -> int:
        """Dimension of the (possibly compressed) carrier space."""
        return self.normalizer.dim

    @property
    def user_dim(self) -> int:
        """Dimension of the space callers pass matrices on."""
        return self.original_dim if self.embedding is not None else self.ambient_dim

    @property
    def span_dim(self) -> int:
        return len(self.span_basis)

    def dims_tuple(self) -> tuple[int, ...]:
        """Subsystem dims of the carrier space, ``(ambient_dim,)`` fallback."""
        return self.subsystem_dims if self.subsystem_dims else (self.ambient_dim,)

    def span_matrix(self) -> np.ndarray:
        """hvec coordinates of the spanning basis, one column per element."""
        got = self._cache.get("span_matrix")
        if got is None:
            got = np.column_stack([hvec(j) for j in self.span_basis])
            self._cache["span_matrix"] = got
        return got

    def span_coords(self, x: HermitianMatrix) -> np.ndarray:
        return self.span_matrix().T @ hvec(x)

    def from_span_coords(self, coords: np.ndarray) -> HermitianMatrix:
        vec = self.span_matrix() @ np.asarray(coords, dtype=float)
        return hunvec_matrix(vec, self.ambient_dim, self.subsystem_dims)

    def project_span(self, x: HermitianMatrix) -> HermitianMatrix:
        return self.from_span_coords(self.span_coords(x))

    def complement_matrix(self) -> np.ndarray:
        """hvec basis of the orthogonal complement of the span."""
        got = self._cache.get("complement")
        if got is None:
            got = _complement_columns(self.span_matrix(), self.ambient_dim**2)
            self._cache["complement"] = got
        return got

    def compress(self, x: HermitianMatrix, tol: float = DEFAULT_MEMBERSHIP_TOL):
        """Map a caller-space matrix into the carrier space.

        Returns None when ``x`` has weight outside the support subspace
        (beyond ``tol`` relative), which for norm purposes means +infinity.
        """
        if self.embedding is None:
            return x
        if x.dim != self.original_dim:
            raise ShapeError(f"expected dim {self.original_dim}, got {x.dim}")
        v = self.embedding
        xc = HermitianMatrix(v.conj().T @ x.entries @ v)
        back = v @ xc.entries @ v.conj().T
        if float(np.linalg.norm(x.entries - back)) > tol * (1.0 + frobenius_norm(x)):
            return None
        return xc

    def lift(self, xc: HermitianMatrix) -> HermitianMatrix:
        """Map a carrier-space matrix back to the caller space."""
        if self.embedding is None:
            return xc
        v = self.embedding
        return HermitianMatrix(v @ xc.entries @ v.conj().T, self.original_subsystem_dims)

    def __repr__(self) -> str:
        extra = ", restricted" if self.restricted else ""
        return f"Section({self.label}, ambient={self.ambient_dim}, span={self.span_dim}{extra})"


@dataclass(frozen=True, eq=False)
class DualSectionView:
    """Affine view of a dual section: one dual element plus a basis of the
    orthogonal complement of the primal span.

    The dual section is exactly (base_point + span(orth_basis)) intersected
    with the PSD cone.
    """

    base_point: HermitianMatrix
    orth_basis: tuple[HermitianMatrix, ...]


def dual_view(section: Section) -> DualSectionView:
    comp = section.complement_matrix()
    dim = section.ambient_dim
    basis = tuple(
        hunvec_matrix(comp[:, k], dim, section.subsystem_dims) for k in range(comp.shape[1])
    )
    return DualSectionView(section.normalizer, basis)


# -- linear algebra over hvec coordinates ------------------------------------


def _orthonormalize_columns(cols: list[np.ndarray], drop_tol: float = GRAM_SCHMIDT_DROP_TOL):
    """Modified Gram-Schmidt with a drop tolerance for dependent input."""
    out: list[np.ndarray] = []
    for col in cols:
        scale = max(1.0, float(np.linalg.norm(col)))
        r = col.astype(float).copy()
        for q in out:
            r -= (q @ r) * q
        # second pass for numerical orthogonality
        for q in out:
            r -= (q @ r) * q
        nrm = float(np.linalg.norm(r))
        if nrm > drop_tol * scale:
            out.append(r / nrm)
    return out


def _complement_columns(basis: np.ndarray, total: int) -> np.ndarray:
    if basis.size == 0:
        return np.eye(total)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    k = basis.shape[1]
    return u[:, k:]


def _orthonormal_basis(mats, dim, subsystem_dims=(), drop_tol=GRAM_SCHMIDT_DROP_TOL):
    cols = _orthonormalize_columns([hvec(m) for m in mats], drop_tol)
    return tuple(hunvec_matrix(c, dim, subsystem_dims) for c in cols)


def full_hermitian_basis(dim: int, subsystem_dims=()) -> tuple[HermitianMatrix, ...]:
    """The hvec coordinate basis: an orthonormal basis of the whole space."""
    eye = np.eye(dim * dim)
    return tuple(hunvec_matrix(eye[:, k], dim, subsystem_dims) for k in range(dim * dim))


# -- interior points ----------------------------------------------------------


def _interior_program(span: tuple[HermitianMatrix, ...], normalizer: HermitianMatrix):
    """max t  s.t.  b = sum_i s_i J_i,  Tr(b n) = 1,  b - t I >= 0."""
    d = normalizer.dim
    n_h = d * d
    k = len(span)
    m_span = np.column_stack([hvec(j) for j in span])
    a = np.zeros((n_h + 1, n_h + k + 1))
    a[:n_h, :n_h] = np.eye(n_h)
    a[:n_h, n_h : n_h + k] = -m_span
    a[:n_h, n_h + k] = hvec(identity(d))
    a[n_h, n_h : n_h + k] = np.array([trace_pair(j, normalizer) for j in span])
    b = np.zeros(n_h + 1)
    b[n_h] = 1.0
    c = np.zeros(n_h + k + 1)
    c[n_h + k] = -1.0
    blocks = (solver.Block(d, solver.PSD), solver.Block(k, solver.FREE), solver.Block(1, solver.FREE))
    return solver.ConeProgram(blocks, c, a, b, "interior point (max min-eigenvalue)"), m_span


def _solve_interior(span, normalizer, tol=1e-8, max_iter=solver.DEFAULT_MAX_ITER):
    program, m_span = _interior_program(span, normalizer)
    sol = solver.solve(program, tol=tol, max_iter=max_iter)
    if sol.status in ("infeasible", "unbounded"):
        raise EmptySectionError(
            f"no PSD element on the affine slice (solver status {sol.status})"
        )
    coeffs = sol.primal_point[1]
    t_star = float(sol.primal_point[2][0])
    b_star = hunvec_matrix(m_span @ coeffs, normalizer.dim)
    return t_star, b_star, sol


def _recession_direction_exists(span, normalizer, tol=1e-7) -> bool:
    """Whether the slice has a nonzero PSD recession direction.

    Solves max Tr(y) over y in the span with y PSD, y <= I and
    Tr(y normalizer) = 0; a positive optimum means the slice is unbounded
    (only possible when the normalizer is singular).
    """
    d = normalizer.dim
    n_h = d * d
    k = len(span)
    m_span = np.column_stack([hvec(j) for j in span])
    pair_n = np.array([trace_pair(j, normalizer) for j in span])
    pair_i = np.array([trace_pair(j, identity(d)) for j in span])
    a = np.zeros((2 * n_h + 1, 2 * n_h + k))
    a[:n_h, :n_h] = np.eye(n_h)
    a[:n_h, 2 * n_h :] = -m_span
    a[n_h : 2 * n_h, n_h : 2 * n_h] = np.eye(n_h)
    a[n_h : 2 * n_h, 2 * n_h :] = m_span
    a[2 * n_h, 2 * n_h :] = pair_n
    b = np.zeros(2 * n_h + 1)
    b[n_h : 2 * n_h] = hvec(identity(d))
    c = np.zeros(2 * n_h + k)
    c[2 * n_h :] = -pair_i
    blocks = (
        solver.Block(d, solver.PSD),
        solver.Block(d, solver.PSD),
        solver.Block(k, solver.FREE),
    )
    program = solver.ConeProgram(blocks, c, a, b, "recession direction search")
    sol = solver.solve(program, tol=1e-8)
    solver.require_optimal(sol, "recession direction search")
    return -sol.primal_value > tol


def interior_element(section: Section, tol: float = 1e-8) -> HermitianMatrix:
    """Member maximizing the smallest eigenvalue (a conic program).

    Positive definite exactly when the section is faithful; raises
    :class:`EmptySectionError` when the slice carries no PSD element.
    """
    _, b_star, sol = _solve_interior(section.span_basis, section.normalizer, tol=tol)
    if sol.status != "optimal":
        solver.require_optimal(sol, "interior_element")
    return section.lift(b_star.with_dims(section.subsystem_dims))


# -- generic constructor with faithfulness handling ---------------------------


def _make_section(
    span_mats,
    normalizer: HermitianMatrix,
    label: str,
    subsystem_dims=(),
    interior_hint: HermitianMatrix | None = None,
    descriptor: dict | None = None,
    embedding: np.ndarray | None = None,
    original_dim: int | None = None,
    original_subsystem_dims=(),
    restricted: bool = False,
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL,
) -> Section:
    dim = normalizer.dim
    span = _orthonormal_basis(span_mats, dim, tuple(subsystem_dims))
    if not span:
        raise EmptySectionError(f"section {label!r} has an empty span")
    if not psd_check(normalizer, membership_tol):
        raise ValidationError(f"normalizer of section {label!r} is not PSD")
    w_n = eig(normalizer).eigenvalues
    if w_n[-1] <= FAITHFUL_EIG_TOL * max(1.0, float(w_n[0])):
        # A singular normalizer can leave the slice unbounded; reject that
        # outright (a positive-definite normalizer makes it compact for free).
        if _recession_direction_exists(span, normalizer):
            raise ValidationError(
                f"section {label!r} is unbounded: the slice contains a PSD "
                "recession direction annihilated by the normalizer"
            )

    interior = None
    if interior_hint is not None:
        cand = interior_hint
        w = eig(cand).eigenvalues
        member_ok = (
            abs(trace_pair(cand, normalizer) - 1.0) <= 10 * membership_tol
            and _span_residual(span, cand) <= 10 * membership_tol * (1 + frobenius_norm(cand))
        )
        if member_ok and w[-1] > FAITHFUL_EIG_TOL * max(1.0, w[0]):
            interior = cand

    if interior is None:
        t_star, b_star, _ = _solve_interior(span, normalizer)
        scale = max(1.0, frobenius_norm(b_star))
        if t_star < -1e-6 * scale:
            # Even the best slice point has a negative eigenvalue.
            raise EmptySectionError(
                f"section {label!r} is empty: best achievable smallest eigenvalue "
                f"is {t_star:.3e}"
            )
        if t_star > FAITHFUL_EIG_TOL * scale:
            interior = b_star.with_dims(tuple(subsystem_dims))
        else:
            # Restrict to the support of the best achievable member.
            psd_part = solver.project_psd(b_star)
            proj = support_projection(psd_part, cutoff=1e-7 * scale)
            s = eig(proj)
            keep = s.eigenvalues > 0.5
            rank = int(np.count_nonzero(keep))
            if rank == 0:
                raise EmptySectionError(f"section {label!r} has no PSD member")
            if rank == dim:
                raise EmptySectionError(
                    f"section {label!r} admits no positive-definite member and no "
                    "proper support to restrict to"
                )
            v = s.eigenvectors[:, keep]
            comp = embedding @ v if embedding is not None else v
            return _make_section(
                [HermitianMatrix(v.conj().T @ j.entries @ v) for j in span],
                HermitianMatrix(v.conj().T @ normalizer.entries @ v),
                label,
                subsystem_dims=(),
                descriptor=descriptor,
                embedding=comp,
                original_dim=original_dim if original_dim is not None else dim,
                original_subsystem_dims=tuple(original_subsystem_dims)
                or tuple(subsystem_dims),
                restricted=True,
                membership_tol=membership_tol,
            )

    return Section(
        span_basis=span,
        normalizer=normalizer.with_dims(tuple(subsystem_dims)) if subsystem_dims else normalizer,
        interior_point=interior,
        label=label,
        subsystem_dims=tuple(subsystem_dims),
        descriptor=descriptor,
        embedding=embedding,
        original_dim=original_dim,
        original_subsystem_dims=tuple(original_subsystem_dims),
        restricted=restricted,
    )


def _span_residual(span, x: HermitianMatrix) -> float:
    vec = hvec(x)
    coords = np.array([hvec(j) @ vec for j in span])
    proj = sum(c * hvec(j) for c, j in zip(coords, span))
    return float(np.linalg.norm(vec - proj))


# -- membership ----------------------------------------------------------------


def contains(section: Section, x: HermitianMatrix, tol: float = DEFAULT_MEMBERSHIP_TOL) -> bool:
    """Span membership + unit pairing with the normalizer + PSD, all within tol."""
    xc = section.compress(x, tol)
    if xc is None:
        return False
    scale = 1.0 + frobenius_norm(xc)
    vec = hvec(xc)
    m = section.span_matrix()
    coords = m.T @ vec
    if float(np.linalg.norm(vec - m @ coords)) > tol * scale:
        return False
    if abs(trace_pair(xc, section.normalizer) - 1.0) > tol * scale:
        return False
    return psd_check(xc, tol)


# -- concrete families ---------------------------------------------------------


@lru_cache(maxsize=None)
def states_section(d: int) -> Section:
    """All density matrices on a d-dimensional space; normalizer is I."""
    if d < 1:
        raise ShapeError("dimension must be positive")
    return _make_section(
        full_hermitian_basis(d),
        identity(d),
        f"states({d})",
        interior_hint=identity(d) / d,
        descriptor={"kind": "states", "dims": [d]},
    )


def singleton_section(b: HermitianMatrix) -> Section:
    """The one-element section {b} for PSD b != 0.

    When b is rank deficient the section is restricted to its support,
    where the normalized pseudo-inverse is the normalizer.
    """
    if not psd_check(b, 1e-9):
        raise ValidationError("singleton_section needs a PSD matrix")
    s = eig(b)
    cutoff = 1e-10 * max(1.0, float(s.eigenvalues[0]))
    keep = s.eigenvalues > cutoff
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        raise ValidationError("singleton_section needs a nonzero matrix")
    if rank == b.dim:
        normalizer = pinv(b) / rank
        return _make_section(
            [b / frobenius_norm(b)],
            normalizer,
            "singleton",
            subsystem_dims=b.subsystem_dims,
            interior_hint=b,
        )
    v = s.eigenvectors[:, keep]
    bc = HermitianMatrix(v.conj().T @ b.entries @ v)
    return _make_section(
        [bc / frobenius_norm(bc)],
        pinv(bc) / rank,
        "singleton",
        interior_hint=bc,
        embedding=v,
        original_dim=b.dim,
        original_subsystem_dims=b.subsystem_dims,
        restricted=True,
    )


def full_slice_section(b: HermitianMatrix) -> Section:
    """The whole slice {a >= 0 : Tr(a b) = 1} cut by one positive-definite b.

    This is the base of the full PSD cone determined by b; its norm has the
    closed form |b^(1/2) x b^(1/2)|_1 and its dual section is the one-element
    section {b}.  The states section is the special case b = I.
    """
    w = eig(b).eigenvalues
    if w[-1] <= FAITHFUL_EIG_TOL * max(1.0, float(w[0])):
        raise ValidationError(
            "full_slice_section needs a positive-definite matrix (the slice "
            "through a singular matrix is unbounded)"
        )
    d = b.dim
    interior = b / trace_pair(b, b)  # the scaled copy of b on the slice
    return _make_section(
        full_hermitian_basis(d, b.subsystem_dims),
        b,
        f"slice({d})",
        subsystem_dims=b.subsystem_dims,
        interior_hint=interior,
        descriptor={"kind": "singleton", "matrix": None},  # matrix filled on dump
    )


def dual_section(section: Section) -> Section:
    """All PSD matrices pairing to one with every member.

    The span is the normalizer joined with the orthogonal complement of the
    section's span; the returned section is normalized by the interior point
    of the input, so duality applied twice reproduces the original
    membership.
    """
    got = section._cache.get("dual")
    if got is not None:
        return got
    dim = section.ambient_dim
    comp = section.complement_matrix()
    mats = [section.normalizer] + [
        hunvec_matrix(comp[:, k], dim, section.subsystem_dims) for k in range(comp.shape[1])
    ]
    w = eig(section.normalizer).eigenvalues
    hint = (
        section.normalizer
        if w[-1] > FAITHFUL_EIG_TOL * max(1.0, w[0])
        else None
    )
    dual = _make_section(
        mats,
        section.interior_point,
        f"dual({section.label})",
        subsystem_dims=section.subsystem_dims,
        interior_hint=hint,
        embedding=section.embedding,
        original_dim=section.original_dim,
        original_subsystem_dims=section.original_subsystem_dims,
        restricted=section.restricted,
    )
    section._cache["dual"] = dual
    return dual


def transpose_section(section: Section) -> Section:
    """Entrywise transpose of every member (again a section)."""
    return _make_section(
        [transpose_in_basis(j) for j in section.span_basis],
        transpose_in_basis(section.normalizer),
        f"transpose({section.label})",
        subsystem_dims=section.subsystem_dims,
        interior_hint=transpose_in_basis(section.interior_point),
        embedding=None if section.embedding is None else section.embedding.conj(),
        original_dim=section.original_dim,
        original_subsystem_dims=section.original_subsystem_dims,
        restricted=section.restricted,
    )


def generalized_section(section: Section, dim_out: int, label: str | None = None) -> Section:
    """Choi matrices of completely positive maps sending the given section
    into density matrices.

    Membership on K (x) H is "X PSD and Tr_K X in (dual section)^T"; the
    span is accordingly the orthogonal complement of
    {I_K (x) z^T : z orthogonal to the dual span}, the normalizer is
    I_K (x) b0^T for the interior member b0, and I_K/dim_out (x) n^T (n a
    positive-definite dual element) is an interior point.
    """
    if dim_out < 1:
        raise ShapeError("output dimension must be positive")
    if section.embedding is not None:
        raise ValidationError(
            "generalized_section over a support-restricted section is only "
            "defined on its carrier space; rebuild the base section there"
        )
    dual = dual_section(section)
    h = section.ambient_dim
    dk = int(dim_out)
    new_dim = dk * h
    sub = (dk,) + section.dims_tuple()

    dual_span = dual.span_matrix()
    dual_comp = _complement_columns(dual_span, h * h)
    eye_k = identity(dk)
    lifted = [
        hvec(tensor(eye_k, transpose_in_basis(hunvec_matrix(dual_comp[:, j], h))))
        for j in range(dual_comp.shape[1])
    ]
    span_cols = _complement_columns(
        np.column_stack(lifted) if lifted else np.zeros((new_dim * new_dim, 0)),
        new_dim * new_dim,
    )
    span = [hunvec_matrix(span_cols[:, j], new_dim, sub) for j in range(span_cols.shape[1])]

    normalizer = tensor(eye_k, transpose_in_basis(section.interior_point))
    hint = tensor(eye_k / dk, transpose_in_basis(dual.interior_point))
    desc = None
    if section.descriptor is not None:
        desc = {"kind": "generalized", "dims": [dk], "base": section.descriptor}
    return _make_section(
        span,
        normalizer,
        label or f"generalized({section.label},{dk})",
        subsystem_dims=sub,
        interior_hint=hint,
        descriptor=desc,
    )


@lru_cache(maxsize=None)
def channels_section(dim_in: int, dim_out: int) -> Section:
    """Choi matrices of channels from H (dim_in) to K (dim_out)."""
    sec = generalized_section(
        states_section(dim_in), dim_out, label=f"channels({dim_in},{dim_out})"
    )
    return dataclasses.replace(sec, descriptor={"kind": "channels", "dims": [dim_in, dim_out]})


@lru_cache(maxsize=None)
def comb_section(dims: tuple[int, ...]) -> Section:
    """Choi matrices of sequential networks over spaces H_0, ..., H_n.

    Built recursively: the base case is the channel section for
    (H_0, H_1); each further space wraps the previous section in
    ``generalized_section``.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ShapeError(f"comb_section needs at least two positive dims, got {dims}")
    sec = channels_section(dims[0], dims[1])
    for d in dims[2:]:
        sec = generalized_section(sec, d)
    label = f"comb({','.join(str(d) for d in dims)})"
    return dataclasses.replace(
        sec, label=label, descriptor={"kind": "combs", "dims": list(dims)}, _cache={}
    )


def povm_section(section: Section, outcomes: int) -> Section:
    """Block-diagonal members whose transposed blocks form a measurement on
    the given section (effects PSD, summing into the dual section)."""
    if outcomes < 1:
        raise ShapeError("need at least one outcome")
    if section.embedding is not None:
        raise ValidationError("povm_section needs a faithful (unrestricted) base section")
    dual = dual_section(section)
    h = section.ambient_dim
    n_d = int(outcomes)
    sub = (n_d,) + section.dims_tuple()
    basis_h = full_hermitian_basis(h)

    span: list[HermitianMatrix] = []
    for c in range(n_d - 1):
        ec = np.zeros((n_d, n_d))
        ec[c, c] = 1.0
        ec[c + 1, c + 1] = -1.0
        block = herm(ec)
        for e in basis_h:
            span.append(tensor(block, e))
    eye_d = identity(n_d)
    for j in dual.span_basis:
        span.append(tensor(eye_d, transpose_in_basis(j)))

    normalizer = tensor(eye_d, transpose_in_basis(section.interior_point))
    hint = tensor(eye_d / n_d, transpose_in_basis(dual.interior_point))
    desc = None
    if section.descriptor is not None:
        desc = {"kind": "povm", "dims": [n_d], "base": section.descriptor}
    return _make_section(
        span,
        normalizer,
        f"povm({section.label},{n_d})",
        subsystem_dims=sub,
        interior_hint=hint,
        descriptor=desc,
    )


def id_tensor_section(section: Section, d_left: int) -> Section:
    """The section {I_d (x) b : b in B} on the enlarged space."""
    if section.embedding is not None:
        raise ValidationError("id_tensor_section needs a faithful base section")
    d = int(d_left)
    eye = identity(d)
    span = [tensor(eye, j) for j in section.span_basis]
    normalizer = tensor(eye / d, section.normalizer)
    hint = tensor(eye, section.interior_point)
    return _make_section(
        span,
        normalizer,
        f"id({d})(x){section.label}",
        subsystem_dims=(d,) + section.dims_tuple(),
        interior_hint=hint,
    )


def custom_section(basis, normalizer: HermitianMatrix, label: str = "custom") -> Section:
    """Section from a user-provided spanning set and normalizer.

    The basis is orthonormalized (Gram-Schmidt, rank-deficient directions
    dropped); faithfulness is established by solving for an interior point
    and the section is support-restricted if necessary.
    """
    mats = [m if isinstance(m, HermitianMatrix) else herm(m) for m in basis]
    if not mats:
        raise ValidationError("custom_section needs a nonempty basis")
    dims = mats[0].subsystem_dims
    return _make_section(
        mats,
        normalizer if isinstance(normalizer, HermitianMatrix) else herm(normalizer),
        label,
        subsystem_dims=dims,
        descriptor=None,
    )


# -- JSON descriptors ----------------------------------------------------------


def section_to_descriptor(section: Section) -> dict:
    """Serializable descriptor; structured kinds round-trip, anything else is
    dumped as a custom basis + normalizer."""
    from .hermitian import matrix_to_json

    desc = section.descriptor
    if desc is not None and desc.get("kind") == "singleton":
        return {"kind": "singleton", "matrix": matrix_to_json(section.normalizer)}
    if desc is not None:
        return desc
    return {
        "kind": "custom",
        "dims": list(section.dims_tuple()),
        "basis": [matrix_to_json(section.lift(j)) for j in section.span_basis],
        "normalizer": matrix_to_json(section.lift(section.normalizer)),
    }


def section_from_descriptor(obj) -> Section:
    from .hermitian import matrix_from_json

    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError("section descriptor must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "states":
        return states_section(int(obj["dims"][0]))
    if kind == "singleton":
        # the slice through one positive-definite matrix (states is b = I)
        return full_slice_section(matrix_from_json(obj["matrix"]))
    if kind == "channels":
        dims = obj["dims"]
        return channels_section(int(dims[0]), int(dims[1]))
    if kind == "combs":
        return comb_section(tuple(int(d) for d in obj["dims"]))
    if kind == "generalized":
        return generalized_section(section_from_descriptor(obj["base"]), int(obj["dims"][0]))
    if kind == "povm":
        return povm_section(section_from_descriptor(obj["base"]), int(obj["dims"][0]))
    if kind == "custom":
        basis = [matrix_from_json(m) for m in obj["basis"]]
        return custom_section(basis, matrix_from_json(obj["normalizer"]))
    raise ValidationError(f"unknown section kind {kind!r}")
