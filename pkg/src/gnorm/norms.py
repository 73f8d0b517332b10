"""Norms attached to sections of the PSD cone, with certified witnesses.

For a section B with span J, normalizer n and dual section B~, the value
computed by :func:`base_norm` is

    |x|_B  =  min { Tr(q n) : q in J,  q - x >= 0,  q + x >= 0 }
           =  max { Tr(x (y1 - y2)) : y1, y2 >= 0,  y1 + y2 in B~ },

both sides coming out of a single operator-splitting solve (the maximizers
are the equality multipliers), together with the duality gap.  On PSD input
the same value is a plain linear program over the dual section,

    |a|_B  =  max { Tr(a y) : y in B~ }  =  min { Tr(q n) : q in J, q >= a },

and the minimizing side is exactly 2^(max-relative entropy of a from the
optimal member).  Closed forms replace the solver whenever the section is the
full slice {x >= 0 : Tr(x n) = 1} (value |n^(1/2) x n^(1/2)|_1) or a single
matrix {b} (value |b^(-1/2) x b^(-1/2)|, +inf off the support of b).

Specializations: the channel-section norm of a Choi-matrix difference is the
diamond norm, the network-section analogue generalizes it to combs, and the
order-unit norm over {I (x) rho} gives the conditional min-entropy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import solver
from .choi import ChoiMatrix
from .errors import DomainError, ShapeError, ValidationError
from .hermitian import (
    HermitianMatrix,
    eig,
    frobenius_norm,
    herm,
    hunvec_matrix,
    hvec,
    op_norm,
    pinv_sqrt,
    psd_check,
    sqrt_psd,
    support_projection,
    trace_norm,
    trace_pair,
)
from .sections import Section, channels_section, comb_section, contains, dual_section

DEFAULT_NORM_TOL = 1e-7
INF = math.inf


@dataclass(frozen=True, eq=False)
class NormResult:
    """Norm value with optimizers for both variational sides.

    ``value`` is the midpoint of the two conic objective values (they agree
    up to ``gap``); for closed forms all three coincide.  ``primal_witness``
    is the minimizing q (so value = Tr(q n), -q <= x <= q); ``dual_witness``
    is the pair (y1, y2) of PSD matrices with y1 + y2 in the dual section
    attaining Tr(x (y1 - y2)).  Witnesses satisfy their constraints within a
    small multiple of the solve tolerance; both are None for infinite values.
    """

    value: float
    primal_value: float
    dual_value: float
    gap: float
    method: str  # closed_form | conic
    primal_witness: HermitianMatrix | None = None
    dual_witness: tuple[HermitianMatrix, HermitianMatrix] | None = None
    status: str = "optimal"
    iterations: int = 0

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


def _infinite_result() -> NormResult:
    return NormResult(INF, INF, INF, 0.0, "closed_form", None, None, "unsupported", 0)


def _zero_result(section: Section) -> NormResult:
    d = section.ambient_dim
    q = section.lift(herm(np.zeros((d, d))))
    half = section.lift(section.normalizer / 2.0)
    return NormResult(0.0, 0.0, 0.0, 0.0, "closed_form", q, (half, half), "optimal", 0)


# -- closed forms -------------------------------------------------------------


def base_norm_singleton(b: HermitianMatrix, x: HermitianMatrix) -> float:
    """|b^(1/2) x b^(1/2)|_1 for PSD b: the norm of the full slice through b."""
    r = sqrt_psd(b)
    return trace_norm(HermitianMatrix(r.entries @ x.entries @ r.entries))


def order_unit_norm_singleton(b: HermitianMatrix, x: HermitianMatrix) -> float:
    """|b^(-1/2) x b^(-1/2)| on the support of b; +inf when x leaks outside."""
    p = support_projection(b)
    leak = x.entries - p.entries @ x.entries @ p.entries
    if float(np.linalg.norm(leak)) > 1e-9 * (1.0 + frobenius_norm(x)):
        return INF
    r = pinv_sqrt(b)
    return op_norm(HermitianMatrix(r.entries @ x.entries @ r.entries))


def dmax(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """Max-relative entropy log2 inf{t : a <= t b}; +inf off-support.

    Returns -inf for a = 0 (every positive t works).
    """
    if not psd_check(a, 1e-8) or not psd_check(b, 1e-8):
        raise DomainError("dmax is defined for PSD arguments")
    t = order_unit_norm_singleton(b, a)
    if t == INF:
        return INF
    if t <= 0.0:
        return -INF
    return math.log2(t)


def _full_slice_norm(section: Section, x: HermitianMatrix) -> NormResult:
    n = section.normalizer
    r = sqrt_psd(n)
    rinv = pinv_sqrt(n)
    z = HermitianMatrix(r.entries @ x.entries @ r.entries)
    s = eig(z)
    value = float(np.sum(np.abs(s.eigenvalues)))
    cutoff = 1e-12 * max(1.0, float(np.max(np.abs(s.eigenvalues))) if s.eigenvalues.size else 0.0)
    pos = s.eigenvalues > cutoff
    neg = s.eigenvalues < -cutoff
    u = s.eigenvectors
    p_pos = (u[:, pos] @ u[:, pos].conj().T) if np.any(pos) else np.zeros_like(z.entries)
    p_neg = (u[:, neg] @ u[:, neg].conj().T) if np.any(neg) else np.zeros_like(z.entries)
    p_ker = np.eye(z.dim) - p_pos - p_neg
    z_abs = (u * np.abs(s.eigenvalues)) @ u.conj().T
    q = HermitianMatrix(rinv.entries @ z_abs @ rinv.entries, section.subsystem_dims)
    y1 = HermitianMatrix(r.entries @ (p_pos + p_ker / 2) @ r.entries, section.subsystem_dims)
    y2 = HermitianMatrix(r.entries @ (p_neg + p_ker / 2) @ r.entries, section.subsystem_dims)
    return NormResult(
        value, value, value, 0.0, "closed_form",
        section.lift(q), (section.lift(y1), section.lift(y2)),
    )


def _singleton_norm(section: Section, x: HermitianMatrix) -> NormResult:
    b = section.interior_point
    value = order_unit_norm_singleton(b, x)
    if value == INF:
        return _infinite_result()
    rinv = pinv_sqrt(b)
    m = HermitianMatrix(rinv.entries @ x.entries @ rinv.entries)
    s = eig(m)
    q = section.lift((value * b).with_dims(section.subsystem_dims))
    top = int(np.argmax(np.abs(s.eigenvalues)))
    u = s.eigenvectors[:, top : top + 1]
    y = HermitianMatrix(rinv.entries @ (u @ u.conj().T) @ rinv.entries, section.subsystem_dims)
    zero = herm(np.zeros_like(y.entries), section.subsystem_dims)
    pair = (y, zero) if s.eigenvalues[top] >= 0 else (zero, y)
    return NormResult(
        value, value, value, 0.0, "closed_form",
        q, (section.lift(pair[0]), section.lift(pair[1])),
    )


# -- conic programs ------------------------------------------------------------


def _base_norm_program(section: Section) -> solver.ConeProgram:
    got = section._cache.get("prog_base_norm")
    if got is None:
        d = section.ambient_dim
        n_h = d * d
        k = section.span_dim
        m_span = section.span_matrix()
        a = np.zeros((2 * n_h, 2 * n_h + k))
        a[:n_h, :n_h] = -np.eye(n_h)
        a[:n_h, 2 * n_h :] = m_span
        a[n_h:, n_h : 2 * n_h] = -np.eye(n_h)
        a[n_h:, 2 * n_h :] = m_span
        c = np.zeros(2 * n_h + k)
        c[2 * n_h :] = np.array([trace_pair(j, section.normalizer) for j in section.span_basis])
        blocks = (
            solver.Block(d, solver.PSD),
            solver.Block(d, solver.PSD),
            solver.Block(k, solver.FREE),
        )
        got = solver.ConeProgram(
            blocks, c, a, np.zeros(2 * n_h), f"base norm over {section.label}"
        )
        section._cache["prog_base_norm"] = got
    return got


def _psd_norm_program(section: Section) -> solver.ConeProgram:
    got = section._cache.get("prog_psd_norm")
    if got is None:
        d = section.ambient_dim
        m_span = section.span_matrix()
        rhs = np.array([trace_pair(j, section.normalizer) for j in section.span_basis])
        blocks = (solver.Block(d, solver.PSD),)
        got = solver.ConeProgram(
            blocks,
            np.zeros(d * d),
            m_span.T,
            rhs,
            f"linear functional over dual of {section.label}",
        )
        section._cache["prog_psd_norm"] = got
    return got


def base_norm(
    section: Section,
    x: HermitianMatrix,
    tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
    prefer_closed: bool = True,
) -> NormResult:
    """Norm of an arbitrary hermitian x relative to the section.

    Closed forms handle full-slice and one-member sections (disable with
    ``prefer_closed=False`` to force the conic path, e.g. for
    cross-validation); otherwise one conic solve returns matching primal and
    dual optimizers.  +inf is returned (not raised) when x is not supported
    on a restricted section's carrier subspace.
    """
    xc = section.compress(x)
    if xc is None:
        return _infinite_result()
    scale = frobenius_norm(xc)
    if scale == 0.0:
        return _zero_result(section)
    if prefer_closed and section.span_dim == section.ambient_dim ** 2:
        return _full_slice_norm(section, xc)
    if prefer_closed and section.span_dim == 1:
        return _singleton_norm(section, xc)

    xn = xc / scale
    program = _base_norm_program(section).with_rhs(
        np.concatenate([hvec(xn), -hvec(xn)])
    )
    sol = solver.solve(program, tol=tol, max_iter=max_iter)
    solver.require_optimal(sol, f"base_norm over {section.label}")
    d = section.ambient_dim
    n_h = d * d
    coords = sol.primal_point[2]
    q = section.from_span_coords(coords) * scale
    y1 = hunvec_matrix(sol.dual_vector[:n_h], d, section.subsystem_dims)
    y2 = hunvec_matrix(sol.dual_vector[n_h:], d, section.subsystem_dims)
    primal = sol.primal_value * scale
    dual = sol.dual_value * scale
    return NormResult(
        max(0.0, 0.5 * (primal + dual)), primal, dual, abs(primal - dual), "conic",
        section.lift(q), (section.lift(y1), section.lift(y2)),
        sol.status, sol.iterations,
    )


def dual_base_norm(
    section: Section,
    x: HermitianMatrix,
    tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
) -> NormResult:
    """Norm dual to :func:`base_norm`: the base norm of the dual section."""
    return base_norm(dual_section(section), x, tol=tol, max_iter=max_iter)


def base_norm_psd(
    section: Section,
    a: HermitianMatrix,
    tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
    prefer_closed: bool = True,
) -> NormResult:
    """Section norm of a PSD matrix via the linear program over the dual.

    The maximizing side is sup Tr(a y) over dual members y; the minimizing
    side inf Tr(q n) over members' cone {q in J : q >= a} reproduces the
    max-relative-entropy form of the same value.
    """
    ac = section.compress(a)
    if ac is None:
        return _infinite_result()
    if not psd_check(ac, 1e-8):
        raise DomainError("base_norm_psd needs a PSD input")
    scale = frobenius_norm(ac)
    if scale == 0.0:
        return _zero_result(section)
    if prefer_closed and section.span_dim == section.ambient_dim ** 2:
        return _full_slice_norm(section, ac)
    if prefer_closed and section.span_dim == 1:
        return _singleton_norm(section, ac)

    an = ac / scale
    program = _psd_norm_program(section).with_objective(-hvec(an))
    sol = solver.solve(program, tol=tol, max_iter=max_iter)
    solver.require_optimal(sol, f"base_norm_psd over {section.label}")
    y = herm(sol.primal_point[0], section.subsystem_dims)
    q = section.from_span_coords(-sol.dual_vector) * scale
    sup_side = -sol.primal_value * scale
    inf_side = -sol.dual_value * scale
    zero = herm(np.zeros_like(y.entries), section.subsystem_dims)
    return NormResult(
        max(0.0, 0.5 * (sup_side + inf_side)), inf_side, sup_side,
        abs(sup_side - inf_side), "conic",
        section.lift(q), (section.lift(y), section.lift(zero)),
        sol.status, sol.iterations,
    )


# -- named specializations -----------------------------------------------------


def _as_choi_matrix(x) -> HermitianMatrix:
    m = x.matrix if isinstance(x, ChoiMatrix) else x
    if len(m.subsystem_dims) != 2:
        raise ShapeError("expected a matrix with (output, input) subsystem dims")
    return m


def diamond_norm(
    x, tol: float = DEFAULT_NORM_TOL, max_iter: int = solver.DEFAULT_MAX_ITER
) -> NormResult:
    """Channel-section norm of a hermitian matrix on K (x) H.

    For a difference of channel Choi matrices this is the diamond norm of the
    difference map; the dual optimizer is an optimal two-outcome tester pair.
    """
    m = _as_choi_matrix(x)
    d_out, d_in = m.subsystem_dims
    return base_norm(channels_section(d_in, d_out), m, tol=tol, max_iter=max_iter)


def ncomb_norm(
    dims, x: HermitianMatrix, tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
) -> NormResult:
    """Network-section norm over the spaces H_0, ..., H_n (dims in that order).

    With an even count 2N of spaces this is the N-round network
    distinguishability norm.
    """
    dims = tuple(int(d) for d in dims)
    total = math.prod(dims)
    if x.dim != total:
        raise ShapeError(f"matrix dim {x.dim} != product of dims {dims}")
    xm = x.with_dims(tuple(reversed(dims)))
    return base_norm(comb_section(dims), xm, tol=tol, max_iter=max_iter)


def hmin(
    sigma: HermitianMatrix, tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
) -> float:
    """Conditional min-entropy of K given H for PSD sigma on K (x) H.

    Computed as -log2 of the order-unit norm over {I_K (x) rho}: the dual of
    the channel-section norm applied to sigma.
    """
    if len(sigma.subsystem_dims) != 2:
        raise ShapeError("hmin needs sigma with (K, H) subsystem dims")
    if not psd_check(sigma, 1e-8):
        raise DomainError("hmin needs a PSD matrix")
    d_out, d_in = sigma.subsystem_dims
    res = dual_base_norm(channels_section(d_in, d_out), sigma, tol=tol, max_iter=max_iter)
    return -math.log2(res.value)


# -- optimizer certification -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExtremalCertificate:
    """Outcome of checking a claimed optimizer of the PSD-norm programs.

    ``feasible`` means the complementary-slackness witness exists within
    tolerance: for a dual candidate y0, some q in the span cone with
    a <= q and (q - a) y0 = 0; for a member candidate b0, a scale t and a
    dual element y0 with a <= t b0 and (t b0 - a) y0 = 0.
    """

    feasible: bool
    witness_q: HermitianMatrix | None
    witness_dual: HermitianMatrix | None
    scale_t: float
    slack_residual: float
    optimum_gap: float
    norm_value: float


def _certify_program(section: Section, a: HermitianMatrix, objective_mat: HermitianMatrix):
    d = section.ambient_dim
    n_h = d * d
    k = section.span_dim
    m_span = section.span_matrix()
    arows = np.zeros((2 * n_h, 2 * n_h + k))
    arows[:n_h, :n_h] = -np.eye(n_h)
    arows[:n_h, 2 * n_h :] = m_span
    arows[n_h:, n_h : 2 * n_h] = -np.eye(n_h)
    arows[n_h:, 2 * n_h :] = m_span
    rhs = np.concatenate([np.zeros(n_h), hvec(a)])
    c = np.zeros(2 * n_h + k)
    c[2 * n_h :] = np.array([trace_pair(j, objective_mat) for j in section.span_basis])
    blocks = (
        solver.Block(d, solver.PSD),
        solver.Block(d, solver.PSD),
        solver.Block(k, solver.FREE),
    )
    return solver.ConeProgram(
        blocks, c, arows, rhs, f"slackness witness search over {section.label}"
    )


def certify_extremal_psd(
    section: Section,
    a: HermitianMatrix,
    dual_candidate: HermitianMatrix | None = None,
    member_candidate: HermitianMatrix | None = None,
    tol: float = 1e-6,
    solve_tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
) -> ExtremalCertificate:
    """Check a claimed maximizer (dual element) or minimizer (member) of the
    PSD-norm value for ``a``.

    Exactly one candidate must be given.  The search is a conic program with
    the candidate as data; its optimal value exceeds the candidate's
    objective exactly by the candidate's suboptimality, so ``feasible`` is
    decided by that gap.
    """
    if (dual_candidate is None) == (member_candidate is None):
        raise ValidationError("pass exactly one of dual_candidate / member_candidate")
    ac = section.compress(a)
    if ac is None:
        raise ValidationError("input has weight outside the section's carrier space")
    if not psd_check(ac, 1e-8):
        raise DomainError("certify_extremal_psd needs PSD input")

    if dual_candidate is not None:
        y0 = section.compress(dual_candidate)
        if y0 is None or not contains(dual_section(section), y0, max(1e-6, 10 * tol)):
            raise ValidationError("dual candidate is not a member of the dual section")
        program = _certify_program(section, ac, y0)
        sol = solver.solve(program, tol=solve_tol, max_iter=max_iter)
        solver.require_optimal(sol, "certify_extremal_psd (dual candidate)")
        q = section.from_span_coords(sol.primal_point[2])
        paired = trace_pair(ac, y0)
        gap = sol.primal_value - paired
        slack = float(np.linalg.norm((q.entries - ac.entries) @ y0.entries))
        scale = max(1.0, abs(paired))
        return ExtremalCertificate(
            feasible=bool(gap <= tol * scale),
            witness_q=section.lift(q),
            witness_dual=section.lift(y0),
            scale_t=sol.primal_value,
            slack_residual=slack,
            optimum_gap=float(gap),
            norm_value=float(sol.primal_value),
        )

    b0 = section.compress(member_candidate)
    if b0 is None or not contains(section, b0, max(1e-6, 10 * tol)):
        raise ValidationError("member candidate is not a member of the section")
    t_min = order_unit_norm_singleton(b0, ac)
    norm = base_norm_psd(section, a, tol=solve_tol, max_iter=max_iter)
    if t_min == INF:
        return ExtremalCertificate(False, norm.primal_witness, None, INF, INF, INF, norm.value)
    y_star = section.compress(norm.dual_witness[0])
    gap = t_min - norm.value
    slack = float(np.linalg.norm((t_min * b0.entries - ac.entries) @ y_star.entries))
    scale = max(1.0, norm.value)
    return ExtremalCertificate(
        feasible=bool(gap <= tol * scale),
        witness_q=section.lift((t_min * b0).with_dims(section.subsystem_dims)),
        witness_dual=norm.dual_witness[0],
        scale_t=t_min,
        slack_residual=slack,
        optimum_gap=float(gap),
        norm_value=norm.value,
    )
