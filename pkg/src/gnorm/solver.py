"""Self-contained first-order solver for conic programs.

Programs are stated over a list of variable blocks, each either a hermitian
PSD block (a d x d matrix variable constrained to the PSD cone, parametrized
by d^2 real coordinates via ``hvec`` so that the trace inner product is the
Euclidean one) or a free real vector block.  The problem solved is

    minimize    c . z
    subject to  A z = b,   z in K = (product of PSD cones and free spaces).

Algorithm: over-relaxed ADMM, alternating a projection onto the affine set
{A z = b} with a projection onto the cone product.  The affine projection
reuses a cached Cholesky factorization of the constraint Gram matrix A A^T,
which is independent of the penalty parameter, so residual-balancing updates
of the penalty cost nothing.  Dual variables for the equality constraints are
recovered from the first-order conditions of the affine step; the cone-side
scaled dual ``w`` furnishes an exactly dual-cone-feasible slack s = -rho w.

Stopping: mixed absolute/relative primal residual, dual residual and duality
gap all below the requested tolerance.  Divergence of the normalized iterates
beyond a fixed threshold is reported as infeasibility (a heuristic;
first-order methods carry no exact certificates), and prolonged stagnation
ends the run with the best iterate found.

A solve is single-threaded and owns its iterate workspace; concurrent solves
on independent programs are safe (the per-program factorization cache is
written once).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ShapeError, SolverError
from .hermitian import HermitianMatrix, hunvec, hvec

PSD = "psd"
FREE = "free"

DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 50000
OVER_RELAXATION = 1.5
STAGNATION_WINDOW = 5000
PLATEAU_WINDOW = 1200
DIVERGENCE_THRESHOLD = 1e6
CHECK_EVERY = 25
RHO_ADAPT_EVERY = 100


@dataclass(frozen=True, eq=False)
class Block:
    """One variable block: a PSD matrix of size ``dim`` or a free vector."""

    dim: int
    cone: str = PSD

    def __post_init__(self):
        if self.cone not in (PSD, FREE):
            raise ShapeError(f"unknown cone kind {self.cone!r}")
        if self.dim < 1:
            raise ShapeError("block dimension must be positive")

    @property
    def real_dim(self) -> int:
        return self.dim * self.dim if self.cone == PSD else self.dim


@dataclass(frozen=True, eq=False)
class ConeProgram:
    """Standard-form conic program data.

    ``objective`` is a real vector over the concatenated real parametrization
    of the blocks; ``eq_matrix`` / ``eq_rhs`` give the affine equality rows.
    """

    blocks: tuple[Block, ...]
    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    description: str = ""
    _shared: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = sum(b.real_dim for b in self.blocks)
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        a = np.asarray(self.eq_matrix, dtype=float)
        rhs = np.asarray(self.eq_rhs, dtype=float).reshape(-1)
        if c.shape[0] != n:
            raise ShapeError(f"objective length {c.shape[0]} != total block dim {n}")
        if a.ndim != 2 or a.shape[1] != n:
            raise ShapeError(f"constraint matrix shape {a.shape} incompatible with n={n}")
        if rhs.shape[0] != a.shape[0]:
            raise ShapeError(f"rhs length {rhs.shape[0]} != row count {a.shape[0]}")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "eq_matrix", a)
        object.__setattr__(self, "eq_rhs", rhs)

    @property
    def total_dim(self) -> int:
        return sum(b.real_dim for b in self.blocks)

    def with_rhs(self, rhs) -> ConeProgram:
        """Same program with a new right-hand side, sharing the cached
        factorization of A A^T."""
        return ConeProgram(
            self.blocks, self.objective, self.eq_matrix, rhs, self.description, self._shared
        )

    def with_objective(self, objective) -> ConeProgram:
        return ConeProgram(
            self.blocks, objective, self.eq_matrix, self.eq_rhs, self.description, self._shared
        )


@dataclass(frozen=True, eq=False)
class ConeSolution:
    """Certified primal-dual output of :func:`solve`.

    ``primal_point`` holds one entry per block (a hermitian ndarray for PSD
    blocks, a real vector for free blocks); ``dual_vector`` is the equality
    multiplier y and ``dual_slack`` the per-block slack of c - A^T y.
    """

    status: str  # optimal | max_iter | infeasible | unbounded
    primal_value: float
    dual_value: float
    primal_point: tuple
    dual_vector: np.ndarray
    dual_slack: tuple
    primal_residual: float
    dual_residual: float
    gap: float
    iterations: int

    @property
    def max_residual(self) -> float:
        return max(self.primal_residual, self.dual_residual, self.gap)


def _block_slices(blocks: tuple[Block, ...]) -> list[slice]:
    out, k = [], 0
    for b in blocks:
        out.append(slice(k, k + b.real_dim))
        k += b.real_dim
    return out


def _factorization(program: ConeProgram):
    cache = program._shared
    if "chol" not in cache:
        a = program.eq_matrix
        gram = a @ a.T
        try:
            cache["chol"] = ("cho", sla.cho_factor(gram, check_finite=False))
        except np.linalg.LinAlgError:
            # Rank-deficient rows: fall back to an eigen pseudo-inverse.
            w, u = np.linalg.eigh(gram)
            keep = w > 1e-12 * max(1.0, float(w[-1]))
            cache["chol"] = ("pinv", (u[:, keep], 1.0 / w[keep]))
        cache["slices"] = _block_slices(program.blocks)
    return cache


def _gram_solve(cache, rhs: np.ndarray) -> np.ndarray:
    kind, data = cache["chol"]
    if kind == "cho":
        return sla.cho_solve(data, rhs, check_finite=False)
    u, winv = data
    return u @ (winv * (u.T @ rhs))


def _project_cone(z: np.ndarray, blocks, slices) -> np.ndarray:
    out = z.copy()
    for blk, sl in zip(blocks, slices):
        if blk.cone != PSD:
            continue
        mat = hunvec(z[sl], blk.dim)
        w, u = np.linalg.eigh(mat)
        if w[0] >= 0.0:
            continue
        pos = np.clip(w, 0.0, None)
        out[sl] = hvec((u * pos) @ u.conj().T)
    return out


def project_psd(x: HermitianMatrix) -> HermitianMatrix:
    """Euclidean projection onto the PSD cone (the positive part x_+)."""
    w, u = np.linalg.eigh(x.entries)
    pos = np.clip(w, 0.0, None)
    return HermitianMatrix((u * pos) @ u.conj().T, x.subsystem_dims)


def _split(z: np.ndarray, blocks, slices) -> tuple:
    out = []
    for blk, sl in zip(blocks, slices):
        if blk.cone == PSD:
            out.append(hunvec(z[sl], blk.dim))
        else:
            out.append(z[sl].copy())
    return tuple(out)


def solve(
    program: ConeProgram,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    rho: float = 1.0,
    over_relax: float = OVER_RELAXATION,
) -> ConeSolution:
    """Run the operator-splitting iteration on ``program``.

    Deterministic for fixed inputs and iteration parameters.  Returns the
    best iterate seen; ``status`` is "optimal" only if all residuals and the
    gap met ``tol``.
    """
    cache = _factorization(program)
    slices = cache["slices"]
    a, b, c = program.eq_matrix, program.eq_rhs, program.objective
    at = a.T
    m, n = a.shape

    # Unsolvable affine rows mean the program is infeasible outright.
    y_ls = _gram_solve(cache, b)
    if float(np.linalg.norm(a @ (at @ y_ls) - b)) > 1e-8 * (1.0 + float(np.linalg.norm(b))):
        return ConeSolution(
            "infeasible", np.nan, np.nan, _split(np.zeros(n), program.blocks, slices),
            np.zeros(m), _split(np.zeros(n), program.blocks, slices),
            np.inf, np.inf, np.inf, 0,
        )

    v = np.zeros(n)
    w = np.zeros(n)
    rho = float(rho)
    b_scale = 1.0 + float(np.linalg.norm(b))
    c_scale = 1.0 + float(np.linalg.norm(c))
    iterate_scale = 1.0 + b_scale

    best = None
    best_res = np.inf
    best_res_iter = 0
    last_rho_change = 0
    last_plateau_bump = 0
    plateau_bumps = 0
    status = "max_iter"
    it = 0

    for it in range(1, max_iter + 1):
        zeta = v - w - c / rho
        resid = a @ zeta - b
        mult = _gram_solve(cache, resid)
        z = zeta - at @ mult
        zhat = over_relax * z + (1.0 - over_relax) * v
        v = _project_cone(zhat + w, program.blocks, slices)
        w = w + zhat - v

        if it % CHECK_EVERY == 0 or it == max_iter:
            y = -rho * mult
            s = -rho * w
            pres = float(np.linalg.norm(a @ v - b)) / b_scale
            dres = float(np.linalg.norm(c - at @ y - s)) / c_scale
            pobj = float(c @ v)
            dobj = float(b @ y)
            gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
            res = max(pres, dres, gap)
            if res < best_res * (1.0 - 1e-3):
                best_res_iter = it
            if res < best_res:
                best_res = res
                best = (v.copy(), y.copy(), s.copy(), pres, dres, gap, pobj, dobj, it)
            if res <= tol:
                status = "optimal"
                break
            norm_scale = (float(np.linalg.norm(v)) + float(np.linalg.norm(w))) / iterate_scale
            if norm_scale > DIVERGENCE_THRESHOLD:
                status = "unbounded" if pobj < -DIVERGENCE_THRESHOLD else "infeasible"
                break
            if it - max(best_res_iter, last_plateau_bump) >= STAGNATION_WINDOW:
                status = "max_iter"
                break
            # Residual balancing: a lopsided primal/dual residual ratio means
            # the penalty is off; rescaling it (and the scaled dual w with it)
            # does not touch the cached factorization.
            if it % RHO_ADAPT_EVERY == 0 and it - last_rho_change >= 200:
                if dres > 10.0 * pres and rho > 1e-4:
                    rho /= 2.0
                    w *= 2.0
                    last_rho_change = it
                elif pres > 10.0 * dres and rho < 1e4:
                    rho *= 2.0
                    w /= 2.0
                    last_rho_change = it
                elif (
                    it - max(best_res_iter, last_rho_change) >= PLATEAU_WINDOW
                    and plateau_bumps < 6
                ):
                    # Balanced residuals that stopped improving: walk the
                    # penalty up an exploration ladder (wrapping around).
                    # Each bump restarts the stagnation window once; the
                    # ladder is finite, so termination stays bounded.
                    new_rho = rho * 4.0 if rho < 1e3 else 1e-2
                    w *= rho / new_rho
                    rho = new_rho
                    last_rho_change = it
                    last_plateau_bump = it
                    plateau_bumps += 1

    if best is None:
        y = -rho * _gram_solve(cache, a @ (v - w - c / rho) - b)
        s = -rho * w
        best = (
            v.copy(), y.copy(), s.copy(),
            float(np.linalg.norm(a @ v - b)) / b_scale,
            float(np.linalg.norm(c - at @ y - s)) / c_scale,
            abs(float(c @ v) - float(b @ y)),
            float(c @ v), float(b @ y), it,
        )

    v_b, y_b, s_b, pres, dres, gap, pobj, dobj, best_it = best
    return ConeSolution(
        status=status,
        primal_value=pobj,
        dual_value=dobj,
        primal_point=_split(v_b, program.blocks, slices),
        dual_vector=y_b,
        dual_slack=_split(s_b, program.blocks, slices),
        primal_residual=pres,
        dual_residual=dres,
        gap=gap,
        iterations=it,
    )


def require_optimal(solution: ConeSolution, context: str) -> ConeSolution:
    if solution.status != "optimal":
        raise SolverError(
            f"{context}: solver stopped with status {solution.status!r} "
            f"(primal {solution.primal_value:.9g}, dual {solution.dual_value:.9g}, "
            f"max residual {solution.max_residual:.3e})",
            solution,
        )
    return solution


def dump_program(program: ConeProgram) -> str:
    """Debug text dump (objective, then constraint triplets row/col/value).

    Not a stability-guaranteed format; meant for cross-checking against
    external solvers.
    """
    lines = [f"# {program.description or 'cone program'}"]
    lines.append("blocks " + " ".join(f"{b.cone}:{b.dim}" for b in program.blocks))
    lines.append("objective " + " ".join(f"{x:.17g}" for x in program.objective))
    rows, cols = np.nonzero(program.eq_matrix)
    for r, cidx in zip(rows, cols):
        lines.append(f"A {r} {cidx} {program.eq_matrix[r, cidx]:.17g}")
    lines.append("rhs " + " ".join(f"{x:.17g}" for x in program.eq_rhs))
    return "\n".join(lines)
