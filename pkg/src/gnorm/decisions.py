"""Generalized experiments, decision problems and optimal procedures.

An experiment is a finite family of members of one section together with a
prior.  A decision procedure for a payoff assignment is a measurement on the
section (effects PSD, summing into the dual section) or, more generally, a
completely positive map whose Choi matrix sends the section into density
matrices.  The maximal average payoff equals the norm of the payoff-weighted
block matrix

    xi = sum_theta  prior_theta * W_theta^T (x) b_theta

over the section {I (x) b}, and every optimizer is certified by a
complementary-slackness witness q:  xi <= I (x) q  and  ((I (x) q) - xi) X^T = 0.
Both conditions are linear once the candidate X is fixed, so certification is
one conic solve whose optimal value exceeds the candidate's payoff exactly by
its suboptimality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import solver
from .choi import ChoiMatrix, is_channel_choi
from .errors import DomainError, ShapeError, ValidationError
from .hermitian import (
    HermitianMatrix,
    abs_pos_neg,
    eig,
    herm,
    hunvec_matrix,
    hvec,
    identity,
    matrix_from_json,
    matrix_to_json,
    op_norm,
    partial_trace,
    pinv_sqrt,
    psd_check,
    support_projection,
    tensor,
    trace,
    trace_norm,
    trace_pair,
    transpose_in_basis,
    zeros,
)
from .norms import DEFAULT_NORM_TOL, NormResult, base_norm, base_norm_psd
from .sections import (
    Section,
    contains,
    dual_section,
    id_tensor_section,
    section_from_descriptor,
    section_to_descriptor,
    states_section,
)

MEMBER_TOL = 1e-6
PRIOR_TOL = 1e-12


def _require_unrestricted(section: Section, what: str):
    if section.embedding is not None:
        raise ValidationError(
            f"{what} needs a faithful (unrestricted) section; rebuild on the support"
        )


@dataclass(frozen=True, eq=False)
class Experiment:
    """A parametrized family of section members with a prior."""

    section: Section
    family: tuple[HermitianMatrix, ...]
    prior: np.ndarray

    def __post_init__(self):
        fam = tuple(self.family)
        if not fam:
            raise ValidationError("an experiment needs at least one member")
        for idx, b in enumerate(fam):
            if not contains(self.section, b, MEMBER_TOL):
                raise ValidationError(f"family element {idx} is not a section member")
        p = np.asarray(self.prior, dtype=float).reshape(-1)
        if p.shape[0] != len(fam):
            raise ValidationError("prior length must match the family")
        if np.any(p < -PRIOR_TOL) or abs(float(p.sum()) - 1.0) > PRIOR_TOL:
            raise ValidationError("prior must be a probability vector (sum 1, entries >= 0)")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "prior", np.clip(p, 0.0, None))

    @property
    def size(self) -> int:
        return len(self.family)


@dataclass(frozen=True, eq=False)
class DecisionProblem:
    """Classical payoff table w(theta, d) in [0, 1] or quantum payoff
    operators 0 <= W_theta <= I."""

    kind: str  # classical | quantum
    table: np.ndarray | None = None
    operators: tuple[HermitianMatrix, ...] | None = None

    def __post_init__(self):
        if self.kind == "classical":
            t = np.asarray(self.table, dtype=float)
            if t.ndim != 2:
                raise ValidationError("classical payoff table must be 2-d (theta, d)")
            if np.any(t < -1e-12) or np.any(t > 1 + 1e-12):
                raise ValidationError("payoff table entries must lie in [0, 1]")
            object.__setattr__(self, "table", np.clip(t, 0.0, 1.0))
        elif self.kind == "quantum":
            ops = tuple(self.operators)
            if not ops:
                raise ValidationError("quantum problem needs payoff operators")
            d = ops[0].dim
            for idx, w in enumerate(ops):
                if w.dim != d:
                    raise ValidationError("payoff operators must share one dimension")
                if not psd_check(w, 1e-9) or op_norm(w) > 1 + 1e-10:
                    raise ValidationError(f"payoff operator {idx} must satisfy 0 <= W <= I")
            object.__setattr__(self, "operators", ops)
        else:
            raise ValidationError(f"unknown decision problem kind {self.kind!r}")

    @property
    def n_outcomes(self) -> int:
        return self.table.shape[1] if self.kind == "classical" else self.operators[0].dim

    @property
    def n_hypotheses(self) -> int:
        return self.table.shape[0] if self.kind == "classical" else len(self.operators)

    def complement(self) -> DecisionProblem:
        """Payoff <-> loss swap, W' = I - W."""
        if self.kind == "classical":
            return DecisionProblem("classical", table=1.0 - self.table)
        eye = identity(self.n_outcomes)
        return DecisionProblem("quantum", operators=tuple(eye - w for w in self.operators))


def classical_problem(table) -> DecisionProblem:
    return DecisionProblem("classical", table=np.asarray(table, dtype=float))


def quantum_problem(operators) -> DecisionProblem:
    return DecisionProblem("quantum", operators=tuple(operators))


@dataclass(frozen=True, eq=False)
class GeneralizedPOVM:
    """Measurement on a section: PSD effects summing into the dual section."""

    section: Section
    effects: tuple[HermitianMatrix, ...]
    validation_tol: float = MEMBER_TOL

    def __post_init__(self):
        effs = tuple(self.effects)
        if not effs:
            raise ValidationError("a measurement needs at least one effect")
        tol = self.validation_tol
        for idx, m in enumerate(effs):
            if not psd_check(m, tol):
                raise ValidationError(f"effect {idx} is not PSD within {tol:.0e}")
        total = effs[0]
        for m in effs[1:]:
            total = total + m
        if not contains(dual_section(self.section), total, tol):
            raise ValidationError("effects do not sum into the dual section")
        object.__setattr__(self, "effects", effs)

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def total(self) -> HermitianMatrix:
        total = self.effects[0]
        for m in self.effects[1:]:
            total = total + m
        return total

    def probabilities(self, b: HermitianMatrix) -> np.ndarray:
        return np.array([trace_pair(m, b) for m in self.effects])


@dataclass(frozen=True, eq=False)
class Certificate:
    """Complementary-slackness check of a candidate decision procedure."""

    feasible: bool
    witness_q: HermitianMatrix | None
    slack_residual: float
    majorization_residual: float
    candidate_payoff: float
    payoff_at_optimum: float


@dataclass(frozen=True, eq=False)
class PayoffResult:
    """Maximal average payoff with the optimizing procedure.

    ``choi`` is the Choi matrix of an optimal procedure (block-diagonal for
    classical problems); ``povm`` carries the measurement form whenever the
    problem is classical.
    """

    value: float
    norm: NormResult
    choi: HermitianMatrix
    povm: GeneralizedPOVM | None


# -- payoff machinery ----------------------------------------------------------


def classical_xi_blocks(experiment: Experiment, problem: DecisionProblem):
    w = problem.table
    if w.shape[0] != experiment.size:
        raise ShapeError("payoff table row count must match the experiment family")
    blocks = []
    for d in range(w.shape[1]):
        acc = zeros(experiment.section.dims_tuple())
        for th, b in enumerate(experiment.family):
            acc = acc + float(experiment.prior[th] * w[th, d]) * b
        blocks.append(acc)
    return blocks


def build_xi(experiment: Experiment, problem: DecisionProblem) -> HermitianMatrix:
    """Payoff-weighted block matrix sum_theta prior * W^T (x) b on D (x) H."""
    _require_unrestricted(experiment.section, "build_xi")
    h_dims = experiment.section.dims_tuple()
    if problem.kind == "classical":
        blocks = classical_xi_blocks(experiment, problem)
        n_d = len(blocks)
        out = zeros((n_d,) + h_dims)
        for d, blk in enumerate(blocks):
            e = np.zeros((n_d, n_d))
            e[d, d] = 1.0
            out = out + tensor(herm(e), blk)
        return out
    ops = problem.operators
    if len(ops) != experiment.size:
        raise ShapeError("one payoff operator per family element is required")
    n_d = problem.n_outcomes
    out = zeros((n_d,) + h_dims)
    for th, b in enumerate(experiment.family):
        out = out + float(experiment.prior[th]) * tensor(transpose_in_basis(ops[th]), b)
    return out


def _classical_payoff_program(section: Section, n_outcomes: int) -> solver.ConeProgram:
    key = ("prog_payoff", n_outcomes)
    got = section._cache.get(key)
    if got is None:
        d = section.ambient_dim
        n_h = d * d
        k = section.span_dim
        m_span = section.span_matrix()
        a = np.zeros((n_outcomes * n_h, n_outcomes * n_h + k))
        for j in range(n_outcomes):
            rows = slice(j * n_h, (j + 1) * n_h)
            a[rows, rows] = -np.eye(n_h)
            a[rows, n_outcomes * n_h :] = m_span
        c = np.zeros(n_outcomes * n_h + k)
        c[n_outcomes * n_h :] = np.array(
            [trace_pair(jm, section.normalizer) for jm in section.span_basis]
        )
        blocks = tuple(solver.Block(d, solver.PSD) for _ in range(n_outcomes)) + (
            solver.Block(k, solver.FREE),
        )
        got = solver.ConeProgram(
            blocks, c, a, np.zeros(n_outcomes * n_h),
            f"classical payoff over {section.label} with {n_outcomes} outcomes",
        )
        section._cache[key] = got
    return got


def max_payoff(
    experiment: Experiment,
    problem: DecisionProblem,
    tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
) -> PayoffResult:
    """Maximal average payoff over all decision procedures.

    Classical problems solve the block-collapsed program
    min { Tr(q n) : q in span, q >= xi_d for all d } whose equality
    multipliers are directly the optimal effects; quantum problems maximize
    the linear payoff functional over the dual of {I (x) b : b in section}
    and read the optimal Choi matrix off the maximizer.
    """
    section = experiment.section
    _require_unrestricted(section, "max_payoff")
    if problem.kind == "classical":
        blocks = classical_xi_blocks(experiment, problem)
        n_d = len(blocks)
        program = _classical_payoff_program(section, n_d).with_rhs(
            np.concatenate([hvec(b) for b in blocks])
        )
        sol = solver.solve(program, tol=tol, max_iter=max_iter)
        solver.require_optimal(sol, "max_payoff (classical)")
        d = section.ambient_dim
        n_h = d * d
        effs = [
            hunvec_matrix(sol.dual_vector[j * n_h : (j + 1) * n_h], d) for j in range(n_d)
        ]
        q = section.from_span_coords(sol.primal_point[-1])
        primal = sol.primal_value
        dual = sol.dual_value
        value = max(0.0, 0.5 * (primal + dual))
        norm = NormResult(
            value, primal, dual, abs(primal - dual), "conic",
            q, None, sol.status, sol.iterations,
        )
        povm = GeneralizedPOVM(section, tuple(effs), validation_tol=max(1e-5, 100 * tol))
        choi = povm_to_choi(povm)
        return PayoffResult(value, norm, choi, povm)

    xi = build_xi(experiment, problem)
    n_d = problem.n_outcomes
    wrapped = _id_tensor(section, n_d)
    norm = base_norm_psd(wrapped, xi, tol=tol, max_iter=max_iter)
    y_star = norm.dual_witness[0]
    choi = transpose_in_basis(y_star).with_dims((n_d,) + section.dims_tuple())
    return PayoffResult(norm.value, norm, choi, None)


def _id_tensor(section: Section, n_d: int) -> Section:
    key = ("id_tensor", n_d)
    got = section._cache.get(key)
    if got is None:
        got = id_tensor_section(section, n_d)
        section._cache[key] = got
    return got


def povm_to_choi(povm: GeneralizedPOVM) -> HermitianMatrix:
    """Block-diagonal Choi matrix with blocks M_d^T."""
    n_d = povm.n_outcomes
    dims = (n_d,) + povm.section.dims_tuple()
    out = zeros(dims)
    for d, m in enumerate(povm.effects):
        e = np.zeros((n_d, n_d))
        e[d, d] = 1.0
        out = out + tensor(herm(e), transpose_in_basis(m))
    return out


def choi_to_povm(section: Section, choi: HermitianMatrix, tol: float = MEMBER_TOL) -> GeneralizedPOVM:
    """Diagonal blocks of a procedure Choi matrix, transposed into effects."""
    dims = choi.subsystem_dims
    if len(dims) < 2:
        raise ShapeError("expected a block matrix with (D, H...) subsystem dims")
    n_d = dims[0]
    h = choi.dim // n_d
    effs = []
    for d in range(n_d):
        blk = choi.entries[d * h : (d + 1) * h, d * h : (d + 1) * h]
        effs.append(transpose_in_basis(herm(blk, section.dims_tuple())))
    return GeneralizedPOVM(section, tuple(effs), validation_tol=tol)


# -- discrimination ------------------------------------------------------------


def bayes_error(
    section: Section,
    b0: HermitianMatrix,
    b1: HermitianMatrix,
    lam: float,
    tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
) -> tuple[float, GeneralizedPOVM, NormResult]:
    """Minimal probability of error deciding between two members at prior lam.

    Equals (1 - |lam b0 - (1-lam) b1|_B) / 2; the optimal two-outcome
    measurement is read off the norm's dual optimizer (M0 = y1, M1 = y2).
    """
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError("prior must lie in [0, 1]")
    for name, b in (("b0", b0), ("b1", b1)):
        if not contains(section, b, MEMBER_TOL):
            raise ValidationError(f"{name} is not a member of the section")
    x = lam * b0 - (1.0 - lam) * b1
    res = base_norm(section, x, tol=tol, max_iter=max_iter)
    error = 0.5 * (1.0 - res.value)
    y1, y2 = res.dual_witness
    povm = GeneralizedPOVM(section, (y1, y2), validation_tol=max(1e-5, 100 * tol))
    return error, povm, res


def multi_hypothesis_error(
    section: Section,
    family,
    prior,
    tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
) -> tuple[float, GeneralizedPOVM, PayoffResult]:
    """Minimal average error probability for k hypotheses.

    One minus the maximal payoff of the correct-guess problem (identity
    payoff table).
    """
    experiment = Experiment(section, tuple(family), prior)
    problem = classical_problem(np.eye(experiment.size))
    pay = max_payoff(experiment, problem, tol=tol, max_iter=max_iter)
    return 1.0 - pay.value, pay.povm, pay


def helstrom(
    rho0: HermitianMatrix, rho1: HermitianMatrix, lam: float
) -> tuple[float, GeneralizedPOVM]:
    """Closed-form minimal error for two density matrices.

    The first effect projects onto the strictly positive eigenspace of
    lam rho0 - (1-lam) rho1; the kernel is assigned to the second outcome.
    """
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError("prior must lie in [0, 1]")
    for name, r in (("rho0", rho0), ("rho1", rho1)):
        if not psd_check(r, 1e-8) or abs(trace(r) - 1.0) > 1e-8:
            raise ValidationError(f"{name} must be a density matrix")
    x = lam * rho0 - (1.0 - lam) * rho1
    error = 0.5 - 0.5 * trace_norm(x)
    _, x_pos, _ = abs_pos_neg(x)
    m0 = support_projection(x_pos)
    m1 = identity(rho0.dims if rho0.subsystem_dims else rho0.dim) - m0
    povm = GeneralizedPOVM(states_section(rho0.dim), (m0, m1))
    return error, povm


# -- certification ---------------------------------------------------------------


def _certify_payoff_program(section: Section, n_d: int) -> solver.ConeProgram:
    key = ("prog_certify", n_d)
    got = section._cache.get(key)
    if got is None:
        h = section.ambient_dim
        n_h = h * h
        big = n_d * h
        n_big = big * big
        k = section.span_dim
        lift = np.column_stack(
            [hvec(tensor(identity(n_d), jm)) for jm in section.span_basis]
        )
        a = np.zeros((n_h + n_big, n_h + n_big + k))
        a[:n_h, :n_h] = -np.eye(n_h)
        a[:n_h, n_h + n_big :] = section.span_matrix()
        a[n_h : n_h + n_big, n_h : n_h + n_big] = -np.eye(n_big)
        a[n_h : n_h + n_big, n_h + n_big :] = lift
        blocks = (
            solver.Block(h, solver.PSD),
            solver.Block(big, solver.PSD),
            solver.Block(k, solver.FREE),
        )
        got = solver.ConeProgram(
            blocks, np.zeros(n_h + n_big + k), a, np.zeros(n_h + n_big),
            f"optimality certificate over {section.label} with {n_d} outcomes",
        )
        section._cache[key] = got
    return got


def certify_optimal(
    candidate,
    experiment: Experiment,
    problem: DecisionProblem,
    tol: float = 1e-6,
    solve_tol: float = DEFAULT_NORM_TOL,
    max_iter: int = solver.DEFAULT_MAX_ITER,
) -> Certificate:
    """Decide whether a procedure attains the maximal average payoff.

    ``candidate`` is a :class:`GeneralizedPOVM`, a procedure Choi matrix, or
    a :class:`ChoiMatrix`.  Searches for q in the span cone with
    xi <= I (x) q and Tr(((I (x) q) - xi) X^T) = 0; since the search minimizes
    Tr((I (x) q) X^T) and its optimum is the maximal payoff, infeasibility is
    exactly a positive payoff deficit.
    """
    section = experiment.section
    _require_unrestricted(section, "certify_optimal")
    xi = build_xi(experiment, problem)
    n_d = problem.n_outcomes

    if isinstance(candidate, GeneralizedPOVM):
        if candidate.n_outcomes != n_d:
            raise ValidationError("candidate outcome count does not match the problem")
        x = povm_to_choi(candidate)
    else:
        x = candidate.matrix if isinstance(candidate, ChoiMatrix) else candidate
        if x.dim != n_d * section.ambient_dim:
            raise ValidationError("candidate Choi matrix has the wrong dimension")
        if not psd_check(x, MEMBER_TOL):
            raise ValidationError("candidate Choi matrix is not PSD")
        marg = transpose_in_basis(partial_trace(x.with_dims((n_d, section.ambient_dim)), 0))
        if not contains(dual_section(section), marg, MEMBER_TOL):
            raise ValidationError(
                "candidate is not a decision procedure for this section "
                "(its input marginal is not a transposed dual element)"
            )

    xt = transpose_in_basis(x)
    payoff = trace_pair(xi, xt)
    marg_xt = partial_trace(xt.with_dims((n_d, section.ambient_dim)), 0)
    c_t = np.array([trace_pair(jm, marg_xt) for jm in section.span_basis])

    program = _certify_payoff_program(section, n_d)
    n_h = section.ambient_dim ** 2
    n_big = (n_d * section.ambient_dim) ** 2
    c = np.zeros(program.total_dim)
    c[n_h + n_big :] = c_t
    rhs = np.zeros(n_h + n_big)
    rhs[n_h:] = hvec(xi)
    sol = solver.solve(program.with_rhs(rhs).with_objective(c), tol=solve_tol, max_iter=max_iter)
    solver.require_optimal(sol, "certify_optimal")

    q = section.from_span_coords(sol.primal_point[2])
    big_q = tensor(identity(n_d), q)
    slack = float(np.linalg.norm((big_q.entries - xi.entries) @ xt.entries))
    w_min = float(eig(big_q - xi).eigenvalues[-1])
    optimum = 0.5 * (sol.primal_value + sol.dual_value)
    gap = optimum - payoff
    scale = max(1.0, abs(payoff))
    return Certificate(
        feasible=bool(gap <= tol * scale),
        witness_q=q,
        slack_residual=slack,
        majorization_residual=max(0.0, -w_min),
        candidate_payoff=payoff,
        payoff_at_optimum=optimum,
    )


def decompose_povm(povm: GeneralizedPOVM) -> tuple[HermitianMatrix, tuple[HermitianMatrix, ...]]:
    """Split a measurement into its dual-section total c and an ordinary
    measurement on the support of c: M_d = c^(1/2) L_d c^(1/2)."""
    c = povm.total()
    r = pinv_sqrt(c)
    lams = tuple(
        herm(r.entries @ m.entries @ r.entries, m.subsystem_dims) for m in povm.effects
    )
    return c, lams


def max_entangled_tester_exists(
    x0, x1, lam: float, tol: float = 1e-7
) -> tuple[bool, float]:
    """Whether an optimal two-outcome tester for discriminating two channels
    can use a maximally entangled input.

    True exactly when the input marginal of |lam X0 - (1-lam) X1| is a
    multiple of the identity; the returned residual is the relative deviation
    from that multiple.  A zero difference counts as True by convention
    (every tester is then optimal).
    """
    m0 = x0.matrix if isinstance(x0, ChoiMatrix) else x0
    m1 = x1.matrix if isinstance(x1, ChoiMatrix) else x1
    for name, m in (("x0", m0), ("x1", m1)):
        if not is_channel_choi(m, 1e-6):
            raise ValidationError(f"{name} is not a channel Choi matrix")
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise DomainError("prior must lie in [0, 1]")
    diff = lam * m0 - (1.0 - lam) * m1
    d_h = m0.subsystem_dims[1]
    x_abs, _, _ = abs_pos_neg(diff)
    delta = partial_trace(x_abs, 0)
    mean = trace(delta) / d_h
    if mean <= 1e-12:
        return True, 0.0
    residual = op_norm(delta - mean * identity(d_h)) / mean
    return bool(residual <= tol), float(residual)


# -- JSON wire format -------------------------------------------------------------


def experiment_to_json(experiment: Experiment, problem: DecisionProblem | None = None) -> dict:
    out = {
        "section": section_to_descriptor(experiment.section),
        "family": [matrix_to_json(b) for b in experiment.family],
        "prior": [float(p) for p in experiment.prior],
    }
    if problem is not None:
        if problem.kind == "classical":
            out["payoff"] = {"kind": "classical", "table": problem.table.tolist()}
        else:
            out["payoff"] = {
                "kind": "quantum",
                "operators": [matrix_to_json(w) for w in problem.operators],
            }
    return out


def experiment_from_json(obj) -> tuple[Experiment, DecisionProblem | None]:
    for key in ("section", "family", "prior"):
        if key not in obj:
            raise ValidationError(f"experiment JSON is missing the '{key}' field")
    section = section_from_descriptor(obj["section"])
    family = tuple(matrix_from_json(m) for m in obj["family"])
    experiment = Experiment(section, family, np.asarray(obj["prior"], dtype=float))
    problem = None
    if "payoff" in obj:
        p = obj["payoff"]
        if p.get("kind") == "classical":
            problem = classical_problem(np.asarray(p["table"], dtype=float))
        elif p.get("kind") == "quantum":
            problem = quantum_problem(tuple(matrix_from_json(w) for w in p["operators"]))
        else:
            raise ValidationError("field 'payoff.kind' must be 'classical' or 'quantum'")
    return experiment, problem
