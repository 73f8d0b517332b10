"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The report lines bypass pytest's capture so they always reach the terminal.
Criteria run at their stated tolerances; instance counts and seeds are fixed.
"""

import functools
import math
import time

import numpy as np
import pytest

from conftest import rand_density, rand_herm, rand_kraus_channel, rand_psd
from gnorm.choi import apply_choi_tensor_id, kraus_channel, max_entangled_projection, max_entangled_state
from gnorm.decisions import (
    Experiment,
    GeneralizedPOVM,
    bayes_error,
    build_xi,
    certify_optimal,
    classical_problem,
    helstrom,
    max_entangled_tester_exists,
    max_payoff,
    multi_hypothesis_error,
    povm_to_choi,
)
from gnorm.hermitian import (
    herm,
    hvec,
    identity,
    outer,
    tensor,
    trace_norm,
    trace_pair,
    transpose_in_basis,
)
from gnorm.norms import base_norm, base_norm_psd, dual_base_norm, hmin
from gnorm.oracles import grid_hmin, norm_lower_bound, norm_upper_bound, sample_section
from gnorm.sections import (
    channels_section,
    comb_section,
    contains,
    custom_section,
    dual_section,
    generalized_section,
    id_tensor_section,
    states_section,
)
from gnorm.solver import PSD, Block, ConeProgram, require_optimal, solve

KET0 = outer([1.0, 0.0])
PLUS = outer([1.0 / math.sqrt(2), 1.0 / math.sqrt(2)])
HELSTROM_01PLUS = (1.0 - 1.0 / math.sqrt(2.0)) / 2.0


@pytest.fixture
def report(capfd):
    def _report(num: int, ok: bool, detail: str) -> None:
        line = f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
        with capfd.disabled():
            print(line, flush=True)
        assert ok, line

    return _report


def _make_custom(rng, d=3, extra=3):
    normalizer = rand_psd(rng, d) + 0.4 * identity(d)
    b0 = rand_psd(rng, d) + 0.4 * identity(d)
    b0 = b0 / trace_pair(b0, normalizer)
    basis = [b0] + [rand_herm(rng, d) for _ in range(extra)]
    return custom_section(basis, normalizer, label="acceptance custom")


@functools.lru_cache(maxsize=1)
def _duality_instances():
    """Shared instance set for criteria 2 and 5: (name, section, x, result)."""
    rng = np.random.default_rng(20240)
    out = []

    def run(name, section, x, tol):
        res = base_norm(section, x, tol=tol, prefer_closed=False)
        out.append((name, section, x, res))

    s2, s3 = states_section(2), states_section(3)
    ch = channels_section(2, 2)
    comb = comb_section((2, 2, 2, 2))
    for i in range(50):
        run("states(2)", s2, rand_herm(rng, 2), 1e-9)
    for i in range(40):
        run("states(3)", s3, rand_herm(rng, 3), 1e-9)
    for i in range(40):
        run("channels(2,2)", ch, rand_herm(rng, 4, dims=(2, 2)), 1e-9)
    for i in range(30):
        run("comb(2,2,2,2)", comb, rand_herm(rng, 16, dims=(2, 2, 2, 2)), 2e-8)
    customs = [_make_custom(rng, 3, int(rng.integers(1, 5))) for _ in range(8)]
    for sec in customs:
        for i in range(5):
            run("custom(3)", sec, rand_herm(rng, 3), 1e-9)
    return out


def test_criterion_1_trace_norm_recovery(report):
    rng = np.random.default_rng(101)
    t0 = time.time()
    worst = 0.0
    count = 0
    for d in (2, 3, 4):
        sec = states_section(d)
        for _ in range(100):
            x = rand_herm(rng, d)
            res = base_norm(sec, x, tol=1e-8, prefer_closed=False)
            rel = abs(res.value - trace_norm(x)) / max(1.0, trace_norm(x))
            worst = max(worst, rel)
            count += 1
    elapsed = time.time() - t0
    ok = worst <= 1e-6 and elapsed < 60.0
    report(
        1, ok,
        f"trace-norm recovery on {count} instances: worst rel err {worst:.2e}, "
        f"{elapsed:.1f}s (< 60s)",
    )


def test_criterion_2_duality_suite(report):
    worst = 0.0
    for name, section, x, res in _duality_instances():
        worst = max(worst, abs(res.primal_value - res.dual_value))
    # dual-section involution, membership equivalence on sampled points
    rng = np.random.default_rng(202)
    involution_ok = True
    secs = [states_section(2), channels_section(2, 2)] + [
        _make_custom(rng, 3, k) for k in (1, 2, 3)
    ]
    for sec in secs:
        dd = dual_section(dual_section(sec))
        for p in sample_section(sec, 10, seed=7).points:
            involution_ok &= contains(dd, p, 1e-7)
        for p in sample_section(dd, 10, seed=8).points:
            involution_ok &= contains(sec, p, 1e-7)
    ok = worst <= 1e-6 and involution_ok
    report(
        2, ok,
        f"duality on {len(_duality_instances())} instances: worst |primal-dual| "
        f"{worst:.2e} (<= 1e-6); dual involution {'ok' if involution_ok else 'BROKEN'}",
    )


def test_criterion_3_helstrom_desk_value(report):
    err_closed, povm = helstrom(KET0, PLUS, 0.5)
    s = states_section(2)
    x = 0.5 * KET0 - 0.5 * PLUS
    res = base_norm(s, x, tol=1e-8, prefer_closed=False)
    err_conic = 0.5 * (1.0 - res.value)
    e = Experiment(s, (KET0, PLUS), np.array([0.5, 0.5]))
    p = classical_problem(np.eye(2))
    cert = certify_optimal(povm, e, p, tol=1e-6)
    ok = (
        abs(err_closed - HELSTROM_01PLUS) <= 1e-6
        and abs(err_conic - HELSTROM_01PLUS) <= 1e-6
        and cert.feasible
    )
    report(
        3, ok,
        f"Helstrom |0> vs |+>: closed {err_closed:.9f}, conic {err_conic:.9f}, "
        f"target {HELSTROM_01PLUS:.9f}; optimal measurement certified: {cert.feasible}",
    )


def test_criterion_4_diamond_norm(report):
    psi = herm(max_entangled_projection(2).entries, (2, 2))
    x_z = kraus_channel([np.diag([1.0, -1.0]).astype(complex)]).matrix
    res = base_norm(channels_section(2, 2), psi - x_z, tol=1e-8)
    # sampled pure-state lower bound; the maximally entangled input attains 2
    sigma = max_entangled_state(2)
    moved = apply_choi_tensor_id(psi - x_z, 2, sigma)
    lower = trace_norm(moved)
    rng = np.random.default_rng(404)
    worst_channel = 0.0
    for _ in range(10):
        x = kraus_channel(rand_kraus_channel(rng, 2, 2, int(rng.integers(1, 4)))).matrix
        v = base_norm(channels_section(2, 2), x, tol=1e-9).value
        worst_channel = max(worst_channel, abs(v - 1.0))
    ok = abs(res.value - 2.0) <= 1e-5 and lower >= 2.0 - 1e-9 and worst_channel <= 1e-7
    report(
        4, ok,
        f"diamond: |id - Z| = {res.value:.8f} (target 2, sampled lower bound "
        f"{lower:.8f}); worst |norm(channel Choi) - 1| = {worst_channel:.2e} (<= 1e-7)",
    )


def test_criterion_5_sandwich_soundness(report):
    sample_cache = {}
    worst_lo, worst_hi = 0.0, 0.0
    for name, section, x, res in _duality_instances():
        key = id(section)
        if key not in sample_cache:
            sample_cache[key] = (
                sample_section(section, 20, seed=51),
                sample_section(dual_section(section), 20, seed=52),
            )
        members, duals = sample_cache[key]
        lo = norm_lower_bound(section, x, duals)
        hi = norm_upper_bound(section, x, members)
        worst_lo = max(worst_lo, lo - res.value)
        worst_hi = max(worst_hi, res.value - hi)
    ok = worst_lo <= 1e-6 and worst_hi <= 1e-6
    report(
        5, ok,
        f"sandwich on all duality instances: max(lower - value) {worst_lo:.2e}, "
        f"max(value - upper) {worst_hi:.2e} (both <= 1e-6)",
    )


def test_criterion_6_hmin(report):
    phi = herm(max_entangled_state(2).entries, (2, 2))
    mixed = identity((2, 2)) / 4
    v_phi = hmin(phi, tol=1e-8)
    v_mixed = hmin(mixed, tol=1e-8)
    g_phi = grid_hmin(phi, 200)
    g_mixed = grid_hmin(mixed, 200)
    gap_phi = dual_base_norm(channels_section(2, 2), phi, tol=1e-8).gap
    gap_mixed = dual_base_norm(channels_section(2, 2), mixed, tol=1e-8).gap
    ok = (
        abs(v_phi - g_phi) <= 2e-3
        and abs(v_mixed - g_mixed) <= 2e-3
        and abs(v_phi + 1.0) <= 2e-3
        and abs(v_mixed - 1.0) <= 2e-3
        and gap_phi <= 1e-6
        and gap_mixed <= 1e-6
    )
    report(
        6, ok,
        f"hmin: entangled {v_phi:.6f} (grid {g_phi:.6f}, target -1), "
        f"mixed {v_mixed:.6f} (grid {g_mixed:.6f}, target 1); "
        f"program gaps {gap_phi:.2e}, {gap_mixed:.2e} (<= 1e-6)",
    )


def _min_linear_over_section(section, f, tol):
    """min Tr(f X) over members X of the section (one PSD block program)."""
    comp = section.complement_matrix()
    n = section.ambient_dim
    rows = np.vstack([comp.T, hvec(section.normalizer)])
    rhs = np.zeros(rows.shape[0])
    rhs[-1] = 1.0
    prog = ConeProgram((Block(n, PSD),), hvec(f), rows, rhs, "min linear over section")
    sol = solve(prog, tol=tol)
    require_optimal(sol, "min linear over section")
    return 0.5 * (sol.primal_value + sol.dual_value)


def test_criterion_7_payoff_loss_complement(report):
    rng = np.random.default_rng(707)
    worst = 0.0
    for trial in range(50):
        if trial % 2 == 0:
            section = states_section(2)
            fam = tuple(rand_density(rng, 2) for _ in range(int(rng.integers(2, 4))))
        else:
            section = channels_section(2, 2)
            fam = tuple(
                kraus_channel(rand_kraus_channel(rng, 2, 2, 2)).matrix for _ in range(2)
            )
        prior = rng.dirichlet(np.ones(len(fam)))
        e = Experiment(section, fam, prior)
        n_d = int(rng.integers(2, 4))
        table = rng.uniform(size=(len(fam), n_d))
        problem = classical_problem(table)
        # direct minimal loss: min over procedures of Tr(xi_W X^T)
        xi = build_xi(e, problem)
        proc = generalized_section(section, n_d)
        min_loss = _min_linear_over_section(proc, transpose_in_basis(xi), 1e-9)
        max_comp = max_payoff(e, problem.complement(), tol=1e-9).value
        worst = max(worst, abs(min_loss + max_comp - 1.0))
    ok = worst <= 1e-7
    report(
        7, ok,
        f"loss/payoff complement on 50 classical problems: worst |min_loss + "
        f"max_payoff(1-w) - 1| = {worst:.2e} (<= 1e-7)",
    )


def test_criterion_8_optimality_certificates(report):
    rng = np.random.default_rng(808)
    s = states_section(2)
    ch = channels_section(2, 2)
    experiments = []
    experiments.append((s, Experiment(s, (KET0, PLUS), np.array([0.5, 0.5]))))
    fam = tuple(rand_density(rng, 2) for _ in range(3))
    experiments.append((s, Experiment(s, fam, np.array([0.3, 0.4, 0.3]))))
    ch_fam = tuple(kraus_channel(rand_kraus_channel(rng, 2, 2, 2)).matrix for _ in range(2))
    experiments.append((ch, Experiment(ch, ch_fam, np.array([0.5, 0.5]))))

    all_optimal_ok = True
    optimizers = []
    for section, e in experiments:
        p = classical_problem(np.eye(e.size))
        pay = max_payoff(e, p, tol=1e-9)
        cert = certify_optimal(pay.povm, e, p, tol=1e-5)
        all_optimal_ok &= cert.feasible
        optimizers.append((e, p, pay))
        if e.size == 2:
            err, povm, _ = bayes_error(section, e.family[0], e.family[1], 0.5, tol=1e-9)
            cert2 = certify_optimal(povm, e, p, tol=1e-5)
            all_optimal_ok &= cert2.feasible
        err3, povm3, _ = multi_hypothesis_error(section, e.family, e.prior, tol=1e-9)
        cert3 = certify_optimal(povm3, e, p, tol=1e-5)
        all_optimal_ok &= cert3.feasible

    # deliberately perturbed measurements with a real payoff deficit
    rejected = 0
    attempted = 0
    for e, p, pay in optimizers:
        xi = build_xi(e, p)
        opt = pay.povm
        n_d = opt.n_outcomes
        for k in range(12):
            eps = 0.1 + 0.06 * k
            swapped = tuple(opt.effects[(j + 1) % n_d] for j in range(n_d))
            mixed = tuple(
                herm((1 - eps) * a.entries + eps * b.entries)
                for a, b in zip(opt.effects, swapped)
            )
            try:
                cand = GeneralizedPOVM(e.section, mixed, validation_tol=1e-5)
            except Exception:
                continue
            deficit = pay.value - trace_pair(xi, transpose_in_basis(povm_to_choi(cand)))
            if deficit < 1e-3:
                continue
            attempted += 1
            cert = certify_optimal(cand, e, p, tol=1e-6)
            if not cert.feasible:
                rejected += 1
            if attempted >= 20 and rejected >= 20:
                break
        if attempted >= 20:
            break
    ok = all_optimal_ok and attempted >= 20 and rejected == attempted
    report(
        8, ok,
        f"certificates: every emitted optimizer feasible ({all_optimal_ok}); "
        f"{rejected}/{attempted} perturbed measurements (deficit >= 1e-3) rejected",
    )


def test_criterion_9_max_entangled_tester(report):
    psi = herm(max_entangled_projection(2).entries, (2, 2))
    x_z = kraus_channel([np.diag([1.0, -1.0]).astype(complex)]).matrix
    exists, _ = max_entangled_tester_exists(psi, x_z, 0.5, tol=1e-7)
    rng = np.random.default_rng(909)
    agree = 0
    for _ in range(30):
        a = kraus_channel(rand_kraus_channel(rng, 2, 2, int(rng.integers(1, 4)))).matrix
        b = kraus_channel(rand_kraus_channel(rng, 2, 2, int(rng.integers(1, 4)))).matrix
        lam = float(rng.uniform(0.2, 0.8))
        got, _ = max_entangled_tester_exists(a, b, lam, tol=1e-7)
        # independent direct computation of the input marginal of |diff|
        diff = lam * a.entries - (1 - lam) * b.entries
        w, u = np.linalg.eigh(diff)
        absd = (u * np.abs(w)) @ u.conj().T
        marg = absd.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)
        mean = np.trace(marg).real / 2.0
        if mean <= 1e-12:
            oracle = True
        else:
            oracle = np.linalg.norm(marg - mean * np.eye(2), 2) / mean <= 1e-7
        agree += int(got == oracle)
    ok = exists and agree == 30
    report(
        9, ok,
        f"maximally entangled tester: (id, Z, 1/2) exists = {exists}; oracle "
        f"agreement {agree}/30 random channel pairs",
    )


def test_criterion_10_block_identity(report):
    rng = np.random.default_rng(1010)
    worst = 0.0
    for trial in range(50):
        if trial % 2 == 0:
            section = states_section(2)
            pts = (rand_density(rng, 2), rand_density(rng, 2))
        else:
            section = channels_section(2, 2)
            pts = tuple(
                kraus_channel(rand_kraus_channel(rng, 2, 2, 2)).matrix for _ in range(2)
            )
        s, t = float(rng.uniform(0.3, 2.0)), float(rng.uniform(0.3, 2.0))
        b0, b1 = pts
        xi = tensor(herm(np.diag([1.0, 0.0])), s * b0) + tensor(
            herm(np.diag([0.0, 1.0])), t * b1
        )
        wrapped = id_tensor_section(section, 2)
        lhs = base_norm_psd(wrapped, xi, tol=1e-9).value
        rhs = 0.5 * (base_norm(section, s * b0 - t * b1, tol=1e-9).value + s + t)
        worst = max(worst, abs(lhs - rhs))
    ok = worst <= 1e-6
    report(
        10, ok,
        f"two-hypothesis block identity on 50 random (s, t, b0, b1): worst "
        f"deviation {worst:.2e} (<= 1e-6)",
    )
