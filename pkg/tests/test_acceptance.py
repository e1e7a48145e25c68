"""Acceptance gate: one test per shipped guarantee, each printing a single
PASS/FAIL line. Tolerances are pinned here and nowhere else."""

import time

import numpy as np
import pytest
from click.testing import CliRunner

from petzlab.bounds import (
    OneShotParams,
    bloch_grid_coherent_info,
    maximize_coherent_info,
    one_shot_rhs,
    preset_split,
    quantum_dispersion,
    second_order_bound,
)
from petzlab.channel import make_channel, random_channel
from petzlab.cli import cli, run_lemma_suite
from petzlab.entropy import (
    binary_entropy,
    collision_d2,
    dmax,
    ds_eps,
    exp2_collision,
    inv_normal_cdf,
    rel_entropy,
    rel_entropy_variance,
)
from petzlab.petz import build_code, ent_fidelity, petz_decoder
from petzlab.qstate import (
    DensityMatrix,
    haar_projector,
    haar_unitary,
    keyed_stream,
    trace_distance,
)

IC_ZERO_ATOL = 1e-8
BOUND_SCALING_ATOL = 1e-9
BOUND_NONPOSITIVE_SLACK = 1e-9
GRID_AGREEMENT_ATOL = 1e-5
DECODER_RESIDUAL_ATOL = 1e-8
IDENTITY_FID_ATOL = 1e-10
SCALAR_ORACLE_ATOL = 1e-9
ICDF_ORACLE_ATOL = 1e-6

ERASURE_RUNTIME_S = 10.0
DEPHASING_RUNTIME_S = 60.0
LEMMA_RUNTIME_S = 300.0

# frozen from a quadrature oracle: cumulative normal integrated with
# adaptive quadrature, inverted by bisection to 1e-12
ICDF_GRID = {
    0.01: -2.326347874041071,
    0.05: -1.6448536269514724,
    0.1: -1.2815515655446008,
    0.25: -0.6744897501960819,
    0.4: -0.2533471031357997,
    0.5: 0.0,
    0.6: 0.25334710313579967,
    0.75: 0.6744897501960814,
    0.9: 1.2815515655446004,
    0.99: 2.3263478740410646,
}


def _finish(k, checks):
    failed = [msg for ok, msg in checks if not ok]
    status = "PASS" if not failed else "FAIL"
    detail = "all checks passed" if not failed else "; ".join(failed)
    print(f"ACCEPTANCE {k}: {status} - {detail}")
    assert not failed, f"criterion {k}: " + "; ".join(failed)


def test_acceptance_1_erasure_case_study():
    checks = []
    start = time.perf_counter()
    ch = make_channel("erasure", 0.5)
    ic = maximize_coherent_info(ch, seed=0)
    checks.append(
        (abs(ic.ic_bits) <= IC_ZERO_ATOL, f"I_c = {ic.ic_bits} not 0 within 1e-8")
    )
    pi_dist = min(
        trace_distance(s.mat, np.eye(2) / 2) for s in ic.argmax_states
    )
    checks.append((pi_dist < 1e-6, "argmax set misses the maximally mixed state"))

    v_hi = quantum_dispersion(ch, 0.75, ic)
    checks.append((v_hi > 0.0, f"V at eps = 0.75 is {v_hi}, expected positive"))

    b100 = second_order_bound(ch, 0.75, 100, ic_result=ic).bound_bits
    b400 = second_order_bound(ch, 0.75, 400, ic_result=ic).bound_bits
    checks.append((b100 > 0.0, f"bound(100) = {b100} not positive at eps = 0.75"))
    checks.append(
        (
            abs(b400 - 2.0 * b100) <= BOUND_SCALING_ATOL,
            f"bound(400) = {b400} is not twice bound(100) = {b100}",
        )
    )
    for n in (100, 400, 1600):
        lo = second_order_bound(ch, 0.25, n, ic_result=ic).bound_bits
        checks.append(
            (
                lo <= BOUND_NONPOSITIVE_SLACK,
                f"bound(n = {n}) = {lo} positive at eps = 0.25",
            )
        )
    elapsed = time.perf_counter() - start
    checks.append(
        (elapsed < ERASURE_RUNTIME_S, f"runtime {elapsed:.1f}s over {ERASURE_RUNTIME_S}s")
    )
    _finish(1, checks)


def test_acceptance_2_dephasing_optimizer_vs_grid():
    checks = []
    start = time.perf_counter()
    for p in (0.05, 0.1, 0.3):
        ch = make_channel("dephasing", p)
        opt = maximize_coherent_info(ch, seed=0).ic_bits
        grid = bloch_grid_coherent_info(ch)
        closed = 1.0 - binary_entropy(p)
        checks.append(
            (
                abs(opt - grid) <= GRID_AGREEMENT_ATOL,
                f"p = {p}: optimizer {opt} vs grid {grid}",
            )
        )
        checks.append(
            (
                abs(opt - closed) <= GRID_AGREEMENT_ATOL,
                f"p = {p}: optimizer {opt} vs closed form {closed}",
            )
        )
    elapsed = time.perf_counter() - start
    checks.append(
        (
            elapsed < DEPHASING_RUNTIME_S,
            f"runtime {elapsed:.1f}s over {DEPHASING_RUNTIME_S}s",
        )
    )
    _finish(2, checks)


def test_acceptance_3_lemma_suite():
    checks = []
    start = time.perf_counter()
    reports = run_lemma_suite(0, trials=100)
    by_id = {r.lemma_id: r for r in reports}
    checks.append((len(reports) == 7, f"expected 7 families, got {len(reports)}"))
    wm = by_id.get("pinching-weak-monotonicity")
    checks.append(
        (wm is not None and wm.trials >= 100, "weak monotonicity below 100 instances")
    )
    for r in reports:
        checks.append(
            (r.passed, f"{r.lemma_id} violation {r.max_violation}")
        )
    elapsed = time.perf_counter() - start
    checks.append(
        (elapsed < LEMMA_RUNTIME_S, f"runtime {elapsed:.1f}s over {LEMMA_RUNTIME_S}s")
    )
    _finish(3, checks)


def test_acceptance_4_decoder_contract():
    checks = []
    rng = keyed_stream(0, "acceptance-decoder")
    worst_tp = 0.0
    worst_fix = 0.0
    worst_fid = 0.0
    instances = 51
    for i in range(instances):
        d = 2 + i % 3
        m = int(rng.integers(1, d + 1))
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        mat = g @ g.conj().T + 0.1 * np.eye(d)
        rho = DensityMatrix(mat / np.trace(mat).real)
        proj = haar_projector(d, m, rng)
        code = build_code(rho, proj)

        ch = random_channel(d, d, int(rng.integers(1, 4)), rng)
        dec = petz_decoder(ch, code)
        gram = sum(k.conj().T @ k for k in dec.total.kraus)
        worst_tp = max(worst_tp, float(np.abs(gram - np.eye(d)).max()))
        ns = ch.apply_mat(code.s)
        worst_fix = max(
            worst_fix, float(np.abs(dec.total.apply_mat(ns) - code.s).max())
        )

        ident = make_channel("identity", d)
        dec_id = petz_decoder(ident, code)
        f = ent_fidelity(ident, dec_id.total, code.code_basis)
        worst_fid = max(worst_fid, abs(f - 1.0))
    checks.append(
        (
            worst_tp < DECODER_RESIDUAL_ATOL,
            f"worst CPTP residual {worst_tp} over {instances} instances",
        )
    )
    checks.append(
        (
            worst_fix < DECODER_RESIDUAL_ATOL,
            f"worst code-operator recovery residual {worst_fix}",
        )
    )
    checks.append(
        (
            worst_fid < IDENTITY_FID_ATOL,
            f"worst identity-channel fidelity defect {worst_fid}",
        )
    )
    _finish(4, checks)


def test_acceptance_5_entropy_cross_oracles():
    checks = []
    rng = keyed_stream(0, "acceptance-entropy")
    worst = 0.0
    for _ in range(10):
        d = int(rng.integers(2, 5))
        p = rng.dirichlet(np.ones(d)) + 0.01
        p = p / p.sum()
        q = rng.dirichlet(np.ones(d)) + 0.01
        q = q / q.sum()
        u = haar_unitary(d, rng)
        rho = u @ np.diag(p) @ u.conj().T
        sig = u @ np.diag(q) @ u.conj().T

        logs = np.log2(p / q)
        d_ref = float((p * logs).sum())
        v_ref = float((p * (logs - d_ref) ** 2).sum())
        lin_ref = float((p**2 / q).sum())
        worst = max(worst, abs(rel_entropy(rho, sig).bits - d_ref))
        worst = max(worst, abs(rel_entropy_variance(rho, sig).bits - v_ref))
        worst = max(worst, abs(exp2_collision(rho, sig) - lin_ref))
        worst = max(worst, abs(collision_d2(rho, sig).bits - np.log2(lin_ref)))
        worst = max(worst, abs(dmax(rho, sig).bits - np.log2((p / q).max())))

        for eps in (0.15, 0.5, 0.85):
            t = np.log2(p / q)
            order = np.argsort(t)
            cum = 0.0
            ref = np.inf
            for j in order:
                cum += p[j]
                if cum > eps:
                    ref = float(t[j])
                    break
            worst = max(worst, abs(ds_eps(rho, sig, eps).bits - ref))

        worst = max(
            worst,
            abs(
                rel_entropy(np.kron(rho, rho), np.kron(sig, sig)).bits
                - 2.0 * d_ref
            ),
        )
    checks.append(
        (
            worst <= SCALAR_ORACLE_ATOL,
            f"worst scalar-oracle deviation {worst} over 1e-9",
        )
    )

    worst_icdf = max(
        abs(inv_normal_cdf(eps) - ref) for eps, ref in ICDF_GRID.items()
    )
    checks.append(
        (
            worst_icdf <= ICDF_ORACLE_ATOL,
            f"worst quantile deviation {worst_icdf} over 1e-6",
        )
    )
    _finish(5, checks)


def test_acceptance_6_one_shot_sanity():
    checks = []
    ch = make_channel("identity", 2)
    rho = DensityMatrix(np.eye(2) / 2)
    params = preset_split(0.1, 1, 2, purity=rho.purity())
    res = one_shot_rhs(ch, rho, params)
    checks.append((np.isfinite(res.bound_bits), f"bound {res.bound_bits} not finite"))
    checks.append(
        (
            res.bound_bits == min(res.term1_bits, res.term2_bits),
            "bound is not the minimum of the two terms",
        )
    )
    terms = []
    for delta1 in np.linspace(0.005, 0.045, 10):
        p = OneShotParams(
            eps1=0.05, eps2=0.05, delta1=float(delta1), delta2=0.025, d=2
        )
        terms.append(one_shot_rhs(ch, rho, p).term1_bits)
    diffs = np.diff(terms)
    monotone = bool((diffs <= 1e-12).all() or (diffs >= -1e-12).all())
    checks.append(
        (monotone, f"term1 sweep not monotone in delta1: {terms}")
    )
    _finish(6, checks)


def test_acceptance_7_thread_determinism():
    checks = []
    runner = CliRunner()
    args = ["simulate", "--channel", "erasure:0.3", "--m", "2", "--samples", "8"]
    outputs = []
    for threads in (1, 2, 8):
        res = runner.invoke(cli, ["--seed", "13", "--threads", str(threads)] + args)
        checks.append(
            (res.exit_code == 0, f"threads = {threads} exited {res.exit_code}")
        )
        outputs.append(res.stdout_bytes)
    checks.append(
        (
            outputs[0] == outputs[1] == outputs[2],
            "outputs differ across thread counts",
        )
    )
    _finish(7, checks)
