"""Acceptance criteria, each checked at its stated tolerance.

Every test logs one ``[PASS]``/``[FAIL]`` line through the ``record``
fixture; the lines are printed in the terminal summary.
"""

from math import comb

import numpy as np
import pytest

from hitchin_acs import verify
from hitchin_acs.acs import (
    E3,
    G_NK,
    I0,
    J_I0,
    INTEGRABLE_J,
    alpha_map,
    cofactor,
    block_metric,
    hermitian_pair,
    omega_of,
    project_polar,
    sample,
    u_frame,
    validate,
)
from hitchin_acs.curvature import nk_defect, nk_form_fit, proper_frame, ricci, ricci_closed_form
from hitchin_acs.exterior import KForm, dual_iso_A, interior, volume, wedge
from hitchin_acs.hitchin import hitchin_J, hitchin_K_columns, tau
from hitchin_acs.liealg import change_frame, mc_differential, standard_su2_su2

pytestmark = pytest.mark.acceptance

SEED, N = 42, 10_000


@pytest.fixture(scope="module")
def sweep():
    return verify.run(verify.VerificationConfig(seed=SEED, samples=N))


@pytest.fixture(scope="module")
def sweep_samples():
    return [verify.draw_sample(SEED, i) for i in range(N)]


def test_criterion_1_hitchin_anchor(record):
    psi0 = mc_differential(omega_of(I0))
    t0 = tau(psi0)
    dJ = float(np.abs(hitchin_J(psi0) - J_I0).max())
    t3 = tau(mc_differential(omega_of(INTEGRABLE_J)))
    ok = abs(t0 + 3) <= 1e-12 and dJ <= 1e-12 and abs(t3 - 1) <= 1e-12
    record("1 Hitchin anchor", ok, f"tau(d omega_I0)={t0!r}, |J-J_I0|={dJ:.2e}, tau(integrable J)={t3!r}")
    assert ok


def test_criterion_2_tau_sweep(record, sweep_samples):
    # tau recomputed from the column-by-column wedge/interior construction
    worst = 0.0
    for I in sweep_samples:
        K = hitchin_K_columns(mc_differential(omega_of(I)))
        worst = max(worst, abs(np.trace(K @ K) / 6 - (4 * I.x - 3)))
    ok = worst <= 1e-9
    record("2 tau = 4x - 3", ok, f"max residual {worst:.2e} over {len(sweep_samples)} samples")
    assert ok


def test_criterion_3_block_formula_for_K(record, sweep, sweep_samples):
    worst = sweep.max_residuals["k_blocks"]
    # the glossary's transposed reading (true adjugate) for comparison
    I = sweep_samples[0]
    Bt = cofactor(I.B).T
    K = hitchin_K_columns(mc_differential(omega_of(I)))
    adj = np.block([[E3 - 2 * cofactor(I.A), -2 * Bt], [2 * Bt.T, -E3 + 2 * cofactor(I.C)]])
    alt = float(np.abs(K - adj).max())
    ok = worst <= 1e-10
    record("3 block formula for K", ok,
           f"max residual {worst:.2e} with cofactor blocks (transposed-cofactor reading: {alt:.2f} on sample 0)")
    assert ok


def test_criterion_4_det_b_and_amplification(record, sweep, sweep_samples):
    forced = [i for i in range(N) if i % verify.FORCE_EVERY == verify.FORCE_EVERY - 1]
    in_range = all(0.70 < sweep_samples[i].x < 0.75 for i in forced)
    ao = [r for r in sweep.results if r.x < 0.75]
    bad_det = sum(r.detB >= 0 for r in ao)
    bad_amp = sum(not r.residuals["amplification"] <= 1e-9 for r in ao)
    ok = len(forced) == 1000 and in_range and bad_det == 0 and bad_amp == 0
    record("4 det B < 0 and amplification 8(det B)^2", ok,
           f"{len(ao)} samples in AO-, {len(forced)} forced near x=3/4, "
           f"counterexamples detB={bad_det} amplification={bad_amp}")
    assert ok


def test_criterion_5_projection_closed_form(record, sweep):
    projection = sweep.max_residuals["projection"]
    rot = sweep.max_residuals["rotation"]
    ok = projection <= 1e-9 and rot <= 1e-10
    record("5 projection closed form and X in SO(3)", ok, f"closed form {projection:.2e}, X orthogonality/det {rot:.2e}")
    assert ok


def test_criterion_6a_block_metric_equals_hermitian_metric(record, sweep_samples):
    """The block metric against ``omega_J(., J_I .)`` taken literally.

    The two differ by the factor ``sqrt(4t^2 - 1)``; the block metric
    equals ``omega_J(., K .)`` instead.  Left failing on purpose.
    """
    worst, conformal = 0.0, 0.0
    for I in sweep_samples[:500]:
        if not I.in_ao_minus:
            continue
        hp = hermitian_pair(I)
        worst = max(worst, hp.hermitian_residual)
        conformal = max(conformal, hp.conformal_residual)
    ok = worst <= 1e-9
    record("6a g_I = omega_J(., J_I .)", ok,
           f"max residual {worst:.3f}; with factor sqrt(4t^2-1) the residual is {conformal:.2e}")
    assert ok


def test_criterion_6b_block_metric_spectrum(record, sweep_samples):
    worst = 0.0
    for I in sweep_samples:
        if I.in_ao_minus:
            G = block_metric(I)
            t = I.t
            expected = np.sort([2 * t - 1, 2 * t - 1, 1.0, 2 * t + 1, 2 * t + 1, 4 * t * t - 1])
            worst = max(worst, float(np.abs(np.linalg.eigvalsh(G) - expected).max()))
    at_one = np.linalg.eigvalsh(block_metric(np.zeros(3)))
    dev_one = float(np.abs(at_one - [1, 1, 1, 3, 3, 3]).max())
    ok = worst <= 1e-9 and dev_one <= 1e-15
    record("6b spectrum {2t-1, 1, 2t+1, 4t^2-1}", ok, f"max deviation {worst:.2e}; t=1 spectrum off by {dev_one:.1e}")
    assert ok


def test_criterion_7_ricci_closed_forms(record):
    structures = verify.stratified_t_samples(SEED, 100, t_lo=0.55)
    ts = [I.t for I in structures]
    diag_err = off_err = scal_err = 0.0
    for I in structures:
        hp = hermitian_pair(I)
        rep = ricci(hp.gI, frame=proper_frame(I, hp.gI))
        closed, s = ricci_closed_form(I.t)
        diag_err = max(diag_err, float(np.abs(np.diag(rep.ricci) - closed).max()))
        off_err = max(off_err, float(np.abs(rep.ricci - np.diag(np.diag(rep.ricci))).max()))
        scal_err = max(scal_err, abs(rep.scalar - s))
    I = validate(I0)
    rep1 = ricci(hermitian_pair(I).gI, frame=proper_frame(I))
    einstein = max(float(np.abs(np.diag(rep1.ricci) - 5 / 18).max()), abs(rep1.scalar - 5 / 3))
    ok = diag_err <= 1e-8 and off_err <= 1e-9 and scal_err <= 1e-8 and einstein <= 1e-10
    record("7 Ricci closed forms", ok,
           f"t in [{min(ts):.3f}, {max(ts):.3f}]: diagonal {diag_err:.2e}, off-diagonal {off_err:.2e}, "
           f"scalar {scal_err:.2e}; t=1 Einstein {einstein:.2e}")
    assert ok


def test_criterion_8_nearly_kahler(record):
    base = nk_defect(G_NK, J_I0)
    worst = worst_fit = 0.0
    for i in range(100):
        I = sample(np.random.SeedSequence(SEED, spawn_key=(7, i)), require_AO_minus=True)
        J_final = alpha_map(project_polar(alpha_map(I)))
        J_u = change_frame(J_final.J, u_frame(I), "operator")
        worst = max(worst, nk_defect(G_NK, J_u))
        worst_fit = max(worst_fit, nk_form_fit(G_NK, J_u).residual)
    ok = base <= 1e-9 and worst <= 1e-9 and worst_fit <= 1e-9
    record("8 nearly Kaehler", ok,
           f"defect at J_I0 {base:.2e}; 100 composed structures: defect {worst:.2e}, form residual {worst_fit:.2e}")
    assert ok


def test_criterion_9_infrastructure(record, tmp_path):
    rng = np.random.default_rng(SEED)
    spec = standard_su2_su2()
    d2 = anti = iso = 0.0
    for _ in range(200):
        for k in range(5):
            a = KForm(k, rng.standard_normal(comb(6, k)))
            d2 = max(d2, mc_differential(mc_differential(a)).norm())
        p, q = rng.integers(1, 4, size=2)
        a, b = KForm(p, rng.standard_normal(comb(6, p))), KForm(q, rng.standard_normal(comb(6, q)))
        X = rng.standard_normal(6)
        lhs = interior(X, wedge(a, b))
        rhs = wedge(interior(X, a), b) + (-1) ** p * wedge(a, interior(X, b))
        anti = max(anti, (lhs - rhs).norm() / max(1.0, a.norm() * b.norm() * np.linalg.norm(X)))
        Y = rng.standard_normal(6)
        iso = max(iso, float(np.abs(dual_iso_A(interior(Y, volume())) - Y).max()))
    jac = spec.jacobi_residual()
    csv_a = verify.to_csv(verify.run(verify.VerificationConfig(seed=7, samples=200)).results)
    csv_b = verify.to_csv(verify.run(verify.VerificationConfig(seed=7, samples=200)).results)
    same = csv_a.encode() == csv_b.encode()
    ok = max(d2, anti, iso, jac) <= 1e-12 and same
    record("9 infrastructure", ok,
           f"d^2 {d2:.1e}, antiderivation {anti:.1e}, dual iso {iso:.1e}, Jacobi {jac:.1e}, byte-identical CSV {same}")
    assert ok
