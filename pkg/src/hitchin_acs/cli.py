"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 malformed input,
3 input outside the domain (x >= 3/4, or the pole at t = 1/2).
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import acs, curvature, hitchin, verify
from .errors import NotInAOMinus, PoleAtHalf
from .exterior import KForm
from .liealg import change_frame

EXIT_FAIL, EXIT_INPUT, EXIT_DOMAIN = 1, 2, 3


def _emit(obj) -> None:
    click.echo(json.dumps(obj, indent=2))


def _die(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        _die(f"cannot read {path}: {exc}", EXIT_INPUT)


def _load_acs(path: str) -> acs.OrthogonalACS:
    data = _load_json(path)
    try:
        return acs.OrthogonalACS.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        _die(f"{path} is not a valid orthogonal almost complex structure: {exc}", EXIT_INPUT)


@click.group()
def main():
    """Hitchin structures induced by orthogonal almost complex structures on S^3 x S^3."""


@main.command()
@click.argument("psi_file", type=click.Path())
@click.option("--eps", default=hitchin.DEFAULT_EPS, show_default=True, help="Degeneracy threshold for tau.")
def classify(psi_file, eps):
    """Orbit of a 3-form given as {"degree": 3, "coeffs": [...]}."""
    data = _load_json(psi_file)
    try:
        psi = KForm.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        _die(f"malformed 3-form: {exc}", EXIT_INPUT)
    if psi.degree != 3:
        _die(f"expected a 3-form, got degree {psi.degree}", EXIT_INPUT)
    K = hitchin.hitchin_K(psi)
    tau = float(np.trace(K @ K)) / 6.0
    orbit = hitchin.classify_orbit(psi, eps)
    out = {"tau": tau, "orbit": orbit.value}
    if orbit is hitchin.Orbit.O1:
        out["kappa"] = math.sqrt(-tau)
        out["J"] = (K / out["kappa"]).tolist()
    _emit(out)


@main.command()
@click.argument("i_file", required=False, type=click.Path())
@click.option("--seed", type=int, default=None, help="Draw a random I in AO- instead of reading a file.")
def pipeline(i_file, seed):
    """Run I -> J_I -> pi(J_I) -> J_{pi(J_I)} and check each stage."""
    if i_file is None and seed is None:
        _die("give an I file or --seed", EXIT_INPUT)
    I = _load_acs(i_file) if i_file is not None else acs.sample(seed, require_AO_minus=True)
    try:
        J = acs.alpha_map(I)
    except NotInAOMinus as exc:
        _die(f"{exc}; J_I exists only for a1^2 + a2^2 + a3^2 < 3/4", EXIT_DOMAIN)
    P = acs.project_polar(J)
    J_final = acs.alpha_map(P)
    F = acs.u_frame(I)
    J_u = change_frame(J_final.J, F, "operator")
    detB = float(np.linalg.det(I.B))
    amp = J.amplification_det()
    fit = curvature.nk_form_fit(acs.G_NK, J_u)
    _emit({
        "input": I.to_json(),
        "x": I.x,
        "t": I.t,
        "tau": I.tau_predicted,
        "J_I": J.to_json(),
        "pi_J_I": P.to_json(),
        "J_pi_J_I": J_final.to_json(),
        "J_pi_J_I_u_frame": J_u.tolist(),
        "det_B": {"detB": detB, "ok": detB < 0},
        "amplification": {"amplification_det": amp, "ok": amp > 0},
        "projection_residual": float(np.abs(acs.projection_closed_form(I) - P.matrix.T).max()),
        "final_vs_J_I0": float(np.abs(J_u - acs.J_I0).max()),
        "nk_defect": curvature.nk_defect(acs.G_NK, J_u),
        "nk_mu": fit.mu,
    })


@main.command(name="curvature")
@click.argument("i_file", required=False, type=click.Path())
@click.option("--t", "t_value", type=float, default=None, help="Use t directly instead of an I file.")
@click.option("--eps", default=1e-12, show_default=True)
def curvature_cmd(i_file, t_value, eps):
    """Ricci curvature of g_I: Koszul computation against the closed forms."""
    if (i_file is None) == (t_value is None):
        _die("give exactly one of an I file or --t", EXIT_INPUT)
    if t_value is not None:
        if abs(4 * t_value**2 - 1) < eps:
            _die("4t^2 - 1 vanishes: pole at t = 1/2", EXIT_DOMAIN)
        if not 0.5 < t_value <= 1.0:
            _die(f"t = {t_value} is outside (1/2, 1]", EXIT_DOMAIN)
        a = np.array([0.0, math.sqrt(max(0.0, 1.0 - t_value**2)), 0.0])
        t = t_value
    else:
        I = _load_acs(i_file)
        if not I.in_ao_minus:
            _die(f"x = {I.x:.6g} is not below 3/4", EXIT_DOMAIN)
        a, t = I.a, I.t
    G = acs.block_metric(a)
    try:
        closed, s_closed = curvature.ricci_closed_form(t, eps)
    except PoleAtHalf as exc:
        _die(str(exc), EXIT_DOMAIN)
    rep = curvature.ricci(G, frame=curvature.eigenframe(G, a, t))
    _emit({
        "t": t,
        "metric": G.tolist(),
        "ricci_oracle": rep.ricci.tolist(),
        "ricci_closed_form": closed.tolist(),
        "max_discrepancy": float(np.abs(rep.ricci - np.diag(closed)).max()),
        "scalar_oracle": rep.scalar,
        "scalar_closed_form": s_closed,
        "report": rep.to_json(),
    })


def _tolerance_options(func):
    for name in reversed(list(verify.DEFAULT_TOLERANCES)):
        func = click.option(
            f"--tol-{name}", name, type=float, default=None,
            help=f"Tolerance for {name} (default {verify.DEFAULT_TOLERANCES[name]:g}).",
        )(func)
    return func


@main.command(name="verify")
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--samples", default=10_000, show_default=True, type=click.IntRange(min=1))
@click.option("--tol", "tol_all", type=float, default=None, help="Override every tolerance.")
@click.option("--out", type=click.Path(), default=None, help="Per-sample residual file.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--workers", default=1, show_default=True, type=click.IntRange(min=1))
@_tolerance_options
def verify_cmd(seed, samples, tol_all, out, fmt, workers, **tols):
    """Seeded sweep over every checked identity; exit 0 iff all pass."""
    tolerances = {k: tol_all for k in verify.DEFAULT_TOLERANCES} if tol_all is not None else {}
    tolerances.update({k: v for k, v in tols.items() if v is not None})
    try:
        config = verify.VerificationConfig(seed, samples, tolerances, out, fmt, workers)
    except ValueError as exc:
        _die(str(exc), EXIT_INPUT)
    summary = verify.run(config)
    if out:
        text = verify.to_csv(summary.results) if fmt == "csv" else verify.to_json_rows(summary.results)
        Path(out).write_text(text)
    _emit(summary.to_json())
    if not summary.passed:
        name = summary.first_failure
        f = summary.failures[name]
        _die(
            f"check {name} failed at sample {f['sample_index']}: "
            f"residual {f['residual']:.3g} > tolerance {f['tolerance']:.3g}",
            EXIT_FAIL,
        )


if __name__ == "__main__":
    main()
