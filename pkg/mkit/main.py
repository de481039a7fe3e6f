#!/usr/bin/env python3
"""
mkit Command Line

JSON in, JSON out. Every report is written to standard output with sorted
keys, so identical inputs give byte-identical reports, and every report
echoes its exact inputs so that `mkit verify` can recheck it alone.

Exit codes:
    0  success
    1  unexpected failure (traceback in the log file)
    2  malformed input or usage error
    3  precondition or genericity failure
    4  verification failure
"""

import json
import logging
import os
import sys
import traceback
from typing import Any, Dict, Optional, Tuple

import click
import pandas as pd

# Add the project root to the Python path so the mkit package imports when run as a script
project_root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from mkit.config import config
from mkit.core.classifier import LagrangianGerm, classify
from mkit.core.errors import MalformedInputError, MkitError, VerificationError
from mkit.core.flux import flux_report, parse_grid, recover_invariant, FluxSample
from mkit.core.forms import DifferentialForm
from mkit.core.francoise import DecompositionResult, decompose, verify_certificate
from mkit.core.local_algebra import check_quasihomogeneous, detect_weights, milnor_boundary
from mkit.core.maps import PlaneMap, apply_map, pullback
from mkit.core.normalizer import (PairInvariants, a1_form, build_morse_normalizer, normalize_pair,
                                  solve_vey_ode, verify_pair_normalization)
from mkit.core.poly import Poly
from mkit.core.rational import parse_rational
from mkit.core.series import SeriesT, compose_series, series_power
from mkit.core.validation import parse_input, validate_output
from mkit.core.weights import A1_WEIGHTS, WeightSystem, parse_weights

logger = logging.getLogger(__name__)


# input helpers

def load_json(path: str) -> Any:
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedInputError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e


def load_poly(path: str) -> Poly:
    data = load_json(path)
    # a function file may also be written as a degree-0 form
    if isinstance(data, dict) and "f" in data and "terms" not in data:
        data = data["f"]
    parse_input(data, 'poly', path)
    return Poly.from_json(data)


def load_two_form(path: str) -> DifferentialForm:
    data = load_json(path)
    parse_input(data, 'two_form', path)
    return DifferentialForm.from_json(data)


def load_one_form(path: str) -> DifferentialForm:
    data = load_json(path)
    if isinstance(data, dict) and "alpha" in data:
        data = data["alpha"]
    parse_input(data, 'one_form', path)
    return DifferentialForm.from_json(data)


def load_germ(path: str) -> LagrangianGerm:
    data = load_json(path)
    parse_input(data, 'germ', path)
    return LagrangianGerm.from_json(data)


def load_series(path: str) -> SeriesT:
    data = load_json(path)
    wrapped = {"c": data} if isinstance(data, list) else data
    if isinstance(wrapped, dict) and isinstance(wrapped.get("c"), list) and wrapped["c"] \
            and isinstance(wrapped["c"][0], list):
        wrapped = {"c": wrapped["c"][0]}
    parse_input(wrapped, 'series', path)
    return SeriesT.from_json(wrapped)


def resolve_weights(f: Poly, override: Optional[str]) -> WeightSystem:
    if override:
        weights = parse_weights(override)
        check_quasihomogeneous(f, weights)
        return weights
    return detect_weights(f)


def emit(report: Dict) -> None:
    click.echo(json.dumps(report, indent=2, sort_keys=True))


def germ_block(germ) -> Dict:
    return {"weights": germ.weights.to_json(), "mu": germ.mu,
            "basis": [[m.ex, m.ey] for m in germ.basis]}


def default_normal_cap(order: int) -> int:
    return A1_WEIGHTS.level_of(order + config.normalizer_headroom)


# report builders (shared by the commands and by verify)

def weights_report(f: Poly, override: Optional[str]) -> Dict:
    weights = resolve_weights(f, override)
    return {"command": "weights",
            "input": {"f": f.to_json(), "weights": override},
            "weights": weights.to_json(),
            "engine": {"weights": weights.to_json(), "level_x": weights.level_x, "level_y": weights.level_y}}


def milnor_report(f: Poly, override: Optional[str], cap: Optional[int]) -> Dict:
    weights = resolve_weights(f, override)
    germ = milnor_boundary(f, weights, cap)
    return {"command": "milnor",
            "input": {"f": f.to_json(), "weights": override, "cap": cap},
            "mu": germ.mu, "mu1": germ.mu1, "mu0": germ.mu0,
            "basis": [[m.ex, m.ey] for m in germ.basis],
            "weights": weights.to_json(),
            "engine": germ_block(germ)}


def decompose_report(f: Poly, omega: DifferentialForm, order: int, override: Optional[str]) -> Dict:
    weights = resolve_weights(f, override)
    germ = milnor_boundary(f, weights)
    result = decompose(omega, germ, order)
    report = result.to_json()
    report.update({"command": "decompose",
                   "input": {"f": f.to_json(), "omega": omega.to_json(), "order": order, "weights": override},
                   "flagged": result.flagged,
                   "engine": germ_block(germ)})
    return report


def normalize_pair_report(f: Poly, omega: DifferentialForm, order: int, cap: int) -> Dict:
    result = normalize_pair(omega, f, cap, order)
    report = result.to_json()
    report.update({"command": "normalize",
                   "input": {"f": f.to_json(), "omega": omega.to_json(), "order": order, "cap": cap},
                   "engine": {"weights": A1_WEIGHTS.to_json(), "order": order, "cap": cap}})
    return report


def normalize_series_report(c: SeriesT, order: int, cap: int, s: int) -> Dict:
    result = build_morse_normalizer(c.pad(order), cap, s, order)
    report = result.to_json()
    report.update({"command": "normalize",
                   "input": {"c": c.to_json(), "order": order, "cap": cap, "sign": s},
                   "engine": {"weights": A1_WEIGHTS.to_json(), "order": order, "cap": cap}})
    return report


def classify_report(alpha: DifferentialForm, f: Poly, order: int, cap: Optional[int], with_normalizer: bool) -> Dict:
    report = classify(LagrangianGerm(alpha, f), cap, order, with_normalizer).to_json()
    report.update({"command": "classify",
                   "input": {"alpha": alpha.to_json(), "f": f.to_json(), "order": order, "cap": cap,
                             "normalizer": with_normalizer},
                   "engine": {"order": order, "cap": cap}})
    return report


def flux_check_report(c: SeriesT, grid: str, nodes: int, fd_step: float, tol: float,
                      recover: Optional[int]) -> Tuple[Dict, pd.DataFrame]:
    frame = flux_report(c, parse_grid(grid), fd_step, nodes)
    max_residual = frame.attrs["max_residual"]
    report = {"command": "flux-check",
              "input": {"c": c.to_json(), "grid": grid, "nodes": nodes, "fd_step": fd_step, "tol": tol,
                        "recover": recover},
              "samples": frame.to_dict(orient="records"),
              "max_residual": max_residual,
              "passed": bool(max_residual < tol),
              "engine": {"nodes": nodes, "fd_step": fd_step}}
    if recover is not None:
        samples = [FluxSample(**row) for row in report["samples"]]
        report["recovered"] = [float(v) for v in recover_invariant(samples, recover)]
    return report, frame


# command group

@click.group()
def cli():
    """Invariants, decompositions and normal forms of Martinet pairs on the plane."""


@cli.command()
@click.option('-f', '--function', 'function_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--weights', 'weights_override', default=None, help='Override such as 1,1/2 or 1:1/2')
def weights(function_path, weights_override):
    """Quasihomogeneous weights of f."""
    emit(weights_report(load_poly(function_path), weights_override))


@cli.command()
@click.option('-f', '--function', 'function_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--weights', 'weights_override', default=None)
@click.option('--cap', type=click.IntRange(min=0), default=None, help='Level cap of the quotient search')
def milnor(function_path, weights_override, cap):
    """Milnor numbers and monomial basis of the boundary local algebra."""
    emit(milnor_report(load_poly(function_path), weights_override, cap))


@cli.command('decompose')
@click.option('-f', '--function', 'function_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--omega', 'omega_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--order', type=click.IntRange(min=1), default=None)
@click.option('--weights', 'weights_override', default=None)
def decompose_command(function_path, omega_path, order, weights_override):
    """Invariants c_i and potential xi of a 2-form in x Omega^2."""
    order = config.max_order if order is None else order
    emit(decompose_report(load_poly(function_path), load_two_form(omega_path), order, weights_override))


@cli.command()
@click.option('-f', '--function', 'function_path', default=None, type=click.Path(exists=True, dir_okay=False))
@click.option('--omega', 'omega_path', default=None, type=click.Path(exists=True, dir_okay=False))
@click.option('--c', 'c_path', default=None, type=click.Path(exists=True, dir_okay=False))
@click.option('--order', type=click.IntRange(min=1), default=None)
@click.option('--cap', type=click.IntRange(min=1), default=None)
@click.option('--sign', 'sign_text', type=click.Choice(['+1', '-1']), default='+1')
def normalize(function_path, omega_path, c_path, order, cap, sign_text):
    """Normalizing map and psi for a pair (-f, --omega) or for an invariant series (--c)."""
    order = config.normal_form_order if order is None else order
    cap = default_normal_cap(order) if cap is None else cap
    if c_path:
        if function_path or omega_path:
            raise click.UsageError("--c excludes -f and --omega")
        emit(normalize_series_report(load_series(c_path), order, cap, int(sign_text)))
        return
    if not (function_path and omega_path):
        raise click.UsageError("normalize needs -f and --omega, or --c")
    emit(normalize_pair_report(load_poly(function_path), load_two_form(omega_path), order, cap))


@cli.command('classify')
@click.option('--germ', 'germ_path', default=None, type=click.Path(exists=True, dir_okay=False),
              help='One file holding {"alpha": ..., "f": ...}')
@click.option('--alpha', 'alpha_path', default=None, type=click.Path(exists=True, dir_okay=False))
@click.option('-f', '--function', 'function_path', default=None, type=click.Path(exists=True, dir_okay=False))
@click.option('--order', type=click.IntRange(min=1), default=None)
@click.option('--cap', type=click.IntRange(min=1), default=None)
@click.option('--normalizer/--no-normalizer', default=False, help='Also build and verify the normalizing map')
def classify_command(germ_path, alpha_path, function_path, order, cap, normalizer):
    """Normal form tag, sign and invariant of a singular Lagrangian (alpha, f)."""
    order = config.normal_form_order if order is None else order
    if germ_path:
        if alpha_path or function_path:
            raise click.UsageError("--germ excludes --alpha and -f")
        germ = load_germ(germ_path)
        emit(classify_report(germ.alpha, germ.f, order, cap, normalizer))
        return
    if not (alpha_path and function_path):
        raise click.UsageError("classify needs --germ, or --alpha and -f")
    emit(classify_report(load_one_form(alpha_path), load_poly(function_path), order, cap, normalizer))


@cli.command('flux-check')
@click.option('--c', 'c_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--grid', default='0.1:1:10', show_default=True)
@click.option('--nodes', type=click.IntRange(min=8), default=None)
@click.option('--fd-step', type=click.FloatRange(min=0, min_open=True), default=None)
@click.option('--tol', type=click.FloatRange(min=0, min_open=True), default=None)
@click.option('--recover', type=click.IntRange(min=0), default=None, help='Also fit c back to this order')
@click.option('--csv', 'csv_path', default=None, type=click.Path(dir_okay=False, writable=True))
def flux_check(c_path, grid, nodes, fd_step, tol, recover, csv_path):
    """Check t V'(t) = c(t) V0(t) on a grid of the vanishing half-cycle."""
    nodes = config.quadrature_nodes if nodes is None else nodes
    fd_step = config.fd_step if fd_step is None else fd_step
    tol = config.tolerance if tol is None else tol
    report, frame = flux_check_report(load_series(c_path), grid, nodes, fd_step, tol, recover)
    if csv_path:
        frame.to_csv(csv_path, index=False)
    emit(report)
    if not report["passed"]:
        raise VerificationError(f"max residual {report['max_residual']:.3e} exceeds tolerance {tol:.1e}")


@cli.command('verify')
@click.argument('report_path', type=click.Path(exists=True, dir_okay=False))
def verify_command(report_path):
    """Recheck every exact identity recorded in a report."""
    report = load_json(report_path)
    if not isinstance(report, dict) or "command" not in report:
        raise MalformedInputError(f"{report_path}: not an mkit report")
    command = report["command"]
    if not validate_output(report, command, report_path):
        raise MalformedInputError(f"{report_path}: report does not match the {command} schema")
    try:
        VERIFIERS[command](report)
    except (KeyError, TypeError) as e:
        raise MalformedInputError(f"{report_path}: incomplete report ({e})") from e
    emit({"command": "verify", "input": {"report": command}, "verified": True})


# verifiers

def _same(recomputed: Dict, report: Dict, keys) -> None:
    for key in keys:
        if recomputed[key] != report[key]:
            raise VerificationError(f"'{key}' does not match the recomputed value")


def _verify_weights(report: Dict) -> None:
    inp = report["input"]
    _same(weights_report(Poly.from_json(inp["f"]), inp.get("weights")), report, ["weights"])


def _verify_milnor(report: Dict) -> None:
    inp = report["input"]
    recomputed = milnor_report(Poly.from_json(inp["f"]), inp.get("weights"), inp.get("cap"))
    _same(recomputed, report, ["mu", "mu1", "mu0", "basis", "weights"])


def _verify_decompose(report: Dict) -> None:
    inp = report["input"]
    f = Poly.from_json(inp["f"])
    omega = DifferentialForm.from_json(inp["omega"])
    germ = milnor_boundary(f, resolve_weights(f, inp.get("weights")))
    if report["mu"] != germ.mu or report["basis"] != [[m.ex, m.ey] for m in germ.basis]:
        raise VerificationError("germ data does not match the recomputed local algebra")
    residual = report.get("residual")
    result = DecompositionResult(
        germ,
        tuple(SeriesT.from_json(ci) for ci in report["c"]),
        Poly.from_json(report["xi"]),
        DifferentialForm.zero(2) if residual is None else DifferentialForm.two_form(Poly.from_json(residual)),
        report["iterations"])
    if not verify_certificate(result, omega, f):
        raise VerificationError("decomposition certificate failed")


def _verify_normalize(report: Dict) -> None:
    inp = report["input"]
    cap, order = inp["cap"], inp["order"]
    phi = PlaneMap.from_json(report["phi"], A1_WEIGHTS, cap)
    if "c" in inp and "omega" not in inp:
        _verify_series_normalizer(report, phi, SeriesT.from_json(inp["c"]).pad(order), cap, order, inp["sign"])
        return
    f = Poly.from_json(inp["f"])
    omega = DifferentialForm.from_json(inp["omega"])
    inv = PairInvariants(SeriesT.from_json(report["c"]), parse_rational(report["kappa"]),
                         1 if report["sign"] == "+1" else -1, parse_rational(report["scale"]),
                         SeriesT.from_json(report["psi"]).substitute_scale(parse_rational(report["scale"])), order)
    # reported psi is cut at the order: check f only where the cut cannot reach
    low = (f - f.constant_term()).lowest_level(A1_WEIGHTS)
    if low is None:
        raise VerificationError("f is constant")
    verify_pair_normalization(phi, inv, omega, f, min(cap, (order + 1) * low - 1), form_cap=cap)


def _verify_series_normalizer(report: Dict, phi: PlaneMap, c: SeriesT, cap: int, order: int, s: int) -> None:
    w = solve_vey_ode(c)
    if w.to_json() != report["w"] or series_power(w, parse_rational("2/5")).to_json() != report["v"]:
        raise VerificationError("w or v do not solve the normalizer equations")
    fhat = a1_form(s)
    model = DifferentialForm.two_form(Poly.x())
    expected = compose_series(c, fhat, cap, A1_WEIGHTS).mul_x().truncate(A1_WEIGHTS, cap)
    if pullback(phi, model, cap).coefficient != expected:
        raise VerificationError("pullback of x dx^dy does not reproduce x c(f) dx^dy")
    low_cap = min(cap, 2 * (order + 1) - 1)
    psi = SeriesT.from_json(report["psi"])
    if apply_map(fhat, phi, low_cap) != compose_series(psi, fhat, low_cap, A1_WEIGHTS):
        raise VerificationError("f o Phi does not reproduce psi(f)")


def _verify_classify(report: Dict) -> None:
    inp = report["input"]
    parse_input(inp, 'germ', 'report input')
    germ = LagrangianGerm.from_json(inp)
    recomputed = classify_report(germ.alpha, germ.f, inp["order"], inp.get("cap"), bool(inp.get("normalizer")))
    _same(recomputed, report, ["class", "sign", "invariant", "modulus", "normalizer", "conditions"])


def _verify_flux(report: Dict) -> None:
    inp = report["input"]
    recomputed, _ = flux_check_report(SeriesT.from_json(inp["c"]), inp["grid"], inp["nodes"],
                                      inp["fd_step"], inp["tol"], inp.get("recover"))
    if abs(recomputed["max_residual"] - report["max_residual"]) > 1e-12 or not report["passed"]:
        raise VerificationError("flux residuals do not reproduce or exceed the tolerance")


VERIFIERS = {
    'weights': _verify_weights,
    'milnor': _verify_milnor,
    'decompose': _verify_decompose,
    'normalize': _verify_normalize,
    'classify': _verify_classify,
    'flux-check': _verify_flux,
}


def main(argv=None) -> int:
    """Run the command group and map failures to exit codes."""
    try:
        result = cli.main(args=argv, prog_name='mkit', standalone_mode=False)
        return result if isinstance(result, int) else 0
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return 2
    except click.ClickException as e:
        e.show()
        return 2
    except click.Abort:
        click.echo("Aborted", err=True)
        return 1
    except MkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        click.echo(json.dumps({"error": type(e).__name__, "message": str(e), "exit_code": e.exit_code},
                              sort_keys=True), err=True)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected failure: {e}")
        logger.error(traceback.format_exc())
        click.echo(json.dumps({"error": type(e).__name__, "message": str(e), "exit_code": 1}, sort_keys=True),
                   err=True)
        return 1


if __name__ == '__main__':
    sys.exit(main())
