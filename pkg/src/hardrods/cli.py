"""Command-line front end: ``hardrods <command> MODEL.json [options]``.

Scalar results are printed as ``key=value`` lines; ``--out`` stores them as
JSON instead.  Table commands (``expand``, ``scan``, ``oracle``) write CSV.
Exit status is 2 for a malformed model file and 3 for a domain error, with a
single ``error: <kind>: <reason>`` line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import asdict

import mpmath

from .errors import DomainError, SchemaError
from .expansions import (exact_criterion, sufficient_criteria, truncated_pressure,
                         write_coefficient_csv)
from .finite_volume import (DEFAULT_DIGITS, packing_distribution, renewal_asymptotics_check,
                            write_histogram_csv, write_xi_csv, xi_continuous,
                            xi_discrete_sequence)
from .model import (ActivityModel, EnsembleKind, Scaled, StretchedExp, boundary_values,
                    load_model)
from .regime import RegimeKind, classify, packing_fraction, pressure
from .virial import activities_from_densities, corollary2_report, densities, virial_pressure

DEFAULT_TOL = 1e-12
SCAN_COLUMNS = ("mu", "regime", "p", "sigma", "dp_dmu")


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _emit(result: dict, out):
    if out:
        with open(out, "w") as fh:
            json.dump({k: _num(v) for k, v in result.items()}, fh, indent=2, default=str)
            fh.write("\n")
    for key, value in result.items():
        print(f"{key}={value}")


def _model(args) -> ActivityModel:
    path = args.model_opt or args.model
    if not path:
        raise SchemaError("no model file given")
    try:
        return load_model(path)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc


def cmd_classify(args):
    model = _model(args)
    r = classify(model)
    _emit({"regime": r.kind.value, "theta_star": r.theta_star, "boundary_g": r.boundary_g,
           "gap_lo": r.gap[0], "gap_hi": r.gap[1], "indeterminate": r.indeterminate,
           "p": pressure(model).p}, args.out)


def cmd_pressure(args):
    model = _model(args)
    sol = pressure(model)
    _emit({"p": sol.p, "regime": sol.regime.kind.value, "residual": sol.residual,
           "bracket_lo": sol.bracket[0], "bracket_hi": sol.bracket[1],
           "iterations": sol.iterations, "sigma": packing_fraction(model)}, args.out)


def cmd_density(args):
    model = _model(args)
    dv = densities(model, K=args.species_cap)
    result = {f"rho_{k}": r for k, r in sorted(dv.rho.items())}
    result.update(total=dv.total, packing=dv.packing)
    _emit(result, args.out)


def cmd_expand(args):
    model = _model(args)
    if not model.is_finite:
        model = model.truncated(args.species_cap)
    species = sorted(model.species())
    lengths = {k: l for k, (l, _) in model.species().items()}
    if args.out:
        with open(args.out, "w", newline="") as fh:
            rows = write_coefficient_csv(fh, model.kind, lengths, species, args.degree)
        value, terms = truncated_pressure(model, D=args.degree, species_cap=max(12, len(species)))
        print(f"rows={rows}")
        print(f"p_truncated={value}")
        print(f"terms={terms}")
    else:
        write_coefficient_csv(sys.stdout, model.kind, lengths, species, args.degree)


def cmd_criteria(args):
    model = _model(args)
    reports = [exact_criterion(model)] + sufficient_criteria(model)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([{k: _num(v) for k, v in asdict(r).items()} for r in reports], fh, indent=2)
            fh.write("\n")
    for r in reports:
        print(f"{r.criterion_id} holds={r.holds} margin={r.margin} "
              f"witness_a={r.witness_a} boundary={r.boundary}")


def cmd_virial(args):
    model = _model(args)
    dv = densities(model, K=args.species_cap)
    p = pressure(model).p
    pv = virial_pressure(model.kind, dv)
    back = activities_from_densities(model.kind, dv)
    species = model.species() if model.is_finite else {
        k: (float(k), model.activity(k)) for k in back}
    err = max((abs(back[k] - species[k][1]) / max(species[k][1], 1e-300) for k in back),
              default=0.0)
    _emit({"p": p, "p_virial": pv, "abs_diff": abs(p - pv),
           "packing": dv.packing, "activity_roundtrip_rel_err": err}, args.out)


def _volumes(top: int) -> list[int]:
    grid = {top}
    v = 1
    while v < top:
        for m in (1, 2, 5):
            if m * v < top:
                grid.add(m * v)
        v *= 10
    return sorted(grid)


def cmd_oracle(args):
    model = _model(args)
    if not model.is_finite:
        raise DomainError("oracle needs a finite model; use a truncated family")
    digits = args.precision_digits
    top = args.volume
    Ls = _volumes(int(top)) if model.kind is EnsembleKind.DISCRETE else _volumes(max(1, int(top)))
    sol = pressure(model)
    rows = []
    if model.kind is EnsembleKind.DISCRETE:
        with mpmath.workdps(digits):
            seq = xi_discrete_sequence(model, Ls[-1], digits=digits)
            eps = {}
            if sol.regime.is_fluid:
                rep = renewal_asymptotics_check(model, Ls, digits=digits)
                eps = dict(zip(rep.L, rep.epsilon))
            for L in Ls:
                log_xi = float(mpmath.log(seq[L]))
                rows.append({"L": L, "Xi": mpmath.nstr(seq[L], 17), "log_Xi": log_xi,
                             "log_Xi_over_L": log_xi / L, "p_infinity": sol.p,
                             "epsilon_renewal": eps.get(L, "")})
    else:
        for L in Ls:
            pv = xi_continuous(model, float(L), digits=digits)
            log_xi = pv.log
            rows.append({"L": L, "Xi": str(pv.value), "log_Xi": log_xi,
                         "log_Xi_over_L": log_xi / L, "p_infinity": sol.p,
                         "epsilon_renewal": ""})
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    xi_path = os.path.join(out, "xi.csv")
    hist_path = os.path.join(out, "histogram.csv")
    with open(xi_path, "w", newline="") as fh:
        write_xi_csv(fh, rows)
    hist = packing_distribution(model, Ls[-1])
    with open(hist_path, "w", newline="") as fh:
        write_histogram_csv(fh, hist)
    print(f"xi_csv={xi_path}")
    print(f"histogram_csv={hist_path}")
    print(f"mean_sigma={hist.mean()}")
    print(f"sigma_limit={packing_fraction(model)}")


def _scan_model(args):
    path = args.model_opt or args.model
    if not path:
        return ActivityModel(EnsembleKind.CONTINUOUS, StretchedExp(0.0))
    model = load_model(path)
    fam = model.family
    if isinstance(fam, StretchedExp) or (isinstance(fam, Scaled)
                                         and isinstance(fam.base, StretchedExp)):
        return model
    raise SchemaError("scan --param mu needs a stretched_exp family")


def _with_mu(model, mu):
    fam = model.family
    if isinstance(fam, Scaled):
        return ActivityModel(model.kind, Scaled(fam.t, StretchedExp(mu)))
    return ActivityModel(model.kind, StretchedExp(mu))


def scan_rows(model, start, stop, steps, h=1e-6):
    """Rows ``(mu, regime, p, sigma, dp_dmu)`` on an evenly spaced mu grid."""
    rows = []
    for i in range(steps + 1):
        mu = start + (stop - start) * i / steps if steps else start
        m = _with_mu(model, mu)
        sol = pressure(m)
        slope = (pressure(_with_mu(model, mu + h)).p - pressure(_with_mu(model, mu - h)).p) / (2 * h)
        rows.append({"mu": mu, "regime": sol.regime.kind.value, "p": sol.p,
                     "sigma": packing_fraction(m), "dp_dmu": slope})
    return rows


def mu_star(model, tol=DEFAULT_TOL) -> float:
    """Smallest mu at which the stretched family leaves the fluid regime."""
    base = _with_mu(model, 0.0)
    g0 = boundary_values(base, tol)[0]
    t = base.scale
    if model.kind is EnsembleKind.CONTINUOUS:
        return t * g0.mid  # g(theta*) = t S and theta* = -mu
    return -math.log1p(-t * g0.mid) if t * g0.mid < 1 else math.inf


def cmd_scan(args):
    if args.param != "mu":
        raise SchemaError(f"unsupported scan parameter {args.param!r}")
    if args.steps < 0:
        raise DomainError("--steps must be >= 0")
    model = _scan_model(args)
    rows = scan_rows(model, args.start, args.stop, args.steps)
    rows.sort(key=lambda r: r["mu"])
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=SCAN_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    finally:
        if args.out:
            fh.close()
    if args.out:
        star = mu_star(model, args.tol)
        fluid = [r["mu"] for r in rows if r["regime"] == RegimeKind.FLUID.value]
        print(f"mu_star={star}")
        print(f"last_fluid_mu={max(fluid) if fluid else 'none'}")


def cmd_report(args):
    rep = corollary2_report(args.c, K=args.species_cap)
    ks = [k for k in (1, 10, 50, 100, rep.K) if k <= rep.K]
    result = {"c": rep.c, "K": rep.K, "sum_rho": rep.sum_rho, "sum_k_rho": rep.sum_k_rho,
              "p": rep.p, "in_D_vir": rep.in_D_vir,
              "exact_criterion_holds": rep.criterion.holds,
              "exact_criterion_margin": rep.criterion.margin}
    for k in ks:
        result[f"log_z_{k}_over_{k}"] = rep.growth(k)
    _emit(result, args.out)


COMMANDS = {
    "classify": (cmd_classify, "regime of the model"),
    "pressure": (cmd_pressure, "pressure and packing fraction"),
    "density": (cmd_density, "species densities"),
    "expand": (cmd_expand, "activity expansion coefficients as CSV"),
    "criteria": (cmd_criteria, "exact and sufficient convergence criteria"),
    "virial": (cmd_virial, "pressure from densities and the inverse map"),
    "oracle": (cmd_oracle, "finite-volume partition functions and packing law"),
    "scan": (cmd_scan, "mu sweep of the stretched exponential family"),
    "report": (cmd_report, "densities c/k^3 outside the activity domain"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardrods", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("model", nargs="?", help="model JSON file")
        p.add_argument("--model", dest="model_opt", help="model JSON file")
        p.add_argument("--out", help="output file (directory for oracle)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="tail-bound tolerance (default 1e-12)")
        p.add_argument("--degree", type=int, default=10, help="expansion degree (default 10)")
        p.add_argument("--volume", type=float, default=200,
                       help="largest volume L for oracle (default 200)")
        p.add_argument("--species-cap", type=int, default=200,
                       help="species kept for infinite families (default 200)")
        p.add_argument("--precision-digits", type=int, default=DEFAULT_DIGITS,
                       help="working digits of the finite-volume DP (default 50)")
        p.add_argument("--param", default="mu")
        p.add_argument("--from", dest="start", type=float, default=0.0)
        p.add_argument("--to", dest="stop", type=float, default=3.0)
        p.add_argument("--steps", type=int, default=300)
        p.add_argument("--c", type=float, default=0.5, help="density prefactor for report")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SchemaError as exc:
        print(f"error: schema: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: domain: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run())
