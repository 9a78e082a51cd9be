"""Command-line interface.

Machine-readable results go to stdout as JSON lines; a human summary and
the run manifest go to stderr.  For a fixed argument vector and seed the
stdout byte stream is deterministic, which the manifest records with a
checksum.  Exit status: 0 on success, 1 when a verification fails, 2 on
usage or data errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from .acceptance import BUDGETS, run_all
from .asymptotics import QuadratureConfig, brute_force_I, cutoff_convergence, \
    fit_asymptotics, leading_coefficient_L0
from .catalogue import ACTION_NAMES, AMPLITUDES, load_action, load_amplitude
from .critical import NotCriticalError, DegenerateTransversalError, \
    sample_regular_critical
from .resolution import RankDeficientError, certify_weak_hessian, \
    sample_blowup_points, sample_weak_critical, weak_critical_conditions, \
    weak_gradient, weak_transform_phase


class CliError(Exception):
    """Bad arguments or unusable data; maps to exit status 2."""


def _jsonable(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def _emit(records, args, command, t0):
    """Write records as JSON lines, optionally as CSV, plus the manifest."""
    lines = [json.dumps(_jsonable(r), sort_keys=True) for r in records]
    out = "\n".join(lines) + ("\n" if lines else "")
    sys.stdout.write(out)
    sys.stdout.flush()

    if args.csv:
        _write_csv(args.csv, records)

    manifest = {
        "command": command,
        "action": getattr(args, "action", None),
        "seed": getattr(args, "seed", None),
        "config_hash": _config_hash(args),
        "version": __version__,
        "wall_seconds": round(time.perf_counter() - t0, 3),
        "output_sha256": hashlib.sha256(out.encode()).hexdigest(),
        "records": len(records),
    }
    if not args.json:
        sys.stderr.write("manifest: %s\n" % json.dumps(manifest, sort_keys=True))


def _config_hash(args):
    skip = {"csv", "json", "func"}
    payload = {k: v for k, v in sorted(vars(args).items())
               if k not in skip and not callable(v)}
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, default=str).encode()
    ).hexdigest()[:16]


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(_jsonable(value), sort_keys=True)
    return value


def _write_csv(path, records):
    if not records:
        return
    fields = sorted({k for r in records for k in r})
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for r in records:
            writer.writerow({k: _csv_cell(_jsonable(v))
                             for k, v in r.items()})


def _summary(args, text):
    if not args.json:
        sys.stderr.write(text + "\n")


def _load(args):
    if args.action not in ACTION_NAMES:
        raise CliError(f"unknown action {args.action!r}; "
                       f"known: {', '.join(ACTION_NAMES)}")
    return load_action(args.action)


def _amplitude_for(args, action):
    aid = getattr(args, "amplitude", None)
    if aid is None:
        for key, amp in AMPLITUDES.items():
            if amp.action == action.name and amp.scale != 0.0:
                aid = key
                break
        else:
            raise CliError(f"no registered amplitude for {action.name!r}")
    if aid not in AMPLITUDES:
        raise CliError(f"unknown amplitude {aid!r}; "
                       f"known: {', '.join(AMPLITUDES)}")
    amp = load_amplitude(aid)
    if amp.action != action.name:
        raise CliError(f"amplitude {aid!r} belongs to {amp.action!r}, "
                       f"not {action.name!r}")
    return amp


def _config(args):
    return QuadratureConfig(signature_convention=args.signature_convention,
                            seed=args.seed)


def _mu_values(args):
    if not (0.0 < args.mu_min <= args.mu_max):
        raise CliError("need 0 < --mu-min <= --mu-max")
    if args.mu_points < 1:
        raise CliError("--mu-points must be positive")
    return np.geomspace(args.mu_min, args.mu_max, args.mu_points)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_list_actions(args):
    records = []
    for name in ACTION_NAMES:
        action = load_action(name)
        records.append({
            "action": name,
            "group_dim": action.group_dim,
            "kappa": action.kappa,
            "charts": list(action.charts),
            "chains": [c.id for c in action.chains],
            "amplitudes": [k for k, a in AMPLITUDES.items()
                           if a.action == name],
        })
    return records, 0


def _cmd_verify_critical(args):
    action = _load(args)
    failures = 0
    records = []
    try:
        samples = sample_regular_critical(action, args.samples, args.seed)
    except (NotCriticalError, DegenerateTransversalError) as exc:
        raise CliError(str(exc))
    for s in samples:
        ok = s.rank == 2 * action.kappa and s.grad_norm <= 1e-10
        failures += 0 if ok else 1
        records.append({
            "chart": s.pt.chart, "grad_norm": s.grad_norm, "rank": s.rank,
            "signature": s.signature, "kernel_dim": s.kernel_dim,
            "stratum": s.stratum, "certified": ok,
        })
    _summary(args, "verify-critical %s: %d/%d certified" %
             (action.name, len(records) - failures, len(records)))
    return records, (1 if failures else 0)


def _cmd_resolve_check(args):
    action = _load(args)
    chains = [c for c in action.chains
              if args.chain is None or c.id == args.chain]
    if not chains:
        raise CliError(f"action {action.name!r} has no chain "
                       f"{args.chain!r}" if args.chain
                       else f"action {action.name!r} has no isotropy chains")
    records = []
    status = 0
    for chain in chains:
        generic = sample_blowup_points(action, chain, args.samples, args.seed)
        max_resid = max(weak_transform_phase(action, bp).factor_residual
                        for bp in generic)
        mis = 0
        for bp in generic:
            conds = weak_critical_conditions(action, bp)
            gnorm = float(np.linalg.norm(weak_gradient(action, bp)))
            if all(conds) != (gnorm <= 1e-8):
                mis += 1
        crit = sample_weak_critical(action, chain, max(args.samples // 10, 5),
                                    args.seed, sigma_values=[0.0, 0.5, -0.7])
        ranks_ok = True
        try:
            for bp in crit:
                certify_weak_hessian(action, bp)
        except RankDeficientError:
            ranks_ok = False
        ok = max_resid <= 1e-10 and mis == 0 and ranks_ok
        status |= 0 if ok else 1
        records.append({
            "action": action.name, "chain": chain.id,
            "samples": args.samples, "max_factor_residual": max_resid,
            "misclassified": mis, "hessian_ranks_certified": ranks_ok,
            "passed": ok,
        })
    _summary(args, "resolve-check %s: %s" % (
        action.name,
        ", ".join("%s %s" % (r["chain"], "ok" if r["passed"] else "FAIL")
                  for r in records)))
    return records, status


def _cmd_compute_l0(args):
    action = _load(args)
    amp = _amplitude_for(args, action)
    L0 = leading_coefficient_L0(action, amp, _config(args))
    _summary(args, "compute-l0 %s/%s: L0 = %.12g" %
             (action.name, amp.id, L0.real))
    return [{"action": action.name, "amplitude": amp.id,
             "kappa": action.kappa, "L0": L0}], 0


def _sweep_records(args, action, amp, cfg):
    records = []
    for mu in _mu_values(args):
        I = brute_force_I(action, amp, float(mu), cfg)
        records.append({"action": action.name, "amplitude": amp.id,
                        "mu": float(mu), "I": I, "abs_I": abs(I)})
    return records


def _cmd_sweep_mu(args):
    action = _load(args)
    amp = _amplitude_for(args, action)
    records = _sweep_records(args, action, amp, _config(args))
    _summary(args, "sweep-mu %s/%s: %d points in [%g, %g]" %
             (action.name, amp.id, len(records), args.mu_min, args.mu_max))
    return records, 0


def _cmd_fit(args):
    action = _load(args)
    amp = _amplitude_for(args, action)
    records = _sweep_records(args, action, amp, _config(args))
    fit = fit_asymptotics([(r["mu"], r["I"]) for r in records],
                          kappa_known=action.kappa)
    records.append({
        "action": action.name, "amplitude": amp.id, "fit": True,
        "kappa": action.kappa, "kappa_hat": fit.kappa_hat,
        "L0_hat": fit.L0_hat, "residual_slope": fit.residual_slope,
    })
    _summary(args, "fit %s/%s: kappa_hat=%.4f L0_hat=%.8g" %
             (action.name, amp.id, fit.kappa_hat, fit.L0_hat.real))
    return records, 0


def _cmd_cutoff(args):
    action = _load(args)
    amp = _amplitude_for(args, action)
    cfg = _config(args)
    out = cutoff_convergence(action, amp, args.eps, cfg)
    if out is None:
        raise CliError(f"action {action.name!r} has no singular stratum "
                       "to cut off")
    L0 = leading_coefficient_L0(action, amp, cfg)
    records = [{"action": action.name, "amplitude": amp.id,
                "eps": eps, "L0_eps": L, "L0": L0,
                "rel_error": abs(L - L0) / abs(L0)} for eps, L in out]
    _summary(args, "cutoff %s/%s: rel errors %s" % (
        action.name, amp.id,
        ", ".join("%.2e" % r["rel_error"] for r in records)))
    return records, 0


def _cmd_all(args):
    results = run_all(args.budget)
    records = []
    for r in results:
        records.append({"criterion": r.id, "passed": r.passed,
                        "seconds": round(r.seconds, 2), "details": r.details})
        _summary(args, "%-20s %s  (%.1fs)" %
                 (r.id, "PASS" if r.passed else "FAIL", r.seconds))
    failed = [r.id for r in results if not r.passed]
    _summary(args, "acceptance (%s budget): %d/%d passed%s" % (
        args.budget, len(results) - len(failed), len(results),
        "" if not failed else "; failed: " + ", ".join(failed)))
    return records, (1 if failed else 0)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="equivar",
        description="Asymptotics of oscillatory integrals over group "
                    "actions with moment-map phase.")
    parser.add_argument("--version", action="version",
                        version="equivar " + __version__)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true",
                        help="machine output only; no stderr summary")
    common.add_argument("--csv", metavar="PATH",
                        help="also write records to a CSV file")
    common.add_argument("--signature-convention",
                        choices=("quarter", "unit"), default="quarter")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-actions", parents=[common],
                       help="catalogue of registered group actions")
    p.set_defaults(func=_cmd_list_actions)

    p = sub.add_parser("verify-critical", parents=[common],
                       help="certify random points of the critical set")
    p.add_argument("--action", required=True)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=_cmd_verify_critical)

    p = sub.add_parser("resolve-check", parents=[common],
                       help="factorization and critical conditions of the "
                            "resolved phase")
    p.add_argument("--action", required=True)
    p.add_argument("--chain", default=None)
    p.add_argument("--samples", type=int, default=500)
    p.set_defaults(func=_cmd_resolve_check)

    p = sub.add_parser("compute-l0", parents=[common],
                       help="leading coefficient by critical-set quadrature")
    p.add_argument("--action", required=True)
    p.add_argument("--amplitude", default=None)
    p.set_defaults(func=_cmd_compute_l0)

    for name, func in (("sweep-mu", _cmd_sweep_mu), ("fit", _cmd_fit)):
        p = sub.add_parser(name, parents=[common],
                           help="brute-force oracle over a frequency sweep"
                           if name == "sweep-mu" else
                           "sweep plus power-law fit")
        p.add_argument("--action", required=True)
        p.add_argument("--amplitude", default=None)
        p.add_argument("--mu-min", type=float, default=0.01)
        p.add_argument("--mu-max", type=float, default=0.1)
        p.add_argument("--mu-points", type=int, default=6)
        p.set_defaults(func=func)

    p = sub.add_parser("cutoff", parents=[common],
                       help="coefficient convergence under a cut-off near "
                            "the singular stratum")
    p.add_argument("--action", required=True)
    p.add_argument("--amplitude", default=None)
    p.add_argument("--eps", type=float, nargs="+",
                   default=[0.2, 0.1, 0.05, 0.025])
    p.set_defaults(func=_cmd_cutoff)

    p = sub.add_parser("all", parents=[common],
                       help="run the acceptance criteria")
    p.add_argument("--budget", choices=BUDGETS, default="quick")
    p.set_defaults(func=_cmd_all)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        records, status = args.func(args)
    except CliError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    _emit(records, args, args.command, t0)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
