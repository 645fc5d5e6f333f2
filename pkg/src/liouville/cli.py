"""Command-line entry point: ``liouville <command> [options]``.

Commands: spectrum, propagate, steady-state, kraus, demo-tls, validate.
Errors are written to stderr as a one-line JSON object and mapped to the
exit code of the exception class.
"""
import argparse
import json
import sys
from importlib import resources

import numpy as np

from . import __version__
from .core import expm
from .errors import LiouvilleError
from .io import (
    atomic_write,
    complex_to_json,
    load_model,
    matrix_to_json,
    parse_model,
    record_from_trajectory,
    write_trajectory,
)
from .kraus import completeness_defect, kraus_from_superop
from .regression import run_all
from .spectral import analyze, dyson_propagator, propagate, stability_report, steady_state
from .spectral import Trajectory
from .vectorization import mho_inv

EXIT_REGRESSION = 20
EXIT_IO = 14


def demo_model_text():
    return resources.files("liouville").joinpath("data/tls_demo.json").read_text(encoding="utf-8")


def _load(args):
    if args.model is None:
        return parse_model(demo_model_text())
    return load_model(args.model)


def _tol(args, model, key):
    val = getattr(args, f"tol_{key}", None)
    return val if val is not None else model.tolerances.get(key)


def _emit(args, text):
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=2) + "\n"


def _analyze(args, model, gen):
    return analyze(gen, tol_cluster=_tol(args, model, "cluster"), tol_diag=_tol(args, model, "diag"))


def cmd_spectrum(args):
    model = _load(args)
    system = _analyze(args, model, model.liouvillian())
    if args.format == "csv":
        lines = ["index,re,im"] + [f"{k},{float(z.real)!r},{float(z.imag)!r}"
                                   for k, z in enumerate(system.eigenvalues)]
        _emit(args, "\n".join(lines) + "\n")
        return 0
    report = stability_report(system, _tol(args, model, "zero"), _tol(args, model, "stab"))
    out = {
        "kind": system.kind,
        "eigenvalues": [complex_to_json(z) for z in system.eigenvalues],
        "clusters": [{"eigenvalue": complex_to_json(c.eigenvalue), "algebraic": c.algebraic,
                      "geometric": c.geometric, "chain_lengths": list(c.chain_lengths)}
                     for c in system.clusters],
        "condition": system.condition,
        "residual": system.residual,
        "stable": report.stable,
        "max_real": report.max_real,
        "flags": list(report.flags),
    }
    _emit(args, _dumps(out))
    return 0


def cmd_propagate(args):
    model = _load(args)
    gen = model.liouvillian()
    pert = model.perturbation_liouvillian()
    if args.order is not None:
        if pert is None:
            raise LiouvilleError("--order needs a model with a 'perturbation' section")
        rho0 = np.asarray(model.initial_state).reshape(-1)
        states = []
        for t in model.times:
            u = dyson_propagator(gen, pert, t, order=args.order, steps=args.steps)
            r = mho_inv(u @ rho0, model.dim)
            states.append(0.5 * (r + r.conj().T))
        traj = Trajectory(model.times, tuple(states))
    else:
        if pert is not None:
            gen = gen + pert
        traj = propagate(gen, model.initial_state, model.times, system=_analyze(args, model, gen))
    rec = record_from_trajectory(traj, model.populations, model.coherences, model.purity,
                                 model.observables)
    _emit(args, write_trajectory(rec, args.format))
    return 0


def cmd_steady_state(args):
    model = _load(args)
    system = _analyze(args, model, model.liouvillian())
    rho = steady_state(system, _tol(args, model, "zero"), _tol(args, model, "stab"))
    _emit(args, _dumps({"steady_state": matrix_to_json(rho.op), "kind": system.kind}))
    return 0


def cmd_kraus(args):
    model = _load(args)
    t = float(model.times[-1]) if args.time is None else args.time
    kset = kraus_from_superop(expm(t * model.liouvillian().op), tol=_tol(args, model, "kraus"), t=t)
    out = {
        "t": t,
        "count": len(kset),
        "completeness_defect": completeness_defect(kset),
        "operators": [matrix_to_json(k) for k in kset.ops],
    }
    _emit(args, _dumps(out))
    return 0


def cmd_validate(args):
    model = _load(args)
    gen = model.liouvillian()
    out = {"valid": True, "dim": model.dim, "generator_kind": gen.kind,
           "jumps": len(model.jumps), "times": len(model.times)}
    _emit(args, _dumps(out))
    return 0


def cmd_demo_tls(args):
    results = run_all(seed=args.seed)
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    _emit(args, "\n".join(lines) + "\n")
    return 0 if passed == len(results) else EXIT_REGRESSION


def build_parser():
    parser = argparse.ArgumentParser(prog="liouville", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=("json",)):
        p.add_argument("--model", help="model document (JSON); defaults to the shipped TLS demo")
        p.add_argument("--out", help="write output here (atomically) instead of stdout")
        p.add_argument("--format", choices=fmt, default=fmt[0])
        for key in ("cluster", "diag", "zero", "stab", "kraus"):
            p.add_argument(f"--tol-{key}", type=float, default=None, dest=f"tol_{key}")
        return p

    common(sub.add_parser("spectrum", help="eigenvalues and classification"), ("json", "csv"))
    p = common(sub.add_parser("propagate", help="trajectory table"), ("csv", "json"))
    p.add_argument("--order", type=int, choices=(1, 2, 3), default=None,
                   help="use the truncated Dyson series with the model's perturbation")
    p.add_argument("--steps", type=int, default=64, help="quadrature steps for --order")
    common(sub.add_parser("steady-state", help="unique stationary state"))
    p = common(sub.add_parser("kraus", help="Kraus operators of exp(t L)"))
    p.add_argument("--time", type=float, default=None, help="defaults to the last model time")
    common(sub.add_parser("validate", help="check a model document"))
    p = sub.add_parser("demo-tls", help="run the built-in regression checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    return parser


COMMANDS = {
    "spectrum": cmd_spectrum,
    "propagate": cmd_propagate,
    "steady-state": cmd_steady_state,
    "kraus": cmd_kraus,
    "validate": cmd_validate,
    "demo-tls": cmd_demo_tls,
}


def _error_payload(exc, code):
    out = {"error": type(exc).__name__, "code": code, "message": str(exc)}
    path = getattr(exc, "path", None)
    if path:
        out["path"] = path
    return out


def run_command(argv=None):
    """Run one command; returns the process exit status."""
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except LiouvilleError as exc:
        err, code = exc, exc.code
    except OSError as exc:
        err, code = exc, EXIT_IO
    except ValueError as exc:
        err, code = exc, 1
    sys.stderr.write(json.dumps(_error_payload(err, code), sort_keys=True) + "\n")
    return code


def main(argv=None):
    sys.exit(run_command(argv))


if __name__ == "__main__":
    main()
