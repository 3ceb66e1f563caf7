"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 validation failure,
3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dynamics, open_chain, oscillators, presets, qubit_chain, qubit_exact, two_qubit
from .errors import ConfigError
from .sweep import config_parameters, load_config, render, run_sweep, write_table
from .validate import run_validation

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2, 3
METRICS = ["work", "heat", "gap", "efficiency", "std_dev"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _global_flags(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--output", default=d(None), help="output file (preset: directory)")
    parser.add_argument("--format", choices=("csv", "json"), default=d("csv"))
    parser.add_argument("--seed", type=int, default=d(None))
    parser.add_argument("--jobs", type=int, default=d(None))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vacuum-engines", description="Vacuum-fluctuation engine calculator.")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("two-qubit", parents=[common], help="closed-form two-qubit engine")
    p.add_argument("--omega-a", type=float, required=True)
    p.add_argument("--omega-b", type=float, required=True)
    p.add_argument("--g", type=float, required=True)

    p = sub.add_parser("chain", parents=[common], help="uniform qubit chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--method", choices=("ff", "exact"), default="ff")
    p.add_argument("--boundary", choices=("closed", "open"), default="closed")
    p.add_argument("--samples", type=int, default=0, help="Monte Carlo cycles (exact method)")

    p = sub.add_parser("open-chain", parents=[common], help="open chain, perturbative limits")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--regime", choices=("weak", "strong", "exact"), required=True)

    p = sub.add_parser("oscillator", parents=[common], help="oscillator engines")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--two", action="store_true", help="two coupled oscillators (needs --k0, --g)")
    group.add_argument("--chain", type=int, metavar="N", help="open linear chain of N oscillators")
    group.add_argument("--matrix", metavar="FILE", help="JSON file holding the coupling matrix")
    p.add_argument("--k0", type=float, default=1.0)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--n-max", type=int, default=None, help="print Fock probabilities (--two)")

    p = sub.add_parser("lattice", parents=[common], help="open cubic oscillator lattice")
    p.add_argument("--m-side", type=int, required=True)
    p.add_argument("--dim", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--k0", type=float, default=1.0)

    p = sub.add_parser("dynamics", parents=[common], help="measurement and relaxation times")
    p.add_argument("--omega-a", type=float, required=True)
    p.add_argument("--omega-b", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--g-m", type=float, required=True)
    p.add_argument("--spectral-density", type=float, default=None)
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--trajectory", type=int, metavar="POINTS", default=0, help="emit |Psi|^2 up to 2 t_M")

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep from a JSON config")
    p.add_argument("--config", required=True)

    p = sub.add_parser("preset", parents=[common], help="figure datasets")
    p.add_argument("name", choices=sorted(presets.PRESETS))

    p = sub.add_parser("validate", parents=[common], help="cross-validation suites")
    p.add_argument("--full", action="store_true")
    return parser


def _emit(args, columns, rows):
    text = render(columns, rows, args.format)
    if args.output:
        Path(args.output).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _metric_row(metrics, **extra):
    row = dict(extra)
    row.update(metrics.as_dict())
    return list(extra) + METRICS, [row]


def _cmd_two_qubit(args):
    spec = two_qubit.TwoQubitSpec(args.omega_a, args.omega_b, args.g)
    cols, rows = _metric_row(two_qubit.metrics(spec), gamma=spec.gamma, delta=spec.delta)
    rows[0]["p11"] = two_qubit.outcome_probabilities(spec)[1]
    _emit(args, cols + ["p11"], rows)


def _cmd_chain(args):
    if args.method == "ff":
        if args.boundary != "closed":
            raise ConfigError("free fermions solve the closed chain only", "boundary")
        m = qubit_chain.metrics_closed_chain(args.n, args.omega, args.g)
        _emit(args, *_metric_row(m, n=args.n, g=args.g))
        return
    spec = qubit_exact.QubitChainSpec.uniform(args.n, args.omega, args.g, args.boundary)
    cols, rows = _metric_row(qubit_exact.engine_metrics_exact(spec), n=args.n, g=args.g)
    if args.samples:
        s = qubit_exact.sample_cycles(spec, args.samples, args.seed or 0, args.jobs or 1)
        rows[0].update(sampled_mean=s.mean_work, sampled_std=s.std_work, mean_stderr=s.mean_standard_error)
        cols += ["sampled_mean", "sampled_std", "mean_stderr"]
    _emit(args, cols, rows)


def _cmd_open_chain(args):
    spec = open_chain.OpenChainSpec.uniform(args.n, args.omega, args.g)
    if args.regime == "weak":
        m = open_chain.weak_coupling_metrics(spec).metrics
    elif args.regime == "strong":
        m = open_chain.strong_coupling_metrics(spec)
    else:
        m = qubit_exact.engine_metrics_exact(spec.exact_spec())
    _emit(args, *_metric_row(m, n=args.n, g=args.g))


def _load_matrix(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read matrix: {exc}", "matrix") from None
    if isinstance(data, dict):
        data = data.get("k")
    try:
        return np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("matrix must be a list of numeric rows", "matrix") from None


def _cmd_oscillator(args):
    if args.two:
        if args.g is None:
            raise ConfigError("--two needs --g", "g")
        spec = oscillators.TwoOscSpec(args.k0, args.g)
        if args.n_max is not None:
            dist = oscillators.two_oscillator_probabilities(spec, args.n_max)
            p = dist.probabilities
            rows = [
                {"n1": i, "n2": j, "probability": float(p[i, j])}
                for i in range(p.shape[0])
                for j in range(p.shape[1])
            ]
            _emit(args, ["n1", "n2", "probability"], rows)
            return
        _emit(args, *_metric_row(oscillators.metrics_two_oscillator(spec), k0=args.k0, g=args.g))
    elif args.chain is not None:
        r = oscillators.linear_chain_metrics(args.chain, args.k0)
        cols, rows = _metric_row(r.metrics, n=args.chain, k0=args.k0)
        rows[0].update(trace_k_inverse=r.trace_k_inverse, sum_frequencies=r.sum_frequencies)
        _emit(args, cols + ["trace_k_inverse", "sum_frequencies"], rows)
    else:
        k = _load_matrix(args.matrix)
        _emit(args, *_metric_row(oscillators.metrics_network(k), n=k.shape[0]))


def _cmd_lattice(args):
    m = oscillators.lattice_metrics(args.m_side, args.dim, args.k0)
    n = args.m_side**args.dim
    cols, rows = _metric_row(m, dim=args.dim, m_side=args.m_side, n=n)
    rows[0]["work_per_oscillator"] = m.work / n
    _emit(args, cols + ["work_per_oscillator"], rows)


def _cmd_dynamics(args):
    spec = two_qubit.TwoQubitSpec(args.omega_a, args.omega_b, args.g)
    meter = dynamics.MeterSpec(args.g_m)
    t_m, nu = dynamics.measurement_time(spec, meter)
    if args.trajectory:
        traj = dynamics.evolve_measurement(spec, meter, 2 * t_m, 2 * t_m / (args.trajectory - 1))
        pops = traj.populations
        cols = ["t", "p000", "p001", "p110", "p111", "e_loc", "e_int", "e_meter"]
        rows = [
            dict(zip(cols, [float(t), *(float(pops[i, j]) for j in (0, 1, 6, 7)),
                            float(traj.e_loc[i]), float(traj.e_int[i]), float(traj.e_meter[i])]))
            for i, t in enumerate(traj.times)
        ]
        _emit(args, cols, rows)
        return
    row = {"t_m": t_m, "nu": nu, "first_peak": dynamics.first_peak_time(spec, meter)}
    cols = list(row)
    if args.spectral_density is not None:
        relax = dynamics.RelaxationSpec(args.spectral_density, args.temperature)
        rates = dynamics.relaxation_rates(spec, relax)
        row.update(rates._asdict())
        row["power"] = dynamics.power_estimate(spec, meter, relax)
        cols += list(rates._fields) + ["power"]
    _emit(args, cols, [row])


def _cmd_sweep(args):
    config = load_config(args.config)
    jobs = args.jobs if args.jobs is not None else config.parallelism
    if jobs < 1:
        raise ConfigError("must be >= 1", "jobs")
    result = run_sweep(config, jobs=jobs)
    path = args.output or config.output_path
    fmt = args.format if "format_given" in vars(args) else config.output_format
    params = config_parameters(config)
    if args.seed is not None:
        params["seed"] = args.seed
    if path:
        write_table(path, result.columns, result.rows, fmt, params, result.seconds)
    else:
        sys.stdout.write(render(result.columns, result.rows, fmt))
    if result.n_errors:
        print(f"{result.n_errors} of {len(result.rows)} points failed; see the error column", file=sys.stderr)


def _cmd_preset(args):
    out_dir = args.output or "."
    path = presets.run_preset(args.name, out_dir, args.format)
    print(path)


def _cmd_validate(args):
    report = run_validation("full" if args.full else "quick")
    text = json.dumps(report, indent=1) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


COMMANDS = {
    "two-qubit": _cmd_two_qubit,
    "chain": _cmd_chain,
    "open-chain": _cmd_open_chain,
    "oscillator": _cmd_oscillator,
    "lattice": _cmd_lattice,
    "dynamics": _cmd_dynamics,
    "sweep": _cmd_sweep,
    "preset": _cmd_preset,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if "--format" in argv:
        args.format_given = True
    if args.jobs is not None and args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        code = COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError) as exc:
        # rejected physical parameters are configuration problems
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK if code is None else code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
