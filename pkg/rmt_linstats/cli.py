import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from rmt_linstats import __version__
from rmt_linstats.asympt import expansion
from rmt_linstats.config import ensemble_specs, resolve_config, statistic
from rmt_linstats.ensembles.determinant import finite_moments, mgf, trace_log_mgf
from rmt_linstats.ensembles.psi import k22_kernel
from rmt_linstats.errors import DomainError, NumericalError
from rmt_linstats.mcsample import linstat_moments, mgf_estimate, sample
from rmt_linstats.operator.statistic import FAMILIES, ScaledStatistic
from rmt_linstats.orthopoly import cd_kernel, limit_kernel, scaled_cd_kernel
from rmt_linstats.util import frame_to_csv, get_thread_count, to_json
from rmt_linstats.verify.suites import SUITE_NAMES, run_suite

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, dest='config_path',
                        help='Path to a flat "key = value" config file; command line flags take precedence.')
    common.add_argument('--family', choices=['gaussian', 'laguerre'], default=None,
                        help='Ensemble family (default gaussian).')
    common.add_argument('--beta', type=int, choices=[1, 2, 4], default=None,
                        help='Dyson index (default 2).')
    common.add_argument('-N', dest='N', type=int, nargs='+', default=None,
                        help='One or more matrix sizes (default 4).')
    common.add_argument('--alpha', type=float, default=None,
                        help='Laguerre parameter (default 1.0).')
    common.add_argument('--stat', choices=list(FAMILIES), default=None,
                        help='Statistic family (default gaussian).')
    common.add_argument('--amplitude', type=float, default=None)
    common.add_argument('--center', type=float, default=None)
    common.add_argument('--scale', type=float, default=None)
    common.add_argument('--lambda', dest='lambdas', type=float, nargs='+', default=None,
                        help='One or more values of lambda (default 0.3).')
    common.add_argument('--grid-nodes', dest='grid_nodes', type=int, default=None,
                        help='Minimum quadrature nodes per panel.')
    common.add_argument('--method', choices=['auto', 'nystrom', 'projected'], default=None,
                        help='Determinant discretization (default auto).')
    common.add_argument('--seed', type=int, default=None)
    common.add_argument('--samples', type=int, default=None,
                        help='Monte Carlo sample count (default 1000).')
    common.add_argument('--mc-method', dest='mc_method', choices=['tridiagonal', 'mcmc'], default=None)
    common.add_argument('--with-mc', dest='with_mc', action='store_const', const=True, default=None,
                        help='Add Monte Carlo estimates to mgf and meanvar reports.')
    common.add_argument('--format', choices=['json', 'csv'], default=None)
    common.add_argument('--out', default=None, help='Write the report here instead of stdout.')
    return common


def dispatch(args):
    parser = argparse.ArgumentParser(
        description='rmt_linstats command-line interface')

    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True
    common = _common_parser()

    mgf_parser = subparsers.add_parser(
        'mgf', parents=[common],
        description='Moment generating function of a linear statistic: determinant, trace-log and Monte Carlo.')
    mgf_parser.set_defaults(func=cmd_mgf)

    meanvar_parser = subparsers.add_parser(
        'meanvar', parents=[common],
        description='Asymptotic mean and variance with their correction terms, against finite-N values.')
    meanvar_parser.set_defaults(func=cmd_meanvar)

    kernel_parser = subparsers.add_parser(
        'kernel', parents=[common], description='Dump kernel values on a grid of points.')
    kernel_parser.add_argument('--kernel', choices=['cd', 'k22', 'limit'], default=None,
                               help='Christoffel-Darboux kernel, the 2,2 entry (beta = 1, 4) or the scaling limit.')
    kernel_parser.add_argument('--points', type=float, nargs='+', default=None)
    kernel_parser.set_defaults(func=cmd_kernel)

    sample_parser = subparsers.add_parser(
        'sample', parents=[common], description='Eigenvalue samples; CSV gives one row per sample.')
    sample_parser.set_defaults(func=cmd_sample)

    verify_parser = subparsers.add_parser(
        'verify', parents=[common], description='Run the numerical verification suites.')
    verify_parser.add_argument('--suite', choices=list(SUITE_NAMES), default=None)
    verify_parser.add_argument('--only-return-failures', dest='only_return_failures', action='store_true',
                               default=False)
    verify_parser.set_defaults(func=cmd_verify)

    version_parser = subparsers.add_parser('version')
    version_parser.set_defaults(func=version)

    parsed_args = parser.parse_args(args)

    try:
        return parsed_args.func(parsed_args)
    except DomainError as err:
        logger.error(err.message)
        return EXIT_INVALID
    except NumericalError as err:
        logger.error(err.message)
        return EXIT_NUMERICAL


def _resolve(parsed_args):
    values = dict(vars(parsed_args))
    config_path = values.pop('config_path', None)
    for key in ('command', 'func', 'only_return_failures'):
        values.pop(key, None)
    return resolve_config(values, config_path)


def _pmap(func, items):
    """Map over items with the worker pool; results keep the order of items."""
    items = list(items)
    workers = min(get_thread_count(), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def _emit(config, command, rows, extra=None):
    """Write the report: JSON with the config and version embedded, or CSV with both in comment lines.

    The embedded config leaves out ``out`` so a report is the same on stdout and in a file.
    """
    shown = dict((key, value) for key, value in config.items() if key != 'out')
    if config.format == 'csv':
        header = "# rmt_linstats %s %s\n# config: %s\n" % (__version__, command,
                                                          json.dumps(shown, sort_keys=True))
        text = header + frame_to_csv(pd.DataFrame(rows))
    else:
        report = {"command": command, "version": __version__, "config": shown, "rows": rows}
        if extra:
            report.update(extra)
        text = to_json(report) + "\n"
    if config.out is None:
        sys.stdout.write(text)
    else:
        with open(config.out, 'w') as f:
            f.write(text)
        logger.info("wrote %s report to %s" % (command, config.out))


def cmd_mgf(parsed_args):
    """
    G_N(f) for every (N, lambda), with f = exp(-lambda F(s(x))) - 1 and s the ensemble's scaling rule.

    Each row holds the determinant value, the two-term trace-log value exp(-lambda mean + lambda^2 var / 2)
    built from the finite-N cumulants, their difference, and with --with-mc the Monte Carlo estimate.
    """
    config = _resolve(parsed_args)
    specs = ensemble_specs(config)
    stat = statistic(config)

    def prepare(spec):
        scaled = ScaledStatistic(stat, spec.scaling)
        moments = finite_moments(spec, scaled, method=config.method, nodes=config.grid_nodes)
        batch = sample(spec, config.samples, config.seed, config.mc_method) if config.with_mc else None
        return scaled, moments, batch

    prepared = dict(zip(specs, _pmap(prepare, specs)))

    def evaluate(job):
        spec, lam = job
        scaled, moments, batch = prepared[spec]
        value = mgf(spec, scaled, lam, method=config.method, nodes=config.grid_nodes)
        trace_log = trace_log_mgf(lam, moments.mean, moments.variance)
        row = {"ensemble": spec.name, "N": spec.N, "lambda": lam, "G_determinant": value,
               "G_trace_log": trace_log, "trace_log_difference": value - trace_log}
        if batch is not None:
            estimate = mgf_estimate(batch, stat, lam)
            row.update({"G_monte_carlo": estimate.value, "G_monte_carlo_stderr": estimate.stderr,
                        "monte_carlo_difference": value - estimate.value})
        return row

    jobs = sorted(((spec, lam) for spec in specs for lam in config.lambdas), key=lambda job: (job[0].N, job[1]))
    _emit(config, "mgf", _pmap(evaluate, jobs))
    return EXIT_SUCCESS


def cmd_meanvar(parsed_args):
    """
    Per N: the asymptotic mean and variance with their term breakdown, the finite-N cumulants of the
    determinant and, with --with-mc, Monte Carlo values with standard errors.
    """
    config = _resolve(parsed_args)
    stat = statistic(config)

    def evaluate(spec):
        asymptotic = expansion(spec, stat)
        finite = finite_moments(spec, ScaledStatistic(stat, spec.scaling), method=config.method,
                                nodes=config.grid_nodes)
        row = {"ensemble": spec.name, "N": spec.N,
               "asymptotic_mean": asymptotic.mean, "asymptotic_variance": asymptotic.variance,
               "limit_variance": asymptotic.limit_variance,
               "finite_mean": finite.mean, "finite_variance": finite.variance,
               "finite_mean_error": finite.mean_error, "finite_variance_error": finite.variance_error}
        if config.format == 'json':
            row["terms"] = asymptotic.terms
        if config.with_mc:
            mc = linstat_moments(sample(spec, config.samples, config.seed, config.mc_method), stat)
            row.update({"mc_mean": mc.mean, "mc_variance": mc.variance, "mc_mean_stderr": mc.mean_stderr,
                        "mc_variance_stderr": mc.variance_stderr})
        return row

    specs = sorted(ensemble_specs(config), key=lambda spec: spec.N)
    _emit(config, "meanvar", _pmap(evaluate, specs))
    return EXIT_SUCCESS


def _default_points(spec):
    if spec.family == "gaussian":
        return np.linspace(-3.0, 3.0, 13)
    return np.linspace(0.2, 4.0, 13)


def cmd_kernel(parsed_args):
    """
    Kernel values K(x_i, x_j) on the points; the diagonal rows of the beta = 2 kernels are the one-point
    densities. For --kernel limit the rows hold the scaled finite-N kernel next to its limit.
    """
    config = _resolve(parsed_args)
    rows = []
    for spec in sorted(ensemble_specs(config), key=lambda spec: spec.N):
        points = np.asarray(config.points if config.points is not None else _default_points(spec), dtype=float)
        x, y = np.meshgrid(points, points, indexing="ij")
        if config.kernel == "limit":
            values = limit_kernel(spec, x, y)
            scaled = scaled_cd_kernel(spec, x, y)
        else:
            kernel = cd_kernel(spec) if config.kernel == "cd" else k22_kernel(spec)
            values = kernel.matrix(points)
            scaled = None
        for i in range(points.size):
            for j in range(points.size):
                row = {"ensemble": spec.name, "N": spec.N, "kernel": config.kernel,
                       "x": points[i], "y": points[j], "value": values[i, j]}
                if scaled is not None:
                    row["scaled_finite_N"] = scaled[i, j]
                rows.append(row)
    _emit(config, "kernel", rows)
    return EXIT_SUCCESS


def cmd_sample(parsed_args):
    """
    Monte Carlo eigenvalue batches. CSV has one row per sample (N, sample, x1 .. xN); JSON adds the batch
    metadata and sampler diagnostics.
    """
    config = _resolve(parsed_args)
    specs = sorted(ensemble_specs(config), key=lambda spec: spec.N)
    rows, batches = [], []
    for spec in specs:
        batch = sample(spec, config.samples, config.seed, config.mc_method)
        frame = batch.to_frame()
        frame.insert(0, "sample", np.arange(batch.count))
        frame.insert(0, "N", spec.N)
        frame.insert(0, "ensemble", spec.name)
        rows.extend(frame.to_dict(orient="records"))
        batches.append(batch.to_dict())
    _emit(config, "sample", rows, extra={"batches": batches})
    return EXIT_SUCCESS


def cmd_verify(parsed_args):
    """
    Run the verification suites and report every check with its measured error and tolerance.

    :return: 0 when every check passed, 1 otherwise
    """
    config = _resolve(parsed_args)
    report = run_suite(config.suite, only_return_failures=parsed_args.only_return_failures)
    rows = [{"check": result["check"], "kwargs": json.dumps(result["kwargs"], sort_keys=True),
             "success": result["success"], "measured": result.get("measured"),
             "tolerance": result.get("tolerance")} for result in report["results"]]
    if config.format == 'csv':
        _emit(config, "verify", rows)
    else:
        _emit(config, "verify", report["results"],
              extra={"success": report["success"], "statistics": report["statistics"], "suite": report["suite"]})
    if not report["success"]:
        logger.warning("%d of %d checks failed" % (report["statistics"]["unsuccessful_checks"],
                                                   report["statistics"]["evaluated_checks"]))
        return EXIT_VERIFY_FAILED
    return EXIT_SUCCESS


def version(parsed_args):
    """
    Print the currently-running version of rmt_linstats
    """
    print(__version__)
    return EXIT_SUCCESS


def main():
    handler = logging.StreamHandler()
    formatter = logging.Formatter('%(asctime)s %(name)-12s %(levelname)-8s %(message)s')
    handler.setFormatter(formatter)
    package_logger = logging.getLogger("rmt_linstats")
    package_logger.addHandler(handler)
    package_logger.setLevel(logging.INFO)
    return_value = dispatch(sys.argv[1:])
    sys.exit(return_value)


if __name__ == '__main__':
    main()
