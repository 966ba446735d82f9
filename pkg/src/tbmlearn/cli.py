"""Command-line interface: mining, fitting, evaluation, and experiments.

Exit codes: 0 success, 2 usage error, 3 data or resource error, 4 numeric
failure (divergence removed every parameter).  Every stochastic subcommand
takes a seed and produces identical primary output for identical inputs;
measured wall-clock columns are the one exception.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from .baselines import (
    FULL_BM_MAX_VARIABLES,
    FullBMModel,
    RBMConfig,
    RBMModel,
    fit_full_bm,
    fit_rbm_pcd1,
    matched_hidden_units,
)
from .experiments import BiasVarianceConfig, bias_variance_experiment, synth_dataset
from .fitting import FitConfig, fit_tbm
from .metrics import (
    entropy,
    evaluate_gibbs,
    kl_divergence,
    reconstruction_error_proxy,
)
from .mining import DomainSizeError, mine_parameter_domain
from .model import GibbsModel
from .patterns import (
    EmpiricalDistribution,
    FimiFormatError,
    TransactionDataset,
    format_fimi,
    parse_fimi,
)
from . import __version__
from .serialize import dumps_model, load_model

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _read_dataset(args) -> TransactionDataset:
    if args.input == "-":
        text = sys.stdin.read()
    else:
        text = Path(args.input).read_text()
    return parse_fimi(text, empty_as_bottom=args.empty_transactions == "bottom")


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _fit_config(args) -> FitConfig:
    return FitConfig(
        step_size=args.epsilon,
        tol=args.tol,
        max_sweeps=args.max_iters,
        theta_max=args.theta_max,
    )


def _add_input_options(parser) -> None:
    parser.add_argument("--input", required=True, help="FIMI transaction file, or - for stdin")
    parser.add_argument(
        "--empty-transactions",
        choices=("skip", "bottom"),
        default="skip",
        help="treat empty lines as observations of the empty pattern",
    )


def _add_fit_options(parser) -> None:
    parser.add_argument("--epsilon", type=float, default=1.0, help="initial step size")
    parser.add_argument("--tol", type=float, default=1e-6, help="moment-gap tolerance")
    parser.add_argument("--max-iters", type=int, default=10_000, help="sweep budget")
    parser.add_argument(
        "--theta-max", type=float, default=30.0, help="divergence threshold on parameters"
    )


def cmd_mine(args) -> int:
    dataset = _read_dataset(args)
    domain = mine_parameter_domain(
        dataset, args.sigma, args.k, max_domain_size=args.max_domain_size
    )
    header = json.dumps(
        {
            "sigma": args.sigma,
            "k": args.k,
            "n": dataset.n_variables,
            "N": dataset.n_samples,
            "size": len(domain),
        },
        sort_keys=True,
    )
    lines = [header]
    lines.extend(" ".join(str(i) for i in p) for p in sorted(domain.patterns))
    _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_fit_tbm(args) -> int:
    dataset = _read_dataset(args)
    model, report, domain = fit_tbm(dataset, args.sigma, args.k, _fit_config(args))
    meta = {
        "sigma": args.sigma,
        "k": args.k,
        "n_variables": dataset.n_variables,
        "n_samples": dataset.n_samples,
        "seed": args.seed,
        "mined_domain_size": len(domain),
    }
    _write_text(args.out, dumps_model(model, report, meta))
    if report.domain_emptied:
        print("warning: divergence guard removed every parameter", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_fit_bm(args) -> int:
    dataset = _read_dataset(args)
    domain = mine_parameter_domain(dataset, args.sigma, args.k)
    model, report = fit_full_bm(dataset, domain, _fit_config(args))
    meta = {
        "sigma": args.sigma,
        "k": args.k,
        "n_variables": dataset.n_variables,
        "n_samples": dataset.n_samples,
    }
    _write_text(args.out, dumps_model(model, report, meta))
    if report.domain_emptied:
        print("warning: divergence guard removed every parameter", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_fit_rbm(args) -> int:
    dataset = _read_dataset(args)
    if args.hidden is not None:
        n_hidden = args.hidden
    else:
        n_hidden = matched_hidden_units(args.match_params, dataset.n_variables)
    config = RBMConfig(
        learning_rate=args.lr,
        n_updates=args.updates,
        n_chains=args.chains,
        seed=args.seed,
    )
    model = fit_rbm_pcd1(dataset, n_hidden, config)
    meta = {
        "n_variables": dataset.n_variables,
        "n_samples": dataset.n_samples,
        "seed": args.seed,
        "learning_rate": args.lr,
        "n_updates": args.updates,
        "n_chains": args.chains,
    }
    _write_text(args.out, dumps_model(model, None, meta))
    return EXIT_OK


def cmd_eval(args) -> int:
    model, _, _ = load_model(args.model)
    dataset = _read_dataset(args)
    p_hat = EmpiricalDistribution.from_dataset(dataset)
    if isinstance(model, GibbsModel):
        evaluation = evaluate_gibbs(model, dataset)
        kl, loglik = evaluation.kl, evaluation.log_likelihood
        energy_fn = model.energy
    elif isinstance(model, FullBMModel):
        kl = kl_divergence(p_hat, {x: model.prob(x) for x in p_hat.probs})
        loglik = sum(m * model.log_prob(t) for t, m in dataset.entries.items())
        energy_fn = model.energy
    elif isinstance(model, RBMModel):
        kl = loglik = None
        energy_fn = model.free_energy
    else:
        raise ValueError("unsupported model kind")
    result = {
        "kl": kl,
        "loglik": loglik,
        "entropy": entropy(p_hat),
        "proxy_error": reconstruction_error_proxy(energy_fn, dataset),
    }
    _write_text(args.out, json.dumps(result, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_synth(args) -> int:
    dataset, truth = synth_dataset(
        args.n_vars, args.support_size, args.n, seed=args.seed
    )
    _write_text(args.out, format_fimi(dataset))
    truth_obj = {
        "schema": 1,
        "n_variables": args.n_vars,
        "support": [list(p) for p in truth.support],
        "probs": [truth.probs[p] for p in truth.support],
        "seed": args.seed,
    }
    _write_text(args.truth_out, json.dumps(truth_obj, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_biasvar(args) -> int:
    if (args.min_domain is None) != (args.max_domain is None):
        raise ValueError("--min-domain and --max-domain must be given together")
    cfg = BiasVarianceConfig(
        space_size=args.space_size,
        n_vars=args.n_vars,
        k=args.k,
        n_samples=args.n,
        trials=args.trials,
        sigma=args.sigma,
        domain_size_range=(
            (args.min_domain, args.max_domain)
            if args.min_domain is not None
            else None
        ),
        seed=args.seed,
    )
    report = bias_variance_experiment(cfg)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["trial", "kl_true_to_fit", "kl_proj_to_fit", "bound"])
    for i in range(report.trials):
        writer.writerow(
            [
                i,
                repr(report.kl_true_to_fit[i]),
                repr(report.kl_proj_to_fit[i]),
                repr(report.lower_bound),
            ]
        )
    _write_text(args.out, buffer.getvalue())
    summary = {
        "bias": report.bias,
        "variance_mean": report.variance_mean,
        "variance_std": report.variance_std,
        "variance_stderr": report.variance_stderr,
        "lower_bound": report.lower_bound,
        "trials": report.trials,
        "N": report.n_samples,
        "sample_space_size": report.sample_space_size,
        "domain_size": report.domain_size,
        "sigma": report.sigma,
        "flagged_trials": report.n_flagged_trials,
    }
    stream = sys.stderr if args.out == "-" else sys.stdout
    print(json.dumps(summary, indent=2, sort_keys=True), file=stream)
    return EXIT_OK


def cmd_compare(args) -> int:
    dataset = _read_dataset(args)
    rows = []

    start = time.perf_counter()
    tbm_model, tbm_report, domain = fit_tbm(
        dataset, args.sigma, args.k, _fit_config(args)
    )
    tbm_time = time.perf_counter() - start
    tbm_error = reconstruction_error_proxy(tbm_model.energy, dataset)
    rows.append(
        {
            "method": "tbm",
            "param_count": len(domain),
            "proxy_error": tbm_error,
            "wall_time_sec": tbm_time,
            "status": "ok",
        }
    )

    if dataset.n_variables <= FULL_BM_MAX_VARIABLES:
        start = time.perf_counter()
        bm_model, _ = fit_full_bm(dataset, domain, _fit_config(args))
        bm_time = time.perf_counter() - start
        rows.append(
            {
                "method": "bm",
                "param_count": len(domain),
                "proxy_error": reconstruction_error_proxy(bm_model.energy, dataset),
                "wall_time_sec": bm_time,
                "status": "ok",
            }
        )
    else:
        rows.append(
            {
                "method": "bm",
                "param_count": len(domain),
                "proxy_error": None,
                "wall_time_sec": None,
                "status": f"infeasible: {dataset.n_variables} variables need 2^n enumeration",
            }
        )

    n_hidden = matched_hidden_units(len(domain), dataset.n_variables)
    rbm_config = RBMConfig(
        learning_rate=args.rbm_lr,
        n_updates=args.rbm_updates,
        n_chains=args.rbm_chains,
        seed=args.seed,
    )
    start = time.perf_counter()
    rbm_model = fit_rbm_pcd1(dataset, n_hidden, rbm_config)
    rbm_time = time.perf_counter() - start
    rows.append(
        {
            "method": "rbm",
            "param_count": rbm_model.param_count,
            "proxy_error": reconstruction_error_proxy(rbm_model.free_energy, dataset),
            "wall_time_sec": rbm_time,
            "status": "ok",
        }
    )

    if args.format == "json":
        _write_text(args.out, json.dumps(rows, indent=2, sort_keys=True) + "\n")
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["method", "param_count", "proxy_error", "wall_time_sec", "status"])
        for row in rows:
            writer.writerow(
                [
                    row["method"],
                    row["param_count"],
                    "" if row["proxy_error"] is None else repr(row["proxy_error"]),
                    "" if row["wall_time_sec"] is None else f"{row['wall_time_sec']:.3f}",
                    row["status"],
                ]
            )
        _write_text(args.out, buffer.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tbmlearn",
        description="Transductive Boltzmann machines: exact Gibbs-distribution "
        "learning on data-derived sample spaces.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mine", help="enumerate the parameter domain")
    _add_input_options(p)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--max-domain-size", type=int, default=10_000_000)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("fit-tbm", help="mine a domain and fit the transductive model")
    _add_input_options(p)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_fit_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fit_tbm)

    p = sub.add_parser("fit-bm", help="fit the exact fully visible Boltzmann machine")
    _add_input_options(p)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_fit_options(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fit_bm)

    p = sub.add_parser("fit-rbm", help="train an RBM with persistent CD-1")
    _add_input_options(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--hidden", type=int, help="number of hidden units")
    group.add_argument(
        "--match-params",
        type=int,
        help="choose hidden units to match this parameter budget",
    )
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--updates", type=int, default=10_000)
    p.add_argument("--chains", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_fit_rbm)

    p = sub.add_parser("eval", help="evaluate a saved model against a dataset")
    p.add_argument("--model", required=True)
    _add_input_options(p)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic dataset plus ground truth")
    p.add_argument("--n-vars", type=int, required=True)
    p.add_argument("--support-size", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="number of samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="FIMI output path")
    p.add_argument("--truth-out", required=True, help="truth JSON output path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("biasvar", help="run the bias-variance estimation harness")
    p.add_argument("--space-size", type=int, required=True)
    p.add_argument("--n-vars", type=int, required=True)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="sample size per trial")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--min-domain", type=int, default=None)
    p.add_argument("--max-domain", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="per-trial CSV output")
    p.set_defaults(func=cmd_biasvar)

    p = sub.add_parser("compare", help="fit TBM, BM, and RBM on one dataset")
    _add_input_options(p)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_fit_options(p)
    p.add_argument("--rbm-lr", type=float, default=0.01)
    p.add_argument("--rbm-updates", type=int, default=10_000)
    p.add_argument("--rbm-chains", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (FimiFormatError, DomainSizeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
