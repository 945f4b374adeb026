"""Command-line front end.

Commands
--------
estimate      fit the component of interest from a delimited data file
simulate      Monte Carlo oracle-ratio tables over a (K, C) grid
compare-zero  risk comparison against the dimension-penalized baseline
figure        raw material (signal, data, projection, fit) for one draw

Every option can also be given in a config file of ``key=value`` lines
(``#`` starts a comment); explicit command-line flags win over the file.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical or
assumption failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .estimator import AdditiveComponentRegressor
from .exceptions import ConfigurationError, DesignDegeneracyError
from .simulation import (
    DEFAULT_C_GRID,
    ExperimentConfig,
    emit_figure_data,
    run_baseline_comparison,
    run_ratio_experiment,
)


class DataError(Exception):
    """Problem with an input data file."""


def read_config(path: str) -> dict:
    """Flat key=value file with # comments."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DataError(f"{path}: line {lineno}: expected key=value")
                key, value = line.split("=", 1)
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise DataError(f"cannot read config file: {exc}") from exc
    return values


def _merged(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    merged = dict(defaults)
    config = read_config(args.config) if getattr(args, "config", None) else {}
    for key, default in defaults.items():
        if key in config:
            merged[key] = _coerce(config[key], default)
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def _coerce(text: str, like):
    if isinstance(like, bool):
        return text.lower() in ("1", "true", "yes")
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    return text


def _parse_grid(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise DataError(f"bad numeric list {text!r}") from None


def _parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip() != "")
    except ValueError:
        raise DataError(f"bad integer list {text!r}") from None


def read_data_file(path: str):
    """Read a delimited file with header columns x, y1..yK, z.

    The delimiter is a comma when the header contains one, otherwise any
    whitespace.  Returns ``(X, z)`` with X holding x then y1..yK.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read data file: {exc}") from exc
    if not lines:
        raise DataError(f"{path}: empty file")
    sep = "," if "," in lines[0] else None
    header = [name.strip() for name in lines[0].split(sep)]
    if "x" not in header:
        raise DataError(f"{path}: missing column 'x'")
    if "z" not in header:
        raise DataError(f"{path}: missing column 'z'")
    n_nuisance = sum(1 for name in header if name.startswith("y"))
    wanted = ["x"] + [f"y{j}" for j in range(1, n_nuisance + 1)] + ["z"]
    for name in wanted:
        if name not in header:
            raise DataError(f"{path}: missing column '{name}'")
    positions = [header.index(name) for name in wanted]

    rows = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(sep)
        if len(parts) != len(header):
            raise DataError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(parts)}")
        try:
            rows.append([float(parts[p]) for p in positions])
        except ValueError:
            raise DataError(f"{path}: line {lineno}: non-numeric value") from None
    if not rows:
        raise DataError(f"{path}: no data rows")
    table = np.array(rows)
    if not np.all(np.isfinite(table)):
        raise DataError(f"{path}: non-finite values in data")
    for idx, name in enumerate(wanted[:-1]):
        if np.any(table[:, idx] < 0) or np.any(table[:, idx] > 1):
            raise DataError(f"{path}: column '{name}' has values outside [0, 1]")
    return table[:, :-1], table[:, -1]


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_estimate(args: argparse.Namespace) -> int:
    opts = _merged(
        args,
        {
            "collection": "nested",
            "C": None,
            "sigma2": 1.0,
            "variance": "known",
            "out": ".",
        },
    )
    X, z = read_data_file(args.data)
    sigma2 = None if opts["variance"] == "estimated" else float(opts["sigma2"])
    c_value = float(opts["C"]) if opts["C"] is not None else None
    model = AdditiveComponentRegressor(collection=opts["collection"], C=c_value, sigma2=sigma2)
    try:
        model.fit(X, z)
    except ValueError as exc:
        raise DataError(str(exc)) from exc

    out = opts["out"]
    os.makedirs(out, exist_ok=True)
    fit_lines = ["x\ts_tilde"]
    for xi, si in zip(X[:, 0], model.fitted_values_):
        fit_lines.append(f"{xi:.8g}\t{si:.8g}")
    _write(os.path.join(out, "component_fit.tsv"), "\n".join(fit_lines) + "\n")

    coef_lines = ["level\tshift\tcoef_basis\tcoef_haar"]
    haar = dict(zip(model.labels_, model.coef_))
    for lab in model.selected_labels_:
        coef_lines.append(
            f"{lab[0]}\t{lab[1]}\t{model.basis_coef_[lab]:.12g}\t{haar[lab]:.12g}"
        )
    _write(os.path.join(out, "coefficients.tsv"), "\n".join(coef_lines) + "\n")

    diag = {
        "n": X.shape[0],
        "K": X.shape[1] - 1,
        "collection": opts["collection"],
        "C": model._resolved_C(),
        "dim_selected": len(model.selected_labels_),
        "rho": model.rho_,
        "rho2": model.rho2_,
        "total_trace": model.total_trace_,
        "sigma2_used": model.sigma2_used_,
        "criterion": model.criterion_,
    }
    diag_lines = ["key\tvalue"]
    for key, value in diag.items():
        diag_lines.append(f"{key}\t{value:.8g}" if isinstance(value, float) else f"{key}\t{value}")
    _write(os.path.join(out, "diagnostics.tsv"), "\n".join(diag_lines) + "\n")
    return 0


_SIM_DEFAULTS = {
    "n": 512,
    "K": "1,2,3,4,5,6",
    "s": "f1",
    "t_ids": None,
    "sigma2": 1.0,
    "variance": "known",
    "collection": "nested",
    "C_grid": ",".join(str(c) for c in DEFAULT_C_GRID),
    "reps": 500,
    "seed": 1,
    "noise": "gaussian",
    "threads": None,
    "out": ".",
}


def _experiment_config(opts: dict, K: int, reps: int) -> ExperimentConfig:
    t_ids = None
    if opts.get("t_ids"):
        t_ids = tuple(t.strip() for t in str(opts["t_ids"]).split(","))
    return ExperimentConfig(
        n=int(opts["n"]),
        K=K,
        s_id=opts["s"],
        t_ids=t_ids,
        sigma2=float(opts["sigma2"]),
        variance=opts["variance"],
        collection=opts["collection"],
        C_grid=_parse_grid(str(opts["C_grid"])),
        replications=reps,
        seed=int(opts["seed"]),
        noise=opts["noise"],
    )


def _run_table(args: argparse.Namespace, baseline: bool) -> int:
    defaults = dict(_SIM_DEFAULTS)
    if baseline:
        defaults["K"] = "1,2,3,4,5,6,7,8,9"
    opts = _merged(args, defaults)
    if baseline:
        opts["collection"] = "nested"
        opts["variance"] = "known"
    threads = int(opts["threads"]) if opts["threads"] is not None else None
    report = None
    for K in _parse_int_list(str(opts["K"])):
        cfg = _experiment_config(opts, K, int(opts["reps"]))
        if baseline:
            part = run_baseline_comparison(cfg, threads=threads)
        else:
            part = run_ratio_experiment(cfg, threads=threads)
        if report is None:
            report = part
        else:
            report.extend(part)
    os.makedirs(opts["out"], exist_ok=True)
    if baseline:
        name = f"compare_zero_{opts['s']}.tsv"
    else:
        name = f"ratio_{opts['s']}_{opts['collection']}_{opts['variance']}.tsv"
    _write(os.path.join(opts["out"], name), report.to_table())
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    return _run_table(args, baseline=False)


def cmd_compare_zero(args: argparse.Namespace) -> int:
    return _run_table(args, baseline=True)


def cmd_figure(args: argparse.Namespace) -> int:
    defaults = dict(_SIM_DEFAULTS)
    defaults.update({"K": "6", "C": None, "out": "figure.tsv"})
    opts = _merged(args, defaults)
    k_list = _parse_int_list(str(opts["K"]))
    cfg = _experiment_config(opts, k_list[0], 1)
    c_value = float(opts["C"]) if opts["C"] is not None else None
    out_dir = os.path.dirname(opts["out"])
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    emit_figure_data(cfg, opts["out"], C=c_value)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--n", type=int, help="design size")
    parser.add_argument("--K", help="number of nuisance covariates (comma list for tables)")
    parser.add_argument("--s", help="target component id (f1..f6)")
    parser.add_argument("--t-ids", dest="t_ids", help="comma list of nuisance component ids")
    parser.add_argument("--sigma2", type=float, help="noise variance")
    parser.add_argument(
        "--variance", choices=["known", "estimated"], help="use the known variance or estimate it"
    )
    parser.add_argument("--collection", choices=["nested", "complete"], help="model family")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--noise", help="noise model: gaussian or t:<df>")
    parser.add_argument("--out", help="output directory (or file for figure)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="addcomp",
        description="Estimate one component of an additive regression model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="fit the component from a data file")
    p_est.add_argument("--data", required=True, help="delimited file with columns x, y1..yK, z")
    p_est.add_argument("--config", help="key=value config file; flags override it")
    p_est.add_argument("--collection", choices=["nested", "complete"])
    p_est.add_argument("--C", type=float, help="penalty constant (default 1.5 nested, 4.5 complete)")
    p_est.add_argument("--sigma2", type=float, help="known noise variance")
    p_est.add_argument("--variance", choices=["known", "estimated"])
    p_est.add_argument("--out", help="output directory")
    p_est.set_defaults(func=cmd_estimate)

    p_sim = sub.add_parser("simulate", help="oracle-ratio tables on a (K, C) grid")
    _add_common(p_sim)
    p_sim.add_argument("--C-grid", dest="C_grid", help="comma list of penalty constants")
    p_sim.add_argument("--reps", type=int, help="replications per cell")
    p_sim.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare-zero", help="compare against the zero-nuisance baseline")
    _add_common(p_cmp)
    p_cmp.add_argument("--C-grid", dest="C_grid", help="comma list of penalty constants")
    p_cmp.add_argument("--reps", type=int, help="replications per cell")
    p_cmp.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p_cmp.set_defaults(func=cmd_compare_zero)

    p_fig = sub.add_parser("figure", help="signal/data/projection table for one draw")
    _add_common(p_fig)
    p_fig.add_argument("--C", type=float, help="penalty constant for the fitted curve")
    p_fig.set_defaults(func=cmd_figure)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, DesignDegeneracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
