"""Command-line interface.

Five subcommands: fit, predict, tune, simulate, bench. Options resolve in
three layers: command line first, then the INI file named by --config (a
[<command>] section overrides [common]), then built-in defaults. Artifacts
embed the seed, a hash of the resolved options that affect content, and the
package version. Exit codes: 0 success, 1 usage or data errors, 2 numeric
failures.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bench import ROW_FIELDS, SUMMARY_FIELDS, build_tasks, format_summary_table, \
    round_sig, run_bench, summarize
from .data import build_dataset, read_csv, split_label
from .errors import DataError, NumericError, S2netError
from .model import Hyperparams, default_predict_kind, fit, model_from_dict, \
    model_to_dict, predict
from .search import random_search, summary_dict, trial_rows
from .simulate import ExtrapSpec, TwoGroupSpec, simulate_extrapolation, \
    simulate_two_group
from .solver import FistaConfig
from .tableio import make_meta, read_json, write_csv, write_json


@dataclass(frozen=True)
class Opt:
    """One CLI option: how to parse it and its place in config resolution."""

    name: str
    type: object = str
    default: object = None
    required: bool = False
    flag: bool = False
    choices: tuple | None = None
    help: str = ""
    hashed: bool = True

    @property
    def dest(self):
        return self.name.lstrip("-").replace("-", "_")


def _int_list(text):
    return tuple(int(v) for v in str(text).split(","))


def _str_list(text):
    return tuple(v.strip() for v in str(text).split(",") if v.strip())


_COMMON = [
    Opt("--config", help="INI file with option defaults", hashed=False),
    Opt("--out", help="output file or directory", hashed=False),
]

_FISTA = [
    Opt("--max-iter", type=int, default=5000, help="solver iteration budget"),
    Opt("--tol", type=float, default=1e-7, help="solver stopping tolerance"),
]

_DATA_IN = [
    Opt("--labeled", required=True, help="labeled CSV (features + label column)"),
    Opt("--label-col", required=True, help="name of the label column"),
    Opt("--unlabeled", help="unlabeled CSV (features only)"),
    Opt("--response", default="linear", choices=("linear", "logistic")),
    Opt("--no-scale", flag=True, default=False,
        help="skip scaling columns by the labeled standard deviation"),
    Opt("--projection", default="auto", choices=("auto", "always", "never"),
        help="shift projection of the unlabeled rows"),
]

OPTIONS = {
    "fit": _DATA_IN + [
        Opt("--lambda1", type=float, default=0.0),
        Opt("--lambda2", type=float, default=0.0),
        Opt("--gamma1", type=float, default=0.0),
        Opt("--gamma2", type=float, default=0.0),
        Opt("--gamma3", type=float, default=0.0),
    ] + _FISTA + _COMMON,
    "predict": [
        Opt("--model", required=True, help="model JSON written by fit/tune"),
        Opt("--data", required=True, help="CSV of rows to predict"),
        Opt("--type", choices=("link", "probability", "class"),
            help="prediction scale (default: link for linear, probability "
                 "for logistic)"),
    ] + _COMMON,
    "tune": _DATA_IN + [
        Opt("--valid", required=True,
            help="validation CSV (features + label column)"),
        Opt("--iterations", type=int, default=1000,
            help="random search trials"),
        Opt("--seed", type=int, default=0),
        Opt("--metric", choices=("mse", "deviance", "auc", "accuracy"),
            help="validation metric (default: mse linear, auc logistic)"),
    ] + _FISTA + _COMMON,
    "simulate": [
        Opt("--design", required=True, choices=("two-group", "extrapolation")),
        Opt("--response", default="linear", choices=("linear", "logistic")),
        Opt("--scenario", default="same", choices=("same", "lucky", "unlucky")),
        Opt("--p", type=int, help="features (default: design-specific)"),
        Opt("--n-source", type=int, default=50),
        Opt("--n-target", type=int, default=50),
        Opt("--delta", type=float,
            help="target shift, extrapolation only (default 1 linear, "
                 "0.1 logistic)"),
        Opt("--seed", type=int, default=0),
    ] + _COMMON,
    "bench": [
        Opt("--design", required=True, choices=("two-group", "extrapolation")),
        Opt("--response", default="linear", choices=("linear", "logistic")),
        Opt("--scenario", type=_str_list,
            help="comma list of extrapolation scenarios (default all three)"),
        Opt("--p", type=_int_list, help="comma list of feature counts"),
        Opt("--n-source", type=int, default=50),
        Opt("--n-target", type=_int_list, default=(50,),
            help="comma list of unlabeled target sizes"),
        Opt("--delta", type=float),
        Opt("--reps", type=int, default=20),
        Opt("--iterations", type=int, default=200,
            help="random search trials per method"),
        Opt("--seed", type=int, default=0),
        Opt("--methods", type=_str_list, default=("baseline", "s2net")),
        Opt("--projection", default="auto",
            choices=("auto", "always", "never")),
        Opt("--jobs", type=int, default=1, hashed=False,
            help="worker processes (results are identical for any value)"),
    ] + _FISTA + _COMMON,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise DataError(message)


def build_parser():
    parser = _Parser(prog="s2net", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    for command, opts in OPTIONS.items():
        p = sub.add_parser(command, help=f"{command} subcommand")
        for opt in opts:
            if opt.flag:
                p.add_argument(opt.name, dest=opt.dest, action="store_const",
                               const=True, default=None, help=opt.help)
            else:
                kwargs = {"dest": opt.dest, "default": None, "help": opt.help}
                if opt.type is not str:
                    kwargs["type"] = opt.type
                if opt.choices:
                    kwargs["choices"] = opt.choices
                p.add_argument(opt.name, **kwargs)
    return parser


def _config_lookup(cfg, command, opt):
    # accept both the flag spelling (label-col) and the dest one (label_col)
    keys = (opt.name.lstrip("-"), opt.dest)
    for section in (command, "common"):
        for key in keys:
            if cfg.has_option(section, key):
                if opt.flag:
                    return cfg.getboolean(section, key)
                raw = cfg.get(section, key)
                value = raw if opt.type is str else opt.type(raw)
                if opt.choices and value not in opt.choices:
                    raise DataError(
                        f"config {key} = {value!r} not in {opt.choices}"
                    )
                return value
    return None


def resolve_options(args):
    """Merge CLI values, config file values, and defaults; returns a dict."""
    command = args.command
    cfg = configparser.ConfigParser()
    if args.config:
        if not cfg.read(args.config):
            raise DataError(f"cannot read config file {args.config}")
    resolved = {}
    for opt in OPTIONS[command]:
        value = getattr(args, opt.dest)
        if value is None and args.config:
            value = _config_lookup(cfg, command, opt)
        if value is None:
            value = opt.default
        if value is None and opt.required:
            raise DataError(f"{command}: missing required option {opt.name}")
        resolved[opt.dest] = value
    return resolved


def _hashable_config(command, resolved):
    cfg = {"command": command}
    for opt in OPTIONS[command]:
        if opt.hashed:
            v = resolved[opt.dest]
            cfg[opt.dest] = list(v) if isinstance(v, tuple) else v
    return cfg


def _load_training(o):
    labeled = read_csv(o["labeled"])
    y, features = split_label(labeled, o["label_col"])
    unlabeled = read_csv(o["unlabeled"]) if o.get("unlabeled") else None
    return build_dataset(features, y, unlabeled, response=o["response"],
                         scale=not o["no_scale"])


def _fista_config(o):
    return FistaConfig(max_iter=o["max_iter"], tol=o["tol"])


def _print_model(model):
    rep = model.report
    print(f"family: {model.family}")
    if model.family == "linear":
        print(f"intercept: {model.intercept!r}")
    names = model.feature_names
    nonzero = int(np.sum(model.beta != 0.0))
    print(f"coefficients ({nonzero} nonzero of {len(names)}):")
    show_all = len(names) <= 25
    for name, value in zip(names, model.beta):
        if show_all or value != 0.0:
            print(f"  {name}\t{float(value)!r}")
    print(f"objective: {rep.final_objective!r}  iterations: {rep.iterations}  "
          f"converged: {rep.converged}")


def cmd_fit(o):
    ds = _load_training(o)
    hyper = Hyperparams(o["lambda1"], o["lambda2"], o["gamma1"],
                        o["gamma2"], o["gamma3"])
    model = fit(ds, hyper, config=_fista_config(o), projection=o["projection"])
    _print_model(model)
    meta = make_meta(0, _hashable_config("fit", o))
    out = o["out"] or "model.json"
    write_json(out, model_to_dict(model), meta)
    print(f"model written to {out}")
    return 0


def cmd_predict(o):
    model = model_from_dict(read_json(o["model"]))
    hints = {e.name: e.kind for e in model.preprocess.encodings}
    table = read_csv(o["data"], hints=hints)
    kind = o["type"] or default_predict_kind(model.family)
    values = predict(model, table, kind)
    meta = make_meta(0, _hashable_config("predict", o))
    rows = [{"prediction": float(v)} for v in values]
    if o["out"]:
        write_csv(o["out"], ["prediction"], rows, meta)
        print(f"{len(rows)} predictions written to {o['out']}")
    else:
        for row in rows:
            print(repr(row["prediction"]))
    return 0


def cmd_tune(o):
    ds = _load_training(o)
    y_valid, valid_features = split_label(read_csv(o["valid"]), o["label_col"])
    result = random_search(
        ds, (valid_features, y_valid), iterations=o["iterations"],
        seed=o["seed"], config=_fista_config(o), metric=o["metric"],
        projection=o["projection"],
    )
    model = fit(ds, result.best, config=_fista_config(o),
                projection=o["projection"])
    out_dir = o["out"] or "."
    os.makedirs(out_dir, exist_ok=True)
    meta = make_meta(o["seed"], _hashable_config("tune", o))
    fields = ["trial", "lambda1", "lambda2", "gamma1", "gamma2", "gamma3",
              "score"]
    write_csv(os.path.join(out_dir, "trials.csv"), fields,
              trial_rows(result), meta)
    write_json(os.path.join(out_dir, "best.json"), summary_dict(result), meta)
    write_json(os.path.join(out_dir, "model.json"), model_to_dict(model), meta)
    best = result.best.as_dict()
    pretty = " ".join(f"{k}={best[k]:.6g}" for k in fields[1:-1])
    print(f"best trial {result.best_index}: {result.metric} score "
          f"{result.best_score!r}")
    print(f"  {pretty}")
    print(f"artifacts written to {out_dir}")
    return 0


def _matrix_rows(x, y=None):
    names = [f"x{j + 1}" for j in range(x.shape[1])]
    rows = []
    for i in range(x.shape[0]):
        row = {name: float(x[i, j]) for j, name in enumerate(names)}
        if y is not None:
            row["y"] = float(y[i])
        rows.append(row)
    fields = names + (["y"] if y is not None else [])
    return fields, rows


def _simulate_bundle(o):
    design = o["design"]
    response = o["response"]
    if design == "two-group":
        p = o["p"] if o["p"] is not None else 50
        return simulate_two_group(TwoGroupSpec(
            p=p, n_source=o["n_source"], n_target=o["n_target"],
            response=response, seed=o["seed"],
        ))
    p = o["p"] if o["p"] is not None else (100 if response == "linear" else 20)
    delta = o["delta"] if o["delta"] is not None \
        else (1.0 if response == "linear" else 0.1)
    return simulate_extrapolation(ExtrapSpec(
        p=p, n_source=o["n_source"], n_target=o["n_target"],
        scenario=o["scenario"], delta=delta, response=response,
        seed=o["seed"],
    ))


def cmd_simulate(o):
    bundle = _simulate_bundle(o)
    out_dir = o["out"] or "."
    os.makedirs(out_dir, exist_ok=True)
    meta = make_meta(o["seed"], _hashable_config("simulate", o))
    parts = {
        "labeled.csv": (bundle.xl, bundle.yl),
        "unlabeled.csv": (bundle.xu, None),
        "valid.csv": (bundle.x_valid, bundle.y_valid),
        "test.csv": (bundle.x_test, bundle.y_test),
    }
    for fname, (x, y) in parts.items():
        fields, rows = _matrix_rows(x, y)
        write_csv(os.path.join(out_dir, fname), fields, rows, meta)
    manifest = dict(bundle.meta)
    manifest.update({
        "files": sorted(parts),
        "label_col": "y",
        "beta_source": [float(v) for v in bundle.beta_source],
        "beta_target": [float(v) for v in bundle.beta_target],
    })
    write_json(os.path.join(out_dir, "manifest.json"), manifest, meta)
    print(f"{bundle.design} data written to {out_dir} "
          f"(labeled {bundle.xl.shape[0]}, unlabeled {bundle.xu.shape[0]}, "
          f"valid {bundle.x_valid.shape[0]}, test {bundle.x_test.shape[0]})")
    return 0


def cmd_bench(o):
    response = o["response"]
    design = o["design"]
    if o["p"] is not None:
        ps = o["p"]
    elif design == "two-group":
        ps = (50,)
    else:
        ps = (100,) if response == "linear" else (20,)
    scenarios = o["scenario"] or ("same", "lucky", "unlucky")
    delta = o["delta"] if o["delta"] is not None \
        else (1.0 if response == "linear" else 0.1)
    tasks = build_tasks(
        design, response, scenarios, ps, o["n_source"], o["n_target"],
        delta, o["reps"], o["iterations"], o["seed"], o["methods"],
        projection=o["projection"],
    )
    rows = run_bench(tasks, config=_fista_config(o), jobs=o["jobs"])
    summary = summarize(rows)
    out_dir = o["out"] or "."
    os.makedirs(out_dir, exist_ok=True)
    meta = make_meta(o["seed"], _hashable_config("bench", o))
    write_csv(os.path.join(out_dir, "repetitions.csv"), ROW_FIELDS, rows, meta)
    summary_rows = [
        {**row, "mean": round_sig(row["mean"]), "sd": round_sig(row["sd"])}
        for row in summary
    ]
    write_csv(os.path.join(out_dir, "summary.csv"), SUMMARY_FIELDS,
              summary_rows, meta)
    print(format_summary_table(summary))
    print(f"artifacts written to {out_dir}")
    return 0


_HANDLERS = {
    "fit": cmd_fit,
    "predict": cmd_predict,
    "tune": cmd_tune,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        resolved = resolve_options(args)
        return _HANDLERS[args.command](resolved)
    except NumericError as exc:
        print(f"s2net: numeric failure: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"s2net: error: {exc}", file=sys.stderr)
        return 1
    except S2netError as exc:  # pragma: no cover - catch-all for subclasses
        print(f"s2net: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
