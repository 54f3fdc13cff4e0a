"""Command line interface: config loading, dispatch, and report serialization.

Subcommands: constants, threshold, simulate, verify, sweep. Configs and
reports are JSON; trajectories and sweeps are CSV. Exit codes: 0 success,
1 verification verdict fail, 2 config parse error, 3 config validation error,
4 numerical blow-up, 64 unknown subcommand.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import analysis, constants as cst
from .integrate import BlowUpError, IntegratorConfig, default_dt, integrate
from .model import ActivationSpec, HebbianParams, MhnnParams, ParameterError

COMMANDS = ("constants", "threshold", "simulate", "verify", "sweep")

EXIT_OK = 0
EXIT_VERDICT_FAIL = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_BLOWUP = 4
EXIT_USAGE = 64

_COUPLING_ALIASES = {"weak": "weak-sigmoidal", "weak-sigmoidal": "weak-sigmoidal",
                     "linear": "linear"}


@dataclass
class RunConfig:
    model: str
    parameters: Union[MhnnParams, HebbianParams]
    integrator: IntegratorConfig
    ensemble: analysis.EnsembleSpec
    epsilon: float


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ParameterError(key, "required field is missing")
    return cfg[key]


def _build_params(cfg: dict, model: str):
    m = int(_require(cfg, "m"))
    acts = cfg.get("activations")
    if acts is None:
        activations = ()
    else:
        activations = tuple(ActivationSpec(kind=a.get("kind", "tanh-scaled"),
                                           beta=float(a.get("beta", 1.0))) for a in acts)
    common = dict(
        m=m, a=_require(cfg, "a"), b=float(_require(cfg, "b")),
        eta=_require(cfg, "eta"), J=_require(cfg, "J"), gamma=_require(cfg, "gamma"),
        P=float(cfg.get("P", 0.0)), r=float(cfg.get("r", 1.0)), V=float(cfg.get("V", 0.0)),
        activations=activations,
    )
    if model == "mhnn":
        coupling = cfg.get("coupling", "weak")
        if coupling not in _COUPLING_ALIASES:
            raise ParameterError("coupling", f"expected 'weak' or 'linear', got {coupling!r}")
        k = _require(cfg, "k")
        if np.ndim(k) != 0:
            raise ParameterError("k", "mhnn model takes a scalar memristive strength")
        return MhnnParams(k=float(k), w=_require(cfg, "w"),
                          coupling_kind=_COUPLING_ALIASES[coupling], **common)
    if model == "hebbian":
        return HebbianParams(k=_require(cfg, "k"), c=_require(cfg, "c"),
                             lam=_require(cfg, "lambda"),
                             w0=cfg.get("w0", np.ones((m, m))), **common)
    raise ParameterError("model", f"expected 'mhnn' or 'hebbian', got {model!r}")


def load_config(path: str, *, model_override: Optional[str] = None,
                seed_override: Optional[int] = None,
                epsilon_override: Optional[float] = None) -> RunConfig:
    """Load and fully validate a run configuration, applying defaults."""
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ParameterError("<root>", "config must be a JSON object")
    model = model_override or _require(cfg, "model")
    params = _build_params(cfg, model)
    params.validate()

    epsilon = float(epsilon_override if epsilon_override is not None
                    else cfg.get("epsilon", 0.1))
    if not (epsilon > 0):
        raise ParameterError("epsilon", "prescribed gap epsilon must be positive")

    ens_cfg = cfg.get("ensemble", {})
    ensemble = analysis.EnsembleSpec(
        count=int(ens_cfg.get("count", 10)),
        radius=float(ens_cfg.get("radius", 5.0)),
        seed=int(seed_override if seed_override is not None else ens_cfg.get("seed", 0)),
        tail_fraction=float(ens_cfg.get("tail_fraction", 0.2)),
    )
    ensemble.validate()

    dc = cst.derive_constants(params)
    int_cfg = cfg.get("integrator", {})
    integrator = IntegratorConfig(
        method=int_cfg.get("method", "rk4-fixed"),
        dt=float(int_cfg.get("dt", default_dt(params, dc))),
        t_end=float(int_cfg.get("t_end", analysis.default_horizon(params, ensemble))),
        record_stride=int(int_cfg.get("record_stride", 1)),
        abs_tol=float(int_cfg.get("abs_tol", 1e-9)),
        rel_tol=float(int_cfg.get("rel_tol", 1e-9)),
    )
    integrator.validate()
    return RunConfig(model=model, parameters=params, integrator=integrator,
                     ensemble=ensemble, epsilon=epsilon)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _cmd_constants(run: RunConfig, args) -> int:
    dc = cst.derive_constants(run.parameters)
    n_scale, n_force, n_rate, n_bound = dc.names()
    out = {"model": dc.model, n_scale: dc.scale, n_force: dc.forcing,
           n_rate: dc.diss_rate, n_bound: dc.bound,
           "extremes": dataclasses.asdict(cst.derive_extremes(run.parameters))}
    _emit(_json_text(out), args.output)
    return EXIT_OK


def _cmd_threshold(run: RunConfig, args) -> int:
    thr = cst.threshold(run.parameters, run.epsilon)
    out = {"model": run.model, "epsilon": run.epsilon, "p_star": thr.p_star,
           "p_used": run.parameters.P,
           "rate_theory": thr.rate_at(run.parameters.P),
           "residual": thr.residual_at(run.parameters.P)}
    _emit(_json_text(out), args.output)
    return EXIT_OK


def _cmd_simulate(run: RunConfig, args) -> int:
    p = run.parameters
    y0 = analysis.sample_initial_states(run.ensemble, p.m + 1)[0]
    hebbian = run.model == "hebbian"
    if hebbian:
        y0 = np.concatenate([y0, p.w0.ravel()])
    traj = integrate(analysis._make_rhs(p), y0, run.integrator,
                     params_digest=p.digest(), m=p.m, has_weights=hebbian)
    header = ["t"] + [f"u{i + 1}" for i in range(p.m)] + ["rho"]
    if hebbian:
        header += [f"w{i + 1}{j + 1}" for i in range(p.m) for j in range(p.m)]
    lines = [",".join(header)]
    for t, row in zip(traj.times, traj.states):
        lines.append(",".join([_fmt(float(t))] + [_fmt(float(x)) for x in row]))
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _cmd_verify(run: RunConfig, args) -> int:
    report = analysis.verify_guarantees(run.parameters, run.integrator,
                                        run.ensemble, run.epsilon)
    _emit(_json_text(report.to_dict()), args.output)
    return EXIT_OK if report.verdict == "pass" else EXIT_VERDICT_FAIL


def _cmd_sweep(run: RunConfig, args) -> int:
    try:
        p_values = [float(x) for x in args.p_values.split(",") if x.strip() != ""]
    except ValueError:
        raise ParameterError("p_values", f"could not parse coupling list {args.p_values!r}")
    rows = analysis.sweep_coupling(run.parameters, run.integrator, run.ensemble,
                                   p_values, run.epsilon)
    lines = ["P,deg_estimate,p_star,rate_theory,rate_fitted,verdict"]
    for row in rows:
        lines.append(",".join([_fmt(row.P), _fmt(row.deg_estimate), _fmt(row.p_star),
                               _fmt(row.rate_theory), _fmt(row.rate_fitted), row.verdict]))
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


_HANDLERS = {
    "constants": _cmd_constants,
    "threshold": _cmd_threshold,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhnnsync",
        description="Simulate memristive Hopfield networks and verify their "
                    "synchronization and dissipativity guarantees.")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")
    for name, help_text in [
        ("constants", "emit the derived dissipativity constants as JSON"),
        ("threshold", "emit the coupling threshold p_star(epsilon) as JSON"),
        ("simulate", "integrate one trajectory and emit it as CSV"),
        ("verify", "run a seeded ensemble and check every guarantee"),
        ("sweep", "run verify over a list of coupling strengths, emit CSV"),
    ]:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to a JSON run config")
        sp.add_argument("--output", default=None, help="output path (default stdout)")
        sp.add_argument("--seed", type=int, default=None, help="override the ensemble seed")
        sp.add_argument("--model", choices=("mhnn", "hebbian"), default=None,
                        help="override the config model")
        if name in ("threshold", "verify", "sweep"):
            sp.add_argument("--epsilon", type=float, default=None,
                            help="override the prescribed gap")
        if name == "sweep":
            sp.add_argument("--p-values", required=True,
                            help="comma-separated coupling strengths")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        parser.print_usage(sys.stderr)
        print(f"mhnnsync: unknown subcommand {argv[0]!r}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        run = load_config(args.config,
                          model_override=args.model,
                          seed_override=args.seed,
                          epsilon_override=getattr(args, "epsilon", None))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"mhnnsync: config parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParameterError as exc:
        print(f"mhnnsync: config validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return _HANDLERS[args.command](run, args)
    except ParameterError as exc:
        print(f"mhnnsync: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BlowUpError as exc:
        print(f"mhnnsync: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
