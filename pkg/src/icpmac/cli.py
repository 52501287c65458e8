"""Command-line front end.

Subcommands: ``codebook`` (write a codebook CSV), ``bound`` (evaluate one
closed-form bound), ``simulate`` (one Monte Carlo series to stdout) and
``figure`` (reproduce one of the five standard figures as fig<id>.csv plus an
optional SVG).

Exit codes: 0 success, 2 parameter/validation failure, 3 runtime failure
during a figure run (a partial CSV with a ``# INCOMPLETE`` trailer is written
first).  Human messages go to stderr; stdout and files carry only data.

Option precedence: command-line flag, then ``--config`` file (key=value
lines, # comments), then the ICPMAC_SEED environment variable (seed only),
then built-in defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import codebook as codebook_mod
from ._svg import render_figure_svg
from .errors import ParameterError
from .experiments import (
    ExperimentSpec,
    GridPoint,
    figure_preset,
    results_csv,
    run_experiment,
    run_point,
)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    cfg = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParameterError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


class _Options:
    """Flag > config-file > default resolution for one parsed command."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = _load_config(getattr(args, "config", None))

    def get(self, name, default=None, cast=str):
        value = getattr(self.args, name, None)
        if value is None and name in self.cfg:
            value = self.cfg[name]
        if value is None:
            return default
        if cast is bool and isinstance(value, str):
            return value.lower() not in ("0", "false", "no", "")
        return cast(value)

    def seed(self, default=0) -> int:
        value = self.get("seed", None, int)
        if value is not None:
            return value
        env = os.environ.get("ICPMAC_SEED")
        if env is not None:
            try:
                return int(env)
            except ValueError as exc:
                raise ParameterError(f"ICPMAC_SEED={env!r} is not an integer") from exc
        return default

    def require(self, name, cast=str):
        value = self.get(name, None, cast)
        if value is None:
            raise ParameterError(f"missing required option --{name.replace('_', '-')}")
        return value


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok != "")
    except ValueError as exc:
        raise ParameterError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok != "")
    except ValueError as exc:
        raise ParameterError(f"expected comma-separated integers, got {text!r}") from exc


# ---------------------------------------------------------------------------
# codebook

_KIND_ALIASES = {
    "simplex": "simplex",
    "uniform": "uniform",
    "inter": "interpolated",
    "interpolated": "interpolated",
    "random": "random_uniform_env",
    "random_uniform_env": "random_uniform_env",
}


def _build_codebook(opts: _Options):
    kind = _KIND_ALIASES.get(opts.require("kind"))
    if kind is None:
        raise ParameterError(f"unknown codebook kind {opts.get('kind')!r}")
    n = opts.require("n", int)
    m = opts.require("m", int)
    power = opts.require("power", float)
    if kind == "simplex":
        return codebook_mod.make_simplex(n, m, power)
    if kind == "uniform":
        return codebook_mod.make_uniform(n, m, power)
    if kind == "interpolated":
        return codebook_mod.make_inter(n, m, power, opts.require("a", float))
    rng = np.random.default_rng(opts.seed())
    return codebook_mod.sample_random_uniform_env(n, m, power, opts.require("d", float), rng)


def _gram_summary(cb) -> str:
    gram = cb.gram()
    target = cb.n * cb.power
    diag_err = float(np.max(np.abs(np.diag(gram) - target))) / target
    if cb.kind == "simplex" and cb.m >= 2:
        off = gram[~np.eye(cb.m, dtype=bool)]
        off_err = float(np.max(np.abs(off + target / (cb.m - 1)))) / target
        return (
            f"gram check: max rel diag error {diag_err:.3e}, "
            f"max rel off-diagonal error {off_err:.3e}"
        )
    col_power = np.diag(gram)
    return (
        f"column power: min {col_power.min():.6g}, max {col_power.max():.6g}, "
        f"budget {target:.6g} (rel slack {diag_err:.3e})"
    )


def _cmd_codebook(args) -> int:
    opts = _Options(args)
    cb = _build_codebook(opts)
    text = codebook_mod.dump_csv(cb)
    out = opts.get("out")
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(_gram_summary(cb), file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# bound

def _cmd_bound(args) -> int:
    opts = _Options(args)
    formula = args.formula
    if formula == "shannon":
        val = bounds_mod.shannon_bound(
            opts.require("m", int), opts.require("n", int), opts.require("power", float)
        )
    elif formula == "prop1":
        val = bounds_mod.prop1_bound(
            opts.require("m", int),
            opts.require("n", int),
            opts.require("power", float),
            opts.get("d", 0.0, float),
        )
    elif formula == "exponent":
        val = bounds_mod.error_exponent(opts.require("m", int), opts.require("power", float))
    elif formula in ("fano1", "fano2"):
        gains = _float_list(opts.require("gamma"))
        query = bounds_mod.BoundQuery(
            m=opts.require("m", int),
            n=opts.require("n", int),
            k=len(gains),
            gains=gains,
            t_set=_int_list(opts.require("t")),
            var_surplus=opts.get("sigma_d", 0.0, float),
            mean_shift=opts.get("mu_d", 0.0, float),
            entry_sum=_entry_sum(opts),
        )
        val = bounds_mod.fano1_bound(query) if formula == "fano1" else bounds_mod.fano2_bound(query)
    else:  # unreachable: argparse restricts choices
        raise ParameterError(f"unknown formula {formula!r}")
    sys.stdout.write("formula_id,value,clamped\n")
    sys.stdout.write(f"{val.formula_id},{val.value!r},{'true' if val.clamped else 'false'}\n")
    return 0


def _entry_sum(opts: _Options) -> float:
    path = opts.get("codebook")
    if path:
        return float(codebook_mod.load_csv(path).entries.sum())
    return opts.get("codebook_sum", 0.0, float)


# ---------------------------------------------------------------------------
# simulate

def _cmd_simulate(args) -> int:
    opts = _Options(args)
    kind = _KIND_ALIASES.get(opts.require("kind"))
    if kind is None:
        raise ParameterError(f"unknown codebook kind {opts.get('kind')!r}")
    k = opts.get("k", 1, int)
    gains = opts.get("gains", None, _float_list)
    point = GridPoint(
        n=opts.require("n", int),
        k=k,
        a=opts.get("a", None, float),
        d=opts.get("d", None, float),
    )
    spec = ExperimentSpec(
        codebook_kind=kind,
        decoders=(opts.require("decoder"),),
        m=opts.require("m", int),
        power=opts.require("power", float),
        grid=(point,),
        trials=opts.get("trials", 1000, int),
        master_seed=opts.seed(),
        noise_var=opts.get("noise_var", 1.0, float),
        gains=gains,
        epsilon=opts.get("epsilon", 0.1, float),
        alpha=opts.get("alpha", 0.05, float),
    )
    results = run_experiment(spec, jobs=opts.get("jobs", 1, int))
    sys.stdout.write(results_csv(spec, results))
    return 0


# ---------------------------------------------------------------------------
# figure

def _collect_figure(spec: ExperimentSpec, jobs: int):
    """Run all grid points, returning (results, first runtime failure or None)."""
    results = []
    if jobs <= 1:
        for i, point in enumerate(spec.grid):
            try:
                results.extend(run_point(spec, point, i))
            except ParameterError:
                raise
            except Exception as exc:
                return results, exc
        return results, None
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_point, spec, point, i) for i, point in enumerate(spec.grid)]
        for fut in futures:
            try:
                results.extend(fut.result())
            except ParameterError:
                raise
            except Exception as exc:
                return results, exc
    return results, None


def _cmd_figure(args) -> int:
    opts = _Options(args)
    if args.id == "all":
        ids = [1, 2, 3, 4, 5]
    else:
        try:
            ids = [int(args.id)]
        except ValueError as exc:
            raise ParameterError(f"figure id must be 1..5 or 'all', got {args.id!r}") from exc
    out_dir = Path(opts.get("out_dir", ".", str))
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = opts.get("jobs", 1, int)
    emit_svg = bool(getattr(args, "emit_svg", False)) or opts.get("emit_svg", False, bool)

    for fig in ids:
        spec = figure_preset(
            fig,
            trials=opts.get("trials", None, int),
            master_seed=opts.seed(),
            m=opts.get("m", None, int),
        )
        results, failure = _collect_figure(spec, jobs)
        csv_text = results_csv(spec, results)
        csv_path = out_dir / f"fig{fig}.csv"
        if failure is not None:
            csv_path.write_text(csv_text + "# INCOMPLETE\n", encoding="utf-8")
            print(f"figure {fig} failed mid-run: {failure}", file=sys.stderr)
            return 3
        csv_path.write_text(csv_text, encoding="utf-8")
        print(f"wrote {csv_path}", file=sys.stderr)
        if emit_svg:
            svg_path = out_dir / f"fig{fig}.svg"
            x_field = "a" if fig == 5 else "n"
            svg_path.write_text(
                render_figure_svg(csv_path.read_text(encoding="utf-8"), x_field),
                encoding="utf-8",
            )
            print(f"wrote {svg_path}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icpmac",
        description="Two-environment Gaussian channel simulator: codebooks, decoders, bounds, figures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file (flags take precedence)")
        p.add_argument("--seed", type=int, help="master seed (fallback: ICPMAC_SEED)")

    p_cb = sub.add_parser("codebook", help="construct a codebook and write it as CSV")
    common(p_cb)
    p_cb.add_argument("--kind", help="simplex | uniform | inter | random")
    p_cb.add_argument("--n", type=int, help="sample count (even)")
    p_cb.add_argument("--m", type=int, help="codeword count")
    p_cb.add_argument("--power", type=float, help="per-symbol power budget P")
    p_cb.add_argument("--a", type=float, help="interpolation weight in [0,1]")
    p_cb.add_argument("--d", type=float, help="environment-2 power surplus")
    p_cb.add_argument("--out", help="output file (default: stdout)")
    p_cb.set_defaults(func=_cmd_codebook)

    p_bd = sub.add_parser("bound", help="evaluate a closed-form bound as CSV on stdout")
    common(p_bd)
    p_bd.add_argument("formula", choices=("shannon", "prop1", "exponent", "fano1", "fano2"))
    p_bd.add_argument("--m", type=int)
    p_bd.add_argument("--n", type=int)
    p_bd.add_argument("--k", type=int)
    p_bd.add_argument("--power", type=float)
    p_bd.add_argument("--d", type=float)
    p_bd.add_argument("--sigma-d", dest="sigma_d", type=float, help="env-2 variance surplus")
    p_bd.add_argument("--mu-d", dest="mu_d", type=float, help="env-2 mean shift")
    p_bd.add_argument("--gamma", help="comma-separated gain vector (length k)")
    p_bd.add_argument("--t", help="comma-separated zero-based gain positions in the bound")
    p_bd.add_argument("--codebook-sum", dest="codebook_sum", type=float,
                      help="sum of all codebook entries (fano2)")
    p_bd.add_argument("--codebook", help="codebook CSV whose entry sum to use (fano2)")
    p_bd.set_defaults(func=_cmd_bound)

    p_sim = sub.add_parser("simulate", help="run one Monte Carlo series, CSV on stdout")
    common(p_sim)
    p_sim.add_argument("--decoder", help="mdd | ols_mdd | variance_match | icp_coeff | icp_resid")
    p_sim.add_argument("--kind", help="simplex | uniform | inter | random")
    p_sim.add_argument("--m", type=int)
    p_sim.add_argument("--k", type=int)
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--power", type=float)
    p_sim.add_argument("--a", type=float)
    p_sim.add_argument("--d", type=float)
    p_sim.add_argument("--noise-var", dest="noise_var", type=float)
    p_sim.add_argument("--gains", help="comma-separated true gains (default: all ones)")
    p_sim.add_argument("--epsilon", type=float, help="variance_match acceptance slack")
    p_sim.add_argument("--alpha", type=float, help="invariance-test significance level")
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--jobs", type=int)
    p_sim.set_defaults(func=_cmd_simulate)

    p_fig = sub.add_parser("figure", help="reproduce a standard figure (CSV + optional SVG)")
    common(p_fig)
    p_fig.add_argument("id", help="1..5 or 'all'")
    p_fig.add_argument("--trials", type=int)
    p_fig.add_argument("--jobs", type=int)
    p_fig.add_argument("--m", type=int, help="override the preset codeword count")
    p_fig.add_argument("--out-dir", dest="out_dir")
    p_fig.add_argument("--emit-svg", dest="emit_svg", action="store_true", default=False)
    p_fig.set_defaults(func=_cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
