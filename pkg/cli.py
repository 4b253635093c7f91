#!/usr/bin/env python3
"""
Record Lab CLI: exact laws, simulations, rate tables and acceptance suites.

Data goes to stdout (or --out); logs and status go to stderr.
"""

import json
import math
import sys
from typing import Any, Dict, List, Optional, Sequence

import click
import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from src.ctrw import CTRWConfig, scaling_check, simulate_ctrw
from src.deviations import (
    RateProfile,
    exact_tail_logslope,
    ldp_rate,
    legendre,
    lil_constant,
    lil_normalizer,
    lil_running_statistic,
    lil_scale,
    mdp_exact_logslope,
    mdp_rate,
)
from src.exact import (
    build_series,
    estimate_rho,
    expected_ladder_epoch,
    ladder_height_pmf,
    ladder_limits,
    m_infinity_law,
    r_infinity_law,
    record_count_logpmf,
    renewal_function,
    series_c_rho,
    sigma_r_infinity_parameter,
)
from src.limits import ml_moment_ratio
from src.models import DriftClass, LatticeStepLaw, WaitingFamily, load_experiment
from src.utils import (
    AcceptanceFailure,
    ConfigManager,
    PreconditionError,
    RecordLabError,
    configure_root,
    get_logger,
    get_settings,
    use_settings,
)
from src.verify import dumps_report, registry, run_suite
from src.verify.registry import _jsonable
from src.walk import monte_carlo
from src.walk.montecarlo import replicate_values

console = Console(stderr=True)
logger = get_logger("cli")

LADDER_HORIZON = 2000


class RecordLabGroup(click.Group):
    """Click group mapping library errors to their exit codes."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except RecordLabError as e:
            console.print(f"[bold red]{type(e).__name__}:[/bold red] {e}")
            ctx.exit(e.exit_code)


def _split_floats(ctx, param, value) -> Optional[List[float]]:
    if not value:
        return None
    out: List[float] = []
    for item in value:
        for part in str(item).split(","):
            if part.strip():
                try:
                    out.append(float(part))
                except ValueError:
                    raise click.BadParameter(f"{part!r} is not a number") from None
    return out


def _split_ints(ctx, param, value) -> Optional[List[int]]:
    floats = _split_floats(ctx, param, value)
    if floats is None:
        return None
    if any(v != int(v) for v in floats):
        raise click.BadParameter("expected integers")
    return [int(v) for v in floats]


def _parse_threshold(ctx, param, value):
    if value is None:
        return None
    parts = value.split(",")
    if len(parts) != 2:
        raise click.BadParameter("threshold looks like 'x1,x2'")
    try:
        return [float(parts[0]), float(parts[1])]
    except ValueError:
        raise click.BadParameter(f"{value!r} is not two numbers") from None


def config_option(f):
    return click.option(
        "--config", "config_path", type=click.Path(), help="JSON experiment config"
    )(f)


def output_options(f):
    f = click.option("--out", help="Output file (default: stdout)")(f)
    f = click.option(
        "--format", "fmt", type=click.Choice(["csv", "json"]), help="Output format"
    )(f)
    return f


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        console.print(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def _json_text(payload: Dict[str, Any]) -> str:
    return dumps_report(payload)


def _csv_text(frame: pd.DataFrame, meta: Optional[Dict[str, Any]] = None) -> str:
    head = ""
    if meta is not None:
        head = "# " + json.dumps(_jsonable(meta), sort_keys=True) + "\n"
    return head + frame.to_csv(index=False, lineterminator="\n")


def _finish(cfg, frame: pd.DataFrame, meta: Dict[str, Any], csv_meta: bool = False) -> None:
    if cfg.format == "json":
        payload = dict(meta)
        payload["rows"] = frame.to_dict(orient="records")
        _emit(_json_text(payload), cfg.out)
    else:
        _emit(_csv_text(frame, meta if csv_meta else None), cfg.out)


@click.group(cls=RecordLabGroup)
@click.option("--config-file", type=click.Path(), help="YAML/JSON engine settings")
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
@click.option("--log-json", is_flag=True, help="JSON log lines on stderr")
@click.option("--log-file", type=click.Path(), help="Also log to this file")
def cli(config_file, log_level, log_json, log_file):
    """Record numbers of random walks: exact laws and simulation."""
    if config_file:
        use_settings(ConfigManager(config_file))
    settings = get_settings()
    configure_root(
        level=log_level or settings.get("logging.level", "WARNING"),
        log_file=log_file or settings.get("logging.file"),
        json_format=log_json or settings.get("logging.format") == "json",
    )


@cli.command()
@config_option
@click.option("--law", help="Step law, e.g. bernoulli:0.5 or gaussian")
@click.option("--n", type=int, help="Steps per walk")
@click.option("--reps", type=int, help="Replicates")
@click.option("--seed", type=int, help="Random seed (required)")
@click.option("--sigmas", multiple=True, callback=_split_floats, help="sigma thresholds")
@click.option("--threshold", callback=_parse_threshold, help="Start and level x1,x2")
@output_options
def simulate(config_path, law, n, reps, seed, sigmas, threshold, out, fmt):
    """Monte Carlo record statistics."""
    cfg = load_experiment(
        config_path,
        dict(law=law, n=n, reps=reps, seed=seed, sigmas=sigmas, threshold=threshold,
             out=out, format=fmt),
    )
    cfg.require("law", "n", "reps", "seed")
    step = cfg.step_law()
    summary = monte_carlo(
        step, cfg.n, cfg.reps, cfg.seed, sigmas=cfg.sigmas,
        threshold=tuple(cfg.threshold) if cfg.threshold else None,
    )
    if cfg.format == "csv":
        stats = sorted(summary.values)
        _emit(_csv_text(replicate_values(summary, stats)), cfg.out)
        return

    payload = summary.to_json_dict()
    payload["drift_class"] = step.drift_class.value
    payload["rho"] = step.rho
    payload.update(_normalized_block(step, summary, cfg.n))
    _emit(_json_text(payload), cfg.out)


def _normalized_block(step, summary, n: int) -> Dict[str, Any]:
    """Scaled record counts against g_rho, or the LLN rate for walks drifting up."""
    block: Dict[str, Any] = {}
    drift = step.drift_class
    if n < 1:
        return block
    try:
        if drift is DriftClass.DRIFTS_UP:
            series = build_series(step, 2000, recurrence_horizon=1)
            e_t1 = expected_ladder_epoch(series).value
            block["lln"] = {
                "r_over_n": float(summary.column("r_weak").mean()) / n,
                "target": 1.0 / e_t1,
            }
        elif drift is DriftClass.OSCILLATES and 0.0 < step.rho < 1.0:
            series = build_series(step, max(10 * n, 1000), recurrence_horizon=1)
            c = series_c_rho(series, n).value
            moments = summary.moments("r_weak", scale=c * n**step.rho)
            block["normalized"] = {
                "c_rho": c,
                "moments": moments,
                "mean_target": math.exp(-math.lgamma(1.0 + step.rho)),
                "moment_ratio_target": ml_moment_ratio(step.rho),
            }
    except PreconditionError as e:
        logger.warning("skipping normalized summary: %s", e)
    return block


@cli.command()
@config_option
@click.option("--law", help="Lattice step law")
@click.option("--horizon", type=int, help="Series horizon N")
@output_options
def exact(config_path, law, horizon, out, fmt):
    """Exact series table: q, a, ladder epoch law, with metadata.

    The exact law of R_n is written by `dist` and the renewal function V by
    `sigma`.
    """
    cfg = load_experiment(config_path, dict(law=law, horizon=horizon, out=out, format=fmt))
    cfg.require("law", "horizon")
    step = cfg.step_law()
    series = build_series(step, cfg.horizon)
    N = series.N
    frame = pd.DataFrame(
        {
            "n": np.arange(N + 1),
            "q": series.q,
            "q_strict": series.q_strict,
            "a": series.a,
            "a_strict": series.a_strict,
            "t": series.t,
            "d": series.d,
            "t_strict": series.strict_epoch.t,
        }
    )
    meta: Dict[str, Any] = {
        "law": series.law,
        "horizon": N,
        "drift_class": series.drift_class.value,
        "rho": series.rho,
        "rho_estimate": estimate_rho(series),
        "defect": series.defect.to_dict(),
        "e_t1": expected_ladder_epoch(series).to_dict(),
    }
    if 0.0 < series.rho < 1.0:
        meta["c_rho"] = series_c_rho(series, N).to_dict()
    if series.drift_class is DriftClass.DRIFTS_DOWN:
        meta["r_infinity"] = r_infinity_law(series).to_dict()
        if isinstance(step, LatticeStepLaw) and step.upward_skip_free:
            meta["m_infinity"] = m_infinity_law(series, step).to_dict()
    if series.drift_class is DriftClass.DRIFTS_UP:
        meta["ladder_limits"] = {k: v.to_dict() for k, v in ladder_limits(series).items()}
    _finish(cfg, frame, meta, csv_meta=True)


@cli.command()
@config_option
@click.option("--law", help="Lattice step law")
@click.option("--n", type=int, help="Walk length")
@click.option("--strong", is_flag=True, default=None, help="Strong records")
@output_options
def dist(config_path, law, n, strong, out, fmt):
    """Exact law of the record count R_n."""
    cfg = load_experiment(config_path, dict(law=law, n=n, strong=strong, out=out, format=fmt))
    cfg.require("law")
    if cfg.n is None:
        cfg.require("n")
    series = build_series(cfg.step_law(), max(cfg.n, 1))
    epoch = series.strict_epoch if cfg.strong else series.epoch
    logpmf = record_count_logpmf(epoch, cfg.n)
    m = np.arange(1, cfg.n + 2)
    frame = pd.DataFrame({"m": m, "prob": np.exp(logpmf[1:]), "log_prob": logpmf[1:]})
    if cfg.format == "json":
        payload = {
            "law": series.law,
            "n": cfg.n,
            "strong": cfg.strong,
            "pmf": {str(int(k)): float(p) for k, p in zip(m, frame["prob"])},
            "mean": float(np.sum(m * frame["prob"])),
        }
        _emit(_json_text(payload), cfg.out)
    else:
        _emit(_csv_text(frame), cfg.out)


@cli.command()
@config_option
@click.option("--law", help="Step law")
@click.option("--n", type=int, help="Steps per walk")
@click.option("--reps", type=int, help="Replicates")
@click.option("--seed", type=int, help="Random seed (required)")
@click.option("--sigmas", multiple=True, callback=_split_floats, help="sigma thresholds")
@output_options
def sigma(config_path, law, n, reps, seed, sigmas, out, fmt):
    """sigma-record counts with the renewal function V."""
    cfg = load_experiment(
        config_path,
        dict(law=law, n=n, reps=reps, seed=seed, sigmas=sigmas, out=out, format=fmt),
    )
    cfg.require("law", "n", "reps", "seed", "sigmas")
    step = cfg.step_law()
    summary = monte_carlo(step, cfg.n, cfg.reps, cfg.seed, sigmas=cfg.sigmas)

    lattice = isinstance(step, LatticeStepLaw)
    heights = None
    series = None
    if lattice:
        top = int(math.ceil(max(cfg.sigmas))) + max(step.support_hi, 1)
        heights = ladder_height_pmf(step, LADDER_HORIZON, top)
    if step.drift_class is DriftClass.DRIFTS_DOWN:
        series = build_series(step, LADDER_HORIZON, recurrence_horizon=1)
    c = None
    if step.drift_class is DriftClass.OSCILLATES and 0.0 < step.rho < 1.0 and cfg.n >= 1:
        wide = build_series(step, max(10 * cfg.n, 1000), recurrence_horizon=1)
        c = series_c_rho(wide, cfg.n).value

    rows = []
    for s in cfg.sigmas:
        counts = summary.column(f"r_sigma[{s:g}]").astype(np.float64)
        row: Dict[str, Any] = {"sigma": s, "mean_r_sigma": float(counts.mean())}
        v = renewal_function(heights, s) if heights is not None else float("nan")
        row["V"] = v
        if c is not None and not math.isnan(v):
            row["normalized_mean"] = float(np.mean(v * counts)) / (c * cfg.n**step.rho)
        if series is not None and heights is not None:
            geometric = sigma_r_infinity_parameter(series, heights, s)
            row["geometric_parameter"] = geometric.parameter.value
        rows.append(row)
    frame = pd.DataFrame(rows)
    meta = {"law": step.describe(), "n": cfg.n, "reps": cfg.reps, "seed": cfg.seed}
    if c is not None:
        meta["c_rho"] = c
        meta["target"] = math.exp(-math.lgamma(1.0 + step.rho))
    _finish(cfg, frame, meta)


@cli.command()
@config_option
@click.option("--law", help="Step law")
@click.option("--wait", help="Waiting law, e.g. pareto:0.6")
@click.option("--alpha", type=float, help="Pareto index when --wait is omitted")
@click.option("--horizons", multiple=True, callback=_split_floats, help="Times t")
@click.option("--reps", type=int, help="Replicates")
@click.option("--seed", type=int, help="Random seed (required)")
@output_options
def ctrw(config_path, law, wait, alpha, horizons, reps, seed, out, fmt):
    """Continuous-time walk record counts R~_t."""
    cfg = load_experiment(
        config_path,
        dict(law=law, wait=wait, alpha=alpha, horizons=horizons, reps=reps, seed=seed,
             out=out, format=fmt),
    )
    cfg.require("law", "horizons", "reps", "seed")
    step = cfg.step_law()
    waiting = cfg.waiting_law()
    result = simulate_ctrw(CTRWConfig(step, waiting, cfg.horizons, cfg.reps, cfg.seed))
    if cfg.format == "csv":
        _emit(_csv_text(result.to_frame()), cfg.out)
        return

    payload: Dict[str, Any] = {
        "config": result.meta,
        "composition_holds": result.composition_holds,
        "nondecreasing": result.nondecreasing,
        "means": {f"{t:g}": float(result.at(t).mean()) for t in result.horizons},
    }
    t1, t2 = result.horizons[0], result.horizons[-1]
    if t1 > 0 and t2 / t1 >= 10:
        a = waiting.alpha if waiting.family is WaitingFamily.PARETO else 1.0
        payload["scaling"] = scaling_check(result.at(t1), result.at(t2), a * step.rho, t1, t2)
    _emit(_json_text(payload), cfg.out)


@cli.command()
@config_option
@click.option("--law", help="Lattice step law")
@click.option("--y", multiple=True, callback=_split_floats, help="Fractions y in (0, 1]")
@click.option("--n-grid", multiple=True, callback=_split_ints, help="Walk lengths n")
@output_options
def ldp(config_path, law, y, n_grid, out, fmt):
    """Large deviation rates y Lambda*(1/y) with exact tail slopes."""
    cfg = load_experiment(
        config_path, dict(law=law, y=y, n_grid=n_grid, out=out, format=fmt)
    )
    cfg.require("law", "y")
    grid = cfg.n_grid or [100, 400, 1600]
    profile = RateProfile.from_law(cfg.step_law(), max(grid))
    rows = []
    for value in cfg.y:
        row: Dict[str, Any] = {
            "y": value,
            "rate": ldp_rate(profile, value),
            "lambda_star": legendre(profile, 1.0 / value),
        }
        table = exact_tail_logslope(profile, value, grid)
        for n_i, slope in zip(table["n"], table["slope"]):
            row[f"exact_slope_{int(n_i)}"] = float(slope)
        rows.append(row)
    meta = {"law": profile.series.law, "n_grid": grid, "drift_class": profile.drift_class.value}
    _finish(cfg, pd.DataFrame(rows), meta)


@cli.command()
@config_option
@click.option("--rho", type=float, help="Index rho in [0, 1)")
@click.option("--law", help="Lattice law for exact tail comparison")
@click.option("--n", type=int, help="Walk length for the exact comparison")
@click.option("--y", multiple=True, callback=_split_floats, help="Levels y > 0")
@output_options
def mdp(config_path, rho, law, n, y, out, fmt):
    """Moderate deviation rates, optionally against exact tails."""
    cfg = load_experiment(
        config_path, dict(rho=rho, law=law, n=n, y=y, out=out, format=fmt)
    )
    cfg.require("y")
    profile = None
    if cfg.law is not None and cfg.n is not None:
        profile = RateProfile.from_series(
            build_series(cfg.step_law(), 40 * cfg.n, recurrence_horizon=cfg.n)
        )
    index = cfg.rho if cfg.rho is not None else (profile.rho if profile else None)
    if index is None:
        cfg.require("rho")
    rows = []
    for value in cfg.y:
        row: Dict[str, Any] = {"y": value, "rate": mdp_rate(index, value)}
        if profile is not None:
            exact_row = mdp_exact_logslope(profile, value, cfg.n)
            row.update({k: exact_row[k] for k in ("m", "c_rho", "slope", "ratio")})
        rows.append(row)
    _finish(cfg, pd.DataFrame(rows), {"rho": index, "n": cfg.n})


@cli.command()
@config_option
@click.option("--rho", type=float, help="Index rho in (0, 1)")
@click.option("--law", help="Step law for the normalizer")
@click.option("--n-grid", multiple=True, callback=_split_ints, help="n values for the normalizer")
@click.option("--n", type=int, help="Walk length for the empirical statistic")
@click.option("--reps", type=int, help="Walks for the empirical statistic")
@click.option("--seed", type=int, help="Random seed (required with --reps)")
@output_options
def lil(config_path, rho, law, n_grid, n, reps, seed, out, fmt):
    """Iterated-logarithm constant, normalizer and running statistic."""
    cfg = load_experiment(
        config_path,
        dict(rho=rho, law=law, n_grid=n_grid, n=n, reps=reps, seed=seed, out=out, format=fmt),
    )
    if cfg.law is None:
        cfg.require("rho")
        frame = pd.DataFrame([{"rho": cfg.rho, "constant": lil_constant(cfg.rho)}])
        _finish(cfg, frame, {"rho": cfg.rho})
        return

    step = cfg.step_law()
    profile = RateProfile.from_law(step, 4096)
    constant = lil_constant(profile.rho)
    if cfg.reps is not None:
        cfg.require("n", "seed")
        frame = lil_running_statistic(step, profile, cfg.n, cfg.reps, cfg.seed)
        _finish(cfg, frame, {"law": step.describe(), "n": cfg.n, "constant": constant})
        return

    cfg.require("n_grid")
    rows = []
    for k in cfg.n_grid:
        f = lil_scale(profile, k)
        try:
            normalizer = lil_normalizer(profile, k)
        except PreconditionError as e:
            logger.warning("no normalizer at n=%d: %s", k, e)
            normalizer = float("nan")
        rows.append(
            {
                "n": k,
                "f_n": f,
                "loglog_f_n": math.log(math.log(f)) if f > math.e else float("nan"),
                "normalizer": normalizer,
                "constant": constant,
            }
        )
    _finish(cfg, pd.DataFrame(rows), {"law": step.describe(), "rho": profile.rho})


@cli.command()
@click.option("--suite", default=None, help="fast, full, spitzer, exact, deviations, ...")
@click.option("--seed", type=int, help="Random seed (required)")
@click.option("--check", "checks", multiple=True, help="Run only these checks")
@click.option("--config", "config_path", type=click.Path(), help="JSON experiment config")
@click.option("--out", help="Report file (default: stdout)")
def verify(suite, seed, checks, config_path, out):
    """Run an acceptance suite and emit a JSON report."""
    cfg = load_experiment(config_path, dict(suite=suite, seed=seed, out=out, format="json"))
    cfg.require("seed")
    report = run_suite(cfg.suite, cfg.seed, only=list(checks) or None)
    _emit(dumps_report(report), cfg.out)

    table = Table(title=f"suite {cfg.suite} (seed {cfg.seed})")
    table.add_column("check")
    table.add_column("result")
    for entry in report["checks"]:
        status = "[green]pass[/green]" if entry["passed"] else "[red]FAIL[/red]"
        table.add_row(entry["name"], status)
    console.print(table)
    if not report["passed"]:
        failing = [c["name"] for c in report["checks"] if not c["passed"]]
        raise AcceptanceFailure(f"failing checks: {', '.join(failing)}")


@cli.command("suites")
def list_suites():
    """List suites and their checks."""
    for name in registry.list_suites():
        click.echo(f"{name}: {', '.join(c.name for c in registry.suite(name))}")


def main(argv: Optional[Sequence[str]] = None):
    cli.main(args=list(argv) if argv is not None else None, prog_name="record-lab")


if __name__ == "__main__":
    main(sys.argv[1:])
