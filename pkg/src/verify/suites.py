"""
Acceptance checks, grouped into suites by cost.

fast      enumeration oracles, exact series, rate functions and limit laws (seconds)
full      everything in fast plus the Monte Carlo checks (minutes)
spitzer, exact, deviations, limits, monte_carlo, determinism select subsets.
"""

import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import erfcx, gammaln

from ..ctrw.simulation import CTRWConfig, scaling_check, simulate_ctrw
from ..deviations.rates import (
    RateProfile,
    exact_tail_logslope,
    lambda_convexity,
    ldp_rate,
    lil_constant,
    lil_running_statistic,
    mdp_exact_logslope,
    mdp_rate,
)
from ..exact.enumerate import brute_force_enumerate
from ..exact.ladder import ladder_height_pmf, renewal_function
from ..exact.records import record_count_distribution
from ..exact.spitzer import (
    build_series,
    corollary_ratio,
    exceedance_probs,
    r_infinity_law,
    series_c_rho,
    spitzer_exp,
)
from ..limits.mittag_leffler import (
    ks_distance,
    ml_cdf,
    ml_cdf_half,
    ml_laplace,
    ml_moment,
    ml_moment_ratio,
)
from ..models.steps import (
    LatticeStepLaw,
    make_bernoulli_walk,
    make_gaussian,
    make_lattice,
    make_left_continuous,
    make_pareto_wait,
)
from ..utils.config import get_settings
from ..utils.errors import AcceptanceFailure, RecordLabError
from ..utils.logger import get_logger
from ..walk.montecarlo import empirical_r_infinity, monte_carlo
from .registry import CheckResult, VerifyContext, registry

logger = get_logger(__name__)

FAST = ["fast", "full"]
# Gaver-Stehfest noise floor for monotonicity of the inverted CDF
MONOTONE_SLACK = 1e-6


def identity_laws() -> List[LatticeStepLaw]:
    """Small-support lattice laws used by the enumeration oracles."""
    return [
        make_bernoulli_walk(0.5),
        make_bernoulli_walk(1.0 / 3.0),
        make_left_continuous(0.5, 0.5, max_support=1),
        make_lattice({-1: 0.4, 0: 0.2, 2: 0.4}, name="three_point"),
    ]


def _indicator_probs(law: LatticeStepLaw, n: int) -> Dict[str, float]:
    """P of the four path events behind the ladder identities, one enumeration."""

    def code(cols, length):
        return (
            (cols["last_max_pos"] == length).astype(np.int64)
            + 2 * (cols["n_nonneg"] == length)
            + 4 * (cols["first_max_pos"] == length)
            + 8 * (cols["n_pos"] == length)
        )

    pmf = brute_force_enumerate(law, n, statistic=code).pmf
    keys = ("last_max_at_end", "all_nonneg", "first_max_at_end", "all_positive")
    probs = dict.fromkeys(keys, 0.0)
    for value, p in pmf.items():
        v = int(value)
        for bit, key in enumerate(probs):
            if v >> bit & 1:
                probs[key] += p
    return probs


@registry.register(
    "spitzer_identity",
    "a_n against P(L_{n,n} = n) by enumeration",
    ["spitzer"] + FAST,
)
def check_spitzer_identity(ctx: VerifyContext) -> CheckResult:
    n_max = int(ctx.param("spitzer_identity", "n_max", 14))
    tol = float(ctx.param("spitzer_identity", "tol", 1e-10))
    metrics: Dict[str, Any] = {}
    worst = 0.0
    for law in identity_laws():
        q, q_strict = exceedance_probs(law, n_max)
        a = spitzer_exp(q, n_max)
        a_strict = spitzer_exp(q_strict, n_max)
        diff = 0.0
        for n in range(1, n_max + 1):
            probs = _indicator_probs(law, n)
            diff = max(
                diff,
                abs(a[n] - probs["last_max_at_end"]),
                abs(a_strict[n] - probs["first_max_at_end"]),
            )
        metrics[law.name] = {"max_abs_diff": diff}
        worst = max(worst, diff)
    return CheckResult("spitzer_identity", worst <= tol, metrics, {"abs": tol})


@registry.register(
    "sparre_andersen",
    "P(L_{n,n}=n) = P(N_n=n) and P(L_{n,0}=n) = P(N+_n=n)",
    ["spitzer"] + FAST,
)
def check_sparre_andersen(ctx: VerifyContext) -> CheckResult:
    n_max = int(ctx.param("sparre_andersen", "n_max", 14))
    tol = float(ctx.param("sparre_andersen", "tol", 1e-12))
    metrics: Dict[str, Any] = {}
    worst = 0.0
    for law in identity_laws():
        diff = 0.0
        for n in range(1, n_max + 1):
            p = _indicator_probs(law, n)
            diff = max(
                diff,
                abs(p["last_max_at_end"] - p["all_nonneg"]),
                abs(p["first_max_at_end"] - p["all_positive"]),
            )
        metrics[law.name] = {"max_abs_diff": diff}
        worst = max(worst, diff)
    return CheckResult("sparre_andersen", worst <= tol, metrics, {"abs": tol})


@registry.register(
    "record_count_law",
    "exact R_n law against enumeration, weak and strong",
    ["exact"] + FAST,
)
def check_record_count_law(ctx: VerifyContext) -> CheckResult:
    n_max = int(ctx.param("record_count_law", "n_max", 12))
    tol = float(ctx.param("record_count_law", "tol", 1e-10))
    metrics: Dict[str, Any] = {}
    worst = 0.0
    for law in identity_laws():
        series = build_series(law, n_max)
        diffs = {"weak": 0.0, "strong": 0.0}
        for n in range(0, n_max + 1):
            for key, epoch, stat in (
                ("weak", series.epoch, "r_weak"),
                ("strong", series.strict_epoch, "r_strong"),
            ):
                exact = record_count_distribution(epoch, n)
                brute = brute_force_enumerate(law, n, statistic=stat).as_array(n + 2)
                diffs[key] = max(diffs[key], float(np.max(np.abs(exact - brute))))
        metrics[law.name] = diffs
        worst = max(worst, *diffs.values())
    return CheckResult("record_count_law", worst <= tol, metrics, {"abs": tol})


@registry.register(
    "corollary_asymptotic",
    "a_n Gamma(1/2) / (n^-1/2 C(1-1/n)) near 1",
    ["exact"] + FAST,
)
def check_corollary(ctx: VerifyContext) -> CheckResult:
    n = int(ctx.param("corollary_asymptotic", "n", 10_000))
    band = ctx.param("corollary_asymptotic", "band", [0.95, 1.05])
    series = build_series(make_bernoulli_walk(0.5), 40 * n, recurrence_horizon=n)
    ratio = corollary_ratio(series, n)
    c = series_c_rho(series, n)
    passed = band[0] <= ratio <= band[1]
    return CheckResult(
        "corollary_asymptotic",
        passed,
        {"n": n, "ratio": ratio, "c_rho": c.value, "a_n": float(series.a[n])},
        {"band": list(band)},
    )


@registry.register(
    "mittag_leffler_targets",
    "CDF inversion and transform against closed forms",
    ["limits"] + FAST,
)
def check_mittag_leffler(ctx: VerifyContext) -> CheckResult:
    tol = float(ctx.param("mittag_leffler_targets", "tol", 1e-4))
    grid = np.array([0.2, 0.5, 1.0, 2.0])
    inverted = ml_cdf(0.5, grid)
    cdf_gap = float(np.max(np.abs(inverted.values - ml_cdf_half(grid))))
    s = np.array([0.1, 1.0, 10.0])
    laplace_gap = float(max(abs(ml_laplace(0.5, v) - erfcx(v)) for v in s))
    monotone = ml_cdf(0.3, np.linspace(0.05, 6.0, 100)).values
    metrics = {
        "cdf_gap_rho_half": cdf_gap,
        "laplace_gap_rho_half": laplace_gap,
        "monotone_rho_0.3": bool(np.all(np.diff(monotone) >= -MONOTONE_SLACK)),
        "moment_2_rho_half": ml_moment(0.5, 2),
        "moment_ratio_rho_half": ml_moment_ratio(0.5),
    }
    passed = (
        cdf_gap <= tol
        and laplace_gap <= 1e-8
        and metrics["monotone_rho_0.3"]
        and abs(metrics["moment_2_rho_half"] - 2.0) <= 1e-12
        and abs(metrics["moment_ratio_rho_half"] - math.pi / 2.0) <= 1e-12
    )
    return CheckResult(
        "mittag_leffler_targets", passed, metrics, {"cdf_abs": tol, "laplace_abs": 1e-8}
    )


@registry.register(
    "large_deviations",
    "exact tail slopes against y Lambda*(1/y)",
    ["deviations"] + FAST,
)
def check_large_deviations(ctx: VerifyContext) -> CheckResult:
    grid = [int(n) for n in ctx.param("large_deviations", "n_grid", [100, 400, 1600])]
    gap_one = float(ctx.param("large_deviations", "gap_y1", 0.10))
    gap_y = float(ctx.param("large_deviations", "gap_y", 0.15))
    y = float(ctx.param("large_deviations", "y", 0.75))
    profile = RateProfile.from_series(build_series(make_bernoulli_walk(0.5), max(grid)))

    at_one = exact_tail_logslope(profile, 1.0, grid)["slope"].to_numpy()
    target_one = ldp_rate(profile, 1.0)
    monotone = bool(np.all(np.diff(at_one) > 0))
    final_one = abs(at_one[-1] / target_one - 1.0)

    at_y = exact_tail_logslope(profile, y, grid)["slope"].to_numpy()
    target_y = ldp_rate(profile, y)
    final_y = abs(at_y[-1] / target_y - 1.0)
    min_second = lambda_convexity(profile)
    convex = min_second >= -1e-9
    metrics = {
        "n_grid": grid,
        "slopes_y1": at_one,
        "rate_y1": target_one,
        "log2": math.log(2.0),
        "monotone_y1": monotone,
        "final_gap_y1": final_one,
        "y": y,
        "slopes_y": at_y,
        "rate_y": target_y,
        "final_gap_y": final_y,
        "min_lambda_second": min_second,
        "convex": convex,
    }
    passed = monotone and final_one <= gap_one and final_y <= gap_y and convex
    return CheckResult("large_deviations", passed, metrics, {"gap_y1": gap_one, "gap_y": gap_y})


@registry.register(
    "moderate_deviations",
    "MDP rate formula and the exact-tail factor-2 band",
    ["deviations"] + FAST,
)
def check_moderate_deviations(ctx: VerifyContext) -> CheckResult:
    n = int(ctx.param("moderate_deviations", "n", 10_000))
    ys = [float(v) for v in ctx.param("moderate_deviations", "y", [1.0, 2.0])]
    factor = float(ctx.param("moderate_deviations", "factor", 2.0))
    formula_ok = abs(mdp_rate(0.5, 1.0) - 0.25) <= 1e-15 and abs(mdp_rate(0.0, 1.0) - 1.0) <= 1e-15
    profile = RateProfile.from_series(
        build_series(make_bernoulli_walk(0.5), 40 * n, recurrence_horizon=n)
    )
    rows = [mdp_exact_logslope(profile, y, n) for y in ys]
    in_band = all(1.0 / factor <= r["ratio"] <= factor for r in rows)
    return CheckResult(
        "moderate_deviations",
        formula_ok and in_band,
        {"formula": formula_ok, "rows": rows},
        {"factor": factor},
    )


@registry.register(
    "lil_constant",
    "iterated-logarithm constant at rho = 1/2",
    ["deviations"] + FAST,
)
def check_lil_constant(ctx: VerifyContext) -> CheckResult:
    value = lil_constant(0.5)
    gap = abs(value - math.sqrt(math.pi))
    return CheckResult("lil_constant", gap <= 1e-12, {"value": value, "gap": gap}, {"abs": 1e-12})


@registry.register(
    "weak_convergence_half",
    "gaussian R_n / sqrt(n) against |N(0, 2)|",
    ["monte_carlo", "full"],
    stochastic=True,
)
def check_weak_convergence(ctx: VerifyContext) -> CheckResult:
    n = int(ctx.param("weak_convergence_half", "n", 10_000))
    reps = int(ctx.param("weak_convergence_half", "reps", 100_000))
    ks_tol = float(ctx.param("weak_convergence_half", "ks", 0.02))
    ratio_tol = float(ctx.param("weak_convergence_half", "ratio", 0.03))
    summary = monte_carlo(
        make_gaussian(), n, reps, ctx.seed, collect=["r_weak"], workers=ctx.workers
    )
    x = summary.column("r_weak") / math.sqrt(n)
    ks = ks_distance(x, ml_cdf_half)
    moments = summary.moments("r_weak", scale=math.sqrt(n))
    ratio_gap = abs(moments["moment_ratio"] / ml_moment_ratio(0.5) - 1.0)
    return CheckResult(
        "weak_convergence_half",
        ks <= ks_tol and ratio_gap <= ratio_tol,
        {"n": n, "reps": reps, "ks": ks, "moments": moments, "moment_ratio_gap": ratio_gap},
        {"ks": ks_tol, "ratio": ratio_tol},
    )


@registry.register(
    "left_continuous_normalization",
    "left-continuous beta = gamma = 1/2 against g_(2/3)",
    ["monte_carlo", "full"],
    stochastic=True,
)
def check_left_continuous(ctx: VerifyContext) -> CheckResult:
    n = int(ctx.param("left_continuous_normalization", "n", 100_000))
    reps = int(ctx.param("left_continuous_normalization", "reps", 10_000))
    mean_tol = float(ctx.param("left_continuous_normalization", "mean", 0.10))
    ratio_tol = float(ctx.param("left_continuous_normalization", "ratio", 0.05))
    law = make_left_continuous(
        0.5, 0.5, max_support=int(get_settings().get("engine.max_support", 2**20))
    )
    rho = 2.0 / 3.0
    scale = 3.0 ** (1.0 / 3.0) * n**rho
    summary = monte_carlo(law, n, reps, ctx.seed, collect=["r_weak"], workers=ctx.workers)
    moments = summary.moments("r_weak", scale=scale)
    mean_target = math.exp(-gammaln(1.0 + rho))
    ratio_target = ml_moment_ratio(rho)
    mean_gap = abs(moments["mean"] / mean_target - 1.0)
    ratio_gap = abs(moments["moment_ratio"] / ratio_target - 1.0)
    return CheckResult(
        "left_continuous_normalization",
        mean_gap <= mean_tol and ratio_gap <= ratio_tol,
        {
            "n": n,
            "reps": reps,
            "truncation_mass": law.truncation_mass,
            "moments": moments,
            "mean_target": mean_target,
            "ratio_target": ratio_target,
            "mean_gap": mean_gap,
            "ratio_gap": ratio_gap,
        },
        {"mean": mean_tol, "ratio": ratio_tol},
    )


def _total_variation(empirical: Dict[int, float], law, support_max: int) -> float:
    top = max(support_max, max(empirical) if empirical else 0)
    tv = 0.0
    covered = 0.0
    for k in range(law.start, top + 1):
        p = law.pmf(k)
        covered += p
        tv += abs(empirical.get(k, 0.0) - p)
    tv += max(1.0 - covered, 0.0)
    return 0.5 * tv


@registry.register(
    "geometric_r_infinity",
    "bernoulli(1/3) total record count against the geometric law",
    ["monte_carlo", "full"],
    stochastic=True,
)
def check_geometric(ctx: VerifyContext) -> CheckResult:
    reps = int(ctx.param("geometric_r_infinity", "reps", 100_000))
    tv_tol = float(ctx.param("geometric_r_infinity", "tv", 0.01))
    mean_tol = float(ctx.param("geometric_r_infinity", "mean", 0.02))
    law = make_bernoulli_walk(1.0 / 3.0)
    estimate = empirical_r_infinity(law, reps, ctx.seed, workers=ctx.workers)
    geometric = r_infinity_law(build_series(law, 2000))
    pmf = estimate.pmf()
    tv = _total_variation(pmf, geometric, max(pmf))
    mean_target = geometric.mean.value
    mean_gap = abs(estimate.mean() / mean_target - 1.0)
    return CheckResult(
        "geometric_r_infinity",
        estimate.certified and tv <= tv_tol and mean_gap <= mean_tol,
        {
            "reps": reps,
            "cap": estimate.cap,
            "tail_bound": estimate.tail_bound,
            "certified": estimate.certified,
            "tv": tv,
            "mean": estimate.mean(),
            "mean_target": mean_target,
            "parameter": geometric.parameter.to_dict(),
        },
        {"tv": tv_tol, "mean": mean_tol},
    )


@registry.register(
    "sigma_records",
    "V(sigma) R^sigma_n / (C sqrt(n)) against 2/sqrt(pi)",
    ["monte_carlo", "full"],
    stochastic=True,
)
def check_sigma_records(ctx: VerifyContext) -> CheckResult:
    n = int(ctx.param("sigma_records", "n", 10_000))
    reps = int(ctx.param("sigma_records", "reps", 100_000))
    sigma = float(ctx.param("sigma_records", "sigma", 1.5))
    tol = float(ctx.param("sigma_records", "mean", 0.10))
    law = make_bernoulli_walk(0.5)
    heights = ladder_height_pmf(law, 2000, max(int(math.ceil(sigma)) + 1, 1))
    v = renewal_function(heights, sigma)
    series = build_series(law, 40 * n, recurrence_horizon=1)
    c = series_c_rho(series, n).value
    key = f"r_sigma[{sigma:g}]"
    summary = monte_carlo(
        law,
        n,
        reps,
        ctx.seed,
        collect=["r_weak", "r_sigma[0]", key],
        sigmas=(0.0, sigma),
        workers=ctx.workers,
    )
    values = v * summary.column(key) / (c * math.sqrt(n))
    mean = float(values.mean())
    target = 2.0 / math.sqrt(math.pi)
    gap = abs(mean / target - 1.0)
    identity = bool(np.array_equal(summary.column("r_sigma[0]"), summary.column("r_weak")))
    return CheckResult(
        "sigma_records",
        gap <= tol and identity,
        {
            "n": n,
            "reps": reps,
            "sigma": sigma,
            "V": v,
            "c_rho": c,
            "mean": mean,
            "target": target,
            "gap": gap,
            "sigma_zero_identity": identity,
        },
        {"mean": tol},
    )


@registry.register(
    "lil_bracket",
    "running loglog statistic of gaussian walks inside the wide bracket",
    ["monte_carlo", "full"],
    stochastic=True,
)
def check_lil_bracket(ctx: VerifyContext) -> CheckResult:
    n = int(ctx.param("lil_bracket", "n", 10_000_000))
    reps = int(ctx.param("lil_bracket", "reps", 20))
    bracket = ctx.param("lil_bracket", "bracket", [0.5, 2.5])
    law = make_gaussian()
    profile = RateProfile.from_series(build_series(law, 64))
    frame = lil_running_statistic(law, profile, n, reps, ctx.seed, workers=ctx.workers)
    constant = lil_constant(0.5)
    median = float(frame["statistic"].median())
    lo, hi = bracket[0] * constant, bracket[1] * constant
    return CheckResult(
        "lil_bracket",
        lo <= median <= hi,
        {
            "n": n,
            "reps": reps,
            "median": median,
            "max": float(frame["statistic"].max()),
            "constant": constant,
        },
        {"bracket": [lo, hi]},
    )


@registry.register(
    "ctrw_scaling",
    "gaussian jumps with pareto(0.6) waits: mean growth and moment ratios",
    ["monte_carlo", "full"],
    stochastic=True,
)
def check_ctrw(ctx: VerifyContext) -> CheckResult:
    horizons = [float(t) for t in ctx.param("ctrw_scaling", "horizons", [1e4, 1e5])]
    reps = int(ctx.param("ctrw_scaling", "reps", 10_000))
    alpha = float(ctx.param("ctrw_scaling", "alpha", 0.6))
    mean_tol = float(ctx.param("ctrw_scaling", "mean", 0.15))
    ratio_tol = float(ctx.param("ctrw_scaling", "ratio", 0.07))
    config = CTRWConfig(
        make_gaussian(), make_pareto_wait(alpha), horizons, reps, ctx.seed, ctx.workers or 0
    )
    result = simulate_ctrw(config)
    diag = scaling_check(
        result.at(horizons[0]), result.at(horizons[-1]), alpha * 0.5, horizons[0], horizons[-1]
    )
    passed = (
        result.composition_holds
        and result.nondecreasing
        and diag["mean_ratio_error"] <= mean_tol
        and diag["moment_ratio_error_t1"] <= ratio_tol
        and diag["moment_ratio_error_t2"] <= ratio_tol
    )
    return CheckResult(
        "ctrw_scaling",
        passed,
        {
            "reps": reps,
            "composition": result.composition_holds,
            "nondecreasing": result.nondecreasing,
            "diagnostics": diag,
        },
        {"mean": mean_tol, "ratio": ratio_tol},
    )


@registry.register(
    "determinism",
    "identical seeds give identical outputs across worker counts",
    ["determinism", "fast", "full"],
    stochastic=True,
)
def check_determinism(ctx: VerifyContext) -> CheckResult:
    reps = int(ctx.param("determinism", "reps", 600))
    n = int(ctx.param("determinism", "n", 500))
    law = make_bernoulli_walk(0.5)
    texts = []
    for workers in (1, 2):
        frame = monte_carlo(law, n, reps, ctx.seed, sigmas=(1.5,), workers=workers).to_frame()
        ctrw = simulate_ctrw(
            CTRWConfig(law, make_pareto_wait(0.6), [100.0, 1000.0], reps, ctx.seed, workers)
        ).to_frame()
        texts.append(frame.to_csv(index=False) + ctrw.to_csv(index=False))
    same = texts[0] == texts[1]
    return CheckResult("determinism", same, {"reps": reps, "n": n, "identical": same}, {})


def run_check(name: str, ctx: VerifyContext) -> CheckResult:
    info = registry.get_check(name)
    if info is None:
        raise AcceptanceFailure(f"unknown check {name!r}")
    logger.info("verify: running %s", name)
    try:
        return info.func(ctx)
    except RecordLabError as e:
        logger.error("verify: %s raised %s", name, e)
        return CheckResult(name, False, error=f"{type(e).__name__}: {e}")


def run_suite(
    suite: str,
    seed: int,
    workers: Optional[int] = None,
    overrides: Optional[Dict[str, Any]] = None,
    only: Optional[List[str]] = None,
) -> Dict[str, Any]:
    """Run every check of a suite and return the JSON-ready report."""
    ctx = VerifyContext(seed=seed, workers=workers, overrides=overrides or {})
    checks = registry.suite(suite)
    if only:
        checks = [c for c in checks if c.name in only]
    results = [run_check(info.name, ctx) for info in checks]
    return {
        "suite": suite,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "checks": [r.to_dict() for r in results],
    }


def require_pass(report: Dict[str, Any]) -> Tuple[bool, List[str]]:
    """(passed, failing names); raises AcceptanceFailure when anything failed."""
    failing = [c["name"] for c in report["checks"] if not c["passed"]]
    if failing:
        raise AcceptanceFailure(f"suite {report['suite']!r} failed: {', '.join(failing)}")
    return True, failing
