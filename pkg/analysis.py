import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from src.quantum.algebra import AlgebraSpec, Block, random_state
from src.quantum.divergence import (
    CATALOG_NAMES,
    ConvexFunctionSpec,
    Route,
    agree,
    catalog,
    delta,
    quantum_f_div,
    quantum_f_div_direct,
    quantum_f_div_ns,
    relative_delta,
    umegaki_relative_entropy,
)
from src.quantum.errors import DivergenceError, ParameterOutOfRange
from src.quantum.extreal import PLUS_INF, ZERO, ExtReal
from src.quantum.nsdist import ns_distributions, support_defects_direct
from src.quantum.tolerances import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)

MARGINAL_TOL = 1e-10   # |sum fphi * nu - 1|
DEFECT_TOL = 1e-9      # NS defects vs projection defects
JENSEN_SLACK = 1e-9    # value >= f(1) - slack
ROUTES = {"ns": (Route.NS,), "direct": (Route.DIRECT,), "both": (Route.NS, Route.DIRECT)}


def text(x):
    return ExtReal.of(x).to_text()


def result_fields(result):
    return {
        "value": result.value.to_text(),
        "term_main": result.term_main.to_text(),
        "term_f0": result.term_f0.to_text(),
        "term_fpinf": result.term_fpinf.to_text(),
    }


def resolve_functions(names, alpha=None):
    """Catalog entries for the requested names; `all` expands to the whole catalog."""
    if not names or list(names) == ["all"]:
        names = CATALOG_NAMES
    return [catalog(n, alpha if n == "power" else None) for n in names]


# --- PETZ-RENYI (derived from the convex machinery) ---

def _neg_power(alpha):
    return ConvexFunctionSpec(f"neg-power({alpha:g})", lambda t: -(t ** alpha), ZERO, ZERO, parameter=alpha)


def petz_renyi(spec, phi, omega, alpha, route=Route.NS, *, tol=DEFAULT_TOLERANCES):
    """(1 / (alpha - 1)) ln Q_alpha for alpha in (0, 1) or (1, 2]."""
    alpha = float(alpha)
    if 1 < alpha <= 2:
        q = quantum_f_div(spec, phi, omega, catalog("power", alpha), route, tol=tol).value
        if q.infinite:
            return PLUS_INF
    elif 0 < alpha < 1:
        # -t^alpha is convex; Q_alpha = -S_{-t^alpha} is finite and >= 0
        q = ExtReal(max(-quantum_f_div(spec, phi, omega, _neg_power(alpha), route, tol=tol).value.value, 0.0))
    else:
        raise ParameterOutOfRange(f"Petz-Renyi order must lie in (0, 1) or (1, 2], got {alpha!r}")
    if q.value <= 0:
        return PLUS_INF
    return ExtReal(math.log(q.value) / (alpha - 1))


# --- 1. SINGLE PROBLEM (compute) ---

def run_divergence_analysis(spec, phi, omega, functions, *, route="both", tol=DEFAULT_TOLERANCES,
                            renyi=None, atoms=False):
    """
    Computes the requested divergences on one problem and packages a report.
    """
    routes = ROUTES[route]
    ns = ns_distributions(spec, phi, omega, tol=tol)
    results = []
    violated = False

    for f in functions:
        entry = {"divergence": f.label, "f_at_one": text(f.at_one()), "routes": {}}
        values = {}
        for r in routes:
            if r is Route.NS:
                res = quantum_f_div_ns(spec, phi, omega, f, tol=tol, ns=ns)
            else:
                res = quantum_f_div_direct(spec, phi, omega, f, tol=tol)
            values[r] = res.value
            entry["routes"][r.value] = result_fields(res)
        if len(routes) == 2:
            a, b = values[Route.NS], values[Route.DIRECT]
            entry["delta"] = delta(a, b).to_text()
            entry["relative_delta"] = relative_delta(a, b).to_text()
            entry["agreement"] = agree(a, b, tol.agreement)
            violated = violated or not entry["agreement"]
        if f.name == "relative-entropy":
            entry["umegaki"] = umegaki_relative_entropy(spec, phi, omega, tol=tol).to_text()
        results.append(entry)

    direct_defects = support_defects_direct(spec, phi, omega, tol=tol)
    p_sum, q_sum = ns.marginal_sums()
    report = {
        "command": "compute",
        "algebra": [{"dim": d, "weight": w} for d, w in spec.blocks],
        "results": results,
        "support_defects": {
            "ns": [text(ns.defect_phi_support), text(ns.defect_omega_support)],
            "direct": [text(direct_defects[0]), text(direct_defects[1])],
        },
        "marginal_sums": [text(p_sum), text(q_sum)],
        "metadata": {"route": route, "tolerances": tol.as_dict()},
        "status": "violation" if violated else "ok",
    }

    if renyi is not None:
        report["renyi"] = {"alpha": float(renyi)}
        for r in routes:
            report["renyi"][r.value] = petz_renyi(spec, phi, omega, renyi, r, tol=tol).to_text()

    if atoms:
        frame = ns.to_frame()
        report["atoms"] = [
            {"block": int(row.block), "i": int(row.i), "j": int(row.j), "nu": text(row.nu),
             "fphi": text(row.fphi), "fomega": text(row.fomega), "overlap": text(row.overlap)}
            for row in frame.itertuples(index=False)
        ]
    return report


# --- 2. RANDOM INSTANCES ---

@dataclass(frozen=True)
class TrialConfig:
    trials: int = 500
    seed: int = 0
    max_blocks: int = 3
    max_dim: int = 4
    weight_range: Tuple[float, float] = (0.5, 2.0)
    ranks: str = "mixed"
    alpha: Optional[float] = None
    tol: float = DEFAULT_TOLERANCES.agreement
    jobs: int = 1

    def as_dict(self):
        d = asdict(self)
        d["weight_range"] = list(self.weight_range)
        d.pop("jobs")
        return d


def random_algebra(rng, max_blocks, max_dim, weight_range):
    n = int(rng.integers(1, max_blocks + 1))
    dims = rng.integers(1, max_dim + 1, size=n)
    weights = rng.uniform(weight_range[0], weight_range[1], size=n)
    return AlgebraSpec(tuple(Block(int(d), float(w)) for d, w in zip(dims, weights)))


def random_rank_profile(rng, spec, policy):
    """None (full rank) or a per-block rank list for the `mixed` policy."""
    if policy == "full" or rng.random() < 0.5:
        return None
    ranks = [int(rng.integers(0, d + 1)) for d in spec.dims]
    if not any(ranks):
        ranks[int(rng.integers(len(ranks)))] = 1
    return ranks


def draw_instance(config, index, policy=None):
    """(spec, phi, omega) for one trial; depends only on (seed, index)."""
    rng = np.random.default_rng([config.seed, index])
    spec = random_algebra(rng, config.max_blocks, config.max_dim, config.weight_range)
    policy = policy or config.ranks
    phi = random_state(spec, int(rng.integers(2 ** 32)), random_rank_profile(rng, spec, policy))
    omega = random_state(spec, int(rng.integers(2 ** 32)), random_rank_profile(rng, spec, policy))
    return spec, phi, omega


def _run_trials(config, trial_fn):
    indices = range(config.trials)
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(trial_fn, indices))
    return [trial_fn(i) for i in indices]


# --- 3. MAIN-THEOREM VERIFICATION (verify) ---

def verify_trial(config, index, functions):
    spec, phi, omega = draw_instance(config, index)
    failures = []
    checks = 0

    def fail(check, **details):
        failures.append({"trial": index, "check": check, **details})

    try:
        ns = ns_distributions(spec, phi, omega)
        p_sum, q_sum = ns.marginal_sums()
        checks += 1
        if max(abs(p_sum - 1), abs(q_sum - 1)) > MARGINAL_TOL:
            fail("normalization", p_sum=text(p_sum), q_sum=text(q_sum))

        direct_defects = support_defects_direct(spec, phi, omega)
        checks += 1
        ns_defects = (ns.defect_phi_support, ns.defect_omega_support)
        if max(abs(a - b) for a, b in zip(ns_defects, direct_defects)) > DEFECT_TOL:
            fail("support-defects", ns=[text(x) for x in ns_defects], direct=[text(x) for x in direct_defects])

        for f in functions:
            a = quantum_f_div_ns(spec, phi, omega, f, ns=ns).value
            b = quantum_f_div_direct(spec, phi, omega, f).value
            checks += 2
            if not agree(a, b, config.tol):
                fail("agreement", divergence=f.label, ns=a.to_text(), direct=b.to_text())
            floor = f.at_one() - JENSEN_SLACK
            if any(v.is_finite and v.value < floor for v in (a, b)):
                fail("jensen", divergence=f.label, ns=a.to_text(), direct=b.to_text())
    except DivergenceError as e:
        logger.warning("trial %d raised %s", index, e)
        fail("error", message=str(e))

    logger.debug("trial %d: dims %s, %d failures", index, spec.dims, len(failures))
    return {"index": index, "dims": list(spec.dims), "checks": checks, "failures": failures}


def summarize(records):
    """Per-check failure counts as a DataFrame."""
    rows = [f for r in records for f in r["failures"]]
    if not rows:
        return pd.DataFrame(columns=["check", "failures"])
    frame = pd.DataFrame(rows)
    return frame.groupby("check").size().rename("failures").reset_index()


def run_verification(config):
    """
    Randomized check of the NS/direct equality, normalization, defects and Jensen bound.
    """
    functions = resolve_functions(None, config.alpha)
    logger.info("--- verifying %d trials (seed %d) ---", config.trials, config.seed)
    records = _run_trials(config, lambda i: verify_trial(config, i, functions))

    failures = [f for r in records for f in r["failures"]]
    by_check = summarize(records)
    return {
        "command": "verify",
        "metadata": {**config.as_dict(), "divergences": [f.label for f in functions]},
        "summary": {
            "trials": config.trials,
            "checks": int(sum(r["checks"] for r in records)),
            "failures": len(failures),
            "by_check": {row.check: int(row.failures) for row in by_check.itertuples(index=False)},
        },
        "failures": failures,
        "status": "violation" if failures else "ok",
    }


# --- 4. DIVERGENCE INEQUALITIES (inequalities) ---

def inequality_trial(config, index):
    spec, phi, omega = draw_instance(config, index, policy="full")
    rel = quantum_f_div_ns(spec, phi, omega, catalog("relative-entropy")).value
    chi2 = quantum_f_div_ns(spec, phi, omega, catalog("chi-squared")).value
    tv = quantum_f_div_ns(spec, phi, omega, catalog("total-variation")).value

    violations = []
    if chi2.is_finite and rel.is_finite:
        bounds = {
            "log-chi-squared": math.log1p(chi2.value),
            "half-tv-plus-chi-squared": 0.5 * (tv.value + chi2.value),
        }
        for name, bound in bounds.items():
            if rel.value > bound + config.tol:
                violations.append({"trial": index, "inequality": name, "relative_entropy": rel.to_text(),
                                   "bound": text(bound)})
    elif not chi2.is_finite:
        logger.debug("trial %d: chi-squared is +inf, inequalities hold vacuously", index)
    else:
        violations.append({"trial": index, "inequality": "finite-relative-entropy",
                           "relative_entropy": rel.to_text(), "bound": chi2.to_text()})
    return {"index": index, "relative_entropy": rel.to_text(), "chi_squared": chi2.to_text(),
            "total_variation": tv.to_text(), "violations": violations}


def run_inequalities(config):
    """
    Checks D <= ln(1 + chi^2) and D <= (TV + chi^2) / 2 on random full-rank pairs.
    """
    logger.info("--- checking inequalities on %d trials (seed %d) ---", config.trials, config.seed)
    records = _run_trials(config, lambda i: inequality_trial(config, i))
    violations = [v for r in records for v in r["violations"]]
    return {
        "command": "inequalities",
        "metadata": {k: v for k, v in config.as_dict().items() if k in ("trials", "seed", "max_blocks", "max_dim",
                                                                      "weight_range", "tol")},
        "summary": {"trials": config.trials, "violations": len(violations)},
        "violations": violations,
        "status": "violation" if violations else "ok",
    }
