"""Command line front end: seeded, thread-count-independent experiment scans.

Usage: ``nck-lab <command> [--config file.toml] [--seed N] [--out path]
[--format json|csv] [--threads N] [--tolerance X]``.  Config files are TOML;
command-line flags override file values; NCK_THREADS supplies the default
thread count.
"""

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from .core import (Density, Element, MatrixTuple, TraceSpace, chi,
                   quasi_norm, random_density, random_element)
from .errors import ConfigInvalid
from .extrapolation import steps_diagnostic
from .holder import (harmonic_reproduce, kernel_quadrature, make_profile,
                     scan_constant, three_lines_check, AnalyticFamily)
from .maurey import LinearMapIntoLp, certificate_check, maurey_fit, normalize_map
from .mazur import holder_exponent_estimate, squares_lipschitz_check
from .reporting import Report, emit, matrix_to_pairs
from .systems import mixed_norm_exact_rademacher
from .triple import certified_upper_bound, triple_norm_upper

COMMANDS = ("khintchine-scan", "holder-scan", "triple-norm",
            "extrapolation-diag", "maurey-fit", "mazur-scan",
            "kernels-selftest")

DEFAULTS = {
    "khintchine-scan": {"qs": [0.5, 1.0, 2.0], "dims": [2, 4], "n_terms": 3,
                        "instances": 50, "optimize": False},
    "holder-scan": {"ps": [0.5], "ss": [2.0, math.inf], "thetas": [0.25, 0.5, 0.75],
                    "r_factor": 0.9, "dims": [2, 4, 8], "instances": 100},
    "triple-norm": {"qs": [0.5, 1.0, 2.0], "dim": 3, "n_terms": 3,
                    "instances": 10, "restarts": 3},
    "extrapolation-diag": {"p": 0.5, "q": 1.5, "dim": 3, "n_terms": 3,
                           "instances": 3, "restarts": 2, "samples": 300},
    "maurey-fit": {"ps": [0.5, 0.75], "dim": 3, "domain_dim": 3,
                   "instances": 5, "pool_size": 16, "iterations": 60},
    "mazur-scan": {"pairs_grid": [[1.0, 2.0], [2.0, 1.0], [0.5, 1.0]],
                   "dim": 4, "pairs": 64, "instances": 100},
    "kernels-selftest": {"omegas": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
                         "exponents": [0.1, 0.3, 1.0]},
}


def default_threads():
    env = os.environ.get("NCK_THREADS")
    return int(env) if env else 1


def load_config(command, path=None, overrides=None):
    if command not in COMMANDS:
        raise ConfigInvalid("unknown command %r" % (command,))
    cfg = {"command": command, "seed": 0, "format": "json", "out": None,
           "threads": default_threads(), "tolerance": None}
    cfg.update(DEFAULTS[command])
    if path:
        with open(path, "rb") as fh:
            try:
                data = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigInvalid("config parse error: %s" % exc)
        section = data.get(command, {})
        for scope in (data, section):
            for k, v in scope.items():
                if not isinstance(v, dict):
                    cfg[k] = v
    for k, v in (overrides or {}).items():
        if v is not None:
            cfg[k] = v
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    if cfg.get("seed") is None:
        raise ConfigInvalid("seed: required")
    if cfg.get("format") not in ("json", "csv"):
        raise ConfigInvalid("format: must be json or csv")
    for key in ("thetas",):
        for v in cfg.get(key, []):
            if not (0 < v < 1):
                raise ConfigInvalid("%s: value %g outside (0, 1)" % (key, v))
    for key in ("ps", "qs"):
        for v in cfg.get(key, []):
            if v <= 0:
                raise ConfigInvalid("%s: value %g must be positive" % (key, v))
    if cfg.get("instances", 1) < 1:
        raise ConfigInvalid("instances: must be >= 1")


def _parallel_map(fn, items, threads):
    """Order-preserving map; results identical for any thread count."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _cell(cell_id, seed, runtime_ms, constant, std_error=0.0, p="", q="", s="",
          theta="", R="", dim="", n_terms="", **extra):
    cell = {"cell_id": cell_id, "p": p, "q": q, "s": s, "theta": theta,
            "R": R, "dim": dim, "n_terms": n_terms, "constant": constant,
            "std_error": std_error, "seed": seed, "runtime_ms": runtime_ms}
    cell.update(extra)
    return cell


def _random_tuple(space, n, rng):
    return MatrixTuple(tuple(random_element(space, rng) for _ in range(n)))


def _cell_seed(master, index):
    return int(np.random.SeedSequence([int(master), int(index)]).generate_state(1)[0])


# ---------------------------------------------------------------------------
# command implementations


def run_khintchine_scan(cfg):
    cells = []
    combos = [(q, d) for q in cfg["qs"] for d in cfg["dims"]]

    def work(args):
        idx, (q, dim) = args
        t0 = time.perf_counter()
        seed = _cell_seed(cfg["seed"], idx)
        rng = np.random.default_rng(seed)
        space = TraceSpace.standard(dim)
        beta_max = 0.0
        witness = None
        easy_ok = True
        for _ in range(cfg["instances"]):
            x = _random_tuple(space, cfg["n_terms"], rng)
            s_norm = mixed_norm_exact_rademacher(x, q).value
            if cfg.get("optimize") and q <= 2:
                v = triple_norm_upper(x, q, restarts=2, seed=seed).value
            elif q <= 2:
                v = certified_upper_bound(x, q).value
            else:
                from .triple import row_column_value
                v = row_column_value(x, q).value
            if s_norm > chi(q) * v + 1e-8:
                easy_ok = False
            beta = v / s_norm if s_norm > 0 else 0.0
            if beta > beta_max:
                beta_max = beta
                witness = [matrix_to_pairs(m.entries) for m in x]
        ms = 1000.0 * (time.perf_counter() - t0)
        return _cell("khintchine-q%g-d%d" % (q, dim), seed, ms, beta_max,
                     q=q, dim=dim, n_terms=cfg["n_terms"],
                     easy_bound_ok=easy_ok, witness=witness)

    cells = _parallel_map(work, list(enumerate(combos)), cfg["threads"])
    return cells


def run_holder_scan(cfg):
    profiles = []
    for p in cfg["ps"]:
        for s in cfg["ss"]:
            for theta in cfg["thetas"]:
                profiles.append(make_profile(p, s, theta, R=cfg["r_factor"] * p))
    reports = scan_constant(profiles, cfg["dims"], cfg["instances"], seed=cfg["seed"])
    cells = []
    for i, rep in enumerate(reports):
        prof = rep["profile"]
        cells.append(_cell(
            "holder-%d" % i, cfg["seed"], 0.0, rep["report"].value,
            p=prof.p, q=prof.q, s=(prof.s if math.isfinite(prof.s) else "inf"),
            theta=prof.theta, R=prof.R,
            per_dim_max={str(k): v for k, v in rep["per_dim_max"].items()},
            dimension_growth_flag=rep["dimension_growth_flag"]))
    return cells


def run_triple_norm(cfg):
    cells = []
    space = TraceSpace.standard(cfg["dim"])
    for i, q in enumerate(cfg["qs"]):
        t0 = time.perf_counter()
        seed = _cell_seed(cfg["seed"], i)
        rng = np.random.default_rng(seed)
        worst_rel = 0.0
        values = []
        for _ in range(cfg["instances"]):
            x = _random_tuple(space, cfg["n_terms"], rng)
            if q <= 2:
                res = triple_norm_upper(x, q, restarts=cfg["restarts"], seed=seed)
            else:
                from .triple import row_column_value
                res = row_column_value(x, q)
            values.append(res.value)
            if q == 2:
                target = math.sqrt(sum(quasi_norm(xk, 2) ** 2 for xk in x))
                worst_rel = max(worst_rel, abs(res.value - target) / target)
        ms = 1000.0 * (time.perf_counter() - t0)
        cells.append(_cell("triple-q%g" % q, seed, ms, float(np.mean(values)),
                           q=q, dim=cfg["dim"], n_terms=cfg["n_terms"],
                           q2_worst_relative_error=worst_rel if q == 2 else ""))
    return cells


def run_extrapolation_diag(cfg):
    from .systems import OrthonormalSystem
    cells = []
    space = TraceSpace.standard(cfg["dim"])
    system = OrthonormalSystem("rademacher", cfg["n_terms"])
    for i in range(cfg["instances"]):
        t0 = time.perf_counter()
        seed = _cell_seed(cfg["seed"], i)
        rng = np.random.default_rng(seed)
        x = _random_tuple(space, cfg["n_terms"], rng)
        rep = steps_diagnostic(x, cfg["p"], cfg["q"], system,
                               budgets={"restarts": cfg["restarts"],
                                        "samples": cfg["samples"]},
                               seed=seed)
        ms = 1000.0 * (time.perf_counter() - t0)
        cells.append(_cell("extrap-%d" % i, seed, ms, rep["step3_ratio"],
                           p=cfg["p"], q=cfg["q"], dim=cfg["dim"],
                           n_terms=cfg["n_terms"], **rep))
    return cells


def run_maurey_fit(cfg):
    cells = []
    idx = 0
    for p in cfg["ps"]:
        for i in range(cfg["instances"]):
            t0 = time.perf_counter()
            seed = _cell_seed(cfg["seed"], idx)
            idx += 1
            rng = np.random.default_rng(seed)
            space = TraceSpace.standard(cfg["dim"])
            images = _random_tuple(space, cfg["domain_dim"], rng)
            u = normalize_map(LinearMapIntoLp(cfg["domain_dim"], images, p),
                              seed=seed)
            fit = maurey_fit(u, pool_size=cfg["pool_size"],
                             iterations=cfg["iterations"], seed=seed)
            sound = certificate_check(u, fit["measure"], fit["C_certified"],
                                      samples=500, seed=seed)
            ms = 1000.0 * (time.perf_counter() - t0)
            cells.append(_cell("maurey-p%g-%d" % (p, i), seed, ms,
                               fit["C_certified"], p=p, dim=cfg["dim"],
                               n_terms=cfg["domain_dim"], certificate_sound=sound,
                               atom_count=len(fit["measure"].atoms)))
    return cells


def run_mazur_scan(cfg):
    cells = []
    for i, (p, q) in enumerate(cfg["pairs_grid"]):
        t0 = time.perf_counter()
        seed = _cell_seed(cfg["seed"], i)
        est = holder_exponent_estimate(p, q, cfg["dim"], pairs=cfg["pairs"], seed=seed)
        rng = np.random.default_rng(seed)
        space = TraceSpace.standard(cfg["dim"])
        sq_ok = True
        for _ in range(cfg["instances"]):
            g = random_element(space, rng)
            h = random_element(space, rng)
            g = (1.0 / quasi_norm(g, p)) * g
            h = (1.0 / quasi_norm(h, p)) * h
            if not squares_lipschitz_check(g, h, p)["holds"]:
                sq_ok = False
        ms = 1000.0 * (time.perf_counter() - t0)
        cells.append(_cell("mazur-p%g-q%g" % (p, q), seed, ms, est.exponent,
                           p=p, q=q, dim=cfg["dim"],
                           holder_constant=est.constant,
                           regression_r2=est.regression_r2,
                           squares_bound_ok=sq_ok))
    return cells


def run_kernels_selftest(cfg):
    cells = []
    worst_mass = 0.0
    for omega in cfg["omegas"]:
        for k in (0, 1):
            _, w, _ = kernel_quadrature(k, omega)
            worst_mass = max(worst_mass, abs(float(np.sum(w)) - 1.0))
    cells.append(_cell("kernel-mass", cfg["seed"], 0.0, worst_mass,
                       description="max |integral Q^k_omega - 1|"))
    worst_rep = 0.0
    for a in cfg["exponents"]:
        for theta in (0.25, 0.5, 0.75):
            got = harmonic_reproduce(lambda z: np.exp(a * z), theta)
            worst_rep = max(worst_rep, abs(got - np.exp(a * theta)))
    cells.append(_cell("harmonic-reproduction", cfg["seed"], 0.0, worst_rep,
                       description="max |quadrature - exp(a theta)|"))
    rng = np.random.default_rng(cfg["seed"])
    space = TraceSpace.standard(3)
    f = random_density(space, rng)
    fam = AnalyticFamily(f=f.element, terms=((Element.identity(space), 0.0, 1.0,
                                              Element.identity(space)),))
    res = three_lines_check(fam, 0.5, 2.0, 0.5)
    cells.append(_cell("three-lines-smoke", cfg["seed"], 0.0,
                       res["rhs"] - res["lhs"], holds=res["holds"]))
    if worst_mass > 1e-8 or worst_rep > 1e-6 or not res["holds"]:
        raise RuntimeError("kernels selftest failed")
    return cells


RUNNERS = {
    "khintchine-scan": run_khintchine_scan,
    "holder-scan": run_holder_scan,
    "triple-norm": run_triple_norm,
    "extrapolation-diag": run_extrapolation_diag,
    "maurey-fit": run_maurey_fit,
    "mazur-scan": run_mazur_scan,
    "kernels-selftest": run_kernels_selftest,
}


def run(cfg) -> Report:
    validate_config(cfg)
    cells = RUNNERS[cfg["command"]](cfg)
    echo = {k: ("inf" if isinstance(v, float) and math.isinf(v) else v)
            for k, v in cfg.items()}
    return Report(config=echo, cells=cells, library_version=__version__)


def build_parser():
    parser = argparse.ArgumentParser(prog="nck-lab",
                                     description="non-commutative Khintchine laboratory")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--tolerance", type=float, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {"seed": args.seed, "out": args.out, "format": args.format,
                 "threads": args.threads, "tolerance": args.tolerance}
    try:
        cfg = load_config(args.command, args.config, overrides)
        report = run(cfg)
    except ConfigInvalid as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except Exception as exc:  # invariant violations are fatal by contract
        print("error: %s" % exc, file=sys.stderr)
        return 1
    out = cfg.get("out")
    if out:
        emit(report, cfg["format"], out)
        print("wrote %s" % out)
    else:
        from .reporting import to_json
        print(to_json(report.to_document()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
