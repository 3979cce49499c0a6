"""Command line entry point: ``reciplab {stats,simulate,percolate,regress,synth}``.

Every option can also come from a JSON config file (``--config``); flags on
the command line win. A run's manifest stores the fully resolved config,
including the master seed, so ``--config <out>/manifest.json`` repeats it.
Exit status: 0 success, 2 bad input or configuration, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .bdsi import BDSIParams, ContagionNetwork, mean_coverage_curve, run_many, times_to_coverage
from .errors import LabError, ValidationError
from .graph import EdgeClass, classify, load_any_graph, reciprocity_stats, write_edges_csv, write_survey_csv
from .percolation import EARLY_WINDOW, Matching, PercolationPlan, delta_z, percolation_sweep
from .regression import COVARIATES, build_rows, load_records, ols_fit, write_estimates, write_records
from .stats import closeness_by_class, closeness_samples, default_grid, ecdf, kde, silverman_bandwidth, welch_t_test
from .synth import PLANTED_BETA, STUDY_PRESET, GraphGenSpec, OutcomeGenSpec, assign_buddies, community_labels, gen_graph, gen_outcomes

log = logging.getLogger("reciplab")

COLUMNS = {
    "stats.json": "n_edges, n_reciprocal, n_unilateral: logical edge counts; fraction_reciprocal; closeness summaries (n, mean, unbiased variance) per class; t-test (t, df, two-sided p)",
    "edges.csv": "u, v: pair; class: reciprocal|unilateral; direction: nominator of a unilateral edge; closeness_uv, closeness_vu: recorded scores",
    "ecdf.csv": "class; x: closeness score; F: fraction of the class sample <= x",
    "kde.csv": "class; x: grid point; density: Gaussian KDE value; bandwidth: kernel sd used",
    "curve.csv": "t: step; z_mean: mean infected count over runs; z_se: standard error of z_mean",
    "traces.csv": "run: run index; node: node id; infection_step: step of infection (0 for seeds)",
    "percolation.csv": "class: removed edge class; F: removal fraction; removed_count: logical edges removed; t; z_mean; z_se",
    "delta.csv": "F; removed_count; t; delta_z: z_mean(unilateral removal) - z_mean(reciprocal removal); se: sqrt of summed arm variances",
    "summary.json": "simulate: mean_T and frac_reached for the target coverage, final_z_mean; percolate: class sizes, per-point mean_T/frac_reached, early-window delta_z mean and se",
    "estimates.csv": "name: covariate; coef: OLS coefficient; se: classical standard error; ci_low, ci_high: confidence interval; p: two-sided p-value",
    "survey.csv": "src, dst: nomination; closeness: score 0-7",
    "communities.csv": "node; community: planted block label",
    "records.csv": "ego; alter1, alter2: buddies; activity_p1, activity_p2: mean daily activity before/after",
}


# --- helpers -------------------------------------------------------------------


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x) -> str:
    return repr(float(x))


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _names(text):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [str(v) for v in text]
    return [v.strip() for v in str(text).split(",") if v.strip()]


def _require_file(path):
    if path is None:
        raise ValidationError("missing required input path")
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"input file not found: {p}")
    return p


class Outputs:
    """Collects result files and writes them, then the manifest, atomically."""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str):
        self.files[name] = text

    def commit(self, manifest: dict):
        manifest["outputs"] = {
            n: hashlib.sha256(t.encode("utf-8")).hexdigest() for n, t in sorted(self.files.items())
        }
        manifest["columns"] = {n: COLUMNS[n] for n in sorted(self.files) if n in COLUMNS}
        for name, text in self.files.items():
            _atomic_write(self.out_dir / name, text)
        _atomic_write(self.out_dir / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


# --- defaults and config resolution ---------------------------------------------------

BDSI_DEFAULTS = {
    "p_rec": 0.10,
    "p_plus": 0.05,
    "p_minus": 0.02,
    "seed_count": 1,
    "seed_nodes": None,
    "horizon": 30,
    "stop_at_coverage": None,
    "target_coverage": 0.5,
}

DEFAULTS = {
    "stats": {"graph": None, "threshold": 2, "convention": "directed", "pooled": False, "bandwidth": "auto", "grid_points": 256},
    "simulate": {"graph": None, "threshold": 2, "runs": 1000, "traces": False, **BDSI_DEFAULTS},
    "percolate": {
        "graph": None,
        "threshold": 2,
        "fractions": [0.0, 0.2, 0.4, 0.6, 0.8],
        "classes": ["reciprocal", "unilateral"],
        "matching": "count",
        "reference_count": None,
        "replicates": 100,
        "runs_per_point": 10,
        "nested": True,
        **BDSI_DEFAULTS,
    },
    "regress": {
        "graph": None,
        "records": None,
        "threshold": 2,
        "covariates": list(COVARIATES),
        "intercept": True,
        "log_ratio": False,
        "level": 0.95,
    },
    "synth": {
        "n_nodes": STUDY_PRESET.n_nodes,
        "n_communities": STUDY_PRESET.n_communities,
        "intra_edge_prob": STUDY_PRESET.intra_edge_prob,
        "inter_edge_prob": STUDY_PRESET.inter_edge_prob,
        "reciprocity_intra": STUDY_PRESET.reciprocity_intra,
        "reciprocity_inter": STUDY_PRESET.reciprocity_inter,
        "subthreshold_prob": STUDY_PRESET.subthreshold_prob,
        "n_egos": 76,
        "tie_bias": 0.7,
        "beta": dict(PLANTED_BETA),
        "intercept": 1.0,
        "noise_sd": 0.05,
    },
}

RANDOMIZED = {"simulate", "percolate", "synth"}


def _load_config(path) -> dict:
    p = _require_file(path)
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: invalid JSON config ({exc.msg}, line {exc.lineno})") from None
    if not isinstance(obj, dict):
        raise ValidationError(f"{p}: config must be a JSON object")
    if "subcommand" in obj and "config" in obj:
        obj = obj["config"]
    return obj


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS[command]))
    if args.config is not None:
        file_cfg = _load_config(args.config)
        unknown = set(file_cfg) - set(cfg) - {"seed"}
        if unknown:
            raise ValidationError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(file_cfg)
    for key in list(cfg) + ["seed"]:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if command in RANDOMIZED:
        if cfg.get("seed") is None:
            cfg["seed"] = int(np.random.SeedSequence().entropy)
        cfg["seed"] = int(cfg["seed"])
    else:
        cfg.pop("seed", None)
    # normalize list-like values given as comma strings
    for key in ("fractions",):
        if key in cfg:
            cfg[key] = _floats(cfg[key])
    for key in ("classes", "covariates", "seed_nodes"):
        if key in cfg and cfg[key] is not None:
            cfg[key] = _names(cfg[key])
    if isinstance(cfg.get("beta"), str):
        cfg["beta"] = _parse_beta(cfg["beta"])
    return cfg


def _parse_beta(text: str) -> dict:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, val = part.partition("=")
        if not sep:
            raise ValidationError(f"beta entries look like name=value, got {part!r}")
        out[name.strip()] = float(val)
    return out


def _bdsi_params(cfg) -> BDSIParams:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params = BDSIParams(
            p_rec=float(cfg["p_rec"]),
            p_plus=float(cfg["p_plus"]),
            p_minus=float(cfg["p_minus"]),
            seed_count=int(cfg["seed_count"]),
            seed_nodes=tuple(cfg["seed_nodes"]) if cfg["seed_nodes"] else None,
            max_steps=int(cfg["horizon"]),
            stop_at_coverage=cfg["stop_at_coverage"],
        )
    for w in caught:
        log.warning("%s", w.message)
    return params


def _manifest(command, cfg, inputs) -> dict:
    return {
        "subcommand": command,
        "config": cfg,
        "master_seed": cfg.get("seed"),
        "version": __version__,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }


# --- subcommands -------------------------------------------------------------------


def cmd_stats(cfg, out: Outputs, threads: int) -> dict:
    path = _require_file(cfg["graph"])
    graph = load_any_graph(path, int(cfg["threshold"]))
    edges = classify(graph)
    report = reciprocity_stats(edges).as_dict()
    report["n_nodes"] = len(graph)
    report["threshold"] = graph.threshold
    report["closeness_convention"] = cfg["convention"]
    summaries = closeness_by_class(edges, cfg["convention"])
    report["closeness"] = {k: (vars(v) if v else None) for k, v in summaries.items()}
    samples = closeness_samples(edges, cfg["convention"])
    if len(samples["reciprocal"]) >= 2 and len(samples["unilateral"]) >= 2:
        tt = welch_t_test(samples["reciprocal"], samples["unilateral"], pooled=bool(cfg["pooled"]))
        report["t_test"] = {"form": "pooled" if cfg["pooled"] else "welch", **vars(tt)}
    else:
        report["t_test"] = None

    buf = io.StringIO()
    write_edges_csv(edges, buf)
    out.add("edges.csv", buf.getvalue())
    ecdf_rows, kde_rows = [], []
    for cls, values in samples.items():
        if not values:
            continue
        ecdf_rows += [(cls, _num(x), _num(f)) for x, f in ecdf(values)]
        if len(values) >= 2 and np.ptp(values) > 0:
            bw = silverman_bandwidth(values) if cfg["bandwidth"] == "auto" else float(cfg["bandwidth"])
            grid = default_grid(values, bw, int(cfg["grid_points"]))
            dens = kde(values, grid, bw)
            kde_rows += [(cls, _num(x), _num(d), _num(bw)) for x, d in zip(grid, dens)]
    out.add("ecdf.csv", _csv_text(("class", "x", "F"), ecdf_rows))
    out.add("kde.csv", _csv_text(("class", "x", "density", "bandwidth"), kde_rows))
    out.add("stats.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    return _manifest("stats", cfg, [path])


def cmd_simulate(cfg, out: Outputs, threads: int) -> dict:
    path = _require_file(cfg["graph"])
    graph = load_any_graph(path, int(cfg["threshold"]))
    params = _bdsi_params(cfg)
    runs = int(cfg["runs"])
    if runs < 1:
        raise ValidationError("runs must be positive")
    net = ContagionNetwork(graph)
    batch = run_many(net, params, runs, cfg["seed"], threads=threads)
    horizon = params.max_steps
    curve = mean_coverage_curve(batch, horizon)
    out.add("curve.csv", _curve_csv(curve))
    if cfg["traces"]:
        rows = []
        for r in range(len(batch)):
            step = batch.infection_step[r]
            rows += [(r, net.nodes[j], int(step[j])) for j in np.flatnonzero(step >= 0)]
        out.add("traces.csv", _csv_text(("run", "node", "infection_step"), rows))
    T = times_to_coverage(batch.z_matrix(horizon), net.n_nodes, float(cfg["target_coverage"]))
    reached = T >= 0
    summary = {
        "runs": runs,
        "n_nodes": net.n_nodes,
        "in_regime": params.in_regime,
        "target_coverage": cfg["target_coverage"],
        "mean_T": float(T[reached].mean()) if reached.any() else None,
        "frac_reached": float(reached.mean()),
        "final_z_mean": float(curve.mean[-1]),
    }
    out.add("summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return _manifest("simulate", cfg, [path])


def _curve_csv(curve) -> str:
    return _csv_text(("t", "z_mean", "z_se"), [(t, _num(m), _num(s)) for t, (m, s) in enumerate(zip(curve.mean, curve.se))])


def cmd_percolate(cfg, out: Outputs, threads: int) -> dict:
    path = _require_file(cfg["graph"])
    graph = load_any_graph(path, int(cfg["threshold"]))
    params = _bdsi_params(cfg)
    net = ContagionNetwork(graph)
    classes = [EdgeClass(c) for c in cfg["classes"]]
    if not classes:
        raise ValidationError("no edge classes selected")
    results = {}
    for cls in classes:
        plan = PercolationPlan(
            target_class=cls,
            fractions=tuple(cfg["fractions"]),
            bdsi=params,
            master_seed=cfg["seed"],
            matching=Matching(cfg["matching"]),
            runs_per_point=int(cfg["runs_per_point"]),
            replicates=int(cfg["replicates"]),
            reference_count=cfg["reference_count"],
            nested=bool(cfg["nested"]),
            target_coverage=float(cfg["target_coverage"]),
        )
        results[cls] = percolation_sweep(net, plan, threads=threads)
    rows = []
    summary = {"points": [], "class_sizes": next(iter(results.values())).class_sizes, "in_regime": params.in_regime}
    for cls, res in results.items():
        for p in res.points:
            for t, (m, s) in enumerate(zip(p.curve.mean, p.curve.se)):
                rows.append((cls.value, _num(p.fraction), p.removed_count, t, _num(m), _num(s)))
            summary["points"].append(
                {"class": cls.value, "F": p.fraction, "removed_count": p.removed_count, "mean_T": p.mean_T, "frac_reached": p.frac_reached}
            )
    out.add("percolation.csv", _csv_text(("class", "F", "removed_count", "t", "z_mean", "z_se"), rows))
    if EdgeClass.RECIPROCAL in results and EdgeClass.UNILATERAL in results:
        deltas = delta_z(results[EdgeClass.UNILATERAL], results[EdgeClass.RECIPROCAL])
        drows = []
        summary["early_window"] = list(EARLY_WINDOW)
        summary["delta_early"] = []
        for d in deltas:
            drows += [(_num(d.fraction), d.removed_count, t, _num(v), _num(s)) for t, (v, s) in enumerate(zip(d.delta, d.se))]
            summary["delta_early"].append({"F": d.fraction, "removed_count": d.removed_count, "mean": d.early_mean, "se": d.early_se})
        out.add("delta.csv", _csv_text(("F", "removed_count", "t", "delta_z", "se"), drows))
    out.add("summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return _manifest("percolate", cfg, [path])


def cmd_regress(cfg, out: Outputs, threads: int) -> dict:
    gpath = _require_file(cfg["graph"])
    rpath = _require_file(cfg["records"])
    graph = load_any_graph(gpath, int(cfg["threshold"]))
    records = load_records(rpath)
    rows = build_rows(graph, records, log_ratio=bool(cfg["log_ratio"]))
    est = ols_fit(rows, cfg["covariates"], intercept=bool(cfg["intercept"]), level=float(cfg["level"]))
    buf = io.StringIO()
    write_estimates(est, buf)
    out.add("estimates.csv", buf.getvalue())
    manifest = _manifest("regress", cfg, [gpath, rpath])
    manifest["assumptions"] = {
        "covariates_are_counts": True,
        "intercept": bool(cfg["intercept"]),
        "standard_errors": "classical (homoskedastic)",
        "outcome": "log(p2/p1)" if cfg["log_ratio"] else "p2/p1",
        "n_rows": len(rows),
    }
    return manifest


def cmd_synth(cfg, out: Outputs, threads: int) -> dict:
    seed = cfg["seed"]
    ss = np.random.SeedSequence(seed)
    g_seed, b_seed, o_seed = (int(s.generate_state(1)[0]) for s in ss.spawn(3))
    spec = GraphGenSpec(
        n_nodes=int(cfg["n_nodes"]),
        n_communities=int(cfg["n_communities"]),
        intra_edge_prob=float(cfg["intra_edge_prob"]),
        inter_edge_prob=float(cfg["inter_edge_prob"]),
        reciprocity_intra=float(cfg["reciprocity_intra"]),
        reciprocity_inter=float(cfg["reciprocity_inter"]),
        subthreshold_prob=float(cfg["subthreshold_prob"]),
        seed=g_seed,
    )
    graph = gen_graph(spec)
    buddies = assign_buddies(graph, int(cfg["n_egos"]), seed=b_seed, tie_bias=float(cfg["tie_bias"]))
    ospec = OutcomeGenSpec(beta=dict(cfg["beta"]), intercept=float(cfg["intercept"]), noise_sd=float(cfg["noise_sd"]), seed=o_seed)
    records = gen_outcomes(graph, buddies, ospec)
    buf = io.StringIO()
    write_survey_csv(graph, buf)
    out.add("survey.csv", buf.getvalue())
    out.add("communities.csv", _csv_text(("node", "community"), sorted(community_labels(spec).items())))
    buf = io.StringIO()
    write_records(records, buf)
    out.add("records.csv", buf.getvalue())
    manifest = _manifest("synth", cfg, [])
    manifest["realized"] = reciprocity_stats(classify(graph)).as_dict()
    return manifest


COMMANDS = {
    "stats": cmd_stats,
    "simulate": cmd_simulate,
    "percolate": cmd_percolate,
    "regress": cmd_regress,
    "synth": cmd_synth,
}


# --- parser ----------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, randomized: bool):
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--config", help="JSON config file or a previous run's manifest.json")
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    if randomized:
        p.add_argument("--seed", type=int, help="master seed; drawn from system entropy and recorded when omitted")


def _graph_opts(p):
    p.add_argument("--graph", help="survey CSV (src,dst,closeness), graph JSON export, or classified-edge CSV")
    p.add_argument("--threshold", type=int, help="ties need closeness strictly above this (default 2)")


def _bdsi_opts(p):
    p.add_argument("--p-rec", dest="p_rec", type=float, help="transmission probability on reciprocal edges (default 0.10)")
    p.add_argument("--p-plus", dest="p_plus", type=float, help="unilateral edge, nominator to nominee (default 0.05)")
    p.add_argument("--p-minus", dest="p_minus", type=float, help="unilateral edge, nominee to nominator (default 0.02)")
    p.add_argument("--seed-count", dest="seed_count", type=int, help="uniformly random initial adopters per run (default 1)")
    p.add_argument("--seed-nodes", dest="seed_nodes", help="comma-separated explicit initial adopters")
    p.add_argument("--horizon", type=int, help="maximum number of steps (default 30)")
    p.add_argument("--stop-at-coverage", dest="stop_at_coverage", type=float, help="halt a run once this fraction is infected")
    p.add_argument("--target-coverage", dest="target_coverage", type=float, help="fraction used for time-to-infect T (default 0.5)")


def _epilog(*names):
    return "output columns:\n" + "\n".join(f"  {n}: {COLUMNS[n]}" for n in names)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reciplab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    p = sub.add_parser("stats", help="reciprocity counts and closeness comparisons", epilog=_epilog("stats.json", "edges.csv", "ecdf.csv", "kde.csv"), formatter_class=fmt)
    _common(p, False)
    _graph_opts(p)
    p.add_argument("--convention", choices=("directed", "pair_mean"), help="closeness sample for reciprocal ties")
    p.add_argument("--pooled", action="store_const", const=True, help="pooled-variance t-test instead of Welch")
    p.add_argument("--bandwidth", help="KDE bandwidth or 'auto' (Silverman)")
    p.add_argument("--grid-points", dest="grid_points", type=int, help="KDE grid size (default 256)")

    p = sub.add_parser("simulate", help="BDSI Monte Carlo runs", epilog=_epilog("curve.csv", "traces.csv", "summary.json"), formatter_class=fmt)
    _common(p, True)
    _graph_opts(p)
    _bdsi_opts(p)
    p.add_argument("--runs", type=int, help="number of runs (default 1000)")
    p.add_argument("--traces", action="store_const", const=True, help="also write per-run infection steps")

    p = sub.add_parser("percolate", help="edge-removal sweep comparing reciprocal and unilateral edges", epilog=_epilog("percolation.csv", "delta.csv", "summary.json"), formatter_class=fmt)
    _common(p, True)
    _graph_opts(p)
    _bdsi_opts(p)
    p.add_argument("--fractions", help="comma-separated removal fractions, strictly increasing")
    p.add_argument("--classes", help="comma-separated classes to remove (reciprocal,unilateral)")
    p.add_argument("--matching", choices=("count", "fraction"), help="equal removal counts across arms, or a fraction of each class")
    p.add_argument("--reference-count", dest="reference_count", type=int, help="count base for --matching count (default: smaller class)")
    p.add_argument("--replicates", type=int, help="independent removal orders (default 100)")
    p.add_argument("--runs-per-point", dest="runs_per_point", type=int, help="BDSI runs per replicate and F (default 10)")
    p.add_argument("--independent", dest="nested", action="store_const", const=False, help="redraw removals for every F instead of nesting them")

    p = sub.add_parser("regress", help="OLS of activity change on tie types", epilog=_epilog("estimates.csv"), formatter_class=fmt)
    _common(p, False)
    _graph_opts(p)
    p.add_argument("--records", help="ego records CSV (ego,alter1,alter2,activity_p1,activity_p2)")
    p.add_argument("--covariates", help=f"comma-separated covariates (default {','.join(COVARIATES)})")
    p.add_argument("--no-intercept", dest="intercept", action="store_const", const=False)
    p.add_argument("--log-ratio", dest="log_ratio", action="store_const", const=True, help="regress log(p2/p1)")
    p.add_argument("--level", type=float, help="confidence level (default 0.95)")

    p = sub.add_parser("synth", help="synthetic survey, communities and ego records", epilog=_epilog("survey.csv", "communities.csv", "records.csv"), formatter_class=fmt)
    _common(p, True)
    p.add_argument("--n-nodes", dest="n_nodes", type=int)
    p.add_argument("--n-communities", dest="n_communities", type=int)
    p.add_argument("--intra-edge-prob", dest="intra_edge_prob", type=float)
    p.add_argument("--inter-edge-prob", dest="inter_edge_prob", type=float)
    p.add_argument("--reciprocity-intra", dest="reciprocity_intra", type=float)
    p.add_argument("--reciprocity-inter", dest="reciprocity_inter", type=float)
    p.add_argument("--subthreshold-prob", dest="subthreshold_prob", type=float)
    p.add_argument("--n-egos", dest="n_egos", type=int)
    p.add_argument("--tie-bias", dest="tie_bias", type=float, help="chance a buddy slot goes to an existing friend")
    p.add_argument("--beta", help="planted coefficients, e.g. n_reciprocal=0.25,n_incoming=0.12")
    p.add_argument("--intercept", type=float)
    p.add_argument("--noise-sd", dest="noise_sd", type=float)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s: %(message)s")
    try:
        cfg = resolve_config(args.command, args)
        out = Outputs(args.out)
        manifest = COMMANDS[args.command](cfg, out, max(1, args.threads))
        out.commit(manifest)
    except ValidationError as exc:
        print(f"reciplab: input error: {exc}", file=sys.stderr)
        return 2
    except (LabError, OSError, ArithmeticError) as exc:
        print(f"reciplab: runtime error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
