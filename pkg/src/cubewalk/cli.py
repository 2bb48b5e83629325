"""Command-line entry point.

Configuration precedence, lowest to highest: built-in defaults, the JSON
file given by ``--config``, explicit flags.  Every artifact carries the
tool version and the sha256 of the effective configuration.

Exit codes: 0 success, 2 input error, 3 search exhausted without a result.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import statistics
import sys
from pathlib import Path

from . import __version__
from .config import FORMATS, ConfigError, ExperimentConfig
from .cubulation import DefectReport, cubulate, enumerate_cubes, verify_median
from .cubulation import TooLarge as CubulationTooLarge
from .group_action import (
    Essentiality,
    GroupPreset,
    PresetError,
    Product,
    TableInvalid,
    TooLarge,
    UnknownGenerator,
    build_table,
    essentiality,
    from_spec,
    is_euclidean_factor,
    ping_pong_verify,
)
from .median import NotDisjoint, bridge, delta_count, strongly_separated
from .pocset import Pocset, PocsetError, ViolationList, relation
from .roller_walk import (
    FORWARD,
    REFLECTED,
    InvalidDistribution,
    NoStabilizedRuns,
    StepDistribution,
    WindowTooLarge,
    default_window,
    describe_halfspace,
    distinct_limits,
    drift,
    hitting_measure,
    moment_report,
    regular_certificate,
    sample_paths,
    stabilization,
    strip_growth_check,
)

EXIT_OK, EXIT_INPUT, EXIT_EXHAUSTED = 0, 2, 3
INSPECT_MAX_RADIUS = 4
INSPECT_MOMENT_BUDGET = 50_000
CHAIN_THRESHOLDS = (1, 5, 10)

_INPUT_ERRORS = (
    ConfigError,
    PresetError,
    InvalidDistribution,
    UnknownGenerator,
    PocsetError,
    WindowTooLarge,
    CubulationTooLarge,
    TooLarge,
    OSError,
)


class InputError(ValueError):
    pass


# -- artifact plumbing ----------------------------------------------------------

class Artifacts:
    """Collects named bodies; writes them under ``--out`` and echoes one to stdout."""

    def __init__(self, cfg: ExperimentConfig, command: str):
        self.cfg = cfg
        self.command = command
        self.header = {"tool": "cubewalk", "version": __version__, "config_hash": cfg.digest()}
        self.bodies: dict[str, str] = {}

    def json(self, name: str, payload: dict) -> None:
        doc = dict(self.header)
        doc["command"] = self.command
        doc["config"] = {k: v for k, v in self.cfg.to_dict().items() if k not in ("out", "format")}
        doc.update(payload)
        self.bodies[name] = json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def csv(self, name: str, columns: list[str], rows: list[list]) -> None:
        buf = io.StringIO()
        buf.write(f"# cubewalk {__version__} config sha256:{self.header['config_hash']}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        self.bodies[name] = buf.getvalue()

    def dot(self, name: str, text: str) -> None:
        self.bodies[name] = f"// cubewalk {__version__} config sha256:{self.header['config_hash']}\n" + text

    def flush(self, primary: dict[str, str]) -> None:
        """``primary`` maps each format to the body echoed for it."""
        if self.cfg.out:
            out = Path(self.cfg.out)
            out.mkdir(parents=True, exist_ok=True)
            for name, body in sorted(self.bodies.items()):
                (out / name).write_text(body)
        fmt = self.cfg.format
        if fmt not in primary:
            raise InputError(f"{self.command} has no {fmt} output (choose from {', '.join(sorted(primary))})")
        sys.stdout.write(self.bodies[primary[fmt]])


def _factors(preset: GroupPreset) -> list[GroupPreset]:
    return preset.factors if isinstance(preset, Product) else [preset]


def _load_preset(cfg: ExperimentConfig) -> tuple[GroupPreset, StepDistribution]:
    preset = from_spec(cfg.preset)
    mu = StepDistribution.from_config(preset, cfg.mu)
    return preset, mu


def _window(cfg: ExperimentConfig) -> int:
    w = cfg.window if cfg.window is not None else default_window(cfg.steps)
    if w > cfg.steps:
        raise WindowTooLarge(f"window {w} exceeds {cfg.steps} steps")
    return w


def _euclidean_caveat(preset: GroupPreset) -> str | None:
    if any(is_euclidean_factor(f) for f in _factors(preset)):
        return "Euclidean factor present: control run, no linear drift and no strongly separated pairs expected"
    return None


# -- cubulate -----------------------------------------------------------------

def cmd_cubulate(cfg: ExperimentConfig) -> int:
    if not cfg.pocset:
        raise InputError("cubulate needs --pocset")
    p = Pocset.load(cfg.pocset)
    g = cubulate(p)
    census = enumerate_cubes(g)
    report = verify_median(g)
    art = Artifacts(cfg, "cubulate")
    graph = json.loads(g.to_json(census))
    art.json(
        "cubulate.json",
        {
            "pocset": {"walls": p.n_walls, "dimension_bound": p.dimension_bound},
            "graph": graph,
            "median": {"passed": report.passed, "triples_checked": report.triples_checked, "reason": report.reason},
        },
    )
    art.dot("cubulate.dot", g.to_dot())
    art.csv(
        "cubulate.csv",
        ["vertex"] + [f"wall{w}" for w in range(p.n_walls)],
        [[i] + v.as_list() for i, v in enumerate(g.vertices)],
    )
    art.flush({"json": "cubulate.json", "dot": "cubulate.dot", "csv": "cubulate.csv"})
    if not report.passed:
        print(f"median verification failed: {report.reason} at {report.witness}", file=sys.stderr)
        return 1
    return EXIT_OK


# -- walk ---------------------------------------------------------------------

def _sample(cfg: ExperimentConfig, preset, mu, stream=FORWARD):
    return sample_paths(preset, mu, cfg.steps, cfg.paths, cfg.seed, cfg.monitor_radius, stream)


def _chain_summary(lengths: list[int]) -> dict:
    if not lengths:
        return {"min": None, "median": None, "max": None, "fraction_at_least": {}}
    return {
        "min": min(lengths),
        "median": float(statistics.median(lengths)),
        "max": max(lengths),
        "fraction_at_least": {str(t): sum(v >= t for v in lengths) / len(lengths) for t in CHAIN_THRESHOLDS},
    }


def cmd_walk(cfg: ExperimentConfig) -> int:
    preset, mu = _load_preset(cfg)
    window = _window(cfg)
    runs = _sample(cfg, preset, mu)
    n_fac = len(_factors(preset))

    rows = []
    chains: list[list[int]] = [[] for _ in range(n_fac)]
    stable_counts = []
    for run in runs:
        try:
            st = stabilization(run, window)
            stab, mon = st.n_stable, st.n_monitored
        except ValueError:  # nothing monitored: zero steps and no ball
            stab, mon = 0, 0
        est = regular_certificate(run, window=window)
        for f, c in enumerate(est.lengths):
            chains[f].append(c)
        stable_counts.append(stab)
        rows.append([run.seed, run.index, run.n, run.final_norm, stab, mon] + est.lengths)

    hitting = []
    if runs and cfg.steps > 0:
        for h in preset.unit_halfspaces():
            try:
                hitting.append(hitting_measure(runs, h, window).to_dict(preset))
            except NoStabilizedRuns:
                hitting.append({"halfspace": describe_halfspace(preset, h), "frequency": None})
    d = drift(runs)
    summary = {
        "preset": preset.to_spec(),
        "mu": mu.to_config(),
        "steps": cfg.steps,
        "paths": len(runs),
        "window": window,
        "drift": d.to_dict() if d else None,
        "hitting": hitting,
        "stabilized_walls_mean": (sum(stable_counts) / len(stable_counts)) if stable_counts else None,
        "chains": [_chain_summary(c) for c in chains],
        "caveat": _euclidean_caveat(preset),
    }
    art = Artifacts(cfg, "walk")
    art.json("walk.json", summary)
    cols = ["seed", "run", "n", "final_norm", "stabilized", "monitored"] + [f"chain_{f}" for f in range(n_fac)]
    art.csv("walk.csv", cols, rows)
    art.flush({"json": "walk.json", "csv": "walk.csv"})
    if summary["caveat"]:
        print(f"note: {summary['caveat']}", file=sys.stderr)
    return EXIT_OK


# -- certify ------------------------------------------------------------------

def cmd_certify(cfg: ExperimentConfig) -> int:
    preset, mu = _load_preset(cfg)
    window = _window(cfg)
    runs = _sample(cfg, preset, mu)
    factors = _factors(preset)
    euclid = [is_euclidean_factor(f) for f in factors]

    chains: list[list[int]] = [[] for _ in factors]
    rows = []
    for run in runs:
        est = regular_certificate(run, window=window)
        for f, c in enumerate(est.lengths):
            chains[f].append(c)
        rows.append([run.seed, run.index, run.n, run.final_norm] + est.lengths)

    separations = None
    series = None
    if len(runs) >= 2 and cfg.steps > 0:
        seps = distinct_limits(runs, window)
        separations = [
            {
                "factor": f,
                "pairs": sum(s.factor == f for s in seps),
                "separated": sum(s.factor == f and s.separated for s in seps),
            }
            for f in range(len(factors))
        ]
        backward = _sample(cfg, preset, mu.reflected(), REFLECTED)
        series = strip_growth_check(preset, runs, backward)

    art = Artifacts(cfg, "certify")
    art.json(
        "certify.json",
        {
            "preset": preset.to_spec(),
            "steps": cfg.steps,
            "paths": len(runs),
            "window": window,
            "chains": [
                dict(_chain_summary(c), factor=f, expected_negative=euclid[f]) for f, c in enumerate(chains)
            ],
            "distinct_limits": separations,
            "strip_series": None
            if series is None
            else {"rows": series.to_rows(), "skipped_pairs": series.skipped, "caveat": series.caveat},
            "caveat": _euclidean_caveat(preset),
        },
    )
    art.csv(
        "certify.csv",
        ["seed", "run", "n", "final_norm"] + [f"chain_{f}" for f in range(len(factors))],
        rows,
    )
    if series is not None:
        art.csv("strip_series.csv", ["n", "median", "mean"], [[r["n"], r["median"], r["mean"]] for r in series.to_rows()])
    art.flush({"json": "certify.json", "csv": "certify.csv"})
    return EXIT_OK


# -- pingpong -----------------------------------------------------------------

def cmd_pingpong(cfg: ExperimentConfig) -> int:
    preset = from_spec(cfg.preset)
    reports = []
    found = 0
    missing = 0
    for f, fac in enumerate(_factors(preset)):
        entry: dict = {"factor": f, "preset": fac.to_spec()}
        if is_euclidean_factor(fac):
            entry["status"] = "euclidean"
            reports.append(entry)
            continue
        table = build_table(fac, cfg.radius)
        if table is None:
            entry["status"] = "not found"
            missing += 1
            reports.append(entry)
            continue
        rep = ping_pong_verify(fac, table.A, table.aA_star, table.B, table.bB_star, table.a, table.b, cfg.length)
        found += 1
        entry.update(
            status="found",
            a=fac.format(table.a),
            b=fac.format(table.b),
            table={k: describe_halfspace(fac, h) for k, h in (
                ("A", table.A), ("aA*", table.aA_star), ("B", table.B), ("bB*", table.bB_star)
            )},
            free=rep.free,
            words_checked=rep.words_checked,
            max_length=rep.max_length,
            counterexample=rep.counterexample,
        )
        reports.append(entry)
    art = Artifacts(cfg, "pingpong")
    art.json("pingpong.json", {"preset": preset.to_spec(), "radius": cfg.radius, "factors": reports})
    art.csv(
        "pingpong.csv",
        ["factor", "status", "a", "b", "free", "words_checked"],
        [[r["factor"], r["status"], r.get("a", ""), r.get("b", ""), r.get("free", ""), r.get("words_checked", "")]
         for r in reports],
    )
    art.flush({"json": "pingpong.json", "csv": "pingpong.csv"})
    if found == 0 or missing:
        print(f"no ping-pong table within radius {cfg.radius} for {missing or 'any'} factor(s)", file=sys.stderr)
        return EXIT_EXHAUSTED
    if not all(r.get("free", True) for r in reports):
        print("constructed table failed verification", file=sys.stderr)
        return 1
    return EXIT_OK


# -- inspect ------------------------------------------------------------------

def _inspect_pocset(cfg: ExperimentConfig, pair: list[int] | None) -> dict:
    p = Pocset.load(cfg.pocset)
    transverse = [[a, b] for a in range(p.n_walls) for b in range(a + 1, p.n_walls) if p.transverse_walls(a) >> b & 1]
    out: dict = {
        "walls": p.n_walls,
        "dimension_bound": p.dimension_bound,
        "cover_relations": p.cover_pairs(),
        "transverse_walls": transverse,
    }
    if pair is not None:
        h, k = pair
        p.check(h)
        p.check(k)
        rel = relation(p, h, k)
        info: dict = {"h": h, "k": k, "relation": rel.name}
        if h >> 1 != k >> 1:
            cert = strongly_separated(p, h, k)
            info["strongly_separated"] = cert.verdict.value
            info["reason"] = cert.reason
        try:
            b = bridge(p, h, k)
        except NotDisjoint:
            info["bridge"] = None
        else:
            info["delta"] = delta_count(p, h, k)
            info["bridge"] = {
                "beta": b.beta_list,
                "vertices": [v.as_list() for v in b.vertices],
                "endpoints": None if b.endpoints is None else [e.as_list() for e in b.endpoints],
            }
        out["pair"] = info
    return out


def _inspect_preset(cfg: ExperimentConfig) -> dict:
    preset, mu = _load_preset(cfg)
    radius = min(cfg.radius, INSPECT_MAX_RADIUS)
    factors = []
    for f, fac in enumerate(_factors(preset)):
        ess = []
        for h in fac.unit_halfspaces():
            r = essentiality(fac, h, radius)
            ess.append({"halfspace": describe_halfspace(fac, h), "kind": r.kind.name.lower(), "depth_in": r.depth_in,
                        "depth_out": r.depth_out})
        factors.append(
            {
                "factor": f,
                "preset": fac.to_spec(),
                "dimension": fac.dimension,
                "euclidean": is_euclidean_factor(fac),
                "essential_units": sum(e["kind"] == Essentiality.ESSENTIAL.name.lower() for e in ess),
                "units": ess,
            }
        )
    return {
        "preset": preset.to_spec(),
        "generators": preset.names,
        "dimension": preset.dimension,
        "essentiality_radius": radius,
        "factors": factors,
        "moments": moment_report(mu, budget=INSPECT_MOMENT_BUDGET).to_dict(),
    }


def cmd_inspect(cfg: ExperimentConfig, pair: list[int] | None = None) -> int:
    art = Artifacts(cfg, "inspect")
    if cfg.pocset:
        art.json("inspect.json", {"pocset": _inspect_pocset(cfg, pair)})
    else:
        if pair is not None:
            raise InputError("--pair needs --pocset")
        art.json("inspect.json", _inspect_preset(cfg))
    art.flush({"json": "inspect.json"})
    return EXIT_OK


# -- argument handling --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; explicit flags override its fields")
    common.add_argument("--preset", help="f<k>, z<k>, pentagon, products such as f2xf2, raag:<graph.json>, or JSON")
    common.add_argument("--pocset", help="pocset JSON file")
    common.add_argument("--mu", help='step law: "uniform" or a JSON list of [word, probability]')
    common.add_argument("--steps", type=int)
    common.add_argument("--paths", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--radius", type=int, help="search radius (default 8)")
    common.add_argument("--monitor-radius", type=int, dest="monitor_radius")
    common.add_argument("--window", type=int, help="stabilisation window (default max(1000, n/10), at most n)")
    common.add_argument("--length", type=int, help="ping-pong word length (default 8)")
    common.add_argument("--out", help="directory for artifacts")
    common.add_argument("--format", choices=FORMATS, help="body echoed to stdout")

    parser = argparse.ArgumentParser(prog="cubewalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cubewalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("cubulate", parents=[common], help="build the median graph of a pocset file")
    sub.add_parser("walk", parents=[common], help="sample walks: drift, hitting frequencies, stabilisation")
    sub.add_parser("certify", parents=[common], help="regular-point chains, distinct limits, strip growth")
    sub.add_parser("pingpong", parents=[common], help="construct and verify a ping-pong table per factor")
    insp = sub.add_parser("inspect", parents=[common], help="report on a pocset or a preset")
    insp.add_argument("--pair", type=int, nargs=2, metavar=("H", "K"), help="half-space pair to analyse")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    base = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    mu = args.mu
    if mu is not None and mu != "uniform":
        try:
            mu = json.loads(mu)
        except ValueError as exc:
            raise ConfigError(f"--mu is neither 'uniform' nor JSON: {exc}") from exc
    overrides = {
        "preset": args.preset,
        "pocset": args.pocset,
        "mu": mu,
        "steps": args.steps,
        "paths": args.paths,
        "seed": args.seed,
        "radius": args.radius,
        "monitor_radius": args.monitor_radius,
        "window": args.window,
        "length": args.length,
        "out": args.out,
        "format": args.format,
    }
    return base.merged(overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "cubulate":
            return cmd_cubulate(cfg)
        if args.command == "walk":
            return cmd_walk(cfg)
        if args.command == "certify":
            return cmd_certify(cfg)
        if args.command == "pingpong":
            return cmd_pingpong(cfg)
        return cmd_inspect(cfg, args.pair)
    except ViolationList as exc:
        for v in exc.violations:
            print(f"violation: {v}", file=sys.stderr)
        return EXIT_INPUT
    except DefectReport as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TableInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InputError, *_INPUT_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
