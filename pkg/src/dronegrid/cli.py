"""Run the drone redistribution simulator from the command line.

The run manifest is a JSON object; every key is optional and defaults to the
reference scenario::

    {
      "seed": 7,
      "n": 5, "m": 10, "horizon_hours": 8760,
      "weights": {"alpha": 0.7, "beta": 0.5, "gamma": 0.3,
                  "zeta": 0.8, "delta": 0.6, "epsilon": 0.4,
                  "price_by_hour": [24 numbers]},
      "drone": {"capacity": 30, "speed": 60, "loss_per_min": 0.5,
                "loss_per_km": 0.5, "d0": 1, "hover_minutes": 0},
      "charging": {"policy": "NocturnalFull", "buffer_floor": 0,
                   "cheap_window": [0, 1, 2], "night_hours": [0, 1, 20]},
      "initial_bs_energy": 0,
      "bs_capacity": null,
      "traces": {"synthetic": {<SynthProfile fields>}} or {"file": "traces.csv"},
      "cases": ["Baseline", "StaticDroneSupport", "OptimalRedistribution"],
      "output_dir": "results"
    }

Relative trace paths resolve against the manifest's directory.  The output
directory falls back to ``$DRONEGRID_OUT`` and then ``./dronegrid-out``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .model import CaseId, ChargingPolicy, DroneSpec, SimulationConfig, Weights, validate_state
from .planner import plan_to_csv
from .simulator import MetricsReport, default_topology, initial_state, run_case
from .traces import SynthProfile, TraceBundle, ingest_traces, synth_traces, write_traces

log = logging.getLogger("dronegrid")

OUT_ENV = "DRONEGRID_OUT"
DEFAULT_OUT = "dronegrid-out"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BAD_MANIFEST = 2
EXIT_BAD_TRACES = 3


class ManifestError(ValueError):
    pass


@dataclass
class RunManifest:
    config: SimulationConfig
    trace_file: Path | None = None
    profile: SynthProfile = field(default_factory=SynthProfile)
    output_dir: Path = Path(DEFAULT_OUT)
    cases: list[CaseId] = field(default_factory=lambda: list(CaseId))

    def __post_init__(self):
        if not self.cases:
            raise ManifestError("manifest must request at least one case")

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> RunManifest:
        known = {"seed", "n", "m", "horizon_hours", "weights", "drone", "charging", "initial_bs_energy",
                 "bs_capacity", "traces", "cases", "output_dir"}
        unknown = set(data) - known
        if unknown:
            raise ManifestError(f"unknown manifest keys: {sorted(unknown)}")
        try:
            weights = Weights(**data.get("weights", {}))
            drone = DroneSpec(**data.get("drone", {}))
            ch = dict(data.get("charging", {}))
            policy = ChargingPolicy(
                policy_id=ch.pop("policy", "NocturnalFull"),
                **{k: frozenset(v) if k in ("cheap_window", "night_hours") else v for k, v in ch.items()},
            )
            config = SimulationConfig(
                n=int(data.get("n", 5)), m=int(data.get("m", 10)), weights=weights, drone_spec=drone,
                horizon_hours=int(data.get("horizon_hours", 8760)), charging_policy=policy,
                rng_seed=int(data.get("seed", 7)), initial_bs_energy=float(data.get("initial_bs_energy", 0.0)),
                bs_capacity=data.get("bs_capacity"),
            )
            traces = data.get("traces", {"synthetic": {}})
            trace_file = None
            profile = SynthProfile()
            if "file" in traces:
                trace_file = Path(traces["file"])
                if base_dir is not None and not trace_file.is_absolute():
                    trace_file = base_dir / trace_file
            else:
                prof = dict(traces.get("synthetic", {}))
                if "load_scale" in prof:
                    prof["load_scale"] = tuple(prof["load_scale"])
                profile = SynthProfile(**prof)
            cases = [CaseId.parse(c) for c in data.get("cases", [c.value for c in CaseId])]
        except (TypeError, ValueError) as exc:
            raise ManifestError(str(exc)) from exc
        out = data.get("output_dir") or os.environ.get(OUT_ENV) or DEFAULT_OUT
        return cls(config=config, trace_file=trace_file, profile=profile, output_dir=Path(out), cases=cases)

    @classmethod
    def load(cls, path: str | os.PathLike | None) -> RunManifest:
        if path is None:
            return cls.from_dict({})
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ManifestError(f"{path}: manifest must be a JSON object")
        return cls.from_dict(data, base_dir=path.parent)

    def with_overrides(self, seed=None, cases=None, out=None, horizon_hours=None) -> RunManifest:
        config = self.config
        if seed is not None:
            config = dataclasses.replace(config, rng_seed=seed)
        if horizon_hours is not None:
            config = dataclasses.replace(config, horizon_hours=horizon_hours)
        return dataclasses.replace(
            self, config=config,
            cases=[CaseId.parse(c) for c in cases] if cases else self.cases,
            output_dir=Path(out) if out else self.output_dir,
        )

    def bundle(self) -> TraceBundle:
        if self.trace_file is not None:
            return ingest_traces(self.trace_file, self.config.n, self.config.horizon_hours)
        return synth_traces(self.config, self.profile)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def comparison_csv(reports: dict[CaseId, MetricsReport]) -> str:
    baseline = reports.get(CaseId.BASELINE)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "total_outages", "reduction_pct_vs_baseline", "total_exchanges", "energy_transferred_wh"])
    for case, rep in reports.items():
        red = "" if baseline is None else f"{rep.reduction_vs(baseline):.2f}"
        w.writerow([case.value, rep.total_outages, red, rep.total_exchanges, f"{rep.total_energy_transferred:.6f}"])
    return buf.getvalue()


def write_report(rep: MetricsReport, out_dir: Path) -> None:
    d = out_dir / rep.case.value
    _write(d / "metrics.json", rep.to_json())
    _write(d / "weekly_outages.csv", rep.weekly_outages_csv())
    _write(d / "weekly_exchanges.csv", rep.weekly_exchanges_csv())
    _write(d / "moves.csv", plan_to_csv(rep.moves))


def execute(manifest: RunManifest) -> dict[CaseId, MetricsReport]:
    """Run every requested case and write all artifacts under ``manifest.output_dir``."""
    bundle = manifest.bundle()
    topo = default_topology(manifest.config)
    reports: dict[CaseId, MetricsReport] = {}
    for case in manifest.cases:
        rep = run_case(manifest.config.with_case(case), bundle, topo)
        log.info("%s: %d outages, %d exchanges, %.0f ms", case.value, rep.total_outages,
                 rep.total_exchanges, rep.runtime_ms)
        write_report(rep, manifest.output_dir)
        reports[case] = rep
    _write(manifest.output_dir / "comparison.csv", comparison_csv(reports))
    runtime = {c.value: round(r.runtime_ms, 3) for c, r in reports.items()}
    _write(manifest.output_dir / "runtime.json", json.dumps(runtime, indent=2) + "\n")
    return reports


def _load_manifest(args) -> RunManifest:
    return RunManifest.load(args.config).with_overrides(
        seed=args.seed, cases=args.case, out=getattr(args, "out", None), horizon_hours=args.horizon_hours)


def cmd_run(args) -> int:
    try:
        manifest = _load_manifest(args)
    except ManifestError as exc:
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return EXIT_BAD_MANIFEST
    try:
        reports = execute(manifest)
    except (OSError, ValueError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_BAD_TRACES if manifest.trace_file is not None else EXIT_FAILED
    sys.stdout.write(comparison_csv(reports))
    return EXIT_OK


def cmd_gen_traces(args) -> int:
    try:
        manifest = _load_manifest(args)
    except ManifestError as exc:
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return EXIT_BAD_MANIFEST
    bundle = synth_traces(manifest.config, manifest.profile)
    try:
        write_traces(bundle, args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        manifest = _load_manifest(args)
    except ManifestError as exc:
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return EXIT_BAD_MANIFEST
    problems = validate_state(initial_state(manifest.config), default_topology(manifest.config),
                              manifest.config.drone_spec)
    trace_path = args.traces or manifest.trace_file
    if trace_path is not None:
        try:
            ingest_traces(trace_path, manifest.config.n, manifest.config.horizon_hours)
        except (OSError, ValueError) as exc:
            print(f"trace file {trace_path}: {exc}", file=sys.stderr)
            return EXIT_BAD_TRACES
    for p in problems:
        print(p, file=sys.stderr)
    if problems:
        return EXIT_BAD_MANIFEST
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dronegrid", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run manifest")
        p.add_argument("--seed", type=int)
        p.add_argument("--case", action="append", help="case to run (repeatable)")
        p.add_argument("--horizon-hours", type=int)

    p = sub.add_parser("run", help="simulate the requested cases and write reports")
    common(p)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen-traces", help="write a synthetic trace file")
    common(p)
    p.add_argument("--out", required=True, help="trace file to write")
    p.set_defaults(func=cmd_gen_traces)

    p = sub.add_parser("validate", help="lint a manifest and its trace file")
    common(p)
    p.add_argument("--traces", help="trace file to check (defaults to the manifest's)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ValueError as exc:  # bad --case names and similar
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_MANIFEST


if __name__ == "__main__":
    sys.exit(main())
