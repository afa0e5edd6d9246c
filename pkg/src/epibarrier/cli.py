"""Command-line front door.

Subcommands: classify, barrier, region, oracle, verify, simulate, serve.
Exit codes: 0 success, 1 validation error, 2 verification failure.
All emitted artifacts are deterministic byte-for-byte for fixed inputs.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import _jsonio
from .barrier import compute_barrier, verify_barrier
from .classifier import classification_report, classify
from .model import in_box
from .oracle import compare, grid_membership
from .policy import POLICY, simulate
from .region import compute_regions, efficiency_ratio
from .scenario import Scenario, ScenarioError, load_scenario
from .tangency import SetKind

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFICATION = 2


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="epibarrier",
        description="Admissible and robust invariant sets for a fumigation-"
        "controlled infection model.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="print the regime classification")
    c.add_argument("scenario")
    c.add_argument("--json", action="store_true", help="emit JSON instead of the report")

    b = sub.add_parser("barrier", help="trace a barrier curve to CSV")
    b.add_argument("scenario")
    b.add_argument("--set", dest="set_kind", choices=["admissible", "mrpi"], required=True)
    b.add_argument("--out", required=True, help="CSV output path")
    b.add_argument("--json-out", help="optional JSON output path")

    r = sub.add_parser("region", help="build both regions and write artifacts")
    r.add_argument("scenario")
    r.add_argument("--out-dir", required=True)

    o = sub.add_parser("oracle", help="grid simulation of both sets")
    o.add_argument("scenario")
    o.add_argument("--grid", type=int, help="grid resolution per axis")
    o.add_argument("--out", required=True, help="CSV output path")
    o.add_argument("--pgm", help="optional PGM dump path")

    v = sub.add_parser("verify", help="check regions against the grid oracle")
    v.add_argument("scenario")
    v.add_argument("--grid", type=int, help="grid resolution per axis")
    v.add_argument("--band", type=float, help="boundary exclusion band")
    v.add_argument("--threshold", type=float, default=0.99)

    s = sub.add_parser("simulate", help="integrate the dynamics forward")
    s.add_argument("scenario")
    s.add_argument("--x0", required=True, help="initial state as 'x1,x2'")
    s.add_argument("--u", required=True, help="'const:<value>' or 'policy'")
    s.add_argument("--horizon", type=float, required=True)
    s.add_argument("--max-step", type=float, default=1.0)
    s.add_argument("--out", required=True, help="CSV output path")

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("scenario")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument(
        "--ui",
        default="frontend",
        help="directory with the built web UI to serve at / (skipped if absent)",
    )
    return ap


def _pipeline(scenario: Scenario):
    cls, curves, adm, mrpi = compute_regions(scenario.params, scenario.caps)
    return cls, curves, adm, mrpi


def _cmd_classify(args, scenario: Scenario) -> int:
    if args.json:
        cls = classify(scenario.params, scenario.caps)
        print(_jsonio.dumps(cls.to_json_dict(), indent=2), end="")
    else:
        print(classification_report(scenario.params, scenario.caps), end="")
    return EXIT_OK


def _cmd_barrier(args, scenario: Scenario) -> int:
    kind = SetKind(args.set_kind)
    cls = classify(scenario.params, scenario.caps)
    try:
        curve = compute_barrier(scenario.params, scenario.caps, kind)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    if curve is None:
        print(
            f"no {kind.value} barrier: candidate absent or rejected"
            f" (case {cls.case.value})"
        )
        return EXIT_OK
    report = verify_barrier(curve, scenario.params, scenario.caps)
    Path(args.out).write_text(curve.to_csv())
    if args.json_out:
        Path(args.json_out).write_text(_jsonio.dumps(curve.to_json_dict(), indent=2))
    print(
        f"{kind.value} barrier: {len(curve.samples)} samples, "
        f"termination {curve.termination.kind.value}, "
        f"verification {'ok' if report.ok else 'FAILED'}"
    )
    if not report.ok:
        for f in report.failures:
            print(f"  {f}", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


def _cmd_region(args, scenario: Scenario) -> int:
    cls, _curves, adm, mrpi = _pipeline(scenario)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "admissible.json").write_text(_jsonio.dumps(adm.to_json_dict(), indent=2))
    (out / "admissible.csv").write_text(adm.to_csv())
    (out / "mrpi.json").write_text(_jsonio.dumps(mrpi.to_json_dict(), indent=2))
    (out / "mrpi.csv").write_text(mrpi.to_csv())
    ratio = efficiency_ratio(mrpi, adm)
    summary = {
        "case": cls.case.value,
        "boundary": cls.boundary_flag,
        "admissible_area": adm.area,
        "mrpi_area": mrpi.area,
        "efficiency_ratio": ratio,
    }
    (out / "summary.json").write_text(_jsonio.dumps(summary, indent=2))
    shown = "desperate (undefined)" if ratio is None else f"{ratio:.17g}"
    print(f"case {cls.case.value}: efficiency ratio {shown}; artifacts in {out}")
    return EXIT_OK


def _grid_of(args, scenario: Scenario) -> tuple[int, int]:
    if getattr(args, "grid", None):
        return (args.grid, args.grid)
    return scenario.run.grid


def _cmd_oracle(args, scenario: Scenario) -> int:
    n1, n2 = _grid_of(args, scenario)
    verdict = grid_membership(
        scenario.params, scenario.caps, n1, n2,
        horizon=scenario.run.horizon, dt=scenario.run.oracle_dt,
    )
    Path(args.out).write_text(verdict.to_csv())
    if args.pgm:
        Path(args.pgm).write_text(verdict.to_pgm())
    print(
        f"grid {n1}x{n2}: {int(verdict.admissible.sum())} admissible, "
        f"{int(verdict.invariant.sum())} invariant points"
    )
    return EXIT_OK


def _cmd_verify(args, scenario: Scenario) -> int:
    t0 = time.monotonic()
    cls, curves, adm, mrpi = _pipeline(scenario)
    for kind, curve in curves.items():
        if curve is None:
            continue
        report = verify_barrier(curve, scenario.params, scenario.caps)
        if not report.ok:
            print(f"{kind.value} barrier verification FAILED:", file=sys.stderr)
            for f in report.failures:
                print(f"  {f}", file=sys.stderr)
            return EXIT_VERIFICATION
    n1, n2 = _grid_of(args, scenario)
    band = args.band if args.band is not None else scenario.run.agreement_band
    verdict = grid_membership(
        scenario.params, scenario.caps, n1, n2,
        horizon=scenario.run.horizon, dt=scenario.run.oracle_dt,
    )
    agreement = compare(verdict, adm, mrpi, band=band)
    elapsed = time.monotonic() - t0
    frac = agreement.min_off_band_fraction
    print(
        f"case {cls.case.value}: off-band agreement admissible "
        f"{agreement.admissible.off_band_fraction:.6f}, invariant "
        f"{agreement.mrpi.off_band_fraction:.6f} (threshold {args.threshold}), "
        f"{elapsed:.1f}s"
    )
    if frac < args.threshold:
        for label, stats in (("admissible", agreement.admissible), ("invariant", agreement.mrpi)):
            for pt in stats.disagreements[:8]:
                print(f"  {label} disagreement near {pt}", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


def _cmd_simulate(args, scenario: Scenario) -> int:
    try:
        x0 = tuple(float(v) for v in args.x0.split(","))
        if len(x0) != 2:
            raise ValueError
    except ValueError:
        print(f"error: --x0 must be 'x1,x2', got {args.x0!r}", file=sys.stderr)
        return EXIT_VALIDATION
    if not in_box(x0, scenario.caps):
        print(f"error: x0 {x0} lies outside the cap box", file=sys.stderr)
        return EXIT_VALIDATION
    kwargs: dict = {}
    if args.u == "policy":
        cls, _curves, adm, mrpi = _pipeline(scenario)
        u_source: object = POLICY
        kwargs = {"regions": (adm, mrpi), "classification": cls}
    elif args.u.startswith("const:"):
        try:
            u_source = float(args.u.removeprefix("const:"))
        except ValueError:
            print(f"error: bad constant input {args.u!r}", file=sys.stderr)
            return EXIT_VALIDATION
    else:
        print("error: --u must be 'const:<value>' or 'policy'", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        traj = simulate(
            scenario.params, scenario.caps, x0, u_source, args.horizon,
            max_step=args.max_step, **kwargs,
        )
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    Path(args.out).write_text(traj.to_csv())
    if traj.violation:
        t, face = traj.violation
        print(f"first violation: {face.value} at t={t:.17g}")
    else:
        print("no cap violation")
    return EXIT_OK


def _cmd_serve(args, scenario: Scenario) -> int:
    import uvicorn

    from .service import create_app

    ui = Path(args.ui) if args.ui and Path(args.ui).is_dir() else None
    uvicorn.run(create_app(scenario, ui_dir=ui), host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "classify": _cmd_classify,
    "barrier": _cmd_barrier,
    "region": _cmd_region,
    "oracle": _cmd_oracle,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    return _COMMANDS[args.command](args, scenario)


if __name__ == "__main__":
    sys.exit(main())
