"""Command-line entry point: ``cohost <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..engine import DirectMessage
from ..intervene import VisualizationSpec
from ..simulator import OracleReport, Scenario, ScenarioError, compare, oracle_report, run
from .protocol import encode_action, encode_event
from .render import RenderError, render_chart

log = logging.getLogger("cohost")


class UsageError(Exception):
    pass


def write_run(result, out: Path, figures: bool = True) -> dict[str, Path]:
    """Write the simulate artifacts into ``out`` and return their paths."""
    out.mkdir(parents=True, exist_ok=True)
    charts = out / "charts"
    charts.mkdir(exist_ok=True)
    paths = {
        "events": out / "events.ndjson",
        "actions": out / "actions.ndjson",
        "report": out / "report.json",
        "cumulative": out / "cumulative.json",
    }
    paths["events"].write_text("".join(encode_event(e) + "\n" for e in result.events), encoding="utf-8")
    paths["actions"].write_text("".join(encode_action(a) + "\n" for a in result.actions), encoding="utf-8")
    paths["report"].write_text(json.dumps(result.report.to_dict(), indent=2) + "\n", encoding="utf-8")
    paths["cumulative"].write_text(json.dumps(result.table) + "\n", encoding="utf-8")

    n = 0
    for action in result.actions:
        if not isinstance(action, DirectMessage) or action.chart is None:
            continue
        n += 1
        stem = charts / f"{n:03d}_{action.t_ms // 1000:05d}s_{action.to}_{action.chart.kind.value}"
        stem.with_suffix(".svg").write_text(render_chart(action.chart, "svg"), encoding="utf-8")
        stem.with_suffix(".txt").write_text(render_chart(action.chart, "text"), encoding="utf-8")
        if figures:
            from .figures import chart_figure

            chart_figure(action.chart, stem.with_suffix(".png"))
    if figures and result.table:
        from .figures import timeline_figure

        timeline_figure(result.table, charts / "speaking_time.png", result.scenario.roster.host, result.report.trigger_t)
    return paths


def cmd_simulate(args) -> int:
    scenario = Scenario.load(args.scenario)
    result = run(scenario, seed=args.seed)
    out = Path(args.out) if args.out else Path("out") / Path(args.scenario).stem
    write_run(result, out, figures=not args.no_figures)
    rep = result.report
    reason = rep.trigger_reason["kind"] if rep.trigger_reason else "none"
    print(
        f"simulated {rep.elapsed}s: ask at t={rep.trigger_t} ({reason}), "
        f"{len(rep.interventions)} intervention(s), {rep.messages_delivered} delivered, "
        f"{rep.messages_dropped} dropped -> {out}"
    )
    return 0


def cmd_replay(args) -> int:
    from .server import serve_lines

    with open(args.eventlog, encoding="utf-8") as fh:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as out:
                errors = serve_lines(fh, out.write)
        else:
            errors = serve_lines(fh, sys.stdout.write)
    if errors:
        print(f"replay: {errors} record(s) rejected", file=sys.stderr)
        return 1
    return 0


def cmd_serve(args) -> int:
    from .server import serve_stream, serve_tcp

    if args.listen:
        host, _, port = args.listen.rpartition(":")
        if not host or not port.isdigit():
            raise UsageError("--listen expects HOST:PORT")
        serve_tcp(host, int(port))
        return 0
    errors = serve_stream(sys.stdin, sys.stdout)
    return 1 if errors else 0


def cmd_oracle(args) -> int:
    scenario = Scenario.load(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    report = oracle_report(scenario)
    text = json.dumps(report.to_dict()) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def load_sim_summary(path: Path) -> dict:
    if path.is_dir():
        report = json.loads((path / "report.json").read_text(encoding="utf-8"))
        cum = path / "cumulative.json"
        table = json.loads(cum.read_text(encoding="utf-8")) if cum.exists() else {}
        return {
            "table": table,
            "trigger_t": report["trigger_t"],
            "reason": report["trigger_reason"],
            "under": report["under_participators"],
            "over": report["over_participators"],
        }
    return json.loads(path.read_text(encoding="utf-8"))


def cmd_compare(args) -> int:
    sim = load_sim_summary(Path(args.sim))
    oracle = OracleReport.load(args.oracle)
    problems = compare(sim, oracle)
    for p in problems:
        print(p)
    if problems:
        return 1
    print("no divergence")
    return 0


def cmd_render(args) -> int:
    data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    # accept either a bare chart spec or a wire message record carrying one
    if "payload" in data:
        data = data["payload"].get("chart") or {}
    try:
        spec = VisualizationSpec.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise RenderError(f"invalid chart spec: {exc}") from exc
    if args.format == "png":
        if not args.out:
            raise UsageError("--format png needs --out")
        from .figures import chart_figure

        chart_figure(spec, args.out)
        return 0
    text = render_chart(spec, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cohost", description="Deterministic virtual co-host engine.")
    p.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a scenario through the engine and write logs, report and charts")
    s.add_argument("scenario")
    s.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    s.add_argument("--out", default=None, help="output directory (default out/<scenario name>)")
    s.add_argument("--no-figures", action="store_true", help="skip matplotlib PNG figures")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("replay", help="feed a recorded event log to a fresh engine")
    s.add_argument("eventlog")
    s.add_argument("--out", default=None, help="write the action log here instead of stdout")
    s.set_defaults(func=cmd_replay)

    s = sub.add_parser("serve", help="speak the wire protocol over stdio or TCP")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--stdio", action="store_true", help="read events on stdin, write actions on stdout (default)")
    g.add_argument("--listen", metavar="HOST:PORT", default=None)
    s.set_defaults(func=cmd_serve)

    s = sub.add_parser("oracle", help="brute-force the expected ledger and trigger for a scenario")
    s.add_argument("scenario")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("compare", help="diff a simulate output directory against an oracle report")
    s.add_argument("sim")
    s.add_argument("oracle")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("render", help="render a chart spec")
    s.add_argument("spec")
    s.add_argument("--format", choices=("svg", "text", "png"), default="svg")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_render)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, RenderError, UsageError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"cohost {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
