"""Command-line workbench.

Subcommands mirror the library surface: `generate` emits grid text,
`analyze` emits a report for a level spec (optionally via the
brute-force oracle), `design` places objectives to hit targets, `sweep`
emits expressive-range CSV, `story` simulates sessions and estimates
vision hit rates, `verify-golden` recomputes checked-in golden files,
and `serve` runs the HTTP service.

Exit codes: 0 success, 1 unsatisfied targets (or golden mismatch),
2 usage/validation errors. All outputs are byte-deterministic for a
given argument list.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, ca, levels, story
from .errors import CapacityError, GameError, PlacementFailure

__all__ = ["build_parser", "main"]


def _write_out(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _base_params(args) -> ca.GenParams:
    return ca.GenParams(
        seed=args.seed,
        width=args.width,
        height=args.height,
        irc=args.irc,
        noi=args.noi,
        rule=ca.CaRule(block_threshold=args.threshold),
    )


def _add_base_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--irc", type=float, required=True,
                   help="initial random chance in [0, 1]")
    p.add_argument("--noi", type=int, required=True,
                   help="number of smoothing iterations")
    p.add_argument("--threshold", type=int, default=5,
                   help="3x3 BLOCK count at which a cell becomes BLOCK (default 5)")


def cmd_generate(args) -> int:
    params = _base_params(args)
    grid = ca.generate(params)
    _write_out(ca.format_grid(grid, params), args.output)
    return 0


def _pretty_report(report: analysis.AnalysisReport) -> str:
    lines = []
    if report.solvable:
        lines.append(f"solvable: yes (min flips {report.min_flips})")
    else:
        lines.append("solvable: no")
    lines.append(
        f"explorable: {len(report.explorable_cells)} cells "
        f"({report.explorable_fraction:.1%} of the open-cell union)"
    )
    lines.append(f"reachable configs: {report.reachable_configs}")
    if report.treasure_reachability:
        ok = sum(1 for _t, r in report.treasure_reachability if r)
        lines.append(f"treasures reachable: {ok}/{len(report.treasure_reachability)}")
    if report.solution is not None:
        flips = sum(1 for op, _ in report.solution if op == "flip")
        lines.append(f"solution: {len(report.solution)} actions ({flips} flips)")
    return "".join(line + "\n" for line in lines)


def cmd_analyze(args) -> int:
    spec = levels.spec_from_json(Path(args.spec).read_text(encoding="utf-8"))
    if args.oracle:
        report = analysis.brute_force_oracle(spec)
    else:
        report = analysis.analyze(spec, jobs=args.jobs)
    if args.pretty:
        _write_out(_pretty_report(report), args.output)
    else:
        _write_out(analysis.report_to_json(report), args.output)
    return 0


def cmd_design(args) -> int:
    base = _base_params(args)
    if args.levers_file:
        raw = json.loads(Path(args.levers_file).read_text(encoding="utf-8"))
        suite = tuple(
            levels.Lever(id=lv["id"], cell=(lv["cell"][0], lv["cell"][1]),
                         axis=lv["axis"], delta=lv["delta"])
            for lv in raw
        )
    else:
        suite = analysis.default_levers(base, args.levers)
    start = None
    if args.start:
        sx, sy = args.start.split(",")
        start = (int(sx), int(sy))
    spec = analysis.place_objectives(
        base, suite, start=start,
        min_flips_at_least=args.min_flips,
        treasure_count=args.treasures,
    )
    report = analysis.analyze(spec)
    _write_out(levels.spec_to_json(spec), args.spec_out)
    if args.report_out:
        _write_out(
            _pretty_report(report) if args.pretty else analysis.report_to_json(report),
            args.report_out,
        )
    if args.annotated:
        _write_out(levels.format_level(spec), args.annotated)
    return 0


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok != ""]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok != ""]


def cmd_sweep(args) -> int:
    rows = analysis.expressive_sweep(
        args.width, args.height, _float_list(args.irc), _int_list(args.noi),
        args.seeds, ca.CaRule(block_threshold=args.threshold),
    )
    _write_out(analysis.sweep_to_csv(rows), args.output)
    return 0


def _parse_script(text: str) -> list[tuple]:
    """Script tokens: p:<choice>:<depth> peeks, c:<choice> chooses."""
    ops: list[tuple] = []
    if not text:
        return ops
    for token in text.split(","):
        parts = token.strip().split(":")
        if parts[0] == "p" and len(parts) == 3:
            ops.append(("peek", int(parts[1]), int(parts[2])))
        elif parts[0] == "c" and len(parts) == 2:
            ops.append(("choose", int(parts[1])))
        else:
            raise ValueError(f"bad script token {token!r} (want p:<i>:<d> or c:<i>)")
    return ops


def cmd_story_sim(args) -> int:
    tree = story.generate_story_tree(args.seed, args.branching, args.depth)
    session = story.new_session(tree, args.session_seed if args.session_seed is not None
                                else args.seed)
    out: list[str] = []
    if args.pretty:
        out.append(f"SCENE {session.current.id}: {session.current.scene_text}")
    for op in _parse_script(args.script):
        if op[0] == "peek":
            vision = session.peek(op[1], op[2])
            if args.pretty:
                revealed = ", ".join(f"{k}={v}" for k, v in vision.revealed)
                out.append(
                    f"VISION (1 of {vision.futures_count} futures): {revealed}"
                )
        else:
            node = session.choose(op[1])
            if args.pretty:
                out.append(f"SCENE {node.id}: {node.scene_text}")
    transcript = session.transcript()
    if args.pretty:
        _write_out("".join(line + "\n" for line in out), args.output)
    else:
        _write_out(transcript, args.output)
    return 0


def cmd_story_hit_rate(args) -> int:
    rate = story.vision_hit_rate(args.branching, args.depth, args.trials, args.seed)
    _write_out(f"{rate:.6f}\n", args.output)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.listen.rpartition(":")
    app = create_app(store_path=args.store, ui_dir=args.ui)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# Golden-file verification

def _golden_content(entry: dict, golden_dir: Path) -> str:
    kind = entry["kind"]
    if kind == "grid":
        params = ca.GenParams(
            seed=entry["seed"], width=entry["width"], height=entry["height"],
            irc=entry["irc"], noi=entry["noi"],
            rule=ca.CaRule(block_threshold=entry.get("blockThreshold", 5)),
        )
        return ca.format_grid(ca.generate(params), params)
    if kind == "level":
        d = entry["design"]
        base = ca.GenParams(
            seed=d["seed"], width=d["width"], height=d["height"],
            irc=d["irc"], noi=d["noi"],
            rule=ca.CaRule(block_threshold=d.get("blockThreshold", 5)),
        )
        suite = analysis.default_levers(base, d.get("levers", 4))
        spec = analysis.place_objectives(
            base, suite,
            min_flips_at_least=d.get("minFlipsAtLeast", 0),
            treasure_count=d.get("treasureCount", 0),
        )
        return levels.spec_to_json(spec)
    if kind in ("report", "report-oracle"):
        spec = levels.spec_from_json(
            (golden_dir / entry["spec"]).read_text(encoding="utf-8")
        )
        if kind == "report":
            report = analysis.analyze(spec)
        else:
            report = analysis.brute_force_oracle(spec)
        return analysis.report_to_json(report)
    if kind == "annotated":
        spec = levels.spec_from_json(
            (golden_dir / entry["spec"]).read_text(encoding="utf-8")
        )
        return levels.format_level(spec)
    if kind == "story-tree":
        tree = story.generate_story_tree(entry["seed"], entry["branching"], entry["depth"])
        return json.dumps(story.tree_to_dict(tree.root), indent=2) + "\n"
    if kind == "transcript":
        tree = story.generate_story_tree(entry["seed"], entry["branching"], entry["depth"])
        session = story.new_session(tree, entry["sessionSeed"])
        for op in _parse_script(entry["script"]):
            if op[0] == "peek":
                session.peek(op[1], op[2])
            else:
                session.choose(op[1])
        return session.transcript()
    if kind == "sweep":
        rows = analysis.expressive_sweep(
            entry["width"], entry["height"], entry["ircs"], entry["nois"], entry["seeds"],
        )
        return analysis.sweep_to_csv(rows)
    raise ValueError(f"unknown golden kind {kind!r}")


def cmd_verify_golden(args) -> int:
    golden_dir = Path(args.dir)
    manifest_path = golden_dir / "manifest.json"
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    failures = 0
    for entry in manifest["entries"]:
        name = entry["file"]
        expected = _golden_content(entry, golden_dir)
        target = golden_dir / name
        if args.write:
            target.write_text(expected, encoding="utf-8")
            sys.stdout.write(f"WROTE {name}\n")
            continue
        if not target.exists():
            sys.stdout.write(f"FAIL {name} (missing)\n")
            failures += 1
            continue
        actual = target.read_text(encoding="utf-8")
        if actual == expected:
            sys.stdout.write(f"PASS {name}\n")
        else:
            sys.stdout.write(f"FAIL {name} (content differs)\n")
            failures += 1
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomeria",
        description="Cave-generation game engine and design workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a generated grid as text")
    _add_base_args(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="analyze a level spec JSON file")
    p.add_argument("spec", help="path to the level spec JSON")
    p.add_argument("--oracle", action="store_true",
                   help="use the brute-force state search instead of the graph")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker threads for per-config grid labeling")
    p.add_argument("--pretty", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("design", help="place start/exit/treasures to hit targets")
    _add_base_args(p)
    p.add_argument("--levers", type=int, default=4,
                   help="size of the auto-placed lever suite (default 4)")
    p.add_argument("--levers-file", default=None,
                   help="JSON list of lever objects to use instead")
    p.add_argument("--start", default=None, help="x,y (default: auto)")
    p.add_argument("--min-flips", type=int, default=0)
    p.add_argument("--treasures", type=int, default=0)
    p.add_argument("--spec-out", default=None)
    p.add_argument("--report-out", default=None)
    p.add_argument("--annotated", default=None,
                   help="also write the annotated grid text here")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("sweep", help="expressive-range metrics as CSV")
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--irc", required=True, help="comma-separated IRC values")
    p.add_argument("--noi", required=True, help="comma-separated NOI values")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--threshold", type=int, default=5)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("story", help="branching-story tools")
    story_sub = p.add_subparsers(dest="story_command", required=True)

    ps = story_sub.add_parser("sim", help="run a scripted story session")
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--branching", type=int, required=True)
    ps.add_argument("--depth", type=int, required=True)
    ps.add_argument("--session-seed", type=int, default=None)
    ps.add_argument("--script", default="",
                    help="comma-separated p:<choice>:<d> and c:<choice> tokens")
    ps.add_argument("--pretty", action="store_true")
    ps.add_argument("-o", "--output", default=None)
    ps.set_defaults(func=cmd_story_sim)

    ph = story_sub.add_parser("hit-rate", help="Monte-Carlo vision hit rate")
    ph.add_argument("--branching", type=int, required=True)
    ph.add_argument("--depth", type=int, required=True)
    ph.add_argument("--trials", type=int, default=100_000)
    ph.add_argument("--seed", type=int, default=1)
    ph.add_argument("-o", "--output", default=None)
    ph.set_defaults(func=cmd_story_hit_rate)

    p = sub.add_parser("verify-golden", help="recompute and compare golden files")
    p.add_argument("--dir", default="tests/golden")
    p.add_argument("--write", action="store_true",
                   help="regenerate golden files in place (maintainers only)")
    p.set_defaults(func=cmd_verify_golden)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--listen", default="127.0.0.1:8000", help="host:port")
    p.add_argument("--store", default=None,
                   help="state directory (default: $TOMERIA_STORE or ./tomeria-store)")
    p.add_argument("--ui", default=None, help="static web client directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PlacementFailure as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (CapacityError, GameError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
