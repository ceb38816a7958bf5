"""Batch entry points: ingest, fit-theory, train, evaluate, payoff-study,
analyze, plot, and serve.

Every run that writes outputs also writes a manifest (resolved config +
seeds + versions) next to them, with no volatile fields, so identical
manifests imply byte-identical JSON outputs.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    build_contingency,
    chi_square_independence,
    confusion_matrix,
    aggregate_teams,
    correlation_report,
    read_teams_csv,
)
from .block_theory import DEFAULT_PARAMS, TheoryParams, fit_theory_params
from .features import (
    RoleVocab,
    build_features_block,
    build_features_off,
)
from .game import PayoffTable, solve
from .ingest import (
    DataLoadError,
    load_dataset,
    load_events,
    load_freeze_frames,
    save_dataset,
    split_dataset,
)
from .metrics import Scenario, xosot, xsot
from .nnet import (
    BLOCK_MODEL_CONFIG,
    OFF_MODEL_CONFIG,
    SEARCH_GRID,
    expand_grid,
    grid_search_cv,
    predict,
    train_mlp,
)
from .pitch_control import ControlParams
from .service.engine import ScenarioEngine, bundled_path, load_bundled_fixtures
from .service.schemas import PlayerModel, ScenarioRequest

class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        raise UsageError(message)


def _write_json(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _write_manifest(out_dir: Path, command: str, config: dict) -> None:
    _write_json(out_dir / "manifest.json", {
        "command": command,
        "config": config,
        "package_version": __version__,
    })


def _dataset_paths(args) -> tuple:
    events, frames = load_dataset(args.dataset)
    return events, frames


def _engine(args) -> ScenarioEngine:
    control = ControlParams()
    if getattr(args, "config", None):
        control = ControlParams.from_json(args.config)
    return ScenarioEngine.load(models_dir=getattr(args, "models", None),
                               theory_path=getattr(args, "theory", None),
                               control=control)


def _scenario_from_event(event, frame, engine: ScenarioEngine) -> Scenario:
    return Scenario(
        shooter_xy=event.location, shooter_role=event.shooter_role, frame=frame,
        off_model=engine.off_model, block_model=engine.block_model,
        theory=engine.theory, control=engine.control)


def _request_from_event(event, frame) -> ScenarioRequest:
    players = [PlayerModel(x=p.x, y=p.y, teammate=p.teammate, keeper=p.keeper)
               for p in frame.players if not p.actor]
    return ScenarioRequest(shooter={"role": event.shooter_role,
                                    "x": event.x, "y": event.y},
                           players=players)


def _resolve_request(args) -> tuple[str, ScenarioRequest]:
    """Find the scenario for --event among bundled fixtures, then the dataset."""
    for f in load_bundled_fixtures():
        if f.id == args.event:
            req = f.request
            if args.remove_closest:
                req = req.model_copy(deep=True)
                req.options.remove_closest = True
            return f.id, req
    if getattr(args, "dataset", None):
        events, frames = _dataset_paths(args)
        for e in events:
            if e.event_id == args.event:
                if e.event_id not in frames:
                    raise DataLoadError(f"event {args.event} has no freeze frame")
                req = _request_from_event(e, frames[e.event_id])
                req.options.remove_closest = args.remove_closest
                return e.event_id, req
    raise DataLoadError(f"event {args.event!r} not found among fixtures"
                        + (" or dataset events" if getattr(args, "dataset", None) else ""))


def _print_attacker_table(response: dict) -> None:
    print(f"{'attacker':>10} {'P(on)':>7} {'P(off)':>7} {'P(block)':>9} {'P(control)':>11}")
    for row in response["attackers"]:
        name = row["label"] or ("shooter" if row["attacker_id"] == -1
                                else str(row["attacker_id"]))
        control = "-" if row["p_control"] is None else f"{row['p_control']:.2f}"
        print(f"{name:>10} {row['p_on']:>7.2f} {row['p_off']:>7.2f} "
              f"{row['p_block']:>9.2f} {control:>11}")


def _cmd_ingest(args) -> int:
    data_dir = Path(args.data_dir)
    events = load_events(data_dir / "events")
    if not events:
        raise DataLoadError(f"no shot events found under {data_dir / 'events'}")
    frames_dir = data_dir / "three-sixty"
    frames = load_freeze_frames(frames_dir) if frames_dir.is_dir() else {}
    frames = {fid: fr for fid, fr in frames.items()
              if fid in {e.event_id for e in events}}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_dataset(out / "dataset.json", events, frames)
    _write_manifest(out, "ingest", {"data_dir": str(data_dir), "seed": args.seed})
    print(f"ingested {len(events)} shot events ({len(frames)} with frames) "
          f"-> {out / 'dataset.json'}")
    return 0


def _cmd_fit_theory(args) -> int:
    events, frames = _dataset_paths(args)
    split = split_dataset(events, seed=args.seed)
    train = [(e.location, frames.get(e.event_id), e.outcome == "Block")
             for e in split.train]
    params, cv_cel = fit_theory_params(train, method=args.method,
                                       folds=split.folds,
                                       max_iter=args.max_iter)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params.to_json(out / "theory_params.json")
    _write_json(out / "theory_cv.json", {
        "method": args.method,
        "fold_cel": cv_cel,
        "mean_cel": float(np.mean(cv_cel)) if cv_cel else None,
        "std_cel": float(np.std(cv_cel)) if cv_cel else None,
    })
    _write_manifest(out, "fit-theory", {
        "dataset": str(args.dataset), "method": args.method, "seed": args.seed})
    mean = float(np.mean(cv_cel)) if cv_cel else float("nan")
    print(f"fit-theory[{args.method}]: 5-fold mean validation CEL {mean:.4f}")
    print(f"params -> {out / 'theory_params.json'}")
    return 0


def _build_rows(events, frames, theory, vocab, kind: str):
    if kind == "off":
        return [build_features_off(e, vocab) for e in events]
    return [build_features_block(e, frames.get(e.event_id), theory, vocab)
            for e in events]


def _cmd_train(args) -> int:
    events, frames = _dataset_paths(args)
    theory = (TheoryParams.from_json(args.theory) if args.theory
              else DEFAULT_PARAMS)
    split = split_dataset(events, seed=args.seed)
    vocab = RoleVocab.build(split.train)
    rows = _build_rows(split.train, frames, theory, vocab, args.model)
    config = OFF_MODEL_CONFIG if args.model == "off" else BLOCK_MODEL_CONFIG
    config = replace(config, seed=args.seed, epochs=args.epochs)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.grid != "none":
        grid = SEARCH_GRID if args.grid == "full" else {
            "num_layers": (1, 2), "hidden_dim": (32, 64)}
        best, results = grid_search_cv(rows, split.folds,
                                       expand_grid(grid, base=config), vocab)
        config = best
        _write_json(out / f"grid_{args.model}.json", [
            {"config": list(r.config.grid_key()), "mean_cel": r.mean_cel,
             "std_cel": r.std_cel} for r in results])

    # Stratified fold 0 doubles as the checkpoint holdout.
    train_idx, valid_idx = split.folds[0]
    model = train_mlp([rows[i] for i in train_idx], config, vocab,
                      valid_rows=[rows[i] for i in valid_idx])
    model.to_json(out / f"dnn_{args.model}.json")
    _write_manifest(out, "train", {
        "dataset": str(args.dataset), "model": args.model, "seed": args.seed,
        "grid": args.grid, "config": list(config.grid_key())})
    print(f"trained dnn_{args.model} -> {out / f'dnn_{args.model}.json'}")
    return 0


def _cmd_evaluate(args) -> int:
    event_id, req = _resolve_request(args)
    if args.url:
        import httpx

        resp = httpx.post(f"{args.url.rstrip('/')}/scenario/evaluate",
                          json=req.model_dump(), timeout=30.0)
        resp.raise_for_status()
        doc = resp.json()
    else:
        engine = _engine(args)
        doc = engine.evaluate(req).model_dump()
    _print_attacker_table(doc)
    if args.out:
        out = Path(args.out)
        _write_json(out / f"evaluation_{event_id}.json", doc)
        _write_manifest(out, "evaluate", {
            "event": event_id, "remove_closest": args.remove_closest,
            "models": str(args.models) if args.models else "bundled",
            "url": args.url or None})
        print(f"wrote {out / f'evaluation_{event_id}.json'}")
    return 0


def _cmd_payoff_study(args) -> int:
    events, frames = _dataset_paths(args)
    engine = _engine(args)
    from .block_theory import filter_defenders
    from .game import build_payoff_table

    tables = []
    for e in events:
        frame = frames.get(e.event_id)
        if frame is None:
            continue
        if len(filter_defenders(e.location, frame)) == 0:
            continue
        tables.append(build_payoff_table(_scenario_from_event(e, frame, engine)))
    if not tables:
        raise DataLoadError("no scenario with at least one feasible defender")
    avg = PayoffTable(
        shoot_blocking=float(np.mean([t.shoot_blocking for t in tables])),
        shoot_not_blocking=float(np.mean([t.shoot_not_blocking for t in tables])),
        pass_blocking=float(np.mean([t.pass_blocking for t in tables])),
        pass_not_blocking=float(np.mean([t.pass_not_blocking for t in tables])))
    nash = solve(avg)
    out = Path(args.out)
    doc = {
        "n_scenarios": len(tables),
        "payoff_table": {
            "shoot_blocking": avg.shoot_blocking,
            "shoot_not_blocking": avg.shoot_not_blocking,
            "pass_blocking": avg.pass_blocking,
            "pass_not_blocking": avg.pass_not_blocking,
        },
        "nash": {"pure": [list(p) for p in nash.pure],
                 "mixed": None if nash.mixed is None else {
                     "p_shoot": nash.mixed.p_shoot,
                     "q_block": nash.mixed.q_block,
                     "value": nash.mixed.value}},
    }
    _write_json(out / "payoff_study.json", doc)
    _write_manifest(out, "payoff-study", {
        "dataset": str(args.dataset), "seed": args.seed,
        "models": str(args.models) if args.models else "bundled"})
    print(f"payoff study over {len(tables)} situations "
          f"(|D| >= 1) -> {out / 'payoff_study.json'}")
    print(f"  shoot: {avg.shoot_blocking:.4f} / {avg.shoot_not_blocking:.4f}   "
          f"pass: {avg.pass_blocking:.4f} / {avg.pass_not_blocking:.4f}")
    print(f"  pure equilibria: {nash.pure}")
    return 0


def _cmd_analyze_chi_square(args) -> int:
    if args.dataset:
        events, _ = _dataset_paths(args)
        table = build_contingency(events, cross_matches=args.cross_matches)
    else:
        path = Path(args.table) if args.table else bundled_path("contingency_table12.json")
        table = np.array(json.loads(path.read_text())["counts"])
    stat, df, p = chi_square_independence(table)
    print(f"chi-square statistic {stat:.4f}, df {df}, p-value {p:.4f}")
    if args.out:
        out = Path(args.out)
        _write_json(out / "chi_square.json",
                    {"statistic": stat, "df": df, "p_value": p,
                     "counts": np.asarray(table).tolist()})
        _write_manifest(out, "analyze chi-square", {
            "table": str(args.table) if args.table else "bundled",
            "dataset": str(args.dataset) if args.dataset else None,
            "cross_matches": args.cross_matches})
    return 0


def _cmd_analyze_correlation(args) -> int:
    events, frames = _dataset_paths(args)
    engine = _engine(args)
    per_shot = []
    for e in events:
        frame = frames.get(e.event_id)
        if frame is None:
            continue
        s = _scenario_from_event(e, frame, engine)
        v_xsot = xsot(s)[0]
        v_xosot = xosot(s)[0]
        per_shot.append((e.team_name, e.match_id, v_xsot, v_xosot))
    aggregates = aggregate_teams(per_shot)
    csv_path = Path(args.teams_csv) if args.teams_csv else bundled_path("teams_xg.csv")
    external = read_teams_csv(csv_path)
    report, missing = correlation_report(aggregates, external)
    for pair, r in report.items():
        print(f"corr {pair}: {r:+.3f}")
    if missing:
        print(f"teams missing from {csv_path.name}: {', '.join(missing)}")
    if args.out:
        out = Path(args.out)
        _write_json(out / "correlation.json", {
            "correlations": report,
            "missing_teams": missing,
            "teams": [{"team": a.team, "matches": a.matches,
                       "avg_xsot": a.avg_xsot, "avg_xosot": a.avg_xosot,
                       "avg_max_prob": a.avg_max_prob,
                       "avg_goal": a.avg_goal, "xg": a.xg}
                      for a in aggregates]})
        _write_manifest(out, "analyze correlation", {
            "dataset": str(args.dataset), "teams_csv": str(csv_path),
            "models": str(args.models) if args.models else "bundled"})
    return 0


def _cmd_analyze_confusion(args) -> int:
    events, frames = _dataset_paths(args)
    engine = _engine(args)
    split = split_dataset(events, seed=args.seed)
    model = engine.off_model if args.model == "off" else engine.block_model
    rows = _build_rows(split.test, frames, engine.theory, model.vocab, args.model)
    probs = predict(model, rows)
    labels = [r.label for r in rows]
    cm = confusion_matrix(probs, labels, threshold=args.threshold)
    print(f"confusion matrix for dnn_{args.model} on the test split "
          f"(threshold {args.threshold}):")
    for actual in (0, 1):
        cells = [f"{cm.percentages[actual, pred]:6.2f}% ({cm.counts[actual, pred]})"
                 for pred in (0, 1)]
        print(f"  actual {actual}: " + "  ".join(cells))
    return 0


def _cmd_plot(args) -> int:
    from .plotting import plot_scenario

    event_id, req = _resolve_request(args)
    engine = _engine(args)
    response = engine.evaluate(req).model_dump()
    out = Path(args.out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        plot_scenario(req.model_dump(), response, out)
    except OSError as exc:
        raise DataLoadError(f"cannot write plot to {out}: {exc}") from exc
    print(f"wrote {out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    app = create_app(engine=_engine(args), webui_dir=args.webui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="shotgame",
                     description="Shot-taking decision analysis pipeline")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    data_default = os.environ.get("SHOTGAME_DATA")

    p = sub.add_parser("ingest", help="parse StatsBomb event + 360 files")
    p.add_argument("--data-dir", default=data_default, required=data_default is None,
                   help="directory holding events/ and three-sixty/ "
                        "(default: $SHOTGAME_DATA)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("fit-theory", help="fit the shot block model parameters")
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", default="powell",
                   choices=["powell", "nelder-mead", "fd-cg"])
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_fit_theory)

    p = sub.add_parser("train", help="train an outcome classifier")
    p.add_argument("--dataset", required=True)
    p.add_argument("--theory", default=None,
                   help="theory params JSON (default: bundled)")
    p.add_argument("--model", required=True, choices=["off", "block"])
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--grid", default="none", choices=["none", "small", "full"])
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("evaluate", help="evaluate one shot-taking situation")
    p.add_argument("--event", required=True,
                   help="bundled fixture id or dataset event uuid")
    p.add_argument("--dataset", default=None)
    p.add_argument("--models", default=None)
    p.add_argument("--theory", default=None)
    p.add_argument("--config", default=None, help="control params JSON")
    p.add_argument("--remove-closest", action="store_true")
    p.add_argument("--url", default=None,
                   help="evaluate against a running service instead of in-process")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("payoff-study",
                       help="average payoff table and Nash solution over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--models", default=None)
    p.add_argument("--theory", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_payoff_study)

    p = sub.add_parser("analyze", help="statistical studies")
    asub = p.add_subparsers(dest="analysis", required=True)

    pa = asub.add_parser("chi-square", help="outcome sequence independence test")
    pa.add_argument("--table", default=None,
                    help="contingency table JSON (default: bundled reference)")
    pa.add_argument("--dataset", default=None,
                    help="build the table from a dataset instead")
    pa.add_argument("--cross-matches", action="store_true")
    pa.add_argument("--out", default=None)
    pa.set_defaults(fn=_cmd_analyze_chi_square)

    pa = asub.add_parser("correlation", help="team metric correlation study")
    pa.add_argument("--dataset", required=True)
    pa.add_argument("--models", default=None)
    pa.add_argument("--theory", default=None)
    pa.add_argument("--config", default=None)
    pa.add_argument("--teams-csv", default=None)
    pa.add_argument("--out", default=None)
    pa.set_defaults(fn=_cmd_analyze_correlation)

    pa = asub.add_parser("confusion", help="test-split confusion matrix")
    pa.add_argument("--dataset", required=True)
    pa.add_argument("--models", default=None)
    pa.add_argument("--theory", default=None)
    pa.add_argument("--config", default=None)
    pa.add_argument("--model", required=True, choices=["off", "block"])
    pa.add_argument("--threshold", type=float, default=0.5)
    pa.add_argument("--seed", type=int, default=42)
    pa.set_defaults(fn=_cmd_analyze_confusion)

    p = sub.add_parser("plot", help="render an evaluated scenario to SVG")
    p.add_argument("--event", required=True)
    p.add_argument("--dataset", default=None)
    p.add_argument("--models", default=None)
    p.add_argument("--theory", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--remove-closest", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_plot)

    p = sub.add_parser("serve", help="run the scenario evaluation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--models", default=None)
    p.add_argument("--theory", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--webui", default=None,
                   help="static frontend bundle to serve at /")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.fn(args)
    except (DataLoadError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
