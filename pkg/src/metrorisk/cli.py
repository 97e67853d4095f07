"""Command-line entry point.

Every command writes a ``*.manifest.json`` next to its outputs recording the
command line, seed, input and output sha256 digests, tool version and wall
time. Outputs themselves carry no timestamps, so reruns are byte-identical.

Inputs given to ``--in`` are either a single perception stream (with
``--config``) or a corpus directory as written by ``simulate``: one
sub-directory per video holding ``stream.jsonl``, ``scene.json`` and
optionally ``labels.csv``.

Exit codes: 0 success, 1 data or configuration error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, evaluation, explain, geometry, heatmap, indicators, riskmodel, simulator
from .geometry import GeometryError
from .heatmap import HeatmapError
from .indicators import FEATURE_NAMES, IndicatorVector, WindowSpec
from .ingest import GridSpec, IngestError, SceneConfig, load_scene, read_stream, serialize_stream
from .projection import ProjectionError, estimate

log = logging.getLogger("metrorisk")

DATA_ERRORS = (
    IngestError, GeometryError, ProjectionError, HeatmapError, riskmodel.ModelError, explain.ShapleyError,
    evaluation.EvaluationError, simulator.ScenarioError, OSError, json.JSONDecodeError, csv.Error,
)


class DataError(Exception):
    pass


# ---------------------------------------------------------------- helpers


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _require(path) -> Path:
    p = Path(path)
    if not p.exists():
        raise DataError(f"no such file or directory: {p}")
    return p


class Run:
    """Collects inputs and outputs of one command for its manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.inputs: list[Path] = []
        self.outputs: list[Path] = []
        self.t0 = time.perf_counter()

    def read(self, path) -> Path:
        p = _require(path)
        if p.is_dir():
            self.inputs.extend(sorted(q for q in p.rglob("*") if q.is_file() and not q.name.endswith("manifest.json")))
        else:
            self.inputs.append(p)
        return p

    def write_text(self, path, text: str) -> Path:
        return self.write_bytes(path, text.encode())

    def write_bytes(self, path, data: bytes) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_bytes(data)
        self.outputs.append(p)
        return p

    def figure(self, path, draw, *a, **kw) -> None:
        if getattr(self.args, "no_figures", False):
            return
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        draw(*a, path=p, **kw)
        self.outputs.append(p)

    def manifest(self, anchor) -> None:
        anchor = Path(anchor)
        target = anchor / "manifest.json" if anchor.is_dir() else anchor.with_name(anchor.name + ".manifest.json")
        seeds = {k: v for k, v in vars(self.args).items() if k == "seed" and v is not None}
        doc = {
            "command": self.args.command,
            "argv": self.argv,
            "config": str(self.args.config) if getattr(self.args, "config", None) else None,
            "seeds": seeds,
            "inputs": {str(p): _sha256(p) for p in self.inputs},
            "outputs": {str(p): _sha256(p) for p in self.outputs if p.exists()},
            "version": __version__,
            "wall_time_s": round(time.perf_counter() - self.t0, 3),
        }
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _read_labels(path: Path) -> dict:
    labels = {}
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                labels[(row["video_id"], int(row["person_id"]))] = int(row["label"])
            except (KeyError, ValueError) as exc:
                raise DataError(f"{path}: bad labels row {row} ({exc})") from None
    return labels


class Video:
    def __init__(self, video_id: str, scene: SceneConfig, timelines: list, labels: dict):
        self.video_id = video_id
        self.scene = scene
        self.timelines = timelines
        self.labels = labels  # person_id -> label

    def label(self, pid):
        return self.labels.get(pid)


def _load_videos(run: Run, args) -> list[Video]:
    src = run.read(args.inp)
    extra = _read_labels(run.read(args.labels)) if getattr(args, "labels", None) else {}
    videos = []
    if src.is_dir():
        subdirs = sorted(p for p in src.iterdir() if (p / "stream.jsonl").exists())
        if not subdirs:
            raise DataError(f"{src}: no <video>/stream.jsonl entries found")
        for d in subdirs:
            scene = load_scene(_require(d / "scene.json")) if not args.config else load_scene(run.read(args.config))
            tls = read_stream(d / "stream.jsonl", video_id=d.name)
            lab = _read_labels(d / "labels.csv") if (d / "labels.csv").exists() else {}
            lab.update(extra)
            videos.append(Video(d.name, scene, tls, {pid: lbl for (v, pid), lbl in lab.items() if v == d.name}))
    else:
        if not args.config:
            raise DataError("a single stream needs --config")
        scene = load_scene(run.read(args.config))
        tls = read_stream(src)
        vid = tls[0].video_id if tls else src.stem
        videos.append(Video(vid, scene, tls, {pid: lbl for (v, pid), lbl in extra.items() if v == vid}))
    return videos


def _common_grid(videos) -> GridSpec:
    grid = videos[0].scene.grid
    if any(v.scene.grid != grid for v in videos):
        raise DataError("all videos must share one heatmap grid")
    return grid


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


INDICATOR_HEADER = ["video_id", "person_id", "window_end", *FEATURE_NAMES, "label"]


def _indicator_rows(text: str, path) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in ("video_id", "person_id", *FEATURE_NAMES) if c not in (reader.fieldnames or [])]
    if missing:
        raise DataError(f"{path}: indicator CSV lacks columns {missing}")
    rows = []
    for line, row in enumerate(reader, start=2):
        try:
            vec = IndicatorVector.from_array([float(row[c]) for c in FEATURE_NAMES])
            label = row.get("label")
            rows.append({
                "video_id": row["video_id"], "person_id": int(row["person_id"]),
                "window_end": row.get("window_end", ""), "vector": vec,
                "label": None if label in (None, "") else int(label),
            })
        except ValueError as exc:
            raise DataError(f"{path}:{line}: {exc}") from None
    return rows


def _labelled(rows, path):
    if any(r["label"] is None for r in rows):
        raise DataError(f"{path}: every row needs a label")
    return rows


# ---------------------------------------------------------------- commands


def cmd_calibrate(run: Run, args) -> int:
    src = run.read(args.inp)
    pairs = []
    with src.open(newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                pairs.append([float(v) for v in row[:4]])
            except ValueError:
                if pairs:
                    raise DataError(f"{src}: non-numeric correspondence row {row}") from None
                continue  # header
    if any(len(p) != 4 for p in pairs):
        raise DataError(f"{src}: rows must be src_x,src_y,dst_x,dst_y")
    a = np.array(pairs).reshape(-1, 4)
    fit = estimate(a[:, :2], a[:, 2:])
    cfg = load_scene(run.read(args.config)).replace(homography=fit.homography)
    run.write_text(args.out, json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"reprojection RMS {fit.rms:.6g} over {len(a)} correspondences")
    run.manifest(args.out)
    return 0


def cmd_zones(run: Run, args) -> int:
    cfg = load_scene(run.read(args.config))
    part = geometry.build_zone_partition(cfg)
    run.write_text(args.out, json.dumps(part.to_dict(), indent=2, sort_keys=True) + "\n")
    xs = [c[0] for c in cfg.corners.values()]
    ys = [c[1] for c in cfg.corners.values()]
    width = args.width or int(math.ceil(max(xs))) + 1
    height = args.height or int(math.ceil(max(ys))) + 1
    if args.pgm:
        run.write_bytes(args.pgm, geometry.render_pgm(part, width, height))
    if args.figure:
        from . import plots

        run.figure(args.figure, plots.zone_overlay, part, width, height)
    run.manifest(args.out)
    return 0


def cmd_heatmap(run: Run, args) -> int:
    videos = _load_videos(run, args)
    grid = _common_grid(videos)
    trajs = []
    any_labels = any(v.labels for v in videos)
    if not any_labels:
        log.warning("no labels given; the map uses every person")
    for v in videos:
        for tl in v.timelines:
            if any_labels and v.label(tl.person_id) != 1:
                continue
            trajs.append((f"{v.video_id}/{tl.person_id}", indicators.project_foot_points(tl, v.scene)))
    if not trajs:
        raise DataError("no at-risk trajectories to build a heatmap from")
    hmap = heatmap.build_risk_map(trajs, grid, args.sigma)
    out = Path(args.out)
    run.write_bytes(out / "heatmap.pgm", heatmap.to_pgm16(hmap))
    run.write_text(out / "heatmap.json", heatmap.sidecar_json(hmap))
    run.write_text(out / "heatmap.csv", heatmap.to_csv(hmap))
    from . import plots

    run.figure(out / "heatmap.png", plots.heatmap_figure, hmap)
    print(f"heatmap from {len(trajs)} trajectories, mass {hmap.mass:.6g}")
    run.manifest(out)
    return 0


def cmd_indicators(run: Run, args) -> int:
    videos = _load_videos(run, args)
    hmap = heatmap.from_csv(run.read(args.heatmap).read_text()) if args.heatmap else None
    kw = {"hysteresis": args.hysteresis, "lt_min_events": args.lt_min_events}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(INDICATOR_HEADER)
    n = 0
    for v in videos:
        part = geometry.build_zone_partition(v.scene)
        for tl in v.timelines:
            label = v.label(tl.person_id)
            lab = "" if label is None else str(label)
            if args.tau > 0:
                window = WindowSpec(args.tau, args.stride)
                results = indicators.sliding_indicators(tl, part, hmap, v.scene, window, **kw)
                pairs = [(r.end, r.vector) for r in results]
            else:
                end = int(tl.frames[-1]) if len(tl) else 0
                pairs = [(end, indicators.compute_indicators(tl, part, hmap, v.scene, **kw))]
            for end, vec in pairs:
                w.writerow([v.video_id, tl.person_id, end, *(_fmt(x) for x in _vector_values(vec)), lab])
                n += 1
    run.write_text(args.out, buf.getvalue())
    print(f"{n} indicator rows")
    run.manifest(args.out)
    return 0


def _vector_values(vec: IndicatorVector):
    return [vec.pr, vec.cr, vec.ncr, vec.ty, vec.ly, vec.bf, vec.lt, vec.e]


def _params(args) -> riskmodel.BoostParams:
    return riskmodel.BoostParams(rounds=args.rounds, seed=args.seed)


def cmd_train(run: Run, args) -> int:
    src = run.read(args.inp)
    rows = _labelled(_indicator_rows(src.read_text(), src), src)
    x = np.array([r["vector"].as_array() for r in rows]).reshape(-1, len(FEATURE_NAMES))
    y = np.array([r["label"] for r in rows])
    model = riskmodel.train(x, y, _params(args))
    run.write_text(args.out, riskmodel.dumps(model))
    print(f"trained {len(model.trees)} trees on {len(y)} rows; final loss {model.train_loss[-1]:.6g}")
    run.manifest(args.out)
    return 0


def _shapley_table(phi, base, margins, keys) -> str:
    headers = ["person", *FEATURE_NAMES, "base", "margin"]
    body = [[k, *(f"{v:+.4f}" for v in row), f"{base:+.4f}", f"{m:+.4f}"] for k, row, m in zip(keys, phi, margins)]
    widths = [max(len(str(r[i])) for r in [headers, *body]) for i in range(len(headers))]
    return "\n".join("  ".join(str(c).rjust(wd) for c, wd in zip(r, widths)) for r in [headers, *body]) + "\n"


def cmd_score(run: Run, args) -> int:
    model = riskmodel.load(run.read(args.model))
    src = run.read(args.inp)
    rows = _indicator_rows(src.read_text(), src)
    x = np.array([r["vector"].as_array() for r in rows]).reshape(-1, len(FEATURE_NAMES))
    probs = np.atleast_1d(np.asarray(riskmodel.predict(model, x), dtype=float)) if len(rows) else np.zeros(0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["video_id", "person_id", "window_end", "risk", "flagged"])
    keys = []
    for r, p in zip(rows, probs):
        w.writerow([r["video_id"], r["person_id"], r["window_end"], repr(float(p)), int(p > args.threshold)])
        keys.append(f"{r['video_id']}/{r['person_id']}@{r['window_end']}")
    text = buf.getvalue()
    run.write_text(args.out, text)
    print(_aligned(text), end="")
    if args.explain:
        bg = x
        if args.background:
            bsrc = run.read(args.background)
            bg = np.array([r["vector"].as_array() for r in _indicator_rows(bsrc.read_text(), bsrc)])
        phi, base = explain.shapley_matrix(model, x, bg)
        table = _shapley_table(phi, base, model.margin(x), keys)
        run.write_text(Path(args.out).with_suffix(".shap.txt"), table)
        print(table, end="")
    run.manifest(args.out)
    return 0


def _aligned(csv_text: str) -> str:
    rows = list(csv.reader(io.StringIO(csv_text)))
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in rows) + "\n"


def cmd_explain(run: Run, args) -> int:
    from . import plots

    model = riskmodel.load(run.read(args.model))
    src = run.read(args.inp)
    rows = _indicator_rows(src.read_text(), src)
    x = np.array([r["vector"].as_array() for r in rows]).reshape(-1, len(FEATURE_NAMES))
    counts = riskmodel.feature_importance(model)
    phi, base = explain.shapley_matrix(model, x, x)
    out = Path(args.out)
    doc = {
        "feature_names": list(FEATURE_NAMES),
        "importance": {n: int(c) for n, c in zip(FEATURE_NAMES, counts)},
        "internal_nodes": int(sum(len(t.internal_nodes()) for t in model.trees)),
        "base_value": base,
        "mean_abs_shapley": {n: float(v) for n, v in zip(FEATURE_NAMES, np.abs(phi).mean(axis=0))},
        "rows": [{"video_id": r["video_id"], "person_id": r["person_id"], "window_end": r["window_end"],
                  "phi": [float(v) for v in p]} for r, p in zip(rows, phi)],
    }
    run.write_text(out / "explain.json", json.dumps(doc, indent=2, sort_keys=True) + "\n")
    lines = [f"{n:>4}  {int(c):6d}  {doc['mean_abs_shapley'][n]:.4f}" for n, c in zip(FEATURE_NAMES, counts)]
    txt = "feat  splits  mean|phi|\n" + "\n".join(lines) + "\n"
    run.write_text(out / "explain.txt", txt)
    run.figure(out / "importance.png", plots.importance_figure, counts)
    run.figure(out / "shap_summary.png", plots.shap_summary, phi, x)
    print(txt, end="")
    run.manifest(out)
    return 0


def _generate(spec):
    return simulator.generate(spec)


def _scenarios(specs, jobs: int):
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_generate, specs))
    return [simulator.generate(s) for s in specs]


def _noise(args) -> simulator.NoiseSpec:
    return simulator.NO_NOISE if getattr(args, "no_noise", False) else simulator.NoiseSpec()


def cmd_evaluate(run: Run, args) -> int:
    from . import plots

    if args.profile and args.inp:
        raise DataError("give either --profile or --in, not both")
    if args.profile:
        specs = simulator.benchmark_corpus(args.profile, args.seed, _noise(args))
        items = [it for sc in _scenarios(specs, args.jobs) for it in simulator.to_instances(sc)]
        grid = specs[0].scene.grid
    elif args.inp and Path(args.inp).is_file() and Path(args.inp).suffix == ".csv":
        src = run.read(args.inp)
        rows = _labelled(_indicator_rows(src.read_text(), src), src)
        items = [evaluation.Instance(r["video_id"], r["person_id"], r["label"], r["vector"]) for r in rows]
        grid = None
    elif args.inp:
        videos = _load_videos(run, args)
        grid = _common_grid(videos)
        items = []
        for v in videos:
            part = geometry.build_zone_partition(v.scene)
            for tl in v.timelines:
                label = v.label(tl.person_id)
                if label is None:
                    raise DataError(f"{v.video_id}/{tl.person_id}: missing label")
                vec = indicators.compute_indicators(tl, part, None, v.scene)
                items.append(evaluation.Instance(v.video_id, tl.person_id, label, vec,
                                                 indicators.project_foot_points(tl, v.scene)))
    else:
        raise DataError("evaluate needs --profile or --in")
    pipeline = evaluation.RiskPipeline(grid, params=_params(args)) if grid is not None else _CsvPipeline(_params(args))
    report = evaluation.cross_validate(items, args.folds, pipeline, seed=args.seed, threshold=args.threshold)
    out = Path(args.out)
    table = report.table()
    run.write_text(out / "report.json", json.dumps(_finite(report.to_dict()), indent=2, sort_keys=True) + "\n")
    run.write_text(out / "report.txt", table)
    run.figure(out / "folds.png", plots.fold_metrics, report)
    print(table, end="")
    run.manifest(out)
    return 0


class _CsvPipeline:
    """Fold pipeline for precomputed indicator rows (``pr`` taken as given)."""

    def __init__(self, params):
        self.params = params

    def __call__(self, train_items, test_items):
        x = evaluation.RiskPipeline.design_matrix(train_items, None)
        y = np.array([it.label for it in train_items])
        model = riskmodel.train(x, y, self.params)
        return np.asarray(riskmodel.predict(model, evaluation.RiskPipeline.design_matrix(test_items, None)))


def _finite(obj):
    """NaN (undefined fold metric) becomes null in JSON reports."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def cmd_simulate(run: Run, args) -> int:
    specs = simulator.benchmark_corpus(args.profile, args.seed, _noise(args))
    out = Path(args.out)
    index = []
    for sc in _scenarios(specs, args.jobs):
        d = out / sc.spec.video_id
        run.write_text(d / "stream.jsonl", serialize_stream(sc.timelines))
        run.write_text(d / "scene.json", json.dumps(sc.spec.scene.to_dict(), indent=2, sort_keys=True) + "\n")
        run.write_text(d / "truth.json", sc.truth_json())
        run.write_text(d / "labels.csv", sc.labels_csv())
        index.append({"video_id": sc.spec.video_id, "n_control": sc.spec.n_control, "n_at_risk": sc.spec.n_at_risk})
    run.write_text(out / "corpus.json", json.dumps({"profile": args.profile, "seed": args.seed, "videos": index},
                                                  indent=2, sort_keys=True) + "\n")
    n_pos = sum(v["n_at_risk"] for v in index)
    n_neg = sum(v["n_control"] for v in index)
    print(f"{len(index)} videos, {n_neg} control / {n_pos} at-risk individuals -> {out}")
    run.manifest(out)
    return 0


COMMANDS = {
    "calibrate": cmd_calibrate, "zones": cmd_zones, "heatmap": cmd_heatmap, "indicators": cmd_indicators,
    "train": cmd_train, "score": cmd_score, "explain": cmd_explain, "evaluate": cmd_evaluate,
    "simulate": cmd_simulate,
}


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metrorisk", description="Platform risk indicators from perception streams.")
    p.add_argument("--version", action="version", version=f"metrorisk {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text, inp=False, config=False, out=True, seed=False, figures=False):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        if inp:
            sp.add_argument("--in", dest="inp", required=inp == "required", help="input file or corpus directory")
        if config:
            sp.add_argument("--config", required=config == "required", help="scene configuration JSON")
        if out:
            sp.add_argument("--out", required=True, help="output path")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if figures:
            sp.add_argument("--no-figures", action="store_true", help="skip PNG figures")
        return sp

    sp = add("calibrate", "estimate the image-to-platform homography", inp="required", config="required")

    sp = add("zones", "build the zone partition", config="required")
    sp.add_argument("--pgm", help="also write an 8-bit PGM overlay")
    sp.add_argument("--figure", help="also write a PNG overlay")
    sp.add_argument("--width", type=int)
    sp.add_argument("--height", type=int)

    sp = add("heatmap", "aggregate at-risk position heatmap", inp="required", config=True, figures=True)
    sp.add_argument("--labels", help="CSV video_id,person_id,label")
    sp.add_argument("--sigma", type=float, default=0.5, help="smoothing sigma, platform units")

    sp = add("indicators", "per-person indicator vectors", inp="required", config=True)
    sp.add_argument("--labels")
    sp.add_argument("--heatmap", help="aggregated heatmap CSV (pr = 0 without it)")
    sp.add_argument("--tau", type=int, default=0, help="window length in frames (0 = whole timeline)")
    sp.add_argument("--stride", type=int, default=1)
    sp.add_argument("--hysteresis", type=int, default=indicators.DEFAULT_HYSTERESIS)
    sp.add_argument("--lt-min-events", type=int, default=indicators.DEFAULT_LT_MIN_EVENTS)

    sp = add("train", "fit the boosted risk model", inp="required", seed=True)
    sp.add_argument("--rounds", type=int, default=riskmodel.BoostParams.rounds)

    sp = add("score", "risk scores for indicator rows", inp="required")
    sp.add_argument("--model", required=True)
    sp.add_argument("--threshold", type=float, default=evaluation.DEFAULT_THRESHOLD)
    sp.add_argument("--explain", action="store_true", help="also print the Shapley table")
    sp.add_argument("--background", help="indicator CSV used as Shapley background (default: the input)")

    sp = add("explain", "feature importance and Shapley summary", inp="required", figures=True)
    sp.add_argument("--model", required=True)

    sp = add("evaluate", "grouped k-fold cross-validation report", inp=True, config=True, seed=True, figures=True)
    sp.add_argument("--profile", choices=simulator.PROFILES)
    sp.add_argument("--labels")
    sp.add_argument("--folds", type=int, default=10)
    sp.add_argument("--threshold", type=float, default=evaluation.DEFAULT_THRESHOLD)
    sp.add_argument("--rounds", type=int, default=riskmodel.BoostParams.rounds)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--no-noise", action="store_true")

    sp = add("simulate", "write a synthetic corpus", seed=True)
    sp.add_argument("--profile", choices=simulator.PROFILES, default="smoke")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--no-noise", action="store_true")
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        parser.print_usage(sys.stderr)
        print("metrorisk: error: --jobs must be >= 1", file=sys.stderr)
        return 2
    run = Run(args, argv)
    try:
        return COMMANDS[args.command](run, args)
    except (DataError, *DATA_ERRORS) as exc:
        print(f"metrorisk {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
