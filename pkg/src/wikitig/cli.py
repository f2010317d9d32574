"""Command-line front end: extract, split, emit, eval-table, stats, significance.

Diagnostics go to stderr; machine-readable output goes to files or stdout.
Exit code is 0 exactly when no error occurred.  WIKITIG_THREADS overrides
the extraction worker count (default 1); output is deterministic either way.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .emit import GEOMETRY_CAPS, TASKS, emit_dataset, read_records_jsonl, record_to_json
from .extract import ExtractionReport, extract_infoboxes
from .metrics import (
    CELL_TYPES,
    ROUGE_VARIANTS,
    TableParseError,
    delinearize,
    evaluate,
    paired_bootstrap,
)
from .report import render_bootstrap_figure, report_to_json_dict, write_report
from .split import SPLITS, assign_split
from .stats import (
    ALL,
    cells_per_table_stats,
    dataset_stats_json,
    per_header_value_stats,
    render_frequency_table,
    render_summaries,
    cell_type_frequencies,
)

_PAGE_DELIMITER = re.compile(r"^<!--\s*PAGE\s+(\S+)\s*-->\s*$")


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _worker_count() -> int:
    raw = os.environ.get("WIKITIG_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"WIKITIG_THREADS must be an integer, got {raw!r}")


def _iter_pages(paths: list[str]):
    """Yield (page_id, html, ok) units from files, directories, or
    concatenated dumps delimited by `<!--PAGE <id>-->` lines."""
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files = sorted(path.glob("*.html"))
            if not files:
                _log(f"warning: no *.html files under {path}")
            for f in files:
                yield from _read_page_file(f)
        elif path.suffix == ".html":
            yield from _read_page_file(path)
        else:
            yield from _read_dump_stream(path)


def _read_page_file(path: Path):
    try:
        html = path.read_text(encoding="utf-8")
    except (UnicodeDecodeError, OSError) as exc:
        _log(f"warning: skipping {path}: {exc}")
        yield path.stem, None, False
        return
    yield path.stem, html, True


def _read_dump_stream(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except (UnicodeDecodeError, OSError) as exc:
        _log(f"warning: skipping {path}: {exc}")
        yield path.name, None, False
        return
    page_id = None
    buffer: list[str] = []
    for line in text.splitlines(keepends=True):
        m = _PAGE_DELIMITER.match(line.strip())
        if m:
            if page_id is not None:
                yield page_id, "".join(buffer), True
            page_id = m.group(1)
            buffer = []
        else:
            buffer.append(line)
    if page_id is not None:
        yield page_id, "".join(buffer), True
    elif buffer:
        yield path.stem, "".join(buffer), True


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func"}
    config = {k: v for k, v in vars(args).items() if k not in skip}
    config["version"] = __version__
    config["threads"] = _worker_count()
    return config


def cmd_extract(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pages = list(_iter_pages(args.input))

    def process(page):
        page_id, html, ok = page
        if not ok:
            report = ExtractionReport(pages_seen=1, pages_failed=1)
            return [], report
        return extract_infoboxes(html, page_id)

    workers = _worker_count()
    total = ExtractionReport()
    records = []
    if workers == 1:
        results = map(process, pages)
    else:
        executor = ThreadPoolExecutor(max_workers=workers)
        results = executor.map(process, pages)
    for page_records, report in results:
        records.extend(page_records)
        total.update(report)
    if workers > 1:
        executor.shutdown()

    config = _config_dict(args)
    records_path = out_dir / "records.jsonl"
    ordered = sorted(records, key=lambda r: (r.title, r.record_id))
    with open(records_path, "w", encoding="utf-8") as fh:
        for record in ordered:
            fh.write(json.dumps(record_to_json(record, assign_split(record.title)), ensure_ascii=False) + "\n")

    report_path = out_dir / "extract_report.json"
    report_path.write_text(
        json.dumps({"config": config, **total.to_json_dict()}, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    (out_dir / "run_config.json").write_text(
        json.dumps(config, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )

    emit_dataset(ordered, args.task, out_dir, cap=args.cap)
    if not records:
        _log("warning: no qualifying infoboxes found")
    _log(
        f"extract: {total.pages_seen} pages, {total.infoboxes_seen} infoboxes, "
        f"{total.records_emitted} records -> {out_dir}"
    )
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    print(assign_split(args.title))
    return 0


def cmd_emit(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    pairs = read_records_jsonl(args.input)
    written = emit_dataset([r for r, _ in pairs], args.task, out_dir, cap=args.cap)
    (out_dir / "run_config.json").write_text(
        json.dumps(_config_dict(args), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    if not pairs:
        _log("warning: no records in input")
    _log(f"emit: {len(pairs)} records -> {len(written)} files under {out_dir}")
    return 0


def _read_eval_file(path: str) -> dict[str, tuple[str, int]]:
    """id -> (linearized table, 1-based file line number)."""
    out: dict[str, tuple[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "table" in obj:
                table = obj["table"]
            elif "table_linearized" in obj:
                table = obj["table_linearized"]
            else:
                raise ValueError(f"{path}:{lineno}: need a \"table\" or \"table_linearized\" key")
            doc_id = str(obj["id"])
            if doc_id in out:
                raise ValueError(f"{path}:{lineno}: duplicate id {doc_id!r}")
            out[doc_id] = (table, lineno)
    if not out:
        raise ValueError(f"{path}: no documents")
    return out


def _align_ids(gen: dict, ref: dict) -> list[str]:
    missing_in_gen = sorted(set(ref) - set(gen))
    missing_in_ref = sorted(set(gen) - set(ref))
    if missing_in_gen or missing_in_ref:
        parts = []
        if missing_in_gen:
            parts.append(f"ids missing from generated file: {', '.join(missing_in_gen[:10])}")
        if missing_in_ref:
            parts.append(f"ids missing from reference file: {', '.join(missing_in_ref[:10])}")
        raise ValueError("; ".join(parts))
    return sorted(gen)


def cmd_eval_table(args: argparse.Namespace) -> int:
    gen = _read_eval_file(args.gen)
    ref = _read_eval_file(args.ref)
    ids = _align_ids(gen, ref)

    if args.mode == "strict":
        for doc_id in ids:
            table, lineno = gen[doc_id]
            try:
                delinearize(table, "strict")
            except TableParseError as exc:
                raise ValueError(f"{args.gen}:{lineno}: {exc}") from exc

    report = evaluate(
        [gen[i][0] for i in ids],
        [ref[i][0] for i in ids],
        mode=args.mode,
        doc_ids=ids,
    )
    if report.parse_failures:
        _log(f"warning: {len(report.parse_failures)} generations scored as empty tables")

    config = _config_dict(args)
    if args.out:
        paths = write_report(report, args.out, config, figures=args.figures)
        _log("eval-table: wrote " + ", ".join(str(p) for p in paths))
    else:
        print(json.dumps(report_to_json_dict(report, config), ensure_ascii=False, indent=2))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    dataset = []
    for raw in args.input:
        path = Path(raw)
        files = sorted(path.glob("*.jsonl")) if path.is_dir() else [path]
        for f in files:
            dataset.extend(read_records_jsonl(f))
    if not dataset:
        raise ValueError("no records in input")

    print(render_frequency_table(cell_type_frequencies(dataset)))
    type_summaries = {}
    appearance_summaries = {}
    for scope in (ALL, *SPLITS):
        subset = dataset if scope == ALL else [(r, s) for r, s in dataset if s == scope]
        if not subset:
            continue
        try:
            t, a = per_header_value_stats(subset)
        except ValueError:
            continue
        type_summaries[scope] = t
        appearance_summaries[scope] = a
    print(render_summaries(type_summaries, "Type frequencies of values for each header"))
    print(render_summaries(appearance_summaries, "Appearance frequencies of values for each header"))
    print(render_summaries(cells_per_table_stats(dataset), "Number of cells in tables"))

    if args.out:
        payload = {"config": _config_dict(args), **dataset_stats_json(dataset)}
        Path(args.out).write_text(
            json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        _log(f"stats: wrote {args.out}")
    return 0


def _per_doc_scores(report_obj: dict) -> dict[str, dict[str, float]]:
    """metric name -> {doc id -> score} from an eval-table report JSON."""
    raw = report_obj.get("raw")
    if raw is None or "per_doc" not in raw or "doc_ids" not in raw:
        raise ValueError("not an eval-table report (missing raw.per_doc)")
    ids = [str(i) for i in raw["doc_ids"]]
    out: dict[str, dict[str, float]] = {}
    for variant in ROUGE_VARIANTS:
        out[f"rouge_{variant}"] = dict(zip(ids, raw["per_doc"]["rouge"][variant]))
    for cell_type in CELL_TYPES:
        scores = raw["per_doc"]["table_f1"][cell_type]
        out[f"table_f1_{cell_type}"] = {
            i: s for i, s in zip(ids, scores) if s is not None
        }
    return out


def cmd_significance(args: argparse.Namespace) -> int:
    with open(args.report_a, encoding="utf-8") as fh:
        obj_a = json.load(fh)
    with open(args.report_b, encoding="utf-8") as fh:
        obj_b = json.load(fh)

    results: dict[str, dict] = {}
    viz: dict[str, list[float]] = {}
    if isinstance(obj_a, list) or isinstance(obj_b, list):
        if not (isinstance(obj_a, list) and isinstance(obj_b, list)):
            raise ValueError("mix of raw score array and report JSON")
        pairs = {"score": (list(map(float, obj_a)), list(map(float, obj_b)))}
    else:
        scores_a = _per_doc_scores(obj_a)
        scores_b = _per_doc_scores(obj_b)
        ids_a = set(obj_a["raw"]["doc_ids"])
        ids_b = set(obj_b["raw"]["doc_ids"])
        if ids_a != ids_b:
            missing = sorted(ids_a ^ ids_b)
            raise ValueError(f"document ids differ between reports: {', '.join(missing[:10])}")
        pairs = {}
        for metric in scores_a:
            shared = sorted(set(scores_a[metric]) & set(scores_b[metric]))
            if len(shared) >= 2:
                pairs[metric] = (
                    [scores_a[metric][i] for i in shared],
                    [scores_b[metric][i] for i in shared],
                )
    if args.metric:
        unknown = [m for m in args.metric if m not in pairs]
        if unknown:
            raise ValueError(f"unknown metric(s): {', '.join(unknown)}; have {', '.join(sorted(pairs))}")
        pairs = {m: pairs[m] for m in args.metric}
    if not pairs:
        raise ValueError("no metrics with at least 2 paired per-document scores")

    for metric, (a, b) in sorted(pairs.items()):
        result = paired_bootstrap(a, b, args.resamples, args.seed)
        results[metric] = {
            "p_value": result.p_value,
            "wins": result.wins,
            "ties": result.ties,
            "losses": result.losses,
            "n_resamples": result.n_resamples,
            "seed": result.seed,
            "n_documents": len(a),
            "mean_a": sum(a) / len(a),
            "mean_b": sum(b) / len(b),
        }
        if args.out:
            viz[metric] = _resample_diffs_for_figure(a, b, args.seed)

    payload = {"config": _config_dict(args), "metrics": results}
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "significance.json").write_text(
            json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        if args.figures:
            fig_path = render_bootstrap_figure(viz, out_dir)
            _log(f"significance: wrote {out_dir / 'significance.json'}, {fig_path}")
        else:
            _log(f"significance: wrote {out_dir / 'significance.json'}")
    else:
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    return 0


def _resample_diffs_for_figure(a: list[float], b: list[float], seed: int, n: int = 2000) -> list[float]:
    rng = np.random.default_rng(seed)
    diffs = np.asarray(a) - np.asarray(b)
    idx = rng.integers(0, len(diffs), size=(n, len(diffs)))
    return diffs[idx].mean(axis=1).tolist()


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wikitig",
        description="Build infobox table/image datasets from Wikipedia HTML and score generated tables.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="parse article HTML into dataset files")
    p.add_argument("--input", nargs="+", required=True, help="*.html files, directories, or delimited dumps")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--task", choices=TASKS, default="table")
    p.add_argument("--cap", type=int, choices=GEOMETRY_CAPS, default=480)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("split", help="print the split label for a title")
    p.add_argument("--title", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("emit", help="serialize extracted records into task files")
    p.add_argument("--input", required=True, help="records.jsonl from extract")
    p.add_argument("--out", required=True)
    p.add_argument("--task", choices=TASKS, default="table")
    p.add_argument("--cap", type=int, choices=GEOMETRY_CAPS, default=480)
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("eval-table", help="score generated tables against references")
    p.add_argument("--gen", required=True, help="JSONL with id + table per line")
    p.add_argument("--ref", required=True, help="JSONL with id + table (dataset files work)")
    p.add_argument("--mode", choices=("strict", "lenient"), default="lenient")
    p.add_argument("--out", help="directory for report.json, report.tsv, figures")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_eval_table)

    p = sub.add_parser("stats", help="corpus statistics tables")
    p.add_argument("--input", nargs="+", required=True, help="dataset JSONL files or directories")
    p.add_argument("--out", help="path for the JSON equivalent")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("significance", help="paired bootstrap between two eval reports")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("--resamples", type=_positive_int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", action="append", help="restrict to named metric(s)")
    p.add_argument("--out", help="directory for significance.json and figure")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    p.set_defaults(func=cmd_significance)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
