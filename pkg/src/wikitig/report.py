"""Metric report serialization (JSON + one-row TSV) and figure rendering."""

from __future__ import annotations

import json
from pathlib import Path

from .metrics import CELL_TYPES, ROUGE_VARIANTS, MetricReport, PRF

TSV_COLUMNS = (
    "n_documents",
    "rouge_1", "rouge_2", "rouge_l",
    "table_f1_header", "table_f1_group", "table_f1_value",
    "corpus_f1_header", "corpus_f1_group", "corpus_f1_value",
)


def _display(score: float) -> float:
    return round(score * 100, 1)


def _prf_dict(prf: PRF) -> dict:
    return {"precision": prf.precision, "recall": prf.recall, "f1": prf.f1}


def report_to_json_dict(report: MetricReport, config: dict | None = None) -> dict:
    """Display scores x100 at one decimal, full precision under "raw"."""
    out: dict = {}
    if config is not None:
        out["config"] = config
    out["n_documents"] = report.n_documents
    out["rouge"] = {v: _display(report.rouge_f1(v)) for v in ROUGE_VARIANTS}
    out["table_f1"] = {t: _display(report.table_f1_mean(t)) for t in CELL_TYPES}
    out["corpus_f1"] = {t: _display(report.corpus[t].f1) for t in CELL_TYPES}
    out["raw"] = {
        "rouge": {v: report.rouge_f1(v) for v in ROUGE_VARIANTS},
        "table_f1": {t: report.table_f1_mean(t) for t in CELL_TYPES},
        "corpus_f1": {t: _prf_dict(report.corpus[t]) for t in CELL_TYPES},
        "doc_ids": list(report.doc_ids),
        "parse_failures": list(report.parse_failures),
        "per_doc": {
            "rouge": {
                v: [p.f1 for p in report.rouge_per_doc[v]] for v in ROUGE_VARIANTS
            },
            "table_f1": {
                t: [None if p is None else p.f1 for p in report.table_per_doc[t]]
                for t in CELL_TYPES
            },
        },
    }
    return out


def report_to_tsv(report: MetricReport) -> str:
    values = [str(report.n_documents)]
    values += [f"{_display(report.rouge_f1(v)):.1f}" for v in ROUGE_VARIANTS]
    values += [f"{_display(report.table_f1_mean(t)):.1f}" for t in CELL_TYPES]
    values += [f"{_display(report.corpus[t].f1):.1f}" for t in CELL_TYPES]
    return "\t".join(TSV_COLUMNS) + "\n" + "\t".join(values) + "\n"


def write_report(report: MetricReport, out_dir: Path | str, config: dict | None = None,
                 figures: bool = True) -> list[Path]:
    """Write report.json and report.tsv, and render figures next to them."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    json_path = out_dir / "report.json"
    json_path.write_text(
        json.dumps(report_to_json_dict(report, config), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    paths.append(json_path)

    tsv_path = out_dir / "report.tsv"
    tsv_path.write_text(report_to_tsv(report), encoding="utf-8")
    paths.append(tsv_path)

    if figures:
        paths.extend(render_report_figures(report, out_dir))
    return paths


def render_report_figures(report: MetricReport, out_dir: Path | str) -> list[Path]:
    """Bar chart of the summary columns and per-type score histograms."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    paths = []

    labels = TSV_COLUMNS[1:]
    values = [_display(report.rouge_f1(v)) for v in ROUGE_VARIANTS]
    values += [_display(report.table_f1_mean(t)) for t in CELL_TYPES]
    values += [_display(report.corpus[t].f1) for t in CELL_TYPES]
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.bar(range(len(values)), values, color="#4878a8")
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("score")
    ax.set_ylim(0, 100)
    ax.set_title(f"table evaluation over {report.n_documents} documents")
    fig.tight_layout()
    bar_path = out_dir / "report_scores.png"
    fig.savefig(bar_path, dpi=120)
    plt.close(fig)
    paths.append(bar_path)

    fig, axes = plt.subplots(1, len(CELL_TYPES), figsize=(10, 3), sharey=True)
    for ax, cell_type in zip(axes, CELL_TYPES):
        scores = [p.f1 * 100 for p in report.table_per_doc[cell_type] if p is not None]
        if scores:
            ax.hist(scores, bins=20, range=(0, 100), color="#4878a8")
        ax.set_title(f"{cell_type} F1 per document", fontsize=9)
        ax.set_xlabel("F1")
    axes[0].set_ylabel("documents")
    fig.tight_layout()
    hist_path = out_dir / "report_per_doc_f1.png"
    fig.savefig(hist_path, dpi=120)
    plt.close(fig)
    paths.append(hist_path)

    return paths


def render_bootstrap_figure(diff_means: dict[str, list[float]], out_dir: Path | str) -> Path:
    """Histogram of resampled mean differences per metric."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    metrics = list(diff_means)
    fig, axes = plt.subplots(1, len(metrics), figsize=(3 * len(metrics), 3), squeeze=False)
    for ax, name in zip(axes[0], metrics):
        ax.hist(diff_means[name], bins=30, color="#4878a8")
        ax.axvline(0.0, color="#a84848", linewidth=1)
        ax.set_title(name, fontsize=9)
    fig.tight_layout()
    path = out_dir / "significance_resamples.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
