"""Run-directory persistence: reports, summary tables, curves, and plots.

Layout per experiment run:

    <run_dir>/
        report.json          full report + resolved config + fingerprint
        summary.csv          one row per (configuration, fold) or (participant, budget)
        fold-<k>/
            metrics.json     the fold entry without its training history
            curves.csv       per-epoch training history
            checkpoint.pt    trained detector for that fold (when available)
        fold_accuracy.png    per-fold bars (fold-based protocols)
        accuracy_vs_budget.png  budget curve (sweep protocol)

All writes go through a temp file and an atomic rename, so an interrupted
run never leaves a truncated report behind.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .detectors import save_detector
from .errors import DataError
from .protocols import ExperimentReport

REPORT_NAME = "report.json"
SUMMARY_NAME = "summary.csv"
CURVES_NAME = "curves.csv"
METRICS_NAME = "metrics.json"
CHECKPOINT_NAME = "checkpoint.pt"


# ---------------------------------------------------------------------------
# atomic writers


def atomic_write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    return path


def atomic_write_json(path: str | Path, obj) -> Path:
    return atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def atomic_write_csv(path: str | Path, header: list[str], rows: list[list]) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return atomic_write_text(path, buf.getvalue())


# ---------------------------------------------------------------------------
# tables


def _fmt(value) -> object:
    if isinstance(value, float):
        return f"{value:.6f}"
    return value


def summary_rows(report: ExperimentReport) -> tuple[list[str], list[list]]:
    """Flatten a report into the summary table."""
    metrics = ("accuracy", "precision", "recall", "f1")
    if report.protocol == "single_participant_sweep":
        header = ["participant", "budget", "n_train", "n_val", "n_test", *metrics]
        rows = [
            [
                r["participant"],
                f"{r['budget']:.2f}",
                r["n_train_windows"],
                r["n_val_windows"],
                r["n_test_windows"],
                *(_fmt(r["test"][m]) for m in metrics),
            ]
            for r in report.folds
        ]
        return header, rows
    if report.protocol == "cross_participant" and report.grid:
        header = ["config", "overrides", "fold", *metrics]
        rows = []
        for j, combo in enumerate(report.grid):
            overrides = json.dumps(combo["overrides"], sort_keys=True)
            for fr in combo["folds"]:
                rows.append(
                    [j, overrides, fr["fold"], *(_fmt(fr[m]) for m in metrics)]
                )
        return header, rows
    # transfer and other fold-based layouts: one row per fold
    header = ["fold", *metrics]
    rows = [
        [f["fold"], *(_fmt(f["test"][m]) for m in metrics)] for f in report.folds
    ]
    return header, rows


def _history_table(history: list[dict]) -> tuple[list[str], list[list]]:
    keys: list[str] = []
    for entry in history:
        for k in entry:
            if k not in keys:
                keys.append(k)
    rows = [[_fmt(entry.get(k, "")) for k in keys] for entry in history]
    return keys, rows


# ---------------------------------------------------------------------------
# plots


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_fold_accuracy(report: ExperimentReport, path: str | Path) -> Path | None:
    entries = [f for f in report.folds if "fold" in f and "test" in f]
    if not entries:
        return None
    plt = _plt()
    folds = [f["fold"] for f in entries]
    accs = [f["test"]["accuracy"] for f in entries]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar([str(k) for k in folds], accs, color="#4878a8")
    baselines = [
        f.get("baseline", {}).get("test", {}).get("accuracy") for f in entries
    ]
    if any(b is not None for b in baselines):
        ax.plot(
            range(len(folds)),
            [b if b is not None else float("nan") for b in baselines],
            "k_",
            markersize=18,
            label="threshold baseline",
        )
        ax.legend(loc="lower right", fontsize=8)
    ax.set_xlabel("fold")
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"{report.protocol}: per-fold test accuracy")
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def plot_budget_curve(report: ExperimentReport, path: str | Path) -> Path | None:
    by_budget = report.summary.get("by_budget", {})
    points = [
        (float(b), v["metrics"]["accuracy"]["mean"], v["metrics"]["accuracy"]["sd"])
        for b, v in sorted(by_budget.items())
        if v.get("n", 0) > 0 and v.get("metrics")
    ]
    if not points:
        return None
    plt = _plt()
    xs = [p[0] for p in points]
    means = [p[1] for p in points]
    sds = [p[2] for p in points]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.errorbar(xs, means, yerr=sds, marker="o", capsize=3, color="#4878a8")
    ax.set_xlabel("training budget (fraction of own windows)")
    ax.set_ylabel("test accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("single-participant accuracy vs training budget")
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# persistence


def persist_experiment(
    run_dir: str | Path,
    report: ExperimentReport,
    config: dict | None = None,
    config_fingerprint: str | None = None,
    save_checkpoints: bool = True,
) -> dict:
    """Write the full run-directory layout; returns written paths."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    written: dict = {"run_dir": str(run_dir)}

    doc = report.to_dict()
    if config is not None:
        doc["resolved_config"] = config
    if config_fingerprint is not None:
        doc["config_fingerprint"] = config_fingerprint
    written["report"] = str(atomic_write_json(run_dir / REPORT_NAME, doc))

    header, rows = summary_rows(report)
    written["summary"] = str(atomic_write_csv(run_dir / SUMMARY_NAME, header, rows))

    detectors = report.artifacts.get("detectors", [])
    fold_entries = [f for f in report.folds if "fold" in f]
    if report.protocol != "single_participant_sweep":
        for i, entry in enumerate(fold_entries):
            fold_dir = run_dir / f"fold-{entry['fold']}"
            fold_dir.mkdir(parents=True, exist_ok=True)
            slim = {
                k: v
                for k, v in entry.items()
                if k not in ("history", "finetune_history")
            }
            atomic_write_json(fold_dir / METRICS_NAME, slim)
            history = entry.get("history") or entry.get("finetune_history") or []
            if history:
                hk, hr = _history_table(history)
                atomic_write_csv(fold_dir / CURVES_NAME, hk, hr)
            if save_checkpoints and i < len(detectors):
                save_detector(
                    fold_dir / CHECKPOINT_NAME,
                    detectors[i],
                    extra={"fold": entry["fold"], "protocol": report.protocol},
                )
        written["folds"] = [str(run_dir / f"fold-{e['fold']}") for e in fold_entries]

    bars = plot_fold_accuracy(report, run_dir / "fold_accuracy.png")
    if bars:
        written["fold_accuracy_plot"] = str(bars)
    curve = plot_budget_curve(report, run_dir / "accuracy_vs_budget.png")
    if curve:
        written["budget_plot"] = str(curve)
    return written


def load_report(run_dir: str | Path) -> ExperimentReport:
    path = Path(run_dir) / REPORT_NAME
    if not path.exists():
        raise DataError(f"no {REPORT_NAME} under {run_dir}; run an experiment first")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"cannot parse {path}: {exc}") from exc
    return ExperimentReport.from_dict(doc)


def summarize_run(run_dir: str | Path, regenerate: bool = True) -> str:
    """Human-readable digest of a finished run; refreshes derived files."""
    run_dir = Path(run_dir)
    report = load_report(run_dir)
    if regenerate:
        header, rows = summary_rows(report)
        atomic_write_csv(run_dir / SUMMARY_NAME, header, rows)
        plot_fold_accuracy(report, run_dir / "fold_accuracy.png")
        plot_budget_curve(report, run_dir / "accuracy_vs_budget.png")

    lines = [f"protocol: {report.protocol}", f"run dir: {run_dir}"]
    metrics = report.summary.get("metrics")
    if metrics:
        for name, stats in metrics.items():
            lines.append(
                f"  {name}: {stats['mean']:.4f} +/- {stats['sd']:.4f} (n={stats['n']})"
            )
    if "baseline_accuracy" in report.summary:
        b = report.summary["baseline_accuracy"]
        lines.append(f"  threshold baseline accuracy: {b['mean']:.4f} +/- {b['sd']:.4f}")
    if "majority_accuracy" in report.summary:
        b = report.summary["majority_accuracy"]
        lines.append(f"  majority baseline accuracy: {b['mean']:.4f} +/- {b['sd']:.4f}")
    if "all_trunks_frozen" in report.summary:
        lines.append(f"  all trunks frozen: {report.summary['all_trunks_frozen']}")
    by_budget = report.summary.get("by_budget")
    if by_budget:
        for b, v in sorted(by_budget.items()):
            if v.get("n", 0) and v.get("metrics"):
                acc = v["metrics"]["accuracy"]
                lines.append(
                    f"  budget {b}: accuracy {acc['mean']:.4f} +/- {acc['sd']:.4f} "
                    f"(n={v['n']})"
                )
            else:
                lines.append(f"  budget {b}: no completed runs")
    if report.selected:
        lines.append(f"  selected overrides: {report.selected.get('overrides')}")
    if report.skipped:
        lines.append(f"  skipped: {len(report.skipped)} entries")
    return "\n".join(lines)
