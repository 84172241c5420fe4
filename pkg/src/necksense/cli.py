"""Command-line entry points.

Verbs:

    synth                         generate the synthetic corpus on disk
    facemap pretrain              stage-1 training on a disjoint cohort
    facemap finetune              continue from the pretrain checkpoint
    facemap eval                  report reconstruction MAE on calibration data
    facemap reconstruct           run a checkpoint over rendered stimulus frames
    detect train|transfer|sweep   the three experiment regimes
    detect eval                   score a saved detector on a dataset
    report summarize              digest a finished run directory

Configuration comes from ``--config <file>`` (JSON or YAML) plus repeated
``--set key.path=value`` overrides; unknown keys are rejected. The run
root defaults to ``runs/`` and can be redirected with the
NECKSENSE_RUN_ROOT environment variable. Exit codes: 0 success, 2 config
error, 3 data error, 4 training failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .config import (
    build_dataclass,
    config_fingerprint,
    resolve_config,
    run_dir_for,
    run_root,
)
from .errors import DataError, NeckSenseError
from .metrics import macro_metrics
from .reaction import build_window_set
from .registry import STATE_COLUMNS
from .reporting import (
    atomic_write_csv,
    atomic_write_json,
    persist_experiment,
    summarize_run,
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", default=None, help="JSON or YAML config file")
    parser.add_argument(
        "--set",
        "-s",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        dest="overrides",
        help="dotted config override, e.g. detect.spec.arch=minirocket",
    )


def _config_from(args: argparse.Namespace, extra: list[str] | None = None) -> dict:
    exprs = list(args.overrides)
    if extra:
        exprs.extend(extra)
    return resolve_config(args.config, exprs)


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args: argparse.Namespace) -> int:
    from .synthetic.corpus import CorpusConfig, gen_corpus

    extra = []
    if args.participants is not None:
        extra.append(f"corpus.n_participants={args.participants}")
    if args.seed is not None:
        extra.append(f"corpus.seed={args.seed}")
    if args.out is not None:
        extra.append(f"corpus.out={args.out}")
    config = _config_from(args, extra)
    section = {k: v for k, v in config["corpus"].items() if k != "out"}
    corpus_config = build_dataclass(CorpusConfig, section, "corpus")
    out = Path(config["corpus"]["out"])
    summary = gen_corpus(out, corpus_config)
    summary["config_fingerprint"] = config_fingerprint(config)
    print(json.dumps(summary, indent=2))
    return 0


# ---------------------------------------------------------------------------
# facemap stages


def _facemap_dir(config: dict) -> Path:
    return run_root(config) / "facemap"


def _facemap_ckpt_path(config: dict, stage: str) -> Path:
    configured = str(config["facemap"]["checkpoints"][stage]).strip()
    return Path(configured) if configured else _facemap_dir(config) / f"{stage}.pt"


def _facemap_model_config(config: dict):
    from .facemap import FacemapConfig

    return build_dataclass(FacemapConfig, config["facemap"]["model"], "facemap.model")


def _facemap_schedule(config: dict, stage: str):
    from .facemap import FacemapSchedule

    section = dict(config["facemap"]["schedule"])
    section["stage"] = stage
    return build_dataclass(FacemapSchedule, section, "facemap.schedule")


def _augment_for(config: dict, stage: str):
    from .imaging import augment_policy

    if not config["facemap"]["augment"]["enabled"]:
        return None
    return augment_policy(stage)


def _calibration_dataset(config: dict, model_config):
    from .facemap import concat_datasets, dataset_from_corpus_dir

    data = config["facemap"]["data"]
    root = Path(data["root"])
    participants = [str(p) for p in data["participants"]]
    if not participants:
        data_dir = root / "data"
        if not data_dir.is_dir():
            raise DataError(
                f"no corpus under {root}; run `synth "
                "--set corpus.render=calibration` first"
            )
        participants = sorted(p.name for p in data_dir.iterdir() if p.is_dir())
    merged = concat_datasets(
        dataset_from_corpus_dir(root, pid, model_config.imaging)
        for pid in participants
    )
    stride = int(data["frame_stride"])
    if stride > 1:
        merged = merged.subset(np.arange(0, len(merged), stride))
    cap = int(data["max_frames"])
    if cap > 0 and len(merged) > cap:
        merged = merged.subset(np.arange(cap))
    return merged


def _history_csv(path: Path, history: list[dict]) -> None:
    if not history:
        return
    keys = list(history[0].keys())
    atomic_write_csv(
        path, keys, [[entry.get(k, "") for k in keys] for entry in history]
    )


def cmd_facemap_pretrain(args: argparse.Namespace) -> int:
    from .facemap import build_facemap, save_checkpoint, train_facemap
    from .facemap.data import dataset_from_sessions
    from .synthetic.profiles import gen_profiles
    from .synthetic.sessions import gen_calibration_session

    config = _config_from(args)
    model_config = _facemap_model_config(config)
    pre = config["facemap"]["pretrain"]
    height = int(pre["height"]) or 2 * model_config.half_height
    width = int(pre["width"]) or 2 * model_config.half_width

    profiles = gen_profiles(int(pre["n_participants"]), int(pre["seed"]))
    sessions = [
        gen_calibration_session(
            profile,
            duration_s=float(pre["duration_s"]),
            fps=int(pre["fps"]),
            seed=int(pre["seed"]),
            height=height,
            width=width,
        )
        for profile in profiles
    ]
    dataset = dataset_from_sessions(sessions, model_config)
    model = build_facemap(model_config)
    schedule = _facemap_schedule(config, "pretrain")
    model, history = train_facemap(
        model, dataset, schedule, augment_policy=_augment_for(config, "pretrain")
    )

    path = _facemap_ckpt_path(config, "pretrain")
    fingerprint = save_checkpoint(
        path, model, schedule=dataclasses.asdict(schedule),
        extra={"stage": "pretrain", "config_fingerprint": config_fingerprint(config)},
    )
    _history_csv(path.parent / "pretrain_history.csv", history)
    last = history[-1]
    print(
        json.dumps(
            {
                "stage": "pretrain",
                "checkpoint": str(path),
                "fingerprint": fingerprint,
                "epochs": len(history),
                "final_val_mae_f": last["val_mae_f"],
                "final_val_mae_o": last["val_mae_o"],
            },
            indent=2,
        )
    )
    return 0


def cmd_facemap_finetune(args: argparse.Namespace) -> int:
    from .facemap import (
        build_facemap,
        load_checkpoint,
        run_temporal_cv,
        save_checkpoint,
        train_facemap,
    )

    config = _config_from(args)
    pretrain_path = _facemap_ckpt_path(config, "pretrain")
    if not pretrain_path.exists():
        raise DataError(
            f"no pretrain checkpoint at {pretrain_path}; "
            "run `facemap pretrain` first"
        )
    loaded = load_checkpoint(pretrain_path)
    model = loaded["model"]
    model_config = loaded["config"]
    parent_fingerprint = loaded["fingerprint"]

    dataset = _calibration_dataset(config, model_config)
    schedule = _facemap_schedule(config, "finetune")
    augment = _augment_for(config, "finetune")
    out_path = _facemap_ckpt_path(config, "finetune")

    if args.cv:
        result = run_temporal_cv(
            model_config,
            dataset,
            schedule,
            augment_policy=augment,
            n_folds=int(config["facemap"]["n_folds"]),
        )
        model = result["final_model"]
        history = result["final_history"]
        atomic_write_json(
            out_path.parent / "cv_metrics.json",
            {
                "folds": [
                    {k: v for k, v in fold.items() if k != "history"}
                    for fold in result["folds"]
                ],
                "mean_test_mae_f": result["mean_test_mae_f"],
                "mean_test_mae_o": result["mean_test_mae_o"],
            },
        )
    else:
        model, history = train_facemap(model, dataset, schedule, augment_policy=augment)

    fingerprint = save_checkpoint(
        out_path,
        model,
        schedule=dataclasses.asdict(schedule),
        parent_fingerprint=parent_fingerprint,
        extra={"stage": "finetune", "config_fingerprint": config_fingerprint(config)},
    )
    _history_csv(out_path.parent / "finetune_history.csv", history)
    last = history[-1]
    print(
        json.dumps(
            {
                "stage": "finetune",
                "checkpoint": str(out_path),
                "fingerprint": fingerprint,
                "parent_fingerprint": parent_fingerprint,
                "epochs": len(history),
                "final_val_mae_f": last["val_mae_f"],
                "final_val_mae_o": last["val_mae_o"],
            },
            indent=2,
        )
    )
    return 0


def _load_facemap_checkpoint(config: dict, preferred: str | None):
    from .facemap import load_checkpoint

    if preferred:
        path = Path(preferred)
        if not path.exists():
            raise DataError(f"no checkpoint at {path}")
        return load_checkpoint(path), path
    for stage in ("finetune", "pretrain"):
        path = _facemap_ckpt_path(config, stage)
        if path.exists():
            return load_checkpoint(path), path
    raise DataError(
        "no facemap checkpoint found; run `facemap pretrain` "
        "(and optionally `facemap finetune`) first"
    )


def cmd_facemap_eval(args: argparse.Namespace) -> int:
    from .facemap import evaluate_facemap

    config = _config_from(args)
    loaded, path = _load_facemap_checkpoint(config, args.checkpoint)
    dataset = _calibration_dataset(config, loaded["config"])
    mae_f, mae_o = evaluate_facemap(loaded["model"], dataset)
    out = {
        "checkpoint": str(path),
        "fingerprint": loaded["fingerprint"],
        "n_frames": len(dataset.states),
        "mae_f": mae_f,
        "mae_o": mae_o,
    }
    out_dir = _facemap_dir(config)
    atomic_write_json(out_dir / "eval_metrics.json", out)
    print(json.dumps(out, indent=2))
    return 0


def _stimulus_frame_pairs(vid_dir: Path):
    import re

    from PIL import Image

    frame_re = re.compile(r"ir_left_(\d{6})\.png$")
    lefts = sorted(p for p in vid_dir.glob("ir_left_*.png") if frame_re.search(p.name))
    if not lefts:
        raise DataError(
            f"{vid_dir} has no rendered frames; regenerate the corpus with "
            "`synth --set corpus.render=all`"
        )
    pairs, indices = [], []
    for left_path in lefts:
        idx = int(frame_re.search(left_path.name).group(1))
        right_path = left_path.with_name(f"ir_right_{idx:06d}.png")
        if not right_path.exists():
            raise DataError(f"missing right-camera frame {right_path}")
        left = np.asarray(Image.open(left_path), dtype=np.float64) / 255.0
        right = np.asarray(Image.open(right_path), dtype=np.float64) / 255.0
        pairs.append((left, right))
        indices.append(idx)
    return pairs, indices


def cmd_facemap_reconstruct(args: argparse.Namespace) -> int:
    import pandas as pd

    from .facemap import reconstruct

    config = _config_from(args)
    loaded, ckpt_path = _load_facemap_checkpoint(config, args.checkpoint)
    model = loaded["model"]
    root = Path(config["facemap"]["data"]["root"])
    participants = [str(p) for p in config["facemap"]["data"]["participants"]]
    data_dir = root / "data"
    if not data_dir.is_dir():
        raise DataError(f"no corpus under {root}; run `synth` first")
    if not participants:
        participants = sorted(p.name for p in data_dir.iterdir() if p.is_dir())

    out_root = _facemap_dir(config) / "reconstruct"
    batch_size = int(config["facemap"]["reconstruct"]["batch_size"])
    written = []
    for pid in participants:
        stim_root = data_dir / pid / "stimulus"
        if not stim_root.is_dir():
            raise DataError(f"{data_dir / pid} has no stimulus sessions")
        for vid_dir in sorted(d for d in stim_root.iterdir() if d.is_dir()):
            pairs, indices = _stimulus_frame_pairs(vid_dir)
            truth = pd.read_csv(vid_dir / "truth.csv")
            times = truth["timestamp_s"].to_numpy(np.float64)
            timestamps = np.array([times[i] for i in indices])
            _, states = reconstruct(
                model, pairs, timestamps=timestamps, batch_size=batch_size
            )
            table = pd.DataFrame({"timestamp_s": timestamps})
            for j, col in enumerate(STATE_COLUMNS):
                table[col] = states[:, j]
            out_path = out_root / pid / f"{vid_dir.name}.csv"
            out_path.parent.mkdir(parents=True, exist_ok=True)
            tmp = out_path.with_name(out_path.name + ".tmp")
            table.to_csv(tmp, index=False, float_format="%.6f")
            tmp.replace(out_path)
            written.append({"session": f"{pid}/{vid_dir.name}", "rows": len(table)})
    print(
        json.dumps(
            {
                "checkpoint": str(ckpt_path),
                "out": str(out_root),
                "sessions": written,
            },
            indent=2,
        )
    )
    return 0


# ---------------------------------------------------------------------------
# detect


def _detect_objects(config: dict):
    from .detectors import DetectorSchedule, DetectorSpec

    spec = build_dataclass(DetectorSpec, config["detect"]["spec"], "detect.spec")
    schedule = build_dataclass(
        DetectorSchedule, config["detect"]["schedule"], "detect.schedule"
    )
    return spec, schedule


def _detect_dataset(config: dict, name: str):
    from .synthetic.corpus import load_reaction_dataset

    return load_reaction_dataset(Path(config["detect"]["data_root"]), name)


def _var_threshold(config: dict):
    pca = config["detect"]["pca"]
    return float(pca["var_threshold"]) if pca["enabled"] else None


def _finish_run(config: dict, label: str, report) -> int:
    run_dir = run_dir_for(config, label)
    persist_experiment(
        run_dir, report, config=config, config_fingerprint=config_fingerprint(config)
    )
    print(summarize_run(run_dir, regenerate=False))
    return 0


def cmd_detect_train(args: argparse.Namespace) -> int:
    from .protocols import FoldPlan, make_participant_folds, run_cross_participant

    extra = []
    if args.dataset:
        extra.append(f"detect.dataset={args.dataset}")
    if args.arch:
        extra.append(f"detect.spec.arch={args.arch}")
    config = _config_from(args, extra)
    spec, schedule = _detect_objects(config)
    dataset = _detect_dataset(config, config["detect"]["dataset"])
    section = config["detect"]
    plan = make_participant_folds(
        dataset.participants(), n_folds=int(section["n_folds"]), seed=int(section["seed"])
    )
    if section["single_fold"]:
        plan = FoldPlan(folds=(plan.folds[0],), n_folds=1, seed=plan.seed)
    report = run_cross_participant(
        dataset,
        spec,
        schedule,
        plan,
        grid=[dict(g) for g in section["grid"]] or None,
        stride_train=int(section["windowing"]["stride_train"]),
        stride_eval=int(section["windowing"]["stride_eval"]),
        var_threshold=_var_threshold(config),
        margin_k=int(section["margin_k"]),
    )
    return _finish_run(config, f"detect-train-{spec.arch}", report)


def cmd_detect_transfer(args: argparse.Namespace) -> int:
    from .detectors import DetectorSchedule
    from .protocols import make_participant_folds, run_transfer

    extra = []
    if args.source:
        extra.append(f"detect.transfer.source={args.source}")
    if args.target:
        extra.append(f"detect.transfer.target={args.target}")
    if args.arch:
        extra.append(f"detect.spec.arch={args.arch}")
    config = _config_from(args, extra)
    spec, schedule = _detect_objects(config)
    section = config["detect"]
    src = _detect_dataset(config, section["transfer"]["source"])
    dst = _detect_dataset(config, section["transfer"]["target"])
    shared = sorted(set(src.participants()) & set(dst.participants()))
    plan = make_participant_folds(
        shared, n_folds=int(section["n_folds"]), seed=int(section["seed"])
    )
    finetune_schedule = build_dataclass(
        DetectorSchedule, section["finetune_schedule"], "detect.finetune_schedule"
    )
    report = run_transfer(
        src,
        dst,
        spec,
        schedule,
        plan,
        finetune_schedule=finetune_schedule,
        stride_train=int(section["windowing"]["stride_train"]),
        stride_eval=int(section["windowing"]["stride_eval"]),
        margin_k=int(section["margin_k"]),
    )
    label = f"detect-transfer-{src.name}-to-{dst.name}"
    return _finish_run(config, label, report)


def cmd_detect_sweep(args: argparse.Namespace) -> int:
    from .protocols import run_single_participant_sweep

    extra = []
    if args.budgets:
        extra.append(f"detect.budgets={args.budgets}")
    if args.arch:
        extra.append(f"detect.spec.arch={args.arch}")
    config = _config_from(args, extra)
    spec, schedule = _detect_objects(config)
    section = config["detect"]
    dataset = _detect_dataset(config, section["dataset"])
    participants = [str(p) for p in section["sweep_participants"]] or None
    report = run_single_participant_sweep(
        dataset,
        spec,
        schedule,
        budgets=tuple(float(b) for b in section["budgets"]),
        participants=participants,
        stride=int(section["windowing"]["stride_train"]),
        margin_k=int(section["margin_k"]),
        seed=int(section["seed"]),
    )
    return _finish_run(config, f"detect-sweep-{spec.arch}", report)


def cmd_detect_eval(args: argparse.Namespace) -> int:
    from .detectors import load_detector, predict

    config = _config_from(args)
    section = config["detect"]
    ckpt = args.checkpoint or str(section["checkpoint"]).strip()
    if not ckpt:
        raise DataError(
            "detect eval needs a checkpoint; pass --checkpoint or set "
            "detect.checkpoint (run `detect train` first)"
        )
    loaded = load_detector(ckpt)
    det = loaded["detector"]
    dataset = _detect_dataset(config, section["dataset"])
    participants = [str(p) for p in section["eval_participants"]] or None
    windows = build_window_set(
        dataset.sequences,
        det.spec.interval_len,
        int(section["windowing"]["stride_eval"]),
        participants,
    )
    if windows.n_windows == 0:
        raise DataError("no windows to evaluate; check participants and dataset")
    labels, _ = predict(det, windows)
    report = macro_metrics(labels, windows.y)
    out = {
        "checkpoint": ckpt,
        "dataset": dataset.name,
        "n_windows": windows.n_windows,
        "participants": windows.participants(),
        "metrics": report.to_dict(),
    }
    run_dir = run_dir_for(config, "detect-eval")
    atomic_write_json(Path(run_dir) / "eval_metrics.json", out)
    print(json.dumps(out, indent=2))
    return 0


# ---------------------------------------------------------------------------
# report


def cmd_report_summarize(args: argparse.Namespace) -> int:
    print(summarize_run(args.run_dir))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="necksense",
        description="Synthetic neck-camera facial reconstruction and "
        "reaction-based error detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate the synthetic corpus")
    _add_common(p_synth)
    p_synth.add_argument("--participants", type=int, default=None)
    p_synth.add_argument("--seed", type=int, default=None)
    p_synth.add_argument("--out", default=None, help="corpus output directory")
    p_synth.set_defaults(func=cmd_synth)

    p_facemap = sub.add_parser("facemap", help="facial reconstruction stages")
    fm_sub = p_facemap.add_subparsers(dest="stage", required=True)
    fm_pre = fm_sub.add_parser("pretrain", help="train on a disjoint synthetic cohort")
    _add_common(fm_pre)
    fm_pre.set_defaults(func=cmd_facemap_pretrain)
    fm_fin = fm_sub.add_parser("finetune", help="continue from the pretrain checkpoint")
    _add_common(fm_fin)
    fm_fin.add_argument(
        "--cv", action="store_true", help="run temporal cross-validation first"
    )
    fm_fin.set_defaults(func=cmd_facemap_finetune)
    fm_eval = fm_sub.add_parser("eval", help="MAE on calibration data")
    _add_common(fm_eval)
    fm_eval.add_argument("--checkpoint", default=None)
    fm_eval.set_defaults(func=cmd_facemap_eval)
    fm_rec = fm_sub.add_parser("reconstruct", help="emit facial-state CSV streams")
    _add_common(fm_rec)
    fm_rec.add_argument("--checkpoint", default=None)
    fm_rec.set_defaults(func=cmd_facemap_reconstruct)

    p_detect = sub.add_parser("detect", help="reaction classification experiments")
    dt_sub = p_detect.add_subparsers(dest="regime", required=True)
    dt_train = dt_sub.add_parser("train", help="cross-participant folds")
    _add_common(dt_train)
    dt_train.add_argument("--dataset", default=None, choices=(None, "neck", "open"))
    dt_train.add_argument("--arch", default=None)
    dt_train.set_defaults(func=cmd_detect_train)
    dt_tr = dt_sub.add_parser("transfer", help="last-layer transfer between datasets")
    _add_common(dt_tr)
    dt_tr.add_argument("--source", default=None, choices=(None, "neck", "open"))
    dt_tr.add_argument("--target", default=None, choices=(None, "neck", "open"))
    dt_tr.add_argument("--arch", default=None)
    dt_tr.set_defaults(func=cmd_detect_transfer)
    dt_sw = dt_sub.add_parser("sweep", help="single-participant budget sweep")
    _add_common(dt_sw)
    dt_sw.add_argument("--budgets", default=None, help="comma list, e.g. 0.05,0.45")
    dt_sw.add_argument("--arch", default=None)
    dt_sw.set_defaults(func=cmd_detect_sweep)
    dt_ev = dt_sub.add_parser("eval", help="score a saved detector")
    _add_common(dt_ev)
    dt_ev.add_argument("--checkpoint", default=None)
    dt_ev.set_defaults(func=cmd_detect_eval)

    p_report = sub.add_parser("report", help="post-hoc reporting")
    rp_sub = p_report.add_subparsers(dest="action", required=True)
    rp_sum = rp_sub.add_parser("summarize", help="digest a run directory")
    rp_sum.add_argument("run_dir")
    rp_sum.set_defaults(func=cmd_report_summarize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NeckSenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
