"""Reconstruction model, datasets, temporal folds, checkpoints."""

import numpy as np
import pytest
import torch

from necksense.errors import DataError, InvalidArgumentError
from necksense.facemap import (
    FacemapConfig,
    FacemapSchedule,
    build_facemap,
    concat_datasets,
    dataset_from_corpus_dir,
    dataset_from_sessions,
    evaluate_facemap,
    load_checkpoint,
    param_count,
    reconstruct,
    save_checkpoint,
    temporal_5fold,
    train_facemap,
)
from necksense.facemap.data import FacemapDataset
from necksense.imaging import ImagingConfig
from necksense.nnutil import state_fingerprint
from necksense.registry import STATE_DIM, state_hi, state_lo
from necksense.synthetic import BehaviorConfig, gen_calibration_session, gen_profiles

TINY = FacemapConfig(depth=18, width_mult=0.125, decoder_hidden=32,
                     half_width=16, half_height=12)


def _tiny_dataset(n_participants=1, duration_s=3.0, seed=0):
    sessions = [
        gen_calibration_session(
            profile, duration_s=duration_s, fps=12, seed=seed,
            behavior=BehaviorConfig(pixel_noise_per_unit=0.0),
            height=24, width=32,
        )
        for profile in gen_profiles(n_participants, seed=77)
    ]
    return dataset_from_sessions(sessions, TINY.imaging, eager=True)


def test_build_facemap_deterministic():
    a = build_facemap(TINY)
    b = build_facemap(TINY)
    assert state_fingerprint(a) == state_fingerprint(b)
    c = build_facemap(FacemapConfig(**{**TINY.__dict__, "seed": 1}))
    assert state_fingerprint(a) != state_fingerprint(c)


def test_model_forward_shape():
    model = build_facemap(TINY)
    x = torch.zeros(3, 1, TINY.half_height, 2 * TINY.half_width)
    out = model(x)
    assert out.shape == (3, STATE_DIM)
    with pytest.raises(InvalidArgumentError):
        model(torch.zeros(3, TINY.half_height, 2 * TINY.half_width))


def test_width_mult_shrinks_model():
    small = param_count(build_facemap(TINY))
    big = param_count(build_facemap(FacemapConfig(
        depth=18, width_mult=0.25, decoder_hidden=32, half_width=16, half_height=12)))
    assert small < big


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        FacemapConfig(depth=17)
    with pytest.raises(InvalidArgumentError):
        FacemapConfig(output_dim=10)
    with pytest.raises(InvalidArgumentError):
        FacemapSchedule(stage="warmup")


def test_dataset_from_sessions_lazy_matches_eager():
    profile = gen_profiles(1, seed=77)[0]
    session = gen_calibration_session(
        profile, duration_s=2.0, fps=12, seed=0, height=24, width=32,
    )
    lazy = dataset_from_sessions([session], TINY.imaging)
    eager = dataset_from_sessions([session], TINY.imaging, eager=True)
    assert len(lazy) == len(eager) == 24
    assert np.allclose(lazy.tile(5), eager.tile(5))
    assert lazy.tile_shape() == (12, 32)
    strided = dataset_from_sessions([session], TINY.imaging, frame_stride=3)
    assert len(strided) == 8
    capped = dataset_from_sessions(
        [session], TINY.imaging, max_frames_per_session=5
    )
    assert len(capped) == 5


def test_concat_datasets():
    a = _tiny_dataset(1)
    b = _tiny_dataset(2)
    merged = concat_datasets([a, b])
    assert len(merged) == len(a) + len(b)
    assert np.allclose(merged.tile(0), a.tile(0))
    assert np.allclose(merged.tile(len(a)), b.tile(0))
    assert merged.participant_ids() == b.participant_ids()
    with pytest.raises(InvalidArgumentError):
        concat_datasets([])


def test_dataset_validation():
    with pytest.raises(InvalidArgumentError):
        FacemapDataset(
            states=np.full((2, STATE_DIM), 50.0),
            participants=["a", "b"],
            timestamps=np.arange(2.0),
        )  # neither tiles nor loaders
    with pytest.raises(InvalidArgumentError):
        FacemapDataset(
            states=np.full((2, STATE_DIM), 50.0),
            participants=["a"],
            timestamps=np.arange(2.0),
            tiles=np.zeros((2, 4, 8), dtype=np.float32),
        )


def test_temporal_folds_partition():
    ds = _tiny_dataset(2, duration_s=3.0)
    folds = temporal_5fold(ds, n_folds=5)
    assert len(folds) == 5
    n = len(ds)
    all_test = np.concatenate([test for _, test in folds])
    assert len(all_test) == n
    assert len(np.unique(all_test)) == n
    for train, test in folds:
        assert len(np.intersect1d(train, test)) == 0
        assert len(train) + len(test) == n
        # every participant appears in every fold's test block
        assert set(ds.participants[test]) == set(ds.participant_ids())
        # test indices per participant are temporally contiguous
        for pid in ds.participant_ids():
            rows = np.flatnonzero(ds.participants == pid)
            chosen = np.intersect1d(test, rows)
            assert np.array_equal(chosen, np.arange(chosen[0], chosen[-1] + 1))


def test_temporal_folds_guard_small():
    ds = _tiny_dataset(1, duration_s=0.35)  # 4 frames
    with pytest.raises(InvalidArgumentError):
        temporal_5fold(ds, n_folds=5)


def test_train_history_and_improvement():
    ds = _tiny_dataset(1, duration_s=4.0)
    model = build_facemap(TINY)
    base_f, _ = evaluate_facemap(model, ds, batch_size=16)
    schedule = FacemapSchedule(stage="finetune", epochs=4, batch_size=16)
    model, history = train_facemap(model, ds, schedule)
    assert len(history) == 4
    for row in history:
        assert {"epoch", "train_loss", "val_mae_f", "val_mae_o"} <= set(row)
    trained_f, _ = evaluate_facemap(model, ds, batch_size=16)
    assert trained_f < base_f


def test_train_rejects_empty():
    ds = _tiny_dataset(1, duration_s=2.0)
    with pytest.raises(InvalidArgumentError):
        train_facemap(build_facemap(TINY), ds.subset([0]), FacemapSchedule())


def test_checkpoint_roundtrip(tmp_path):
    model = build_facemap(TINY)
    path = tmp_path / "ck.pt"
    fp = save_checkpoint(path, model, schedule={"stage": "pretrain"},
                         parent_fingerprint="abc", extra={"note": 1})
    loaded = load_checkpoint(path)
    assert loaded["fingerprint"] == fp == state_fingerprint(loaded["model"])
    assert loaded["config"] == TINY
    assert loaded["parent_fingerprint"] == "abc"
    assert loaded["extra"] == {"note": 1}
    x = torch.zeros(1, 1, TINY.half_height, 2 * TINY.half_width)
    model.eval()
    loaded["model"].eval()
    with torch.no_grad():
        assert torch.equal(model(x), loaded["model"](x))
    with pytest.raises(DataError):
        load_checkpoint(tmp_path / "none.pt")


def test_reconstruct_clamps_and_counts():
    profile = gen_profiles(1, seed=77)[0]
    session = gen_calibration_session(
        profile, duration_s=2.0, fps=12, seed=0, height=24, width=32,
    )
    model = build_facemap(TINY)
    ts, states = reconstruct(model, list(session.frames), session.timestamps,
                             batch_size=8)
    assert states.shape == (24, STATE_DIM)
    assert np.array_equal(ts, session.timestamps)
    assert np.all(states >= state_lo() - 1e-9)
    assert np.all(states <= state_hi() + 1e-9)
    # tuple input works too and indexes timestamps by position
    pairs = [(p.left, p.right) for p in list(session.frames)[:3]]
    ts2, states2 = reconstruct(model, pairs, batch_size=8)
    assert len(ts2) == 3
    assert np.allclose(states2, states[:3], atol=1e-4)


def test_dataset_from_corpus_dir(rendered_corpus):
    root = rendered_corpus["root"]
    cfg = ImagingConfig(half_width=40, half_height=30)
    ds = dataset_from_corpus_dir(root, "P01", cfg)
    assert len(ds) > 0
    assert ds.participant_ids() == ["P01"]
    assert ds.tile_shape() == (30, 80)
    with pytest.raises(DataError):
        dataset_from_corpus_dir(root, "P99", cfg)
