"""Shared fixtures: small in-memory datasets and a rendered corpus on disk."""

from __future__ import annotations

import numpy as np
import pytest
import torch

torch.set_num_threads(1)


@pytest.fixture(scope="session")
def sep_datasets():
    """High-separability in-memory neck + open datasets (3 participants)."""
    from necksense.synthetic.corpus import (
        corpus_reaction_datasets,
        separable_corpus_config,
    )

    config = separable_corpus_config(
        n_participants=3, n_control=3, n_human=3, n_robot=0
    )
    return corpus_reaction_datasets(config)


@pytest.fixture(scope="session")
def sep_windows(sep_datasets):
    """Windowed separable neck data: (train-stride windows, IL=36)."""
    from necksense.reaction import build_window_set

    return build_window_set(sep_datasets["neck"].sequences, 36, 3)


@pytest.fixture(scope="session")
def rendered_corpus(tmp_path_factory):
    """Tiny corpus on disk with calibration + stimulus frames rendered."""
    from necksense.synthetic.corpus import CorpusConfig, gen_corpus

    root = tmp_path_factory.mktemp("corpus")
    config = CorpusConfig(
        n_participants=2,
        seed=5,
        calibration_s=6.0,
        n_control=2,
        n_human=1,
        n_robot=1,
        duration_scale=0.4,
        render="all",
        height=120,
        width=160,
    )
    summary = gen_corpus(root, config)
    return {"root": root, "config": config, "summary": summary}


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
