# Copyright 2026  mfc-mdd authors
# Apache 2.0

import math
import os
import subprocess

import numpy as np
import pytest

import mfcmdd


def test_inventory_round_trip():
    inv = mfcmdd.PhoneInventory.default()
    assert len(inv.symbols) == 40
    assert inv.blank == inv.output_size - 1
    ids = inv.encode(["z", "ih", "sil"])
    assert inv.decode(ids) == ["z", "ih", "sil"]
    with pytest.raises(mfcmdd.LookupError):
        inv.encode(["zz"])


def test_counts_and_metrics():
    inv = mfcmdd.PhoneInventory.default()
    z, s = inv.encode(["z", "s"])
    c = mfcmdd.mdd_counts([z], [s], [s])
    assert (c["tn"], c["cd"], c["c_dh"]) == (1, 1, 1)
    assert c["utterance_f1"] == 1.0
    clean = mfcmdd.mdd_counts([0, 1], [0, 1], [0, 1])
    report = mfcmdd.corpus_metrics([clean])
    assert report["f1"] is None
    assert report["per"] == 0.0
    assert mfcmdd.edit_distance([0, 1, 2], [0, 2]) == 1


def test_ctc_matches_brute_force_on_a_tiny_lattice():
    rng = np.random.default_rng(0)
    logits = rng.normal(size=(3, 3))
    log_probs = logits - np.log(np.exp(logits).sum(axis=1, keepdims=True))
    total = 0.0
    for a in range(3):
        for b in range(3):
            for c in range(3):
                if mfcmdd.ctc_collapse([a, b, c], 2) == [0]:
                    total += math.exp(log_probs[0, a] + log_probs[1, b] + log_probs[2, c])
    assert abs(mfcmdd.ctc_log_prob(log_probs, [0]) - math.log(total)) < 1e-12
    grad = mfcmdd.ctc_grad(log_probs, [0])
    assert grad.shape == (3, 3)


def test_expected_f1_loss_gradient():
    scores = [-1.0, -2.0, -0.5]
    f = [0.2, 1.0, 0.5]
    loss, grad = mfcmdd.expected_f1_loss(scores, f)
    p = np.exp(scores) / np.exp(scores).sum()
    assert abs(loss + (p * f).sum()) < 1e-14
    assert np.allclose(grad, -p * (np.array(f) + loss), atol=1e-14)


@pytest.mark.skipif("MDD_BINARY" not in os.environ, reason="needs the mdd binary")
def test_recognizer_decodes(tmp_path):
    mdd = os.environ["MDD_BINARY"]
    env = dict(os.environ)
    subprocess.run([mdd, "gen", "--config", "gen_l1", "--num-utterances", "8",
                    "--out", str(tmp_path / "l1")], check=True, env=env)
    subprocess.run([mdd, "train", "--stage", "pretrain_l1", "--train",
                    str(tmp_path / "l1" / "train.jsonl"), "--checkpoint-out",
                    str(tmp_path / "m.ckpt"), "--epochs", "1", "--model-config", "model"],
                   check=True, env=env)
    rec = mfcmdd.Recognizer(str(tmp_path / "m.ckpt"))
    feats = np.random.default_rng(1).normal(size=(12, rec.feature_dim))
    hyps = rec.decode(feats, beam_width=4, m_best=3)
    assert 1 <= len(hyps) <= 3
    scores = [h["joint_score"] for h in hyps]
    assert scores == sorted(scores, reverse=True)
    assert rec.ctc_log_probs(feats).shape[0] == 6
    with pytest.raises(mfcmdd.ConfigError):
        rec.decode(np.zeros((4, rec.feature_dim + 1)))
    with pytest.raises(mfcmdd.IoError):
        mfcmdd.Recognizer(str(tmp_path / "absent.ckpt"))
