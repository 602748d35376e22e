"""Byte-format conformance against frozen golden bytes and the consumer."""

import numpy as np
import pytest
from spice.data import load_embeddings

from spice_export.errors import ExportError
from spice_export.writer import encode_embeddings, write_embeddings

GOLDEN_LABELED = (
    b"SPCE\x01\x00\x00\x00\x02\x00\x00\x00\x00\x00\x00\x00\x02\x00\x00\x00\x01"
    b"\x00\x00\x80?\x00\x00 \xc0\x00\x00\x80>\x00\x00@@"
    b"\x00\x00\x00\x00\x03\x00\x00\x00"
)
GOLDEN_UNLABELED = (
    b"SPCE\x01\x00\x00\x00\x02\x00\x00\x00\x00\x00\x00\x00\x02\x00\x00\x00\x00"
    b"\x00\x00\x80?\x00\x00 \xc0\x00\x00\x80>\x00\x00@@"
)

FEATS = np.array([[1.0, -2.5], [0.25, 3.0]])


def test_golden_bytes_labeled():
    assert encode_embeddings(FEATS, [0, 3]) == GOLDEN_LABELED


def test_golden_bytes_unlabeled():
    assert encode_embeddings(FEATS) == GOLDEN_UNLABELED


def test_consumer_roundtrip(tmp_path):
    path = tmp_path / "emb.bin"
    write_embeddings(path, FEATS, [0, 3])
    ds = load_embeddings(path)
    assert np.array_equal(ds.features, FEATS)  # values are exact in float32
    assert np.array_equal(ds.true_labels, [0, 3])
    assert ds.true_labels.dtype == np.int64


def test_consumer_roundtrip_float32_quantization(tmp_path):
    rng = np.random.default_rng(11)
    feats = rng.normal(size=(17, 5))
    path = tmp_path / "emb.bin"
    write_embeddings(path, feats)
    ds = load_embeddings(path)
    assert np.array_equal(ds.features, feats.astype(np.float32).astype(np.float64))
    assert ds.true_labels is None


@pytest.mark.parametrize(
    "feats,labels",
    [
        (np.ones(4), None),  # 1-D
        (np.array([[1.0, np.inf]]), None),  # non-finite
        (FEATS, [0]),  # label length mismatch
        (FEATS, [0, -1]),  # negative label
        (np.ones((1, 1)), None),  # D too small
    ],
)
def test_rejects_malformed(feats, labels):
    with pytest.raises(ExportError):
        encode_embeddings(feats, labels)
