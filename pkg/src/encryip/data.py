"""Datasets: plaintext loading, label-space encryption, verification records."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .codec import LabelEncoding, encode_label
from .errors import DataError, DegenerateFake, DimensionMismatch, TooManyClasses
from .group import GroupParams
from .pke import Ciphertext, PublicKey, SecretKey, dec, enc, fake

FAKE_RETRIES = 64
PROBE_CANDIDATES = 64


@dataclass
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray
    z: int

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=np.int64).ravel()
        if len(self.X) != len(self.y) or len(self.y) == 0:
            raise DataError(f"{len(self.X)} feature rows vs {len(self.y)} labels")
        if self.y.min() < 0 or self.y.max() >= self.z:
            raise DataError(f"labels must lie in 0..{self.z - 1}")

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return len(self.y)


@dataclass
class VerificationRecord:
    """Probe input paired with a fake ciphertext and each key's decryption of it.

    ``expected`` maps key id to the discrete-log index of ``dec(sk_j, c_bar)``.
    """

    x_bar: np.ndarray
    c_bar: Ciphertext
    expected: Dict[int, int]
    copies: int = 0

    def to_record(self) -> dict:
        return {
            "x_bar": ",".join(repr(float(v)) for v in self.x_bar),
            "c_bar": list(self.c_bar),
            "expected": {str(j): k for j, k in self.expected.items()},
            "copies": self.copies,
        }

    @classmethod
    def from_record(cls, rec) -> "VerificationRecord":
        return cls(
            x_bar=np.array([float(s) for s in rec["x_bar"].split(",")]),
            c_bar=Ciphertext(*(int(u) for u in rec["c_bar"])),
            expected={int(j): int(k) for j, k in rec["expected"].items()},
            copies=int(rec["copies"]),
        )


@dataclass
class EncryptedDataset:
    X: np.ndarray
    C: np.ndarray  # (n, 3) int64 ciphertext triples
    pk: PublicKey
    z: int
    records: List[VerificationRecord] = field(default_factory=list)

    @property
    def params(self) -> GroupParams:
        return self.pk.params

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return len(self.C)

    def n_original(self) -> int:
        """Rows that came from the plaintext dataset (injected copies excluded)."""
        return len(self) - sum(r.copies for r in self.records)

    def subset(self, rows) -> "EncryptedDataset":
        return replace(self, X=self.X[rows], C=self.C[rows], records=list(self.records))


def encrypt_dataset(pk: PublicKey, D: LabeledDataset, rng: np.random.Generator) -> EncryptedDataset:
    """Encrypt every label; each distinct label is encrypted once and the ciphertext reused."""
    params = pk.params
    if D.z > params.q:
        raise TooManyClasses(f"{D.z} classes exceed q={params.q}")
    encoding = LabelEncoding(params, D.z)
    cache: Dict[int, Ciphertext] = {}
    for y in D.y.tolist():
        if y not in cache:
            cache[y] = enc(pk, encode_label(encoding, y), rng)
    C = np.array([cache[y] for y in D.y.tolist()], dtype=np.int64)
    return EncryptedDataset(X=D.X.copy(), C=C, pk=pk, z=D.z)


def expected_decryptions(params: GroupParams, keys: Sequence[SecretKey], c: Ciphertext) -> Dict[int, int]:
    return {sk.id: params.element_index(dec(params, sk, c)) for sk in keys}


XSource = Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]


def make_verification_record(
    pk: PublicKey,
    keys: Sequence[SecretKey],
    x_source: XSource,
    rng: np.random.Generator,
    *,
    avoid: Optional[np.ndarray] = None,
    c_bar: Optional[Ciphertext] = None,
) -> VerificationRecord:
    """Draw a fake ciphertext and a probe input for leak tracing.

    ``x_source`` is either a concrete held-out instance, or a ``(low, high)``
    pair of bounds from which ``x_bar`` is drawn uniformly. With ``avoid``
    (the training features), the probe is the candidate farthest from every
    training row among :data:`PROBE_CANDIDATES` uniform draws.
    """
    if len(keys) < 2:
        raise ValueError("tracing needs at least two issued keys")
    params = pk.params
    if isinstance(x_source, tuple):
        low, high = (np.asarray(b, dtype=float) for b in x_source)
        x_bar = sample_probe(low, high, rng, avoid)
    else:
        x_bar = np.asarray(x_source, dtype=float).ravel().copy()
    for _ in range(FAKE_RETRIES):
        c = c_bar if c_bar is not None else fake(pk, rng)
        expected = expected_decryptions(params, keys, c)
        if len(set(expected.values())) == len(expected):
            return VerificationRecord(x_bar=x_bar, c_bar=Ciphertext(*c), expected=expected)
        if c_bar is not None:
            break
    raise DegenerateFake("fake ciphertext does not separate the issued keys")


def sample_probe(low, high, rng: np.random.Generator, avoid: Optional[np.ndarray] = None) -> np.ndarray:
    """Uniform draw in the bounds; with ``avoid``, the farthest of several draws from its rows."""
    if avoid is None or len(avoid) == 0:
        return rng.uniform(low, high)
    avoid = np.asarray(avoid, dtype=float)
    cands = rng.uniform(low, high, (PROBE_CANDIDATES, avoid.shape[1]))
    d2 = ((cands[:, None, :] - avoid[None, :, :]) ** 2).sum(axis=-1).min(axis=1)
    return cands[int(np.argmax(d2))]


REPLICATION_FRACTION = 0.05


def default_replication(n: int) -> int:
    return max(1, math.ceil(REPLICATION_FRACTION * n))


def inject(ed: EncryptedDataset, rec: VerificationRecord, replication: Optional[int] = None) -> EncryptedDataset:
    """Append ``replication`` copies of the record's pair; the input dataset is left alone."""
    if replication is None:
        replication = default_replication(ed.n_original())
    if replication < 1:
        raise ValueError("replication must be positive")
    if rec.x_bar.shape != (ed.d,):
        raise DimensionMismatch(f"x_bar has shape {rec.x_bar.shape}, dataset rows have {ed.d} features")
    rec = replace(rec, copies=replication)
    X = np.vstack([ed.X, np.tile(rec.x_bar, (replication, 1))])
    C = np.vstack([ed.C, np.tile(np.array(rec.c_bar, dtype=np.int64), (replication, 1))])
    return replace(ed, X=X, C=C, records=ed.records + [rec])


def make_blobs(
    n_classes: int,
    per_class: int,
    dim: int,
    spacing: float = 3.0,
    seed: int = 0,
    shuffle: bool = True,
) -> LabeledDataset:
    """Isotropic unit-variance Gaussian blobs.

    Class centers are ``spacing`` times a random unit direction each, so
    pairwise center distance is about ``spacing * sqrt(2)``.
    """
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_classes, dim))
    centers = spacing * dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    y = np.repeat(np.arange(n_classes), per_class)
    X = centers[y] + rng.normal(size=(len(y), dim))
    if shuffle:
        order = rng.permutation(len(y))
        X, y = X[order], y[order]
    return LabeledDataset(X, y, n_classes)


def split(D: LabeledDataset, n_train: int) -> Tuple[LabeledDataset, LabeledDataset]:
    """First ``n_train`` rows vs the rest (rows are already shuffled by :func:`make_blobs`)."""
    return (LabeledDataset(D.X[:n_train], D.y[:n_train], D.z),
            LabeledDataset(D.X[n_train:], D.y[n_train:], D.z))


def feature_bounds(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return X.min(axis=0), X.max(axis=0)


# ---------------------------------------------------------------- file formats


def _feature_header(d: int) -> List[str]:
    return [f"f{i}" for i in range(d)]


def save_labeled(path, D: LabeledDataset) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_feature_header(D.d) + ["label"])
        for x, y in zip(D.X.tolist(), D.y.tolist()):
            w.writerow([repr(v) for v in x] + [y])


def load_labeled(path, z: Optional[int] = None) -> LabeledDataset:
    """Read ``f0..f{d-1},label`` CSV; ``z`` defaults to ``max(label) + 1``."""
    X, y = _read_csv(path, tail=["label"])
    y = y[:, 0].astype(np.int64)
    return LabeledDataset(X, y, z if z is not None else int(y.max()) + 1)


def load_features(path) -> np.ndarray:
    """Feature columns of any of the CSV formats; trailing label/cipher columns are ignored."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    cols = [i for i, h in enumerate(header) if h.startswith("f") and h[1:].isdigit()]
    if not cols:
        raise DataError(f"{path}: no f0..f{{d-1}} columns")
    return np.array([[float(r[i]) for i in cols] for r in rows[1:]], dtype=float).reshape(-1, len(cols))


def _read_csv(path, tail: List[str]) -> Tuple[np.ndarray, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header = rows[0]
    d = len(header) - len(tail)
    if header[d:] != tail or header[:d] != _feature_header(d):
        raise DataError(f"{path}: expected header f0..f{d - 1},{','.join(tail)}")
    body = [r for r in rows[1:] if r]
    if any(len(r) != len(header) for r in body):
        raise DataError(f"{path}: ragged rows")
    X = np.array([[float(v) for v in r[:d]] for r in body], dtype=float).reshape(-1, d)
    T = np.array([[int(v) for v in r[d:]] for r in body], dtype=np.int64).reshape(-1, len(tail))
    return X, T


def save_encrypted(path, ed: EncryptedDataset) -> Path:
    """Write rows to ``path`` and metadata to ``<path>.meta.json``; returns the sidecar path."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_feature_header(ed.d) + ["u1", "u2", "u3"])
        for x, c in zip(ed.X.tolist(), ed.C.tolist()):
            w.writerow([repr(v) for v in x] + c)
    meta = {**ed.pk.to_record(), "z": ed.z, "records": [r.to_record() for r in ed.records]}
    sidecar = meta_path(path)
    sidecar.write_text(json.dumps(meta, indent=1))
    return sidecar


def meta_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def load_encrypted(path) -> EncryptedDataset:
    meta = json.loads(meta_path(path).read_text())
    pk = PublicKey.from_record(meta)
    X, C = _read_csv(path, tail=["u1", "u2", "u3"])
    for u in np.unique(C).tolist():
        pk.params.check(u)
    records = [VerificationRecord.from_record(r) for r in meta["records"]]
    return EncryptedDataset(X=X, C=C, pk=pk, z=int(meta["z"]), records=records)
