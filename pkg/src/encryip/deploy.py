"""Serving a protected model: randomized emissions and key-holder decryption."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codec import LabelEncoding, decode_label, phi, phi_inv
from .data import LabeledDataset
from .errors import BadLength
from .group import GroupParams
from .model import Model, forward
from .pke import Ciphertext, PublicKey, SecretKey, dec, samp_dist


@dataclass(frozen=True)
class DeploymentHandle:
    model: Model
    pk: PublicKey
    z: int

    def __post_init__(self):
        q = self.pk.params.q
        if (self.model.n_blocks, self.model.block) != (3, q):
            raise BadLength(f"model head {self.model.n_blocks}x{self.model.block} != 3x{q}")

    @property
    def params(self) -> GroupParams:
        return self.pk.params


def raw_ciphertext(h: DeploymentHandle, x: np.ndarray) -> Ciphertext:
    """The model's own ciphertext for ``x``, before rerandomization."""
    return phi_inv(h.params, forward(h.model, x))


def deploy_predict(h: DeploymentHandle, x: np.ndarray, rng: Optional[np.random.Generator] = None,
                   *, r: Optional[int] = None) -> np.ndarray:
    """Emit a freshly rerandomized 3-hot confused label for ``x``."""
    c_d = samp_dist(h.pk, raw_ciphertext(h, x), rng, r=r)
    return phi(h.params, c_d)


def decrypt_element(params: GroupParams, sk: SecretKey, v: np.ndarray) -> int:
    v = np.ravel(v)
    if v.shape[0] != 3 * params.q:
        raise BadLength(f"expected length {3 * params.q}, got {v.shape[0]}")
    return dec(params, sk, phi_inv(params, v))


def user_decrypt(params: GroupParams, z: int, sk: SecretKey, v: np.ndarray) -> Optional[int]:
    """Readable label from an emission, or ``None`` if the key yields no valid label."""
    return decode_label(LabelEncoding(params, z), decrypt_element(params, sk, v))


def predict_labels(h: DeploymentHandle, sk: SecretKey, X: np.ndarray, rng: np.random.Generator) -> list:
    return [user_decrypt(h.params, h.z, sk, deploy_predict(h, x, rng)) for x in np.atleast_2d(X)]


def evaluate(h: DeploymentHandle, D: LabeledDataset, sk: SecretKey, rng: np.random.Generator) -> float:
    """Fraction of rows whose decrypted emission equals the true label; ``None`` counts as wrong."""
    pred = predict_labels(h, sk, D.X, rng)
    return float(np.mean([p == y for p, y in zip(pred, D.y.tolist())]))


def evaluate_plain(model: Model, D: LabeledDataset) -> float:
    """Accuracy of an unprotected single-block baseline on plain labels."""
    return float(np.mean(forward(model, D.X).argmax(axis=1) == D.y))
