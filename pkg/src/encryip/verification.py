"""Arbitration: matching presented keys, tracing a leaked key, fine-tuning attacks.

The suspect deployment is modelled as the protected model plus the leaked
key's decryption step. The arbitrator feeds ``x_bar`` in, reads the decrypted
value back, and looks it up in the record's per-key table. Because a fake
ciphertext decrypts differently under every key, at most one key matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .data import EncryptedDataset, LabeledDataset, VerificationRecord
from .deploy import DeploymentHandle, decrypt_element, deploy_predict, evaluate
from .errors import UnknownRecord
from .model import Model, TrainConfig, train
from .pke import PublicKey, SecretKey


@dataclass
class ArbitrationContext:
    pk: PublicKey
    keys: List[SecretKey]
    z: int
    records: List[VerificationRecord] = field(default_factory=list)

    def __post_init__(self):
        if not self.keys:
            raise ValueError("arbitrator needs at least one key")
        ids = {sk.id for sk in self.keys}
        for rec in self.records:
            if set(rec.expected) != ids:
                raise ValueError("record does not cover every issued key")

    @property
    def params(self):
        return self.pk.params


def verify_key(ctx: ArbitrationContext, sk: SecretKey) -> Optional[int]:
    """Id of the issued key with exactly this ``(a, b)``, else ``None``."""
    for issued in ctx.keys:
        if (issued.a, issued.b) == (sk.a, sk.b):
            return issued.id
    return None


def suspect_observe(h: DeploymentHandle, sk: SecretKey, x: np.ndarray, rng: np.random.Generator) -> int:
    """What a deployment running with ``sk`` reveals for ``x``: the decrypted element index."""
    return h.params.element_index(decrypt_element(h.params, sk, deploy_predict(h, x, rng)))


def verify_leak(ctx: ArbitrationContext, record: VerificationRecord, observed: int) -> Optional[int]:
    """The key whose expected decryption of ``c_bar`` equals ``observed``; ``None`` if no key does."""
    if not any(r.c_bar == record.c_bar and r.expected == record.expected for r in ctx.records):
        raise UnknownRecord("record is not registered with this arbitrator")
    hits = [j for j, k in record.expected.items() if k == observed]
    return hits[0] if len(hits) == 1 else None


@dataclass(frozen=True)
class TrialResult:
    trial: int
    leaker: int
    observed: int
    identified: Optional[int]

    @property
    def match(self) -> bool:
        return self.identified == self.leaker

    def line(self) -> str:
        ident = "False" if self.identified is None else str(self.identified)
        return f"trial={self.trial} leaker={self.leaker} observed={self.observed} identified={ident} match={int(self.match)}"


def format_report(results: Sequence[TrialResult]) -> str:
    lines = [r.line() for r in results]
    acc = np.mean([r.match for r in results]) if results else 0.0
    lines.append(f"summary: {sum(r.match for r in results)}/{len(results)} identified, accuracy={acc:.4f}")
    return "\n".join(lines)


def trace_all_keys(ctx: ArbitrationContext, h: DeploymentHandle, rng: np.random.Generator,
                   records: Optional[Iterable[VerificationRecord]] = None) -> float:
    """Fraction of (record, key) pairs for which a leak of that key is traced back to it."""
    records = ctx.records if records is None else list(records)
    hits = [verify_leak(ctx, rec, suspect_observe(h, sk, rec.x_bar, rng)) == sk.id
            for rec in records for sk in ctx.keys]
    return float(np.mean(hits)) if hits else 0.0


@dataclass(frozen=True)
class AttackRound:
    round: int
    accuracy: float
    verification: float


def finetune_attack(
    ctx: ArbitrationContext,
    model: Model,
    ed: EncryptedDataset,
    parts: int,
    cfg: TrainConfig,
    test: LabeledDataset,
    rng: np.random.Generator,
) -> List[AttackRound]:
    """Fine-tune on ``parts`` contiguous shards of ``ed`` in turn, warm-starting each time.

    Round 0 is the untouched model. Accuracy uses the first issued key.
    """
    if parts < 1:
        raise ValueError("parts must be positive")
    if len(ed) < parts:
        raise ValueError(f"cannot split {len(ed)} rows into {parts} parts")

    def measure(i: int, m: Model) -> AttackRound:
        h = DeploymentHandle(m, ctx.pk, ctx.z)
        return AttackRound(i, evaluate(h, test, ctx.keys[0], rng), trace_all_keys(ctx, h, rng))

    rounds = [measure(0, model)]
    for i, rows in enumerate(np.array_split(np.arange(len(ed)), parts), start=1):
        round_cfg = TrainConfig(cfg.learning_rate, cfg.epochs, cfg.batch_size, cfg.seed + i, cfg.hidden,
                                cfg.weight_init_scale)
        model = train(ed.subset(rows), round_cfg, init=model)
        rounds.append(measure(i, model))
    return rounds
