"""``encryip`` command line.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import keyfiles
from .codec import format_confused, parse_confused
from .data import (encrypt_dataset, feature_bounds, inject, load_encrypted, load_features, load_labeled,
                   make_blobs, make_verification_record, save_encrypted, save_labeled, split)
from .deploy import DeploymentHandle, deploy_predict, evaluate, evaluate_plain, user_decrypt
from .errors import EncryIPError
from .experiments import Benchmark, q_sweep
from .group import gen_params
from .model import Model, TrainConfig, train, train_plain
from .pke import add_user, gen
from .verification import (ArbitrationContext, TrialResult, finetune_attack, format_report,
                           suspect_observe, verify_key, verify_leak)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed)


def _out(msg: str) -> None:
    print(msg, flush=True)


def _label_text(y: Optional[int]) -> str:
    return "Invalid" if y is None else str(y)


def cmd_keygen(args) -> None:
    params = gen_params(args.classes)
    pk, keys, auth = gen(params, args.users, _rng(args))
    keyfiles.save_keydir(args.out, pk, keys, auth)
    _out(f"q={params.q} p={params.p} keys={len(keys)} -> {args.out}")


def cmd_add_user(args) -> None:
    src, dst = Path(args.keys), Path(args.out)
    if src.resolve() == dst.resolve():
        raise UsageError("--out must differ from --keys")
    pk, keys, auth = keyfiles.load_keydir(src)
    sk = add_user(pk.params, auth, _rng(args))
    dst.mkdir(parents=True, exist_ok=True)
    keyfiles.save_keydir(dst, pk, keys + [sk], auth)
    _out(f"issued key {sk.id} -> {dst / keyfiles.secret_name(sk.id)}")


def cmd_gen_data(args) -> None:
    test_per_class = args.test_per_class
    if test_per_class is None:
        test_per_class = args.per_class if args.test_out else 0
    if test_per_class < 0 or bool(test_per_class) != bool(args.test_out):
        raise UsageError("--test-out needs a positive --test-per-class, and vice versa")
    D = make_blobs(args.classes, args.per_class + test_per_class, args.dim, args.spacing, seed=args.seed)
    n = args.classes * args.per_class
    tr, te = split(D, n) if test_per_class else (D, None)
    save_labeled(args.out, tr)
    msg = f"{len(tr)} rows -> {args.out}"
    if te is not None:
        save_labeled(args.test_out, te)
        msg += f", {len(te)} rows -> {args.test_out}"
    _out(msg)


def cmd_encrypt(args) -> None:
    pk, keys, _ = keyfiles.load_keydir(args.keys)
    D = load_labeled(args.data, z=args.classes)
    rng = _rng(args)
    ed = encrypt_dataset(pk, D, rng)
    if args.inject_verification:
        for _ in range(args.records):
            rec = make_verification_record(pk, keys, feature_bounds(D.X), rng, avoid=D.X)
            ed = inject(ed, rec, args.replication)
    sidecar = save_encrypted(args.out, ed)
    _out(f"{len(ed)} rows ({len(ed.records)} verification records) -> {args.out}, {sidecar}")


def _train_cfg(args, seed_offset: int = 0) -> TrainConfig:
    return TrainConfig(learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch,
                       seed=args.seed + seed_offset, hidden=args.hidden, weight_init_scale=args.init_scale)


def cmd_train(args) -> None:
    ed = load_encrypted(args.data)
    model = train(ed, _train_cfg(args))
    model.save(args.out)
    last = model.history[-1] if model.history else float("nan")
    _out(f"trained {model.arch} model, final loss {last:.6f} -> {args.out}")


def cmd_predict(args) -> None:
    pk = keyfiles.load_public(args.pk)
    h = DeploymentHandle(Model.load(args.model), pk, args.classes)
    X = load_features(args.input)
    rng = _rng(args)
    sk = keyfiles.load_secret(args.key) if args.key else None
    lines = []
    for x in X:
        v = deploy_predict(h, x, rng)
        lines.append(_label_text(user_decrypt(pk.params, h.z, sk, v)) if sk else format_confused(v))
    Path(args.out).write_text("\n".join(lines) + "\n")
    _out(f"{len(lines)} {'labels' if sk else 'confused labels'} -> {args.out}")


def cmd_decrypt(args) -> None:
    pk = keyfiles.load_public(args.pk)
    sk = keyfiles.load_secret(args.key)
    rows = [ln for ln in Path(args.input).read_text().splitlines() if ln.strip()]
    labels = [_label_text(user_decrypt(pk.params, args.classes, sk, parse_confused(ln))) for ln in rows]
    Path(args.out).write_text("\n".join(labels) + "\n")
    _out(f"{len(labels)} labels -> {args.out}")


def cmd_verify_key(args) -> None:
    pk, keys, _ = keyfiles.load_keydir(args.keys)
    j = verify_key(ArbitrationContext(pk, keys, 2), keyfiles.load_secret(args.key))
    _out("NotAuthorized" if j is None else f"authorized key {j}")


def _arbitration(args):
    pk, keys, _ = keyfiles.load_keydir(args.keys)
    ed = load_encrypted(args.data)
    if not ed.records:
        raise EncryIPError(f"{args.data} carries no verification records")
    ctx = ArbitrationContext(pk, keys, ed.z, ed.records)
    return ctx, ed


def cmd_verify_leak(args) -> None:
    ctx, ed = _arbitration(args)
    h = DeploymentHandle(Model.load(args.model), ctx.pk, ctx.z)
    rng = _rng(args)
    results = []
    for t in range(args.trials):
        rec = ctx.records[t % len(ctx.records)]
        leaker = ctx.keys[int(rng.integers(0, len(ctx.keys)))]
        observed = suspect_observe(h, leaker, rec.x_bar, rng)
        results.append(TrialResult(t, leaker.id, observed, verify_leak(ctx, rec, observed)))
    report = format_report(results)
    if args.out:
        Path(args.out).write_text(report + "\n")
    _out(report)


def cmd_attack_sim(args) -> None:
    ctx, ed = _arbitration(args)
    test = load_labeled(args.test, z=ed.z)
    clean = ed.subset(np.arange(ed.n_original()))
    rounds = finetune_attack(ctx, Model.load(args.model), clean, args.parts, _train_cfg(args), test, _rng(args))
    lines = [f"round={r.round} accuracy={r.accuracy:.4f} verification={r.verification:.4f}" for r in rounds]
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    _out("\n".join(lines))


def cmd_eval(args) -> None:
    test = load_labeled(args.test, z=args.classes)
    if args.baseline:
        if not args.train_data:
            raise UsageError("--baseline needs --train-data")
        tr = load_labeled(args.train_data, z=test.z)
        acc = evaluate_plain(train_plain(tr.X, tr.y, tr.z, _train_cfg(args)), test)
        _out(f"baseline accuracy={acc:.4f}")
        return
    if not (args.key and args.model and args.pk):
        raise UsageError("eval needs --model, --pk and --key (or --baseline)")
    pk = keyfiles.load_public(args.pk)
    h = DeploymentHandle(Model.load(args.model), pk, test.z)
    acc = evaluate(h, test, keyfiles.load_secret(args.key), _rng(args))
    _out(f"accuracy={acc:.4f}")


def cmd_q_sweep(args) -> None:
    qs = [int(v) for v in args.values.split(",") if v.strip()]
    bench = Benchmark(train_cfg=_train_cfg(args))
    for q, acc in q_sweep(bench, qs, seed=args.seed).items():
        _out(f"q_min={q} accuracy={acc:.4f}")


def _add_train_opts(p, epochs=50, lr=0.1):
    p.add_argument("--epochs", type=int, default=epochs)
    p.add_argument("--lr", type=float, default=lr)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--hidden", type=int, default=16)
    p.add_argument("--init-scale", type=float, default=0.1)


def _command(sub, name: str, help: str) -> argparse.ArgumentParser:
    p = sub.add_parser(name, help=help)
    p.add_argument("--seed", type=int, default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="encryip", description="Label-space encryption for model IP protection.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = _command(sub, "keygen", "public key, P secret keys and authority trapdoor")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--out", default="keys")
    p.set_defaults(func=cmd_keygen)

    p = _command(sub, "add-user", "issue one more secret key")
    p.add_argument("--keys", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_add_user)

    p = _command(sub, "gen-data", "synthetic Gaussian-blob dataset")
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--per-class", type=int, default=200)
    p.add_argument("--test-per-class", type=int, help="default: --per-class when --test-out is given")
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--spacing", type=float, default=3.0)
    p.add_argument("--out", required=True)
    p.add_argument("--test-out")
    p.set_defaults(func=cmd_gen_data)

    p = _command(sub, "encrypt", "encrypt the label space of a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--classes", type=int)
    p.add_argument("--inject-verification", action="store_true")
    p.add_argument("--records", type=int, default=1)
    p.add_argument("--replication", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encrypt)

    p = _command(sub, "train", "train on confused labels")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    _add_train_opts(p)
    p.set_defaults(func=cmd_train)

    p = _command(sub, "predict", "emit confused labels (or decrypted labels with --key)")
    p.add_argument("--model", required=True)
    p.add_argument("--pk", required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--key")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = _command(sub, "decrypt", "decrypt emitted confused labels")
    p.add_argument("--key", required=True)
    p.add_argument("--pk", required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decrypt)

    p = _command(sub, "verify-key", "check a presented key against the issued ones")
    p.add_argument("--keys", required=True)
    p.add_argument("--key", required=True)
    p.set_defaults(func=cmd_verify_key)

    p = _command(sub, "verify-leak", "trace which key a suspect deployment uses")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="encrypted dataset carrying the records")
    p.add_argument("--keys", required=True)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_leak)

    p = _command(sub, "attack-sim", "sequential fine-tuning attack")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--keys", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--parts", type=int, default=5)
    p.add_argument("--out")
    _add_train_opts(p, epochs=10, lr=0.01)
    p.set_defaults(func=cmd_attack_sim)

    p = _command(sub, "eval", "accuracy with a key, or of a plaintext baseline")
    p.add_argument("--test", required=True)
    p.add_argument("--classes", type=int)
    p.add_argument("--model")
    p.add_argument("--pk")
    p.add_argument("--key")
    p.add_argument("--baseline", action="store_true")
    p.add_argument("--train-data")
    _add_train_opts(p)
    p.set_defaults(func=cmd_eval)

    p = _command(sub, "q-sweep", "benchmark accuracy across group orders")
    p.add_argument("--values", default="5,11,23")
    _add_train_opts(p)
    p.set_defaults(func=cmd_q_sweep)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("missing subcommand")
        _out(f"seed={args.seed}")
        args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except EncryIPError as exc:
        print(f"scheme error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
