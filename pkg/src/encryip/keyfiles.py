"""JSON key files. Secret material is written owner-read/write only."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import List, Tuple

from .pke import AuthorityState, PublicKey, SecretKey

PK_NAME = "pk.json"
AUTH_NAME = "authority.json"


def _write(path: Path, rec: dict, secret: bool = False) -> None:
    path = Path(path)
    if secret:
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        with os.fdopen(fd, "w") as fh:
            json.dump(rec, fh)
        try:
            os.chmod(path, 0o600)
        except OSError:
            pass
    else:
        path.write_text(json.dumps(rec))


def _read(path) -> dict:
    return json.loads(Path(path).read_text())


def save_public(path, pk: PublicKey) -> None:
    _write(path, pk.to_record())


def load_public(path) -> PublicKey:
    return PublicKey.from_record(_read(path))


def save_secret(path, sk: SecretKey) -> None:
    _write(path, sk.to_record(), secret=True)


def load_secret(path) -> SecretKey:
    return SecretKey.from_record(_read(path))


def save_authority(path, auth: AuthorityState) -> None:
    _write(path, auth.to_record(), secret=True)


def load_authority(path) -> AuthorityState:
    return AuthorityState.from_record(_read(path))


def secret_name(j: int) -> str:
    return f"sk{j}.json"


def save_keydir(directory, pk: PublicKey, keys: List[SecretKey], auth: AuthorityState) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    save_public(d / PK_NAME, pk)
    for sk in keys:
        save_secret(d / secret_name(sk.id), sk)
    save_authority(d / AUTH_NAME, auth)


def load_keydir(directory) -> Tuple[PublicKey, List[SecretKey], AuthorityState]:
    d = Path(directory)
    keys = sorted((load_secret(p) for p in d.glob("sk*.json")), key=lambda sk: sk.id)
    return load_public(d / PK_NAME), keys, load_authority(d / AUTH_NAME)
