"""Password hashing seam.

scrypt (memory-hard, stdlib) with a per-password random salt. The cost
parameters live in the stored record so they can be raised later without
invalidating existing accounts; tests dial them down.
"""

from __future__ import annotations

import hashlib
import hmac
import os
from dataclasses import dataclass

DEFAULT_COST = {"n": 16384, "r": 8, "p": 1}
_DKLEN = 32
_SALT_BYTES = 16


@dataclass(frozen=True)
class PasswordRecord:
    algo: str
    salt: str  # hex
    n: int
    r: int
    p: int
    digest: str  # hex

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "salt": self.salt,
            "n": self.n,
            "r": self.r,
            "p": self.p,
            "digest": self.digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> PasswordRecord:
        return cls(algo=d["algo"], salt=d["salt"], n=d["n"], r=d["r"], p=d["p"],
                   digest=d["digest"])


def hash_password(password: str, cost: dict | None = None) -> PasswordRecord:
    params = dict(DEFAULT_COST)
    if cost:
        params.update(cost)
    salt = os.urandom(_SALT_BYTES)
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=salt,
        n=params["n"], r=params["r"], p=params["p"], dklen=_DKLEN,
    )
    return PasswordRecord(
        algo="scrypt", salt=salt.hex(),
        n=params["n"], r=params["r"], p=params["p"], digest=digest.hex(),
    )


def verify_password(password: str, record: PasswordRecord) -> bool:
    if record.algo != "scrypt":
        return False
    digest = hashlib.scrypt(
        password.encode("utf-8"), salt=bytes.fromhex(record.salt),
        n=record.n, r=record.r, p=record.p, dklen=_DKLEN,
    )
    return hmac.compare_digest(digest.hex(), record.digest)
