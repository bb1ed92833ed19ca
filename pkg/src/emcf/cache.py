"""Disk cache for digit strings and certified partial quotients.

Large runs split naturally into constant generation and quotient
extraction, so both artifacts are cached as plain text files keyed by the
requested budget: digits of log 2 under the budget that produced them,
quotients under the (denominator, budget) pair they were extracted for.
A rerun with the same configuration therefore reads exactly the bytes it
wrote before, which keeps reports reproducible; a digit file written for
a larger budget also serves smaller requests, since any certified prefix
of it remains certified.

Integrity rides in a sidecar hashes.json mapping file names to sha256
digests (the text formats themselves carry no checksum field).  Loads
verify the digest and refuse corrupted files loudly.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from pathlib import Path

from . import cfengine, logcomp

__all__ = ["ArtifactCache", "CacheCorruptionError", "default_cache_dir"]

_DIGIT_RE = re.compile(r"^log2\.d(\d+)\.txt$")


class CacheCorruptionError(RuntimeError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get("EMCF_CACHE_DIR")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "emcf"


class ArtifactCache:
    def __init__(self, root):
        self.root = Path(root)

    # -- sidecar bookkeeping ------------------------------------------------

    def _hashes(self) -> dict:
        path = self.root / "hashes.json"
        if not path.exists():
            return {}
        with open(path, "r", encoding="ascii") as fh:
            return json.load(fh)

    def _record(self, name: str, digest: str) -> None:
        hashes = self._hashes()
        hashes[name] = digest
        path = self.root / "hashes.json"
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="ascii") as fh:
            json.dump(hashes, fh, indent=2, sort_keys=True)
            fh.write("\n")
        tmp.replace(path)

    def _verify(self, name: str) -> str:
        digest = hashlib.sha256((self.root / name).read_bytes()).hexdigest()
        recorded = self._hashes().get(name)
        if recorded is None:
            raise CacheCorruptionError(f"{name} has no recorded digest")
        if recorded != digest:
            raise CacheCorruptionError(
                f"{name}: stored digest {recorded[:12]}... does not match "
                f"file contents {digest[:12]}..."
            )
        return digest

    # -- digits -------------------------------------------------------------

    def digit_file(self, digits: int) -> Path:
        return self.root / f"log2.d{digits}.txt"

    def find_digits(self, digits: int) -> int | None:
        """Smallest cached budget covering the request, if any."""
        if not self.root.is_dir():
            return None
        stored = []
        for name in os.listdir(self.root):
            m = _DIGIT_RE.match(name)
            if m and int(m.group(1)) >= digits:
                stored.append(int(m.group(1)))
        return min(stored) if stored else None

    def load_digits(self, digits: int):
        """(interval, budget, sha256) for a covering cached file, or None."""
        found = self.find_digits(digits)
        if found is None:
            return None
        name = self.digit_file(found).name
        digest = self._verify(name)
        constant, _, iv = logcomp.read_digit_file(self.root / name)
        if constant != "log2":
            raise CacheCorruptionError(f"{name}: unexpected constant {constant!r}")
        return iv, found, digest

    def store_digits(self, digits: int, iv) -> str:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.digit_file(digits)
        digest = logcomp.write_digit_file(path, "log2", iv)
        self._record(path.name, digest)
        return digest

    def get_log2(self, digits: int, ceiling=None):
        """Cached-or-computed digits of log 2: (interval, sha256)."""
        hit = self.load_digits(digits)
        if hit is not None:
            iv, _, digest = hit
            return iv, digest
        iv = logcomp.compute_log2(digits, ceiling=ceiling)
        return iv, self.store_digits(digits, iv)

    # -- partial quotients --------------------------------------------------

    def cf_file(self, denominator: int, digits: int) -> Path:
        return self.root / f"log2over{denominator}.d{digits}.cf.txt"

    def load_cf(self, denominator: int, digits: int):
        path = self.cf_file(denominator, digits)
        if not path.exists():
            return None
        digest = self._verify(path.name)
        _, pq = cfengine.read_cf_file(path)
        return pq, digest

    def store_cf(self, denominator: int, digits: int, pq) -> str:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.cf_file(denominator, digits)
        digest = cfengine.write_cf_file(path, f"log2over{denominator}", pq)
        self._record(path.name, digest)
        return digest

    def get_cf(self, denominator: int, digits: int, method: str = "auto", ceiling=None):
        """Certified quotients of log2/denominator: (quotients, cf sha, digit sha)."""
        hit = self.load_cf(denominator, digits)
        if hit is not None:
            pq, digest = hit
            # the digit artifact backing a cf hit must still be intact if
            # its digest is going to be reported alongside the quotients
            found = self.find_digits(digits)
            dsha = self._verify(self.digit_file(found).name) if found else ""
            return pq, digest, dsha
        iv, dsha = self.get_log2(digits, ceiling=ceiling)
        scaled = logcomp.scale_interval(iv, denominator) if denominator != 1 else iv
        pq = cfengine.cf_certified(scaled, method=method)
        return pq, self.store_cf(denominator, digits, pq), dsha
