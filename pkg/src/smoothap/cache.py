"""Persistent character-sum cache: append-only lines, per-line checksums.

Each record is one tab-separated line

    fingerprint  X  q  chi_rank  re  im  crc32-of-the-fields

so the file is inspectable with standard tools and a torn or corrupted
line is detected in isolation.  A deterministic ~1% sample of every run's
cache hits is recomputed and compared; any mismatch quarantines the file.
"""

from __future__ import annotations

import os
import threading
import zlib
from dataclasses import dataclass

from .errors import CacheIntegrityError

AUDIT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class CacheRecord:
    fingerprint: str
    X: int
    q: int
    chi_rank: int
    value: complex


def _line_body(fingerprint: str, X: int, q: int, rank: int, re: float, im: float) -> str:
    return f"{fingerprint}\t{X}\t{q}\t{rank}\t{re!r}\t{im!r}"


def _checksum(body: str) -> str:
    return f"{zlib.crc32(body.encode()):08x}"


class CharacterSumCache:
    """get_or_compute for S_f(X, chi) values keyed (fingerprint, X, q, rank)."""

    def __init__(self, path: str, audit_rate: int = 100):
        self.path = path
        self.audit_rate = max(1, audit_rate)  # audit every ~1/audit_rate hits
        self._lock = threading.Lock()
        self._data: dict[tuple, complex] = {}
        self._fh = None
        self.hits = 0
        self.misses = 0
        self.audits = 0
        self._load()

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path, "r", encoding="utf-8") as fh:
            raw = fh.read()
        lines = raw.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        elif lines:
            lines.pop()  # trailing partial line from an in-progress append
        for ln in lines:
            parts = ln.split("\t")
            if len(parts) != 7:
                self._quarantine(f"malformed record: {ln[:80]!r}")
            body = "\t".join(parts[:6])
            if _checksum(body) != parts[6]:
                self._quarantine(f"checksum mismatch: {ln[:80]!r}")
            fp, X, q, rank, re, im = parts[:6]
            self._data[(fp, int(X), int(q), int(rank))] = complex(float(re), float(im))

    def _quarantine(self, reason: str):
        qpath = self.path + ".quarantined"
        try:
            if self._fh is not None:
                self._fh.close()
                self._fh = None
            os.replace(self.path, qpath)
        except OSError:
            pass
        raise CacheIntegrityError(f"cache {self.path} quarantined to {qpath}: {reason}")

    def _append(self, key: tuple, value: complex):
        body = _line_body(key[0], key[1], key[2], key[3], value.real, value.imag)
        line = f"{body}\t{_checksum(body)}\n"
        with self._lock:
            if self._fh is None:
                self._fh = open(self.path, "a", encoding="utf-8")
            self._fh.write(line)
            self._fh.flush()

    def _audit_sampled(self, key: tuple) -> bool:
        # deterministic sampling: no RNG, so reruns audit the same keys
        h = zlib.crc32(repr(key).encode())
        return h % self.audit_rate == 0

    def get_or_compute(self, key: tuple, compute) -> complex:
        """Cached value for key, computing and appending on a miss.

        On a sampled fraction of hits the value is recomputed and compared
        within 1e-10; disagreement is an integrity failure.
        """
        cached = self._data.get(key)
        if cached is not None:
            self.hits += 1
            if self._audit_sampled(key):
                self.audits += 1
                fresh = complex(compute())
                if abs(fresh - cached) > AUDIT_TOLERANCE:
                    self._quarantine(
                        f"audit mismatch at {key}: cached {cached}, fresh {fresh}"
                    )
            return cached
        self.misses += 1
        value = complex(compute())
        self._data[key] = value
        self._append(key, value)
        return value

    def close(self):
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    def __len__(self):
        return len(self._data)
