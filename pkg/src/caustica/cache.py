"""Persistent content-addressed cache for Bessel zeros and windowed radial eigenvalues.

File layout: a 16-byte header (magic + format version), then appended
records ``[sha256 key (32)] [payload length u32] [crc32 u32] [payload]``.
The checksum covers key and payload.  Records that fail the checksum or are
cut short are skipped with a warning; a header with another version makes
the whole file invisible, so a stale format never produces an answer.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
import threading
import zlib
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

MAGIC = b"CAUSTCCH"
VERSION = 1
_HEADER = struct.Struct("<8sII")
_RECORD = struct.Struct("<32sII")


def _key(*parts) -> bytes:
    text = "\x1f".join(repr(p) for p in parts)
    return hashlib.sha256(text.encode()).digest()


class Cache:
    """Concurrent readers, one serialised writer; values are stored as raw float64/int64 bytes."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: dict[bytes, bytes] = {}
        self.hits = 0
        self.misses = 0
        self.skipped = 0
        self._writable = True
        self._load()

    # --- file handling ---

    def _load(self):
        if not self.path.exists():
            return
        data = self.path.read_bytes()
        if len(data) < _HEADER.size:
            log.warning("cache %s: truncated header, ignoring file", self.path)
            self._writable = False
            return
        magic, version, _ = _HEADER.unpack_from(data, 0)
        if magic != MAGIC or version != VERSION:
            log.warning("cache %s: format %r v%s not understood, ignoring file", self.path, magic, version)
            self._writable = False
            return
        pos = _HEADER.size
        while pos < len(data):
            if pos + _RECORD.size > len(data):
                log.warning("cache %s: truncated record at byte %d", self.path, pos)
                self.skipped += 1
                break
            key, length, crc = _RECORD.unpack_from(data, pos)
            start = pos + _RECORD.size
            payload = data[start:start + length]
            if len(payload) < length:
                log.warning("cache %s: truncated record at byte %d", self.path, pos)
                self.skipped += 1
                break
            if zlib.crc32(key + payload) != crc:
                log.warning("cache %s: checksum mismatch at byte %d, record skipped", self.path, pos)
                self.skipped += 1
            else:
                self._records[key] = payload
            pos = start + length

    def _append(self, items):
        with self._lock:
            fresh = [(k, v) for k, v in items if k not in self._records]
            if not fresh:
                return
            for k, v in fresh:
                self._records[k] = v
            if not self._writable:
                # an unreadable file is left untouched; results live in memory only
                return
            self.path.parent.mkdir(parents=True, exist_ok=True)
            new = not self.path.exists() or self.path.stat().st_size == 0
            with open(self.path, "ab") as fh:
                if new:
                    fh.write(_HEADER.pack(MAGIC, VERSION, 0))
                for k, v in fresh:
                    fh.write(_RECORD.pack(k, len(v), zlib.crc32(k + v)))
                    fh.write(v)
                fh.flush()
                os.fsync(fh.fileno())

    def _get(self, key):
        payload = self._records.get(key)
        if payload is None:
            self.misses += 1
        else:
            self.hits += 1
        return payload

    def __len__(self):
        return len(self._records)

    # --- Bessel zeros keyed by (surface id, n, k) ---

    def get_zero(self, surface_id, n, k):
        payload = self._get(_key("zero", surface_id, int(n), int(k)))
        return None if payload is None else struct.unpack("<d", payload)[0]

    def put_zeros(self, surface_id, ns, ks, values):
        self._append([(_key("zero", surface_id, int(n), int(k)), struct.pack("<d", float(v)))
                      for n, k, v in zip(ns, ks, values)])

    # --- radial eigenvalues keyed by (surface id, n, grid, window) ---

    def get_eigen(self, surface_id, n, cells, lo, hi):
        payload = self._get(_key("eigen", surface_id, int(n), int(cells), float(lo), float(hi)))
        if payload is None:
            return None
        count = struct.unpack_from("<I", payload, 0)[0]
        body = payload[4:]
        idx = np.frombuffer(body, dtype="<i8", count=count, offset=0).copy()
        coarse = np.frombuffer(body, dtype="<f8", count=count, offset=8 * count).copy()
        fine = np.frombuffer(body, dtype="<f8", count=count, offset=16 * count).copy()
        return idx, coarse, fine

    def put_eigen(self, surface_id, n, cells, lo, hi, idx, coarse, fine):
        idx = np.asarray(idx, dtype="<i8")
        payload = (struct.pack("<I", idx.size) + idx.tobytes() + np.asarray(coarse, dtype="<f8").tobytes()
                   + np.asarray(fine, dtype="<f8").tobytes())
        self._append([(_key("eigen", surface_id, int(n), int(cells), float(lo), float(hi)), payload)])


def open_cache(path=None, seedless=False):
    """Cache from an explicit path or CAUSTICA_CACHE; ``seedless`` or no path means no cache."""
    if seedless:
        return None
    path = os.environ.get("CAUSTICA_CACHE") or path
    return Cache(path) if path else None
