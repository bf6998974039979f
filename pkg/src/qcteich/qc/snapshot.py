"""Binary snapshots of grid fields.

Layout: the magic ``QCTF``, a format version, then ``kind, p, q, n_r, n_t,
r_inner`` and the samples as row-major little-endian ``complex64``.  Sphere
fields store chart 0 followed by chart 1.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import InputError
from .domains import DomainKind, ModelDomain
from .fields import GridField

MAGIC = b"QCTF"
VERSION = 1
_KINDS = [DomainKind.UNIT_DISK, DomainKind.PUNCTURED_DISK, DomainKind.ANNULUS, DomainKind.SPHERE]
_HEADER = struct.Struct("<4sHBbbIId")


def to_bytes(f: GridField) -> bytes:
    d = f.domain
    head = _HEADER.pack(MAGIC, VERSION, _KINDS.index(d.kind), f.p, f.q, d.n_r, d.n_t, d.r_inner)
    return head + np.ascontiguousarray(f.samples, dtype="<c8").tobytes()


def from_bytes(data: bytes) -> GridField:
    if len(data) < _HEADER.size:
        raise InputError("snapshot truncated")
    magic, version, kind, p, q, n_r, n_t, r_inner = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise InputError("not a field snapshot")
    if version != VERSION:
        raise InputError(f"unsupported snapshot version {version}")
    if kind >= len(_KINDS):
        raise InputError(f"unknown domain kind {kind}")
    domain = ModelDomain(_KINDS[kind], n_r, n_t, r_inner)
    body = data[_HEADER.size:]
    expected = domain.n_charts * n_r * n_t * 8
    if len(body) != expected:
        raise InputError(f"snapshot body has {len(body)} bytes, expected {expected}")
    samples = np.frombuffer(body, dtype="<c8").astype(complex)
    return GridField(domain, p, q, samples.reshape(domain.n_charts, n_r, n_t))


def save(f: GridField, path) -> None:
    Path(path).write_bytes(to_bytes(f))


def load(path) -> GridField:
    return from_bytes(Path(path).read_bytes())
