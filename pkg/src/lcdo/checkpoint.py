"""Binary checkpoints: config echo + raw fields + content checksum.

Layout (all integers little-endian unsigned 64-bit):

  magic      8 bytes  b"LCDO0001"
  echo_len   u64      byte length of the canonical config text
  echo       bytes    UTF-8 canonical config
  iteration  u64      outer-iteration counter of the saved state
  n          f64[3N]  director, 3 components per cell, cells x-fastest
  phi        f64[N]   shape field, x-fastest
  v          f64[N]   inner-boundary field, x-fastest
  checksum   u64      blake2b-64 over every preceding byte

A checkpoint round-trips bit-identically, so reloading reproduces the exact
energies of the saved state.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, parse_config_text, print_config
from .grid import FieldState, GridSpec

__all__ = ["Checkpoint", "ChecksumError", "CheckpointFormatError", "save_checkpoint", "load_checkpoint"]

MAGIC = b"LCDO0001"


class ChecksumError(RuntimeError):
    """Stored and recomputed content checksums disagree."""


class CheckpointFormatError(RuntimeError):
    """Structurally malformed checkpoint file."""


@dataclass
class Checkpoint:
    config: RunConfig
    iteration: int
    state: FieldState


def _digest(payload: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def _vector_to_wire(u: np.ndarray) -> bytes:
    # cells x-fastest, three components contiguous per cell
    return np.ascontiguousarray(u.transpose(2, 1, 0, 3), dtype="<f8").tobytes()


def _scalar_to_wire(f: np.ndarray) -> bytes:
    return np.ascontiguousarray(f.transpose(2, 1, 0), dtype="<f8").tobytes()


def _vector_from_wire(buf: bytes, grid: GridSpec) -> np.ndarray:
    arr = np.frombuffer(buf, dtype="<f8").reshape(grid.nz, grid.ny, grid.nx, 3)
    return np.ascontiguousarray(arr.transpose(2, 1, 0, 3))


def _scalar_from_wire(buf: bytes, grid: GridSpec) -> np.ndarray:
    arr = np.frombuffer(buf, dtype="<f8").reshape(grid.nz, grid.ny, grid.nx)
    return np.ascontiguousarray(arr.transpose(2, 1, 0))


def save_checkpoint(path: str, config: RunConfig, state: FieldState, iteration: int = 0) -> None:
    echo = print_config(config).encode("utf-8")
    body = bytearray()
    body += MAGIC
    body += struct.pack("<Q", len(echo))
    body += echo
    body += struct.pack("<Q", int(iteration))
    body += _vector_to_wire(state.n)
    body += _scalar_to_wire(state.phi)
    body += _scalar_to_wire(state.v)
    body += struct.pack("<Q", _digest(bytes(body)))
    with open(path, "wb") as fh:
        fh.write(bytes(body))


def load_checkpoint(path: str) -> Checkpoint:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 8 + 8 + 8:
        raise CheckpointFormatError(f"checkpoint too short ({len(blob)} bytes)")
    if blob[: len(MAGIC)] != MAGIC:
        raise CheckpointFormatError(f"bad magic {blob[:8]!r}; expected {MAGIC!r}")

    stored = struct.unpack("<Q", blob[-8:])[0]
    recomputed = _digest(blob[:-8])
    if stored != recomputed:
        raise ChecksumError(
            f"checksum mismatch: stored {stored:#018x}, recomputed {recomputed:#018x}"
        )

    off = len(MAGIC)
    (echo_len,) = struct.unpack_from("<Q", blob, off)
    off += 8
    echo = blob[off : off + echo_len].decode("utf-8")
    off += echo_len
    config = parse_config_text(echo)
    (iteration,) = struct.unpack_from("<Q", blob, off)
    off += 8

    grid = config.grid
    ncells = grid.nx * grid.ny * grid.nz
    sizes = (3 * ncells * 8, ncells * 8, ncells * 8)
    expected = off + sum(sizes) + 8
    if len(blob) != expected:
        raise CheckpointFormatError(f"payload size {len(blob)} != expected {expected}")
    n = _vector_from_wire(blob[off : off + sizes[0]], grid)
    off += sizes[0]
    phi = _scalar_from_wire(blob[off : off + sizes[1]], grid)
    off += sizes[1]
    v = _scalar_from_wire(blob[off : off + sizes[2]], grid)

    return Checkpoint(config=config, iteration=int(iteration), state=FieldState(grid, n, phi, v))
