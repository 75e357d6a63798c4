"""Locally decodable Slepian-Wolf coding: Python bindings."""

from ._swlocal import (
    Error,
    analyze,
    bench_locality,
    bin_hash,
    build_schedule,
    decode_local,
    encode,
    oracle,
    probe_budget,
    roundtrip,
    sample,
)

__all__ = [
    "Error",
    "analyze",
    "bench_locality",
    "bin_hash",
    "build_schedule",
    "decode_local",
    "encode",
    "oracle",
    "probe_budget",
    "roundtrip",
    "sample",
]
