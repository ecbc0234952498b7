#!/usr/bin/env python3
"""Throughput benchmark for the per-bit teleport executors.

Reports single-threaded bit-teleportations per second for both protocols
and both executors, then extrapolates the wall time for a full 1920x1080
RGB image (49,766,400 bits). The 50k bits/s single-threaded floor and the
sub-20-minute full-HD figure are soft targets: reported here, not asserted
in CI.
"""
import time

from qteleport.pipeline import _run_range_engine, _run_range_fast, _run_range_fast_simplified
from qteleport.seeding import derive_seed

FULL_HD_BITS = 1920 * 1080 * 3 * 8


def bench(label, runner, bits, *args):
    t0 = time.perf_counter()
    runner(bits, *args)
    elapsed = time.perf_counter() - t0
    rate = len(bits) / elapsed
    full_hd_min = FULL_HD_BITS / rate / 60
    flag = "ok" if rate >= 50_000 else "BELOW 50k/s floor"
    print(f"{label:32s} {rate:12,.0f} bits/s   full-HD ~{full_hd_min:6.1f} min   [{flag}]")
    return rate


def main() -> None:
    s = 0.5 ** 0.5
    bits = [i & 1 for i in range(200_000)]
    seed = derive_seed(1, "bench")
    print(f"benchmarking {len(bits):,} bit-teleportations per row (single thread)\n")
    bench("standard / fast", _run_range_fast, bits, "standard", s, s, seed)
    bench("standard / fast (A=0.8)", _run_range_fast, bits, "standard", 0.8, 0.6, seed)
    bench("simplified / fast", _run_range_fast_simplified, bits, s, s, seed)
    engine_bits = bits[:20_000]
    bench("standard / engine", _run_range_engine, engine_bits, "standard", s, s, seed)
    bench("simplified / engine", _run_range_engine, engine_bits, "simplified", s, s, seed)


if __name__ == "__main__":
    main()
