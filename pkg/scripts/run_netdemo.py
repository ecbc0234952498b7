#!/usr/bin/env python3
"""Three-process loopback demo: fabric broker, Bob, then Alice, all spawned
through the installed CLI. Prints the transcript audit for both sides."""
import argparse
import json
import os
import re
import socket
import subprocess
import sys
import tempfile
import time

from qteleport.netdemo import transcript_audit


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--protocol", choices=("standard", "simplified"), default="standard")
    parser.add_argument("--bits", default="1011001110")
    parser.add_argument("--seed", type=int, default=2025)
    args = parser.parse_args()

    fabric_port, bob_port = free_port(), free_port()
    workdir = tempfile.mkdtemp(prefix="qteleport_demo_")
    bits_file = os.path.join(workdir, "bits.txt")
    with open(bits_file, "w") as fh:
        fh.write(args.bits)
    alice_t = os.path.join(workdir, "alice.json")
    bob_t = os.path.join(workdir, "bob.json")

    env = dict(os.environ, QTELEPORT_SEED=str(args.seed))
    cli = [sys.executable, "-m", "qteleport.cli"]
    fabric = subprocess.Popen(
        cli + ["serve-fabric", "--bind", f"127.0.0.1:{fabric_port}"],
        env=env, stdout=subprocess.PIPE, text=True,
    )
    try:
        line = fabric.stdout.readline()
        assert re.search(r"listening", line), line
        bob = subprocess.Popen(
            cli + ["bob", "--listen", f"127.0.0.1:{bob_port}",
                   "--fabric", f"127.0.0.1:{fabric_port}",
                   "--protocol", args.protocol, "--transcript", bob_t],
            stdout=subprocess.PIPE, text=True,
        )
        time.sleep(0.3)  # let bob bind
        subprocess.run(
            cli + ["alice", "--fabric", f"127.0.0.1:{fabric_port}",
                   "--bob", f"127.0.0.1:{bob_port}",
                   "--protocol", args.protocol, "--bits-from", bits_file,
                   "--transcript", alice_t],
            check=True,
        )
        bob.wait(timeout=60)
        print(bob.stdout.read().strip())
        for side, path in (("alice", alice_t), ("bob", bob_t)):
            with open(path) as fh:
                entries = json.load(fh)["entries"]
            print(f"{side} audit: {transcript_audit(entries)}")
        print(f"transcripts in {workdir}")
    finally:
        fabric.terminate()
        fabric.wait(timeout=10)


if __name__ == "__main__":
    main()
