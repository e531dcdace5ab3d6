#!/usr/bin/env python3
"""Record golden stdio-protocol sessions by driving `est serve`.

Usage: make_golden_sessions.py PATH/TO/est OUTPUT_DIR

Writes session_<name>.requests.jsonl / .responses.jsonl for three sessions:
an instant solve, an exhausted episode, and a solve in the middle of an
episode (beliefs taken from the oracle belief reported in `info`).
"""
import json
import subprocess
import sys
from pathlib import Path


class Session:
    def __init__(self, binary):
        self.proc = subprocess.Popen([binary, "serve"], stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
        self.requests, self.responses = [], []

    def call(self, request):
        line = json.dumps(request, separators=(",", ":"))
        self.proc.stdin.write(line + "\n")
        self.proc.stdin.flush()
        response = self.proc.stdout.readline().rstrip("\n")
        self.requests.append(line)
        self.responses.append(response)
        return json.loads(response)

    def finish(self, out_dir, name):
        self.call({"cmd": "close"})
        self.proc.wait(timeout=10)
        (out_dir / f"session_{name}.requests.jsonl").write_text("\n".join(self.requests) + "\n")
        (out_dir / f"session_{name}.responses.jsonl").write_text("\n".join(self.responses) + "\n")


def spec(binary, seed, index):
    out = subprocess.run([binary, "gen", "--seed", str(seed), "--count", str(index + 1)],
                         check=True, capture_output=True, text=True).stdout.splitlines()
    return json.loads(out[index])


def main():
    binary, out_dir = sys.argv[1], Path(sys.argv[2])

    truth = set(spec(binary, 42, 0)["ground_truth"])
    s = Session(binary)
    s.call({"cmd": "reset", "seed": 42, "episode_index": 0})
    s.call({"cmd": "step", "action": [0.0] * 9 + [0.9 if i in truth else 0.1 for i in range(9)]})
    s.call({"cmd": "step", "action": [0.0] * 18})  # step after done
    s.finish(out_dir, "solved_instantly")

    s = Session(binary)
    s.call({"cmd": "reset", "seed": 42, "episode_index": 1})
    for k in range(10):
        trial = [1.0 if (i + k) % 3 == 0 else 0.0 for i in range(9)]
        s.call({"cmd": "step", "action": trial + [0.5] * 9})
    s.finish(out_dir, "exhausted")

    s = Session(binary)
    s.call({"cmd": "reset", "seed": 42, "episode_index": 2})
    belief = [0.5] * 9
    for _ in range(10):
        interior = [i for i in range(9) if 0.0 < belief[i] < 1.0]
        pick = min(interior, key=lambda i: (abs(belief[i] - 0.5), i)) if interior else None
        trial = [1.0 if i == pick else 0.0 for i in range(9)]
        r = s.call({"cmd": "step", "action": trial + belief})
        if r["done"]:
            break
        belief = r["info"]["oracle_belief"]
    s.finish(out_dir, "mid_episode_solve")


if __name__ == "__main__":
    main()
