"""Scripted stdio predictor used as a test double.

Speaks the newline-delimited JSON protocol with canned, deterministic
behavior. Misbehavior flags let tests exercise every client failure path.
"""

import argparse
import json
import sys


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--non-simplex", action="store_true")
    parser.add_argument("--silent-predict", action="store_true")
    parser.add_argument("--malformed", action="store_true")
    parser.add_argument("--unknown-id", action="store_true")
    parser.add_argument("--record", default=None)
    args = parser.parse_args()

    scenarios = []
    record = open(args.record, "a", encoding="utf-8") if args.record else None
    for line in sys.stdin:
        if record:
            record.write(line)
            record.flush()
        try:
            msg = json.loads(line)
        except json.JSONDecodeError:
            print(json.dumps({"type": "error", "message": "bad json"}), flush=True)
            continue
        kind = msg.get("type")
        if kind == "hello":
            scenarios = list(msg.get("scenarios", []))
            print(json.dumps({"type": "ready", "model": "fake-adapter"}), flush=True)
        elif kind == "predict":
            if args.silent_predict:
                continue
            if args.malformed:
                print("this is not json", flush=True)
                continue
            if args.unknown_id:
                print(json.dumps(
                    {"type": "weights", "t": msg["t"], "p": {"bogus": 1.0}}
                ), flush=True)
                continue
            if args.non_simplex:
                table = {sid: 0.6 for sid in scenarios}
            else:
                table = {sid: 1.0 / len(scenarios) for sid in scenarios}
            print(json.dumps(
                {"type": "weights", "t": msg["t"], "p": table}
            ), flush=True)
        elif kind == "feedback":
            print(json.dumps({"type": "ack"}), flush=True)
        elif kind == "update":
            print(json.dumps(
                {"type": "updated", "loss_before": 0.6931, "loss_after": 0.6931}
            ), flush=True)
        elif kind == "shutdown":
            return 0
        else:
            print(json.dumps(
                {"type": "error", "message": f"unknown type {kind!r}"}
            ), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
