"""Reference stub backend for bridge conformance tests.

Speaks the JSON-lines model protocol. Marker texts trigger failure paths:

    __error__       -> per-request error reply
    __wrong_arity__ -> one output too few
    __badrow__      -> probabilities that do not sum to 1
    __nonfinite__   -> NaN in the output row
    __hang__        -> sleeps before replying (timeout path)
    __crash__       -> exits immediately

Usage: reference_backend.py [label ...] (default: neg pos). Pass
"--regression" for a regression handshake with scalar outputs.
"""

import json
import os
import sys
import time


def main() -> None:
    args = [a for a in sys.argv[1:]]
    regression = "--regression" in args
    labels = [a for a in args if not a.startswith("--")] or ["neg", "pos"]

    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        message = json.loads(line)
        mtype = message.get("type")
        if mtype == "handshake":
            reply = {"type": "handshake", "task": "regression" if regression else "classification"}
            if not regression:
                reply["labels"] = labels
            print(json.dumps(reply), flush=True)
            continue
        if mtype != "predict":
            continue
        request_id = message["id"]
        texts = message["texts"]
        if any(t == "__crash__" for t in texts):
            os._exit(1)
        if any(t == "__hang__" for t in texts):
            time.sleep(60)
        if any(t == "__error__" for t in texts):
            print(json.dumps({"type": "error", "id": request_id, "message": "refused"}), flush=True)
            continue
        outputs = []
        for text in texts:
            if regression:
                outputs.append(float(len(text)))
            elif text == "__badrow__":
                outputs.append([0.5] + [0.6] * (len(labels) - 1))
            elif text == "__nonfinite__":
                outputs.append([float("nan")] + [0.0] * (len(labels) - 1))
            elif "good" in text:
                row = [0.1 / max(1, len(labels) - 1)] * len(labels)
                row[-1] = 0.9
                outputs.append([p / sum(row) for p in row])
            else:
                row = [0.9] + [0.1 / max(1, len(labels) - 1)] * (len(labels) - 1)
                outputs.append([p / sum(row) for p in row])
        if any(t == "__wrong_arity__" for t in texts):
            outputs = outputs[:-1]
        print(json.dumps({"type": "prediction", "id": request_id, "outputs": outputs}), flush=True)


if __name__ == "__main__":
    main()
