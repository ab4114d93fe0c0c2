#!/usr/bin/env python3
"""Token-count classifier speaking the worker protocol; stands in for a transformer in tests."""
import json
import math
import os
import sys


class Model:
    def __init__(self, classes):
        self.classes = classes
        self.counts = [dict() for _ in range(classes)]
        self.fits = 0

    def tokens(self, text, pair):
        toks = ["a:" + t for t in text.lower().split()]
        if pair is not None:
            toks += ["b:" + t for t in pair.lower().split()]
        return toks

    def fit(self, examples):
        self.fits += 1
        for ex in examples:
            for k, w in enumerate(ex["target"]):
                for t in self.tokens(ex["text"], ex.get("pair")):
                    self.counts[k][t] = self.counts[k].get(t, 0.0) + w

    def predict(self, text, pair):
        scores = []
        for k in range(self.classes):
            s = sum(math.log1p(self.counts[k].get(t, 0.0)) for t in self.tokens(text, pair))
            scores.append(s)
        m = max(scores)
        exps = [math.exp(s - m) for s in scores]
        z = sum(exps)
        return [e / z for e in exps]


def main():
    model = None
    for line in sys.stdin:
        req = json.loads(line)
        op = req.get("op")
        try:
            if op == "init":
                model = Model(req["classes"])
                if req.get("state"):
                    with open(os.path.join(req["state"], "counts.json")) as f:
                        saved = json.load(f)
                    model.counts, model.fits = saved["counts"], saved["fits"]
                reply = {"ok": True}
            elif op == "fit":
                model.fit(req["examples"])
                reply = {"ok": True}
            elif op == "predict":
                reply = {"probs": model.predict(req["text"], req.get("pair"))}
            elif op == "save":
                os.makedirs(req["state"], exist_ok=True)
                with open(os.path.join(req["state"], "counts.json"), "w") as f:
                    json.dump({"counts": model.counts, "fits": model.fits}, f, sort_keys=True)
                reply = {"ok": True}
            elif op == "fail":
                reply = {"error": "requested failure"}
            else:
                reply = {"error": "unknown op %r" % op}
        except Exception as e:  # report, keep serving
            reply = {"error": str(e)}
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
