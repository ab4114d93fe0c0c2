#!/usr/bin/env python3
"""Transformer sequence classifier speaking the rumor worker protocol.

Reads one JSON request per line on stdin and answers on stdout. The base
checkpoint comes from $RUMOR_TRANSFORMER_MODEL (default roberta-base);
$RUMOR_TRANSFORMER_DEVICE picks the torch device (default cpu).
"""
import json
import os
import random
import sys

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

MAX_LEN = 128


class Worker:
    def __init__(self):
        self.model = None
        self.tokenizer = None
        self.device = torch.device(os.environ.get("RUMOR_TRANSFORMER_DEVICE", "cpu"))
        self.seed = int(os.environ.get("RUMOR_TRANSFORMER_SEED", "0"))

    def init(self, req):
        source = req.get("state") or os.environ.get("RUMOR_TRANSFORMER_MODEL", "roberta-base")
        torch.manual_seed(self.seed)
        self.tokenizer = AutoTokenizer.from_pretrained(source)
        self.model = AutoModelForSequenceClassification.from_pretrained(
            source, num_labels=req["classes"], ignore_mismatched_sizes=True
        ).to(self.device)
        return {"ok": True}

    def encode(self, texts, pairs):
        if all(p is None for p in pairs):
            return self.tokenizer(texts, truncation=True, max_length=MAX_LEN, padding=True, return_tensors="pt")
        return self.tokenizer(
            texts, [p or "" for p in pairs], truncation=True, max_length=MAX_LEN, padding=True, return_tensors="pt"
        )

    def fit(self, req):
        recipe, examples = req["recipe"], req["examples"]
        if not examples:
            return {"ok": True}
        opt = torch.optim.AdamW(self.model.parameters(), lr=recipe["learning_rate"])
        smoothing = recipe["label_smoothing"]
        rng = random.Random(self.seed)
        self.model.train()
        for _ in range(recipe["epochs"]):
            order = list(range(len(examples)))
            rng.shuffle(order)
            for start in range(0, len(order), recipe["batch_size"]):
                batch = [examples[i] for i in order[start : start + recipe["batch_size"]]]
                enc = self.encode([b["text"] for b in batch], [b.get("pair") for b in batch]).to(self.device)
                target = torch.tensor([b["target"] for b in batch], dtype=torch.float32, device=self.device)
                k = target.shape[1]
                target = (1 - smoothing) * target + smoothing / k
                logits = self.model(**enc).logits
                loss = -(target * torch.log_softmax(logits, dim=-1)).sum(dim=-1).mean()
                opt.zero_grad()
                loss.backward()
                opt.step()
        self.model.eval()
        return {"ok": True}

    @torch.no_grad()
    def predict(self, req):
        enc = self.encode([req["text"]], [req.get("pair")]).to(self.device)
        probs = torch.softmax(self.model(**enc).logits, dim=-1)[0].tolist()
        total = sum(probs)
        return {"probs": [p / total for p in probs]}

    def save(self, req):
        os.makedirs(req["state"], exist_ok=True)
        self.model.save_pretrained(req["state"])
        self.tokenizer.save_pretrained(req["state"])
        return {"ok": True}


def main():
    worker = Worker()
    ops = {"init": worker.init, "fit": worker.fit, "predict": worker.predict, "save": worker.save}
    for line in sys.stdin:
        req = json.loads(line)
        try:
            reply = ops[req["op"]](req)
        except Exception as e:
            reply = {"error": "%s: %s" % (type(e).__name__, e)}
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
