#!/usr/bin/env python3
"""Generate the bundled synthetic chain-of-thought corpus used by the curator tests.

Output is deterministic for a given --seed.
"""
import argparse
import json
import random
import re

FILLERS = [
    "Let me think about this.",
    "Okay, let me start.",
    "Hmm, let me see.",
    "Alright, here we go.",
    "Let me make sure I understand the setup.",
    "Well, this looks manageable.",
]

REFLECT = [
    "Wait, I should double-check that step.",
    "Wait, maybe I mixed up the order of operations.",
    "However, the sign could flip if I am careless.",
    "Alternatively, I could verify by working backwards.",
]


def make_record(rng, idx, with_entropy):
    a, b, c = rng.randint(2, 99), rng.randint(2, 99), rng.randint(2, 9)
    total = (a + b) * c
    problem = f"Compute ({a} + {b}) * {c}."
    paras = []
    modes = []
    paras.append(f"{rng.choice(FILLERS)} The expression asks for ({a} + {b}) times {c}.")
    modes.append("easy")
    paras.append(f"{rng.choice(FILLERS)} First add: {a} + {b} = {a + b}.")
    modes.append("easy")
    if rng.random() < 0.8:
        paras.append(f"{rng.choice(REFLECT)} Rechecking, {a} + {b} is still {a + b}.")
        modes.append("hard")
    paras.append(f"{rng.choice(FILLERS)} Then multiply: {a + b} * {c} = {total}.")
    modes.append("easy")
    paras.append(f"{rng.choice(REFLECT)} Dividing back, {total} / {c} = {a + b}, so it holds.")
    modes.append("hard")
    cot = "\n\n".join(paras)
    rec = {
        "id": f"syn-{idx:03d}",
        "problem": problem,
        "cot": cot,
        "answer": f"\\boxed{{{total}}}",
        "gold_answer": str(total),
    }
    if with_entropy:
        trace = []
        for i, p in enumerate(paras):
            text = p if i == 0 else "\n\n" + p
            lo, hi = (1.6, 2.6) if modes[i] == "hard" else (0.1, 0.9)
            for tok in re.findall(r"\s*\S+", text):
                trace.append({"token": tok, "entropy": round(rng.uniform(lo, hi), 4)})
        rec["entropy_trace"] = trace
    return rec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default="data/synthetic_cot_200.jsonl")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    with open(args.out, "w", encoding="utf-8") as f:
        for i in range(args.n):
            f.write(json.dumps(make_record(rng, i, with_entropy=i % 2 == 0)) + "\n")


if __name__ == "__main__":
    main()
