#!/usr/bin/env python3
"""Write the example scripted-oracle files under data/scripts/.

Each line is one generated token with its next-token distribution.
"""
import json
import os


def uniform(m):
    return [1.0 / m] * m


def peaked(p):
    return [p, 1.0 - p]


def unit(tag, words, dist):
    toks = [(f" <{tag}>", dist)]
    toks += [(" " + w, dist) for w in words.split()]
    toks.append((f" </{tag}>", dist))
    return toks


def write(path, tokens):
    with open(path, "w", encoding="utf-8") as f:
        for text, probs in tokens:
            f.write(json.dumps({"token": text, "probs": probs}) + "\n")


def main():
    out = os.path.join(os.path.dirname(__file__), "..", "data", "scripts")
    os.makedirs(out, exist_ok=True)

    # Hard unit first (sets H0 = ln 2), one easy->hard transition whose easy
    # tail sits at ln 4, so the normalized delta hits the cap and SP = 1.
    sp_one = [("<think>", peaked(0.99))]
    sp_one += unit("hard", "Wait, check the setup: 6 * 7 needs care here.", uniform(2))
    sp_one += unit("easy", "6 * 7 = 42 so the product is 42 done.", uniform(4))
    sp_one += unit("hard", "Wait, recheck: 42 / 7 = 6, consistent.", uniform(2))
    sp_one += [(" </think>", peaked(0.99)), (" 42", peaked(0.99))]
    write(os.path.join(out, "sp_one.jsonl"), sp_one)

    # Several transitions with mixed entropy levels.
    demo = [("<think>", peaked(0.99))]
    demo += unit("easy", "Add 17 and 25 to get 42 quickly.", peaked(0.9))
    demo += unit("hard", "Wait, is it 17 + 25 or 17 * 25 here?", uniform(3))
    demo += unit("easy", "The statement says sum, so 42.", uniform(4))
    demo += unit("hard", "However, double-check the carry: 7 + 5 = 12.", uniform(3))
    demo += unit("easy", "Carry one, 1 + 2 + 1 = 4, result 42.", peaked(0.8))
    demo += unit("hard", "Alternatively, 25 + 17 also gives 42.", uniform(3))
    demo += [(" </think>", peaked(0.99)), (" \\boxed{42}", peaked(0.99))]
    write(os.path.join(out, "edr_demo.jsonl"), demo)


if __name__ == "__main__":
    main()
