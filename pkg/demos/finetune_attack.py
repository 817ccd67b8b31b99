"""
Surviving a fine-tuning attack
==============================

A leaker fine-tunes the stolen model on five shards of clean data in turn,
hoping to wash out the probe. After each round we record test accuracy and
how often every key is still traced correctly.
"""

from encryip.experiments import Benchmark, attack_trials

runs = attack_trials(Benchmark(), trials=3, parts=5, seed=0)
for i, run in enumerate(runs):
    print(f"model {i}")
    for r in run:
        print(f"  round {r.round}: accuracy={r.accuracy:.4f} verification={r.verification:.2f}")
