"""
Training on encrypted labels
============================

Train the same small network twice on Gaussian blobs: once on plain labels
and once on confused labels. With the right key the protected model is as
accurate as the baseline. With a wrong key it is no better than chance.
"""

from encryip.experiments import Benchmark, effectiveness

bench = Benchmark()
res = effectiveness(bench, seed=0)

print(f"q={res.q}, {bench.classes} classes, chance={1 / bench.classes:.2f}")
print(f"plain baseline    {res.baseline:.4f}")
print(f"correct key       {res.correct_key:.4f}")
print(f"incorrect key     {res.incorrect_key:.4f}")

# training loss per epoch, every tenth epoch
print("loss", " ".join(f"{l:.3f}" for l in res.losses[::10]))
