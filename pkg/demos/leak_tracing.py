"""
Tracing a leaked key
====================

Before training, the owner plants a probe input paired with a fake
ciphertext. Every user's key decrypts that fake to a different value. When
a pirated deployment shows up, the arbitrator feeds it the probe and reads
off whose key it runs with.
"""

from encryip.experiments import Benchmark, leak_trials
from encryip.verification import format_report

results = leak_trials(Benchmark(), trials=10, n_keys=3, seed=0)
print(format_report(results))

# a user issued after training is traced the same way, no retraining needed
late = leak_trials(Benchmark(), trials=5, n_keys=3, seed=1, extra_users=1)
print(format_report(late))
