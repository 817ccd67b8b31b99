"""
What a deployed model emits
===========================

The deployed model never emits a plain label. Each call returns a freshly
rerandomized confused vector, so repeated queries look different. Every
authorized key still decodes them to the same class.
"""

import numpy as np

from encryip import DeploymentHandle, deploy_predict, encrypt_dataset, gen, gen_params, train, user_decrypt
from encryip.codec import format_confused
from encryip.experiments import Benchmark
from encryip.pke import random_invalid_key

rng = np.random.default_rng(3)
bench = Benchmark()
tr, te = bench.datasets()

G = gen_params(bench.classes)
pk, keys, _ = gen(G, 3, rng)
model = train(encrypt_dataset(pk, tr, rng), bench.train_cfg)
h = DeploymentHandle(model, pk, tr.z)

x, y = te.X[0], te.y[0]
print("true label", y)
for _ in range(4):
    v = deploy_predict(h, x, rng)
    print(format_confused(v), "->", [user_decrypt(G, tr.z, sk, v) for sk in keys])

# an outsider's key reads garbage or nothing (None means not a valid label)
bad = random_invalid_key(pk, rng)
print("outsider reads", [user_decrypt(G, tr.z, bad, deploy_predict(h, x, rng)) for _ in range(6)])
