"""
One public key, several secret keys
===================================

Encrypt with the public key and decrypt with any issued secret key. An
ill-formed ciphertext from ``fake`` decrypts to a different message under
every key, and rerandomization never changes a decryption.
"""

import numpy as np

from encryip import dec, enc, fake, gen, gen_params, samp_dist

rng = np.random.default_rng(0)

# smallest prime order q that fits 4 classes, and a safe-ish p = k*q + 1
G = gen_params(4)
print(f"q={G.q} p={G.p} g1={G.g1}")

# three users share one public key
pk, keys, auth = gen(G, 3, rng)
for sk in keys:
    print(f"user {sk.id}: a={sk.a} b={sk.b}")

# a well-formed ciphertext reads the same for everyone
m = G.index_element(2)
c = enc(pk, m, rng)
print("honest ciphertext", tuple(c), "->", [dec(G, sk, c) for sk in keys])

# rerandomizing changes the triple but not what it decrypts to
for _ in range(3):
    c2 = samp_dist(pk, c, rng)
    print("rerandomized      ", tuple(c2), "->", [dec(G, sk, c2) for sk in keys])

# a fake ciphertext splits the users apart
f = fake(pk, rng)
print("fake ciphertext   ", tuple(f), "->", [dec(G, sk, f) for sk in keys])
