"""
Confused labels
===============

A class label becomes a group element, its ciphertext becomes a 3q-long
3-hot vector, and a per-block argmax turns a network output back into a
ciphertext.
"""

import numpy as np

from encryip import LabelEncoding, dec, decode_label, enc, encode_label, gen, gen_params, phi, phi_inv
from encryip.codec import format_confused

rng = np.random.default_rng(1)
G = gen_params(3)
pk, keys, _ = gen(G, 2, rng)
E = LabelEncoding(G, 3)

for y in range(3):
    c = enc(pk, encode_label(E, y), rng)
    print(f"y={y} c={tuple(c)} phi={format_confused(phi(G, c))}")

# a soft network output still maps back to the right triple
noisy = 0.8 * phi(G, c) + rng.uniform(0, 0.1, 3 * G.q)
back = phi_inv(G, noisy)
print("recovered", tuple(back), "-> label", decode_label(E, dec(G, keys[0], back)))
