"""How a noisy controlled coupling becomes a legal quantum operation.

The interaction between the measurement apparatus and an environment qubit
is a controlled rotation damped by a noise weight: eps * I + (1-eps) * cx(alpha).
That mixture is not unitary, so it cannot act as a quantum operation as-is.
The fix is to keep the orthonormal factor of its QR decomposition, which has
the closed form q_prime(eps, alpha). This script shows the construction, the
agreement, and the one place it breaks down.
"""

import numpy as np

from qdleak import DegeneracyError, cx, orthonormalize_qr, q_prime

np.set_printoptions(precision=4, suppress=True)

eps, alpha = 0.7, np.pi / 6
mixture = eps * np.eye(2) + (1 - eps) * cx(alpha)

print("damped coupling  eps*I + (1-eps)*cx(alpha)  at eps=0.7, alpha=pi/6:")
print(mixture.real)
print("unitarity defect |M^+ M - I|:",
      np.abs(mixture.conj().T @ mixture - np.eye(2)).max().round(4))

unitary = orthonormalize_qr(mixture)
closed = q_prime(eps, alpha)
print("\nQR orthonormal factor:")
print(unitary.real)
print("closed form [[p,-q],[q,p]]/sqrt(p^2+q^2):")
print(closed.real)
print("max difference:", np.abs(unitary - closed).max())

# Below eps = 0.5 the mixture has negative determinant (cx is a reflection),
# and the positive-diagonal QR convention flips the second column sign.
low = orthonormalize_qr(0.2 * np.eye(2) + 0.8 * cx(alpha))
print("\nat eps=0.2 the QR factor's second column is sign-flipped:")
print(low.real)
print("closed form:")
print(q_prime(0.2, alpha).real)

# Exactly at eps = 0.5 the mixture is rank-1 (det = 2*eps - 1 = 0): the QR
# route fails loudly while the closed form stays regular.
try:
    orthonormalize_qr(0.5 * np.eye(2) + 0.5 * cx(0.0))
except DegeneracyError as exc:
    print("\neps=0.5 mixture is rank-deficient ->", exc)
print("closed form at the same point:")
print(q_prime(0.5, 0.0).real)
