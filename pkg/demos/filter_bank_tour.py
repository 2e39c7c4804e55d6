"""Tour of the filter banks: eigenvalue decay and what the filters capture.

Run: python3 demos/filter_bank_tour.py
"""

import numpy as np

from specfilt import build_filter_bank, build_tensor_bank, impulse_vector

T, k = 1024, 24

for kind in ("h", "n"):
    bank = build_filter_bank(T, k, kind)
    sig = bank.eigenvalues
    print(f"bank kind={kind!r} window={bank.filter_length} top eigenvalues:")
    print("  " + " ".join(f"{s:.3e}" for s in sig[:6]) + " ...")
    print(f"  sigma_24/sigma_1 = {sig[-1] / sig[0]:.3e}  (geometric decay)")

# How well the scaled bank reconstructs a slowly decaying geometric mode.
bank = build_filter_bank(T, k, "h")
for alpha in (0.9, 0.99, 0.999, 1 - 1 / T):
    mu = impulse_vector(alpha, bank.filter_length).values
    proj = bank.filters.T @ (bank.filters @ mu)
    rel = np.linalg.norm(mu - proj) / np.linalg.norm(mu)
    print(f"alpha={alpha:<10.6g} relative reconstruction error {rel:.3e}")

tensor = build_tensor_bank(T, 8)
print(
    f"tensor bank: {tensor.num_filters} filters of length "
    f"{tensor.filter_length} from {tensor.component_count} components, "
    f"padded horizon {tensor.t_prime}"
)
