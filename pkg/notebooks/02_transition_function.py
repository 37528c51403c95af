"""
The transition function Psi
===========================

Psi is linear on the lit side (about -2i tau) and decays very fast in the
shadow. The two evaluation paths overlap on [6, 12], where they can be
compared against each other.
"""

import numpy as np

from surfcurrent import fock

taus = np.array([-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0, 12.0])
for t in taus:
    e = fock.psi(float(t))
    print(f"tau={t:6.1f}  Psi={e.value.real:+.6e}{e.value.imag:+.6e}i  |Psi|={abs(e.value):.3e}  {e.path}")

# Overlap zone: both paths with their own error estimates
grid = np.linspace(6, 12, 7)
q, eq = fock.psi_quadrature(grid)
a, ea = fock.psi_asymptotic(grid)
print("\noverlap |quad - series| / (err_q + err_s):")
print(np.round(np.abs(q - a) / (eq + ea), 3))

# Lit-side asymptote and the stored series coefficients
print("\nPsi(tau) / (-2i tau) at tau = 10, 20, 40:",
      [round(abs(fock.psi(t).value / (-2j * t)), 6) for t in (10.0, 20.0, 40.0)])
print("series coefficients:", fock.SERIES_COEFFS)
