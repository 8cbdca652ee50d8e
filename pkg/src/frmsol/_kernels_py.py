"""Pure-NumPy implementations of the per-step field updates.

Mirrors the compiled module ``_kernels_cy`` operation for operation; the
active implementation is chosen in :mod:`frmsol.kernels`.  The Thomas
sweeps loop over the banded axis only, with vector operations across the
other axis, so the Python overhead stays modest.
"""

import numpy as np


def phase_rotation(psi, lat_z, cap_z, rho_sq, eps, half_om_sq, g, c):
    """In-place psi *= exp(c * (V + g |psi|^2)) with separable V parts.

    V(rho, z) = eps * lat_z[k] + cap_z[k] + half_om_sq * rho_sq[j]; the
    coefficient c is -i dt/2 in real time and -dtau/2 in imaginary time.
    """
    pot = eps * lat_z + cap_z + half_om_sq * rho_sq[:, None]
    pot += g * (psi.real ** 2 + psi.imag ** 2)
    np.multiply(psi, np.exp(c * pot), out=psi)


def cayley_axis0(psi, work, ap, bp, cp, w, inv_dp, cm):
    """In-place (1 - kL)^-1 (1 + kL) psi along axis 0 (the radial axis).

    ap/bp/cp are the bands of 1 + kL; w is the prefactored Thomas
    multiplier band of 1 - kL, inv_dp its reciprocal pivot diagonal,
    and cm its upper band.
    """
    n0 = psi.shape[0]
    np.multiply(bp[:, None], psi, out=work)
    work[1:] += ap[1:, None] * psi[:-1]
    work[:-1] += cp[:-1, None] * psi[1:]
    for j in range(1, n0):
        work[j] -= w[j] * work[j - 1]
    np.multiply(work[n0 - 1], inv_dp[n0 - 1], out=psi[n0 - 1])
    for j in range(n0 - 2, -1, -1):
        np.subtract(work[j], cm[j] * psi[j + 1], out=psi[j])
        psi[j] *= inv_dp[j]


def cayley_axis1(psi, work, ap, bp, cp, w, inv_dp, cm):
    """Same update as :func:`cayley_axis0` along axis 1 (the axial axis)."""
    n1 = psi.shape[1]
    np.multiply(bp[None, :], psi, out=work)
    work[:, 1:] += ap[1:] * psi[:, :-1]
    work[:, :-1] += cp[:-1] * psi[:, 1:]
    for k in range(1, n1):
        work[:, k] -= w[k] * work[:, k - 1]
    np.multiply(work[:, n1 - 1], inv_dp[n1 - 1], out=psi[:, n1 - 1])
    for k in range(n1 - 2, -1, -1):
        np.subtract(work[:, k], cm[k] * psi[:, k + 1], out=psi[:, k])
        psi[:, k] *= inv_dp[k]
