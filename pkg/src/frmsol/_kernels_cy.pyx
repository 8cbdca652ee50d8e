# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-step field updates: fused phase rotation and tridiagonal
Cayley sweeps.  Interface-identical to ``_kernels_py``.

Complex arithmetic is written out on doubles: the recurrences of the
Thomas sweeps then keep their carried value in registers, which is what
the serial dependency chains are limited by.
"""

from libc.math cimport cos, exp, sin


def phase_rotation(double complex[:, ::1] psi, double[::1] lat_z,
                   double[::1] cap_z, double[::1] rho_sq,
                   double eps, double half_om_sq, double g, double complex c):
    """In-place psi *= exp(c * (V + g |psi|^2)) with separable V parts.

    c = -i dt/2 in real time (pure rotation, no magnitude change) and
    -dtau/2 in imaginary time (pure damping).
    """
    cdef Py_ssize_t n0 = psi.shape[0], n1 = psi.shape[1], j, k
    cdef double c_re = c.real, c_im = c.imag
    cdef double radial, x, mag, ph, fr, fi, re, im
    for j in range(n0):
        radial = half_om_sq * rho_sq[j]
        for k in range(n1):
            re = psi[j, k].real
            im = psi[j, k].imag
            x = eps * lat_z[k] + cap_z[k] + radial + g * (re * re + im * im)
            if c_re == 0.0:
                ph = c_im * x
                fr = cos(ph)
                fi = sin(ph)
            elif c_im == 0.0:
                fr = exp(c_re * x)
                fi = 0.0
            else:
                mag = exp(c_re * x)
                ph = c_im * x
                fr = mag * cos(ph)
                fi = mag * sin(ph)
            psi[j, k] = (re * fr - im * fi) + 1j * (re * fi + im * fr)


def cayley_axis0(double complex[:, ::1] psi, double complex[:, ::1] work,
                 double complex[::1] ap, double complex[::1] bp,
                 double complex[::1] cp, double complex[::1] w,
                 double complex[::1] inv_dp, double complex[::1] cm):
    """In-place (1 - kL)^-1 (1 + kL) psi along axis 0 (the radial axis).

    ap/bp/cp are the bands of 1 + kL; w is the prefactored Thomas
    multiplier band of 1 - kL, inv_dp its reciprocal pivot diagonal and
    cm its upper band.  Rows are contiguous, so every k loop runs over
    unit-stride memory.
    """
    cdef Py_ssize_t n0 = psi.shape[0], n1 = psi.shape[1], j, k
    cdef double fr, fi, br, bi, cr, ci, xr, xi, yr, yi, zr, zi, tr, ti
    br = bp[0].real; bi = bp[0].imag
    cr = cp[0].real; ci = cp[0].imag
    for k in range(n1):
        xr = psi[0, k].real; xi = psi[0, k].imag
        yr = psi[1, k].real; yi = psi[1, k].imag
        work[0, k] = (br * xr - bi * xi + cr * yr - ci * yi) \
            + 1j * (br * xi + bi * xr + cr * yi + ci * yr)
    for j in range(1, n0 - 1):
        fr = ap[j].real; fi = ap[j].imag
        br = bp[j].real; bi = bp[j].imag
        cr = cp[j].real; ci = cp[j].imag
        for k in range(n1):
            xr = psi[j - 1, k].real; xi = psi[j - 1, k].imag
            yr = psi[j, k].real; yi = psi[j, k].imag
            zr = psi[j + 1, k].real; zi = psi[j + 1, k].imag
            work[j, k] = (fr * xr - fi * xi + br * yr - bi * yi
                          + cr * zr - ci * zi) \
                + 1j * (fr * xi + fi * xr + br * yi + bi * yr
                        + cr * zi + ci * zr)
    fr = ap[n0 - 1].real; fi = ap[n0 - 1].imag
    br = bp[n0 - 1].real; bi = bp[n0 - 1].imag
    for k in range(n1):
        xr = psi[n0 - 2, k].real; xi = psi[n0 - 2, k].imag
        yr = psi[n0 - 1, k].real; yi = psi[n0 - 1, k].imag
        work[n0 - 1, k] = (fr * xr - fi * xi + br * yr - bi * yi) \
            + 1j * (fr * xi + fi * xr + br * yi + bi * yr)
    for j in range(1, n0):
        fr = w[j].real; fi = w[j].imag
        for k in range(n1):
            xr = work[j - 1, k].real; xi = work[j - 1, k].imag
            tr = work[j, k].real - (fr * xr - fi * xi)
            ti = work[j, k].imag - (fr * xi + fi * xr)
            work[j, k] = tr + 1j * ti
    fr = inv_dp[n0 - 1].real; fi = inv_dp[n0 - 1].imag
    for k in range(n1):
        xr = work[n0 - 1, k].real; xi = work[n0 - 1, k].imag
        psi[n0 - 1, k] = (xr * fr - xi * fi) + 1j * (xr * fi + xi * fr)
    for j in range(n0 - 2, -1, -1):
        fr = cm[j].real; fi = cm[j].imag
        br = inv_dp[j].real; bi = inv_dp[j].imag
        for k in range(n1):
            zr = psi[j + 1, k].real; zi = psi[j + 1, k].imag
            xr = work[j, k].real - (fr * zr - fi * zi)
            xi = work[j, k].imag - (fr * zi + fi * zr)
            psi[j, k] = (xr * br - xi * bi) + 1j * (xr * bi + xi * br)


def cayley_axis1(double complex[:, ::1] psi, double complex[:, ::1] work,
                 double complex[::1] ap, double complex[::1] bp,
                 double complex[::1] cp, double complex[::1] w,
                 double complex[::1] inv_dp, double complex[::1] cm):
    """Same update as cayley_axis0 along axis 1 (the axial axis).

    The Thomas recurrences run along contiguous memory with the carried
    element kept in registers.
    """
    cdef Py_ssize_t n0 = psi.shape[0], n1 = psi.shape[1], j, k
    cdef double fr, fi, br, bi, cr, ci, xr, xi, yr, yi, zr, zi
    cdef double carry_r, carry_i, tr, ti
    for j in range(n0):
        xr = psi[j, 0].real; xi = psi[j, 0].imag
        zr = psi[j, 1].real; zi = psi[j, 1].imag
        br = bp[0].real; bi = bp[0].imag
        cr = cp[0].real; ci = cp[0].imag
        work[j, 0] = (br * xr - bi * xi + cr * zr - ci * zi) \
            + 1j * (br * xi + bi * xr + cr * zi + ci * zr)
        for k in range(1, n1 - 1):
            fr = ap[k].real; fi = ap[k].imag
            br = bp[k].real; bi = bp[k].imag
            cr = cp[k].real; ci = cp[k].imag
            xr = psi[j, k - 1].real; xi = psi[j, k - 1].imag
            yr = psi[j, k].real; yi = psi[j, k].imag
            zr = psi[j, k + 1].real; zi = psi[j, k + 1].imag
            work[j, k] = (fr * xr - fi * xi + br * yr - bi * yi
                          + cr * zr - ci * zi) \
                + 1j * (fr * xi + fi * xr + br * yi + bi * yr
                        + cr * zi + ci * zr)
        fr = ap[n1 - 1].real; fi = ap[n1 - 1].imag
        br = bp[n1 - 1].real; bi = bp[n1 - 1].imag
        xr = psi[j, n1 - 2].real; xi = psi[j, n1 - 2].imag
        yr = psi[j, n1 - 1].real; yi = psi[j, n1 - 1].imag
        work[j, n1 - 1] = (fr * xr - fi * xi + br * yr - bi * yi) \
            + 1j * (fr * xi + fi * xr + br * yi + bi * yr)

        carry_r = work[j, 0].real
        carry_i = work[j, 0].imag
        for k in range(1, n1):
            fr = w[k].real; fi = w[k].imag
            tr = work[j, k].real - (fr * carry_r - fi * carry_i)
            ti = work[j, k].imag - (fr * carry_i + fi * carry_r)
            work[j, k] = tr + 1j * ti
            carry_r = tr; carry_i = ti
        br = inv_dp[n1 - 1].real; bi = inv_dp[n1 - 1].imag
        carry_r = work[j, n1 - 1].real * br - work[j, n1 - 1].imag * bi
        carry_i = work[j, n1 - 1].real * bi + work[j, n1 - 1].imag * br
        psi[j, n1 - 1] = carry_r + 1j * carry_i
        for k in range(n1 - 2, -1, -1):
            fr = cm[k].real; fi = cm[k].imag
            br = inv_dp[k].real; bi = inv_dp[k].imag
            xr = work[j, k].real - (fr * carry_r - fi * carry_i)
            xi = work[j, k].imag - (fr * carry_i + fi * carry_r)
            carry_r = xr * br - xi * bi
            carry_i = xr * bi + xi * br
            psi[j, k] = carry_r + 1j * carry_i
