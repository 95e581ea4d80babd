# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 method-of-steps stepper (hot-loop core).

Twin of ``swdelay._stepper_py``: identical data layout and identical
arithmetic order, so both backends produce bit-identical trajectories. See
the fallback module for the full description of the scheme and the packed
argument layout.
"""

import numpy as np

from libc.math cimport fabs, floor, isfinite


def run(double[:, ::1] xs, double[:, ::1] dhist, double[:, ::1] dtraj,
        long[::1] active,
        double[:, :, ::1] a0, long[::1] disc_ptr, long[::1] disc_half,
        double[:, :, ::1] disc_mats,
        long[::1] kern_ptr, long[::1] kern_half,
        unsigned char[::1] kern_ongrid, double[::1] kern_theta,
        double[:, :, ::1] kern_w,
        long n, long mh, long steps, double dt, double diverge_threshold):
    """Advance ``steps`` RK4 steps in place; returns (steps_done, diverged)."""
    cdef double half_dt = 0.5 * dt
    cdef double sixth_dt = dt / 6.0

    buf = np.zeros((6, n), dtype=np.float64)
    cdef double[:, ::1] work = buf
    cdef double[::1] tmp = work[0]
    cdef double[::1] k1 = work[1]
    cdef double[::1] k2 = work[2]
    cdef double[::1] k3 = work[3]
    cdef double[::1] k4 = work[4]
    cdef double[::1] stage = work[5]

    cdef long j, i, steps_done
    cdef bint diverged = False, bad
    cdef long k_sub
    cdef double v

    steps_done = steps
    for j in range(steps):
        k_sub = active[j]
        _rhs(xs, dhist, dtraj, a0, disc_ptr, disc_half, disc_mats,
             kern_ptr, kern_half, kern_ongrid, kern_theta, kern_w,
             n, mh, dt, half_dt, k_sub, j, 0, xs[j + mh], k1, tmp)
        for i in range(n):
            dtraj[j, i] = k1[i]
        for i in range(n):
            stage[i] = xs[j + mh, i] + half_dt * k1[i]
        _rhs(xs, dhist, dtraj, a0, disc_ptr, disc_half, disc_mats,
             kern_ptr, kern_half, kern_ongrid, kern_theta, kern_w,
             n, mh, dt, half_dt, k_sub, j, 1, stage, k2, tmp)
        for i in range(n):
            stage[i] = xs[j + mh, i] + half_dt * k2[i]
        _rhs(xs, dhist, dtraj, a0, disc_ptr, disc_half, disc_mats,
             kern_ptr, kern_half, kern_ongrid, kern_theta, kern_w,
             n, mh, dt, half_dt, k_sub, j, 1, stage, k3, tmp)
        for i in range(n):
            stage[i] = xs[j + mh, i] + dt * k3[i]
        _rhs(xs, dhist, dtraj, a0, disc_ptr, disc_half, disc_mats,
             kern_ptr, kern_half, kern_ongrid, kern_theta, kern_w,
             n, mh, dt, half_dt, k_sub, j, 2, stage, k4, tmp)
        bad = False
        for i in range(n):
            v = xs[j + mh, i] + sixth_dt * (k1[i] + 2.0 * (k2[i] + k3[i]) +
                                            k4[i])
            xs[j + 1 + mh, i] = v
            if not isfinite(v) or (diverge_threshold > 0.0 and
                                   fabs(v) > diverge_threshold):
                bad = True
        if bad:
            steps_done = j + 1
            diverged = True
            break

    if not diverged and steps > 0:
        _rhs(xs, dhist, dtraj, a0, disc_ptr, disc_half, disc_mats,
             kern_ptr, kern_half, kern_ongrid, kern_theta, kern_w,
             n, mh, dt, half_dt, active[steps - 1], steps, 0,
             xs[steps + mh], k1, tmp)
        for i in range(n):
            dtraj[steps, i] = k1[i]

    return steps_done, diverged


cdef inline void _lookup_half(double[:, ::1] xs, double[:, ::1] dhist,
                              double[:, ::1] dtraj, long n, long mh,
                              double dt, long hprime, long avail,
                              double[::1] out):
    cdef long il, gl, i
    cdef double dl, dr
    if (hprime & 1) == 0:
        gl = hprime / 2 + mh
        for i in range(n):
            out[i] = xs[gl, i]
        return
    il = (hprime - 1) / 2
    gl = il + mh
    if il + 1 > 0 and il + 1 > avail:
        for i in range(n):
            out[i] = 0.5 * (xs[gl, i] + xs[gl + 1, i])
        return
    for i in range(n):
        dl = dhist[gl, i] if gl < mh else dtraj[gl - mh, i]
        dr = dhist[gl + 1, i] if gl + 1 <= mh else dtraj[gl + 1 - mh, i]
        out[i] = 0.5 * (xs[gl, i] + xs[gl + 1, i]) + 0.125 * dt * (dl - dr)


cdef inline void _lookup_float(double[:, ::1] xs, double[:, ::1] dhist,
                               double[:, ::1] dtraj, long n, long mh,
                               double dt, double s, long avail,
                               double[::1] out):
    cdef double u = s / dt
    cdef long i = <long>floor(u + 1e-9)
    cdef double frac = u - i
    cdef long g = i + mh
    cdef long k
    cdef double dl, dr, om, h00, h10, h01, h11
    if frac <= 1e-9:
        for k in range(n):
            out[k] = xs[g, k]
        return
    if frac >= 1.0 - 1e-9:
        for k in range(n):
            out[k] = xs[g + 1, k]
        return
    if i + 1 > 0 and i + 1 > avail:
        for k in range(n):
            out[k] = xs[g, k] + frac * (xs[g + 1, k] - xs[g, k])
        return
    om = 1.0 - frac
    h00 = (1.0 + 2.0 * frac) * om * om
    h10 = frac * om * om
    h01 = frac * frac * (3.0 - 2.0 * frac)
    h11 = frac * frac * (frac - 1.0)
    for k in range(n):
        dl = dhist[g, k] if g < mh else dtraj[g - mh, k]
        dr = dhist[g + 1, k] if g + 1 <= mh else dtraj[g + 1 - mh, k]
        out[k] = (h00 * xs[g, k] + h10 * dt * dl +
                  h01 * xs[g + 1, k] + h11 * dt * dr)


cdef void _rhs(double[:, ::1] xs, double[:, ::1] dhist, double[:, ::1] dtraj,
               double[:, :, ::1] a0, long[::1] disc_ptr, long[::1] disc_half,
               double[:, :, ::1] disc_mats,
               long[::1] kern_ptr, long[::1] kern_half,
               unsigned char[::1] kern_ongrid, double[::1] kern_theta,
               double[:, :, ::1] kern_w,
               long n, long mh, double dt, double half_dt,
               long k_sub, long j, long so, double[::1] y,
               double[::1] out, double[::1] tmp):
    cdef long i, c, t, q, h_now, avail, hq
    cdef double acc, s, fr
    cdef bint use_y
    for i in range(n):
        acc = 0.0
        for c in range(n):
            acc += a0[k_sub, i, c] * y[c]
        out[i] = acc
    h_now = 2 * j + so
    avail = j - 1 if so == 0 else j
    for t in range(disc_ptr[k_sub], disc_ptr[k_sub + 1]):
        _lookup_half(xs, dhist, dtraj, n, mh, dt, h_now - disc_half[t],
                     avail, tmp)
        for i in range(n):
            acc = 0.0
            for c in range(n):
                acc += disc_mats[t, i, c] * tmp[c]
            out[i] += acc
    for q in range(kern_ptr[k_sub], kern_ptr[k_sub + 1]):
        use_y = False
        if kern_ongrid[q]:
            hq = kern_half[q]
            if hq == 0:
                use_y = True
            elif h_now + hq > 2 * j:
                fr = (<double>(h_now + hq - 2 * j)) / (<double>so)
                for c in range(n):
                    tmp[c] = xs[j + mh, c] + fr * (y[c] - xs[j + mh, c])
            else:
                _lookup_half(xs, dhist, dtraj, n, mh, dt, h_now + hq,
                             avail, tmp)
        else:
            s = (j * dt + so * half_dt) + kern_theta[q]
            if s > j * dt + 1e-9 * dt:
                fr = (s - j * dt) / (so * half_dt)
                for c in range(n):
                    tmp[c] = xs[j + mh, c] + fr * (y[c] - xs[j + mh, c])
            else:
                _lookup_float(xs, dhist, dtraj, n, mh, dt, s, avail, tmp)
        if use_y:
            for i in range(n):
                acc = 0.0
                for c in range(n):
                    acc += kern_w[q, i, c] * y[c]
                out[i] += acc
        else:
            for i in range(n):
                acc = 0.0
                for c in range(n):
                    acc += kern_w[q, i, c] * tmp[c]
                out[i] += acc
