"""Pure-Python RK4 method-of-steps stepper (fallback backend).

This module mirrors the compiled extension ``swdelay._stepper`` operation by
operation: both advance the state with classical RK4 on a uniform grid,
read delayed values from stored history via cubic Hermite interpolation
(midpoint form when the read lands on a half step), and evaluate the
distributed term as a fixed linear combination of past states with
precomputed weight matrices. Keeping the arithmetic order identical makes the
two backends agree bit for bit, which the test suite and the benchmark rely
on.

Data layout (shared with the compiled backend):

- ``xs``: (mh + steps + 1, n) state rows; rows 0..mh hold the sampled
  history, row mh is t = 0.
- ``dhist``: (mh + 1, n) derivative estimates for the history rows.
- ``dtraj``: (steps + 1, n) right-hand-side values at t >= 0, filled as the
  run proceeds (the derivative at a switching instant is the right-side one).
- ``active``: subsystem index per step.
- per-subsystem arrays packed with ptr/index ranges: instantaneous matrices,
  discrete terms (delay in half steps, matrix), and distributed-term
  quadrature nodes (half-step offset when grid aligned, raw offset otherwise,
  weight matrix).
"""

from __future__ import annotations

import math


def run(xs, dhist, dtraj, active,
        a0, disc_ptr, disc_half, disc_mats,
        kern_ptr, kern_half, kern_ongrid, kern_theta, kern_w,
        n, mh, steps, dt, diverge_threshold):
    """Advance ``steps`` RK4 steps in place; returns (steps_done, diverged)."""
    xs_l = xs.tolist()
    dhist_l = dhist.tolist()
    dtraj_l = dtraj.tolist()
    active_l = active.tolist()
    a0_l = a0.tolist()
    disc_ptr_l = disc_ptr.tolist()
    disc_half_l = disc_half.tolist()
    disc_mats_l = disc_mats.tolist()
    kern_ptr_l = kern_ptr.tolist()
    kern_half_l = kern_half.tolist()
    kern_ongrid_l = kern_ongrid.tolist()
    kern_theta_l = kern_theta.tolist()
    kern_w_l = kern_w.tolist()

    half_dt = 0.5 * dt
    sixth_dt = dt / 6.0

    def deriv_at(idx):
        # right-side derivative of grid row idx (time (idx - mh) * dt)
        if idx < mh:
            return dhist_l[idx]
        return dtraj_l[idx - mh]

    def deriv_left_at(idx):
        # left-side derivative of grid row idx
        if idx <= mh:
            return dhist_l[idx]
        return dtraj_l[idx - mh]

    def lookup_half(hprime, avail, out):
        # value at global half-step index hprime (<= 2 * current step)
        if hprime % 2 == 0:
            row = xs_l[hprime // 2 + mh]
            for i in range(n):
                out[i] = row[i]
            return
        il = (hprime - 1) // 2
        gl = il + mh
        xl = xs_l[gl]
        xr = xs_l[gl + 1]
        if il + 1 > 0 and il + 1 > avail:
            # right-endpoint derivative not final yet: linear midpoint
            for i in range(n):
                out[i] = 0.5 * (xl[i] + xr[i])
            return
        dl = deriv_at(gl)
        dr = deriv_left_at(gl + 1)
        for i in range(n):
            out[i] = 0.5 * (xl[i] + xr[i]) + 0.125 * dt * (dl[i] - dr[i])

    def lookup_float(s, avail, out):
        # value at arbitrary time s <= current grid time
        u = s / dt
        i = math.floor(u + 1e-9)
        frac = u - i
        g = i + mh
        if frac <= 1e-9:
            row = xs_l[g]
            for k in range(n):
                out[k] = row[k]
            return
        if frac >= 1.0 - 1e-9:
            row = xs_l[g + 1]
            for k in range(n):
                out[k] = row[k]
            return
        xl = xs_l[g]
        xr = xs_l[g + 1]
        if i + 1 > 0 and i + 1 > avail:
            # right-endpoint derivative not final yet: linear interpolation
            for k in range(n):
                out[k] = xl[k] + frac * (xr[k] - xl[k])
            return
        dl = deriv_at(g)
        dr = deriv_left_at(g + 1)
        om = 1.0 - frac
        h00 = (1.0 + 2.0 * frac) * om * om
        h10 = frac * om * om
        h01 = frac * frac * (3.0 - 2.0 * frac)
        h11 = frac * frac * (frac - 1.0)
        for k in range(n):
            out[k] = (h00 * xl[k] + h10 * dt * dl[k] +
                      h01 * xr[k] + h11 * dt * dr[k])

    tmp = [0.0] * n

    def rhs(k_sub, j, so, y, out):
        # f(t_j + so * dt/2, y) under subsystem k_sub during step j
        a = a0_l[k_sub]
        for i in range(n):
            acc = 0.0
            row = a[i]
            for c in range(n):
                acc += row[c] * y[c]
            out[i] = acc
        h_now = 2 * j + so
        avail = j - 1 if so == 0 else j
        for t in range(disc_ptr_l[k_sub], disc_ptr_l[k_sub + 1]):
            lookup_half(h_now - disc_half_l[t], avail, tmp)
            mat = disc_mats_l[t]
            for i in range(n):
                acc = 0.0
                row = mat[i]
                for c in range(n):
                    acc += row[c] * tmp[c]
                out[i] += acc
        for q in range(kern_ptr_l[k_sub], kern_ptr_l[k_sub + 1]):
            if kern_ongrid_l[q]:
                hq = kern_half_l[q]
                if hq == 0:
                    src = y
                elif h_now + hq > 2 * j:
                    fr = (h_now + hq - 2 * j) / so
                    xj = xs_l[j + mh]
                    for k in range(n):
                        tmp[k] = xj[k] + fr * (y[k] - xj[k])
                    src = tmp
                else:
                    lookup_half(h_now + hq, avail, tmp)
                    src = tmp
            else:
                s = (j * dt + so * half_dt) + kern_theta_l[q]
                if s > j * dt + 1e-9 * dt:
                    fr = (s - j * dt) / (so * half_dt)
                    xj = xs_l[j + mh]
                    for k in range(n):
                        tmp[k] = xj[k] + fr * (y[k] - xj[k])
                    src = tmp
                else:
                    lookup_float(s, avail, tmp)
                    src = tmp
            w = kern_w_l[q]
            for i in range(n):
                acc = 0.0
                row = w[i]
                for c in range(n):
                    acc += row[c] * src[c]
                out[i] += acc

    k1 = [0.0] * n
    k2 = [0.0] * n
    k3 = [0.0] * n
    k4 = [0.0] * n
    stage = [0.0] * n

    diverged = False
    steps_done = steps
    for j in range(steps):
        k_sub = active_l[j]
        x = xs_l[j + mh]
        rhs(k_sub, j, 0, x, k1)
        dtraj_l[j] = list(k1)
        for i in range(n):
            stage[i] = x[i] + half_dt * k1[i]
        rhs(k_sub, j, 1, stage, k2)
        for i in range(n):
            stage[i] = x[i] + half_dt * k2[i]
        rhs(k_sub, j, 1, stage, k3)
        for i in range(n):
            stage[i] = x[i] + dt * k3[i]
        rhs(k_sub, j, 2, stage, k4)
        xn = xs_l[j + 1 + mh]
        bad = False
        for i in range(n):
            v = x[i] + sixth_dt * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
            xn[i] = v
            if not math.isfinite(v) or (diverge_threshold > 0.0 and
                                        abs(v) > diverge_threshold):
                bad = True
        if bad:
            steps_done = j + 1
            diverged = True
            break

    if not diverged and steps > 0:
        rhs(active_l[steps - 1], steps, 0, xs_l[steps + mh], k1)
        dtraj_l[steps] = list(k1)

    for r in range(mh, mh + steps_done + 1):
        for i in range(n):
            xs[r, i] = xs_l[r][i]
    for r in range(steps_done + 1):
        for i in range(n):
            dtraj[r, i] = dtraj_l[r][i]
    return steps_done, diverged
