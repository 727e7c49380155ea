"""Compiled per-step simulation kernel.

Implements one synchronous step for all robots: pairwise sensing with
occlusion, the per-robot decision pass, the navigation law and the Euler
integration. Semantics are defined by the scalar operations in ``sensing``,
``controller`` and ``navigation``; equivalence is enforced by tests.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 2.0**-53
_TWO_PI = 2.0 * math.pi


@njit(cache=True)
def _wrap(a):
    while a > math.pi:
        a -= _TWO_PI
    while a <= -math.pi:
        a += _TWO_PI
    return a


@njit(cache=True)
def _next_u64(rng_state, i):
    rng_state[i] = rng_state[i] + _GOLDEN
    z = rng_state[i]
    z = (z ^ (z >> _U30)) * _MIX1
    z = (z ^ (z >> _U27)) * _MIX2
    return z ^ (z >> _U31)


@njit(cache=True)
def _uniform(rng_state, i, low, high):
    if high <= low:
        return low
    u = np.float64(_next_u64(rng_state, i) >> _U11) * _INV_2_53
    return low + (high - low) * u


@njit(cache=True)
def _sgn(x):
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


@njit(cache=True)
def step_kernel(
    xy,
    theta,
    stopped,
    state,
    wander,
    engaged,
    t_engaged,
    v_engaged,
    goal,
    cmd,
    prev_ncount,
    rng_state,
    t_now,
    sensing_range,
    fov_half_angle,
    safe_distance,
    goal_radius,
    min_community_size,
    v_max,
    turn_gain,
    avoid_turn_gain,
    avoid_push_gain,
    decel_rate,
    dt,
    ex0,
    ex1,
    ey0,
    ey1,
    gx0,
    gx1,
    gy0,
    gy1,
    body_radius,
):
    n = xy.shape[0]
    body2 = body_radius * body_radius
    min_pair = 1.0e300
    resumed = 0

    # all sensing and decisions read the motion state from the start of the
    # step so the update is synchronous and independent of robot order
    stopped_prev = stopped.copy()

    dist = np.empty((n, n))
    for i in range(n):
        dist[i, i] = 0.0
        for j in range(i + 1, n):
            dx = xy[j, 0] - xy[i, 0]
            dy = xy[j, 1] - xy[i, 1]
            d = math.sqrt(dx * dx + dy * dy)
            dist[i, j] = d
            dist[j, i] = d
            if d < min_pair:
                min_pair = d

    for i in range(n):
        ncnt = 0
        sum_x = 0.0
        sum_y = 0.0
        ncnt_s = 0
        d_threat = 1.0e300
        b_threat = 0.0
        for j in range(n):
            if j == i:
                continue
            d = dist[i, j]
            if d <= 0.0:
                continue
            if d >= sensing_range:
                continue
            brg = _wrap(
                math.atan2(xy[j, 1] - xy[i, 1], xy[j, 0] - xy[i, 0]) - theta[i]
            )
            if abs(brg) > fov_half_angle:
                continue
            # line-of-sight check against every other body disk
            ax = xy[i, 0]
            ay = xy[i, 1]
            abx = xy[j, 0] - ax
            aby = xy[j, 1] - ay
            ab2 = abx * abx + aby * aby
            occluded = False
            for k in range(n):
                if k == i or k == j:
                    continue
                tt = ((xy[k, 0] - ax) * abx + (xy[k, 1] - ay) * aby) / ab2
                if tt < 0.0:
                    tt = 0.0
                elif tt > 1.0:
                    tt = 1.0
                rx = xy[k, 0] - (ax + tt * abx)
                ry = xy[k, 1] - (ay + tt * aby)
                if rx * rx + ry * ry < body2:
                    occluded = True
                    break
            if not occluded:
                ncnt += 1
                sum_x += d * math.cos(brg)
                sum_y += d * math.sin(brg)
                # avoidance reacts to the nearest detected neighbor
                if d < d_threat:
                    d_threat = d
                    b_threat = brg
                if stopped_prev[j]:
                    ncnt_s += 1

        # nearest boundary wall ahead of the robot as a virtual neighbor; a
        # wall behind poses no threat to forward motion, which also lets a
        # robot that braked near a wall rotate clear and drive away
        wd = 1.0e300
        wb = 0.0
        for wall in range(4):
            if wall == 0:
                dist_w = xy[i, 0] - ex0
                ang_w = math.pi
            elif wall == 1:
                dist_w = ex1 - xy[i, 0]
                ang_w = 0.0
            elif wall == 2:
                dist_w = xy[i, 1] - ey0
                ang_w = -math.pi / 2.0
            else:
                dist_w = ey1 - xy[i, 1]
                ang_w = math.pi / 2.0
            brg_w = _wrap(ang_w - theta[i])
            if abs(brg_w) <= math.pi / 2.0 and dist_w < wd:
                wd = dist_w
                wb = brg_w
        if wd < d_threat:
            d_threat = wd
            b_threat = wb

        free = d_threat > safe_distance

        # decision pass
        was_stopped = stopped_prev[i]
        gx = 0.0
        gy = 0.0
        if ncnt == 0:
            state[i] = 3
            st = False
            need = wander[i, 0] != wander[i, 0]  # NaN -> no goal yet
            if not need:
                dxw = wander[i, 0] - xy[i, 0]
                dyw = wander[i, 1] - xy[i, 1]
                if math.sqrt(dxw * dxw + dyw * dyw) <= goal_radius:
                    need = True
            if need:
                wander[i, 0] = _uniform(rng_state, i, gx0, gx1)
                wander[i, 1] = _uniform(rng_state, i, gy0, gy1)
            dxw = wander[i, 0] - xy[i, 0]
            dyw = wander[i, 1] - xy[i, 1]
            c = math.cos(theta[i])
            s = math.sin(theta[i])
            gx = c * dxw + s * dyw
            gy = -s * dxw + c * dyw
        else:
            # an active escape goal (set when a sub-threshold squad reached
            # its centroid) persists until reached or the neighbor count
            # changes; otherwise track the neighborhood centroid
            escape = wander[i, 0] == wander[i, 0] and ncnt == prev_ncount[i]
            if escape:
                dxw = wander[i, 0] - xy[i, 0]
                dyw = wander[i, 1] - xy[i, 1]
                if math.sqrt(dxw * dxw + dyw * dyw) <= goal_radius:
                    escape = False
            if escape:
                dxw = wander[i, 0] - xy[i, 0]
                dyw = wander[i, 1] - xy[i, 1]
                c = math.cos(theta[i])
                s = math.sin(theta[i])
                gx = c * dxw + s * dyw
                gy = -s * dxw + c * dyw
                st = False
                state[i] = 2
            else:
                wander[i, 0] = np.nan
                wander[i, 1] = np.nan
                cgx = sum_x / (ncnt + 1)
                cgy = sum_y / (ncnt + 1)
                d_g = math.sqrt(cgx * cgx + cgy * cgy)
                if was_stopped:
                    # a resting member stays put while its neighbor count is
                    # unchanged, or while the stationary part of its
                    # neighborhood alone satisfies the community-size test so
                    # robots passing through do not disturb the rest test
                    if ncnt == prev_ncount[i] or ncnt_s + 1 >= min_community_size:
                        st = True
                        state[i] = 1
                    else:
                        gx = cgx
                        gy = cgy
                        st = False
                        state[i] = 2
                elif d_g <= goal_radius and ncnt + 1 >= min_community_size:
                    # the rest shell is the annulus (D_s, D_g]: a robot
                    # approaching from outside reaches range D_g of its
                    # goal before the avoidance range only when D_s < D_g.
                    # A robot joining an already-settled community (its
                    # stationary neighbors alone satisfy the size test)
                    # may rest anywhere within the goal radius
                    if d_g > safe_distance or ncnt_s + 1 >= min_community_size:
                        st = True
                        state[i] = 1
                    else:
                        # avoidance preempts stopping: keep tracking the
                        # centroid until the robot is clear of its goal's
                        # avoidance shell
                        gx = cgx
                        gy = cgy
                        st = False
                        state[i] = 2
                elif d_g <= goal_radius:
                    wander[i, 0] = _uniform(rng_state, i, gx0, gx1)
                    wander[i, 1] = _uniform(rng_state, i, gy0, gy1)
                    dxw = wander[i, 0] - xy[i, 0]
                    dyw = wander[i, 1] - xy[i, 1]
                    c = math.cos(theta[i])
                    s = math.sin(theta[i])
                    gx = c * dxw + s * dyw
                    gy = -s * dxw + c * dyw
                    st = False
                    state[i] = 2
                else:
                    gx = cgx
                    gy = cgy
                    st = False
                    state[i] = 2
        stopped[i] = st
        prev_ncount[i] = ncnt
        if was_stopped and not st:
            resumed += 1

        if not free and not engaged[i]:
            # fresh engagement freezes the speed at its current value, so a
            # robot that engages from rest turns in place instead of plowing
            t_engaged[i] = t_now
            v_engaged[i] = cmd[i, 0]
        engaged[i] = not free

        if st:
            v = 0.0
            om = 0.0
        else:
            heading_err = math.atan2(gy, gx)
            if free:
                v = v_max
                om = turn_gain * _sgn(heading_err)
            else:
                v = v_engaged[i] - (t_now - t_engaged[i]) * decel_rate
                if v < 0.0:
                    v = 0.0
                om = avoid_turn_gain * _sgn(heading_err) - avoid_push_gain * _sgn(
                    b_threat
                )
        goal[i, 0] = gx
        goal[i, 1] = gy
        cmd[i, 0] = v
        cmd[i, 1] = om

    # synchronous integration from the snapshot
    ix0 = ex0 + body_radius
    ix1 = ex1 - body_radius
    iy0 = ey0 + body_radius
    iy1 = ey1 - body_radius
    for i in range(n):
        v = cmd[i, 0]
        x = xy[i, 0] + v * math.cos(theta[i]) * dt
        y = xy[i, 1] + v * math.sin(theta[i]) * dt
        if x < ix0:
            x = ix0
        elif x > ix1:
            x = ix1
        if y < iy0:
            y = iy0
        elif y > iy1:
            y = iy1
        xy[i, 0] = x
        xy[i, 1] = y
        theta[i] = _wrap(theta[i] + cmd[i, 1] * dt)

    # hard-disk contact: bodies are rigid, so any interpenetration produced
    # by the kinematic update is resolved by pushing the pair apart along
    # the center line (split evenly, then re-clamped to the environment)
    contact = 2.0 * body_radius * (1.0 + 1e-7)
    for sweep in range(40):
        any_overlap = False
        for i in range(n):
            for j in range(i + 1, n):
                dx = xy[j, 0] - xy[i, 0]
                dy = xy[j, 1] - xy[i, 1]
                d = math.sqrt(dx * dx + dy * dy)
                if d >= contact:
                    continue
                any_overlap = True
                if d > 1e-12:
                    ux = dx / d
                    uy = dy / d
                else:  # coincident centers: separate along x
                    ux = 1.0
                    uy = 0.0
                gap = contact - d
                # a stopped robot is braked in place: the moving body takes
                # the full displacement; moving pairs split it evenly. Late
                # sweeps fall back to even splits so jammed chains (a mover
                # wedged between braked bodies) still separate fully.
                if sweep >= 6:
                    push = 0.5 * gap
                    xy[i, 0] -= push * ux
                    xy[i, 1] -= push * uy
                    xy[j, 0] += push * ux
                    xy[j, 1] += push * uy
                elif stopped[i] and not stopped[j]:
                    xy[j, 0] += gap * ux
                    xy[j, 1] += gap * uy
                elif stopped[j] and not stopped[i]:
                    xy[i, 0] -= gap * ux
                    xy[i, 1] -= gap * uy
                else:
                    push = 0.5 * gap
                    xy[i, 0] -= push * ux
                    xy[i, 1] -= push * uy
                    xy[j, 0] += push * ux
                    xy[j, 1] += push * uy
        for i in range(n):
            if xy[i, 0] < ix0:
                xy[i, 0] = ix0
            elif xy[i, 0] > ix1:
                xy[i, 0] = ix1
            if xy[i, 1] < iy0:
                xy[i, 1] = iy0
            elif xy[i, 1] > iy1:
                xy[i, 1] = iy1
        if not any_overlap:
            break

    return min_pair, resumed
