"""Hot numeric kernels.

Every kernel has a loop flavour (compiled by numba when available) and a
vectorised numpy flavour. :func:`get` returns the flavour for the active
backend, so callers never import either one directly.
"""

import math

import numpy as np

from . import _accel
from ._accel import jit


# --- L_p distance from one point to many sites --------------------------------


def _dist_many_loop(coords, x, y, p):
    n = coords.shape[0]
    out = np.empty(n)
    for i in range(n):
        ax = abs(x - coords[i, 0])
        ay = abs(y - coords[i, 1])
        if p == 1.0:
            out[i] = ax + ay
        elif math.isinf(p):
            out[i] = max(ax, ay)
        else:
            m = max(ax, ay)
            if m == 0.0:
                out[i] = 0.0
            else:
                out[i] = m * ((ax / m) ** p + (ay / m) ** p) ** (1.0 / p)
    return out


def _dist_many_vec(coords, x, y, p):
    ax = np.abs(x - coords[:, 0])
    ay = np.abs(y - coords[:, 1])
    if p == 1.0:
        return ax + ay
    if math.isinf(p):
        return np.maximum(ax, ay)
    m = np.maximum(ax, ay)
    safe = np.where(m > 0.0, m, 1.0)
    d = m * ((ax / safe) ** p + (ay / safe) ** p) ** (1.0 / p)
    return np.where(m > 0.0, d, 0.0)


# --- smoothed distance terms ---------------------------------------------------
#
# Each coordinate gap t is replaced by s = sqrt(t^2 + delta^2) and the distance
# by (s_x^p + s_y^p)^(1/p). The surrogate is smooth, convex and exceeds the true
# distance by at most 2^(1/p) * delta.


def _smooth_term(tx, ty, p, delta):
    dd = delta * delta
    sx = math.sqrt(tx * tx + dd)
    sy = math.sqrt(ty * ty + dd)
    m = max(sx, sy)
    rx = sx / m
    ry = sy / m
    rho = (rx**p + ry**p) ** (1.0 / p)
    d = m * rho
    ux = rx / rho
    uy = ry / rho
    ax = ux ** (p - 1.0)
    ay = uy ** (p - 1.0)
    ex = tx / sx
    ey = ty / sy
    gx = ax * ex
    gy = ay * ey
    c = (p - 1.0) / d
    sxx = c * (ux ** (p - 2.0) - ux ** (2.0 * p - 2.0))
    syy = c * (uy ** (p - 2.0) - uy ** (2.0 * p - 2.0))
    sxy = -c * ax * ay
    hxx = sxx * ex * ex + ax * dd / (sx * sx * sx)
    hyy = syy * ey * ey + ay * dd / (sy * sy * sy)
    hxy = sxy * ex * ey
    return d, gx, gy, hxx, hxy, hyy


_smooth_term_jit = jit(_smooth_term)


def _make_minisum_loop(term):
    def _minisum_loop(coords, w, x, y, p, delta):
        f = gx = gy = hxx = hxy = hyy = 0.0
        for i in range(coords.shape[0]):
            d, a, b, h1, h2, h3 = term(x - coords[i, 0], y - coords[i, 1], p, delta)
            wi = w[i]
            f += wi * d
            gx += wi * a
            gy += wi * b
            hxx += wi * h1
            hxy += wi * h2
            hyy += wi * h3
        return f, gx, gy, hxx, hxy, hyy

    return _minisum_loop


def _make_minimax_loop(term):
    def _minimax_loop(coords, w, x, y, p, delta, t):
        n = coords.shape[0]
        z = np.empty(n)
        g = np.empty((n, 2))
        h = np.empty((n, 3))
        zmax = -np.inf
        for i in range(n):
            d, a, b, h1, h2, h3 = term(x - coords[i, 0], y - coords[i, 1], p, delta)
            wi = w[i]
            z[i] = t * wi * d
            g[i, 0] = wi * a
            g[i, 1] = wi * b
            h[i, 0] = wi * h1
            h[i, 1] = wi * h2
            h[i, 2] = wi * h3
            if z[i] > zmax:
                zmax = z[i]
        total = 0.0
        for i in range(n):
            z[i] = math.exp(z[i] - zmax)
            total += z[i]
        f = (zmax + math.log(total)) / t
        gx = gy = hxx = hxy = hyy = 0.0
        oxx = oxy = oyy = 0.0
        for i in range(n):
            pi = z[i] / total
            gx += pi * g[i, 0]
            gy += pi * g[i, 1]
            hxx += pi * h[i, 0]
            hxy += pi * h[i, 1]
            hyy += pi * h[i, 2]
            oxx += pi * g[i, 0] * g[i, 0]
            oxy += pi * g[i, 0] * g[i, 1]
            oyy += pi * g[i, 1] * g[i, 1]
        hxx += t * (oxx - gx * gx)
        hxy += t * (oxy - gx * gy)
        hyy += t * (oyy - gy * gy)
        return f, gx, gy, hxx, hxy, hyy

    return _minimax_loop


def _smooth_terms_vec(coords, x, y, p, delta):
    tx = x - coords[:, 0]
    ty = y - coords[:, 1]
    dd = delta * delta
    sx = np.sqrt(tx * tx + dd)
    sy = np.sqrt(ty * ty + dd)
    m = np.maximum(sx, sy)
    rx = sx / m
    ry = sy / m
    rho = (rx**p + ry**p) ** (1.0 / p)
    d = m * rho
    ux = rx / rho
    uy = ry / rho
    ax = ux ** (p - 1.0)
    ay = uy ** (p - 1.0)
    ex = tx / sx
    ey = ty / sy
    c = (p - 1.0) / d
    sxx = c * (ux ** (p - 2.0) - ux ** (2.0 * p - 2.0))
    syy = c * (uy ** (p - 2.0) - uy ** (2.0 * p - 2.0))
    hxx = sxx * ex * ex + ax * dd / (sx * sx * sx)
    hyy = syy * ey * ey + ay * dd / (sy * sy * sy)
    hxy = -c * ax * ay * ex * ey
    return d, ax * ex, ay * ey, hxx, hxy, hyy


def _minisum_vec(coords, w, x, y, p, delta):
    d, gx, gy, hxx, hxy, hyy = _smooth_terms_vec(coords, x, y, p, delta)
    return (
        float(w @ d), float(w @ gx), float(w @ gy),
        float(w @ hxx), float(w @ hxy), float(w @ hyy),
    )


def _minimax_vec(coords, w, x, y, p, delta, t):
    d, gx, gy, hxx, hxy, hyy = _smooth_terms_vec(coords, x, y, p, delta)
    z = t * w * d
    zmax = z.max()
    e = np.exp(z - zmax)
    total = e.sum()
    pi = e / total
    wgx = w * gx
    wgy = w * gy
    Gx = float(pi @ wgx)
    Gy = float(pi @ wgy)
    Hxx = float(pi @ (w * hxx)) + t * (float(pi @ (wgx * wgx)) - Gx * Gx)
    Hxy = float(pi @ (w * hxy)) + t * (float(pi @ (wgx * wgy)) - Gx * Gy)
    Hyy = float(pi @ (w * hyy)) + t * (float(pi @ (wgy * wgy)) - Gy * Gy)
    return (zmax + math.log(total)) / t, Gx, Gy, Hxx, Hxy, Hyy


# --- Euclidean Weiszfeld iteration --------------------------------------------


def _weiszfeld_loop(coords, w, x, y, tol, max_iter, site_eps, hist):
    """Weiszfeld map, Ostresh step off a site, and a vertex-optimality snap.

    ``hist`` receives the objective after every iterate (hist[0] is the start).
    Returns (x, y, iterations, converged, n_hist).
    """
    n = coords.shape[0]
    wsum = 0.0
    for i in range(n):
        wsum += w[i]
    d = np.empty(n)
    f = 0.0
    for i in range(n):
        d[i] = math.hypot(x - coords[i, 0], y - coords[i, 1])
        f += w[i] * d[i]
    hist[0] = f
    nh = 1
    converged = False
    it = 0
    while it < max_iter:
        jmin = 0
        for i in range(1, n):
            if d[i] < d[jmin]:
                jmin = i
        on_site = d[jmin] <= site_eps
        gx = gy = nx = ny = den = 0.0
        for i in range(n):
            if on_site and i == jmin:
                continue
            q = w[i] / d[i]
            gx += q * (x - coords[i, 0])
            gy += q * (y - coords[i, 1])
            nx += q * coords[i, 0]
            ny += q * coords[i, 1]
            den += q
        gnorm = math.hypot(gx, gy)
        snap = False
        if on_site:
            if gnorm <= w[jmin] or den == 0.0:
                x = coords[jmin, 0]
                y = coords[jmin, 1]
                converged = True
                break
            step = (gnorm - w[jmin]) / den
            xn = x - step * gx / gnorm
            yn = y - step * gy / gnorm
        else:
            if gnorm <= tol * wsum:
                converged = True
                break
            # nearest site may already pass the vertex optimality test
            ax = coords[jmin, 0]
            ay = coords[jmin, 1]
            rx = ry = 0.0
            for i in range(n):
                di = math.hypot(ax - coords[i, 0], ay - coords[i, 1])
                if i != jmin and di > 0.0:
                    rx += w[i] * (ax - coords[i, 0]) / di
                    ry += w[i] * (ay - coords[i, 1]) / di
            if math.hypot(rx, ry) <= w[jmin]:
                snap = True
                xn = ax
                yn = ay
            else:
                xn = nx / den
                yn = ny / den
        it += 1
        moved = math.hypot(xn - x, yn - y)
        x = xn
        y = yn
        f = 0.0
        for i in range(n):
            d[i] = math.hypot(x - coords[i, 0], y - coords[i, 1])
            f += w[i] * d[i]
        hist[nh] = f
        nh += 1
        if snap or moved <= tol:
            converged = True
            break
    return x, y, it, converged, nh


def _weiszfeld_vec(coords, w, x, y, tol, max_iter, site_eps, hist):
    wsum = float(w.sum())
    ax_all = coords[:, 0]
    ay_all = coords[:, 1]
    d = np.hypot(x - ax_all, y - ay_all)
    hist[0] = float(w @ d)
    nh = 1
    converged = False
    it = 0
    while it < max_iter:
        jmin = int(np.argmin(d))
        on_site = d[jmin] <= site_eps
        mask = np.ones(len(w), dtype=bool)
        if on_site:
            mask[jmin] = False
        q = w[mask] / d[mask]
        gx = float(q @ (x - ax_all[mask]))
        gy = float(q @ (y - ay_all[mask]))
        den = float(q.sum())
        gnorm = math.hypot(gx, gy)
        snap = False
        if on_site:
            if gnorm <= w[jmin] or den == 0.0:
                x, y = float(ax_all[jmin]), float(ay_all[jmin])
                converged = True
                break
            step = (gnorm - w[jmin]) / den
            xn = x - step * gx / gnorm
            yn = y - step * gy / gnorm
        else:
            if gnorm <= tol * wsum:
                converged = True
                break
            sx, sy = ax_all[jmin], ay_all[jmin]
            dj = np.hypot(sx - ax_all, sy - ay_all)
            keep = dj > 0.0
            keep[jmin] = False
            rx = float(w[keep] @ ((sx - ax_all[keep]) / dj[keep]))
            ry = float(w[keep] @ ((sy - ay_all[keep]) / dj[keep]))
            if math.hypot(rx, ry) <= w[jmin]:
                snap = True
                xn, yn = float(sx), float(sy)
            else:
                xn = float(q @ ax_all[mask]) / den
                yn = float(q @ ay_all[mask]) / den
        it += 1
        moved = math.hypot(xn - x, yn - y)
        x, y = xn, yn
        d = np.hypot(x - ax_all, y - ay_all)
        hist[nh] = float(w @ d)
        nh += 1
        if snap or moved <= tol:
            converged = True
            break
    return x, y, it, converged, nh


# --- simplex pivot -------------------------------------------------------------


def _pivot_loop(T, r, j):
    m, ncol = T.shape
    inv = 1.0 / T[r, j]
    for k in range(ncol):
        T[r, k] *= inv
    for i in range(m):
        if i == r:
            continue
        f = T[i, j]
        if f != 0.0:
            for k in range(ncol):
                T[i, k] -= f * T[r, k]
            T[i, j] = 0.0
    T[r, j] = 1.0


def _pivot_vec(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    T[:, j] = 0.0
    T[r, j] = 1.0


_KERNELS = {
    "numpy": {
        "dist_many": _dist_many_vec,
        "minisum_smooth": _minisum_vec,
        "minimax_smooth": _minimax_vec,
        "weiszfeld": _weiszfeld_vec,
        "pivot": _pivot_vec,
    },
}

if _accel.HAS_NUMBA:
    _KERNELS["numba"] = {
        "dist_many": jit(_dist_many_loop),
        "minisum_smooth": jit(_make_minisum_loop(_smooth_term_jit)),
        "minimax_smooth": jit(_make_minimax_loop(_smooth_term_jit)),
        "weiszfeld": jit(_weiszfeld_loop),
        "pivot": jit(_pivot_loop),
    }


def get(name):
    return _KERNELS[_accel.backend()][name]


def get_for(backend, name):
    return _KERNELS[backend][name]
