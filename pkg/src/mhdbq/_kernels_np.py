"""Pure-numpy reference implementations of the hot pointwise kernels.

Selected by mhdbq.kernels when the compiled extension is unavailable or
disabled via MHDBQ_PURE_PYTHON=1.
"""

import numpy as np


def combine_advection(a, grad_v, b, grad_w, out):
    """out[i] = sum_j ( -a[j]*grad_v[j,i] + b[j]*grad_w[j,i] ), physical space."""
    np.einsum("j...,ji...->i...", b, grad_w, out=out)
    out -= np.einsum("j...,ji...->i...", a, grad_v)
    return out


def scalar_advection(a, grad_t, out):
    """out = -sum_j a[j]*grad_t[j], physical space."""
    np.einsum("j...,j...->...", a, grad_t, out=out)
    np.negative(out, out=out)
    return out


def rotational_terms(u, om, b, jj, th, out):
    """Fused cross products and heat flux; returns max(|u| + |b|) for CFL.

    out rows: 0-2 = u x om - b x jj, 3-5 = u x b, 6-8 = u * th.
    """
    out[0] = u[1] * om[2] - u[2] * om[1] - (b[1] * jj[2] - b[2] * jj[1])
    out[1] = u[2] * om[0] - u[0] * om[2] - (b[2] * jj[0] - b[0] * jj[2])
    out[2] = u[0] * om[1] - u[1] * om[0] - (b[0] * jj[1] - b[1] * jj[0])
    out[3] = u[1] * b[2] - u[2] * b[1]
    out[4] = u[2] * b[0] - u[0] * b[2]
    out[5] = u[0] * b[1] - u[1] * b[0]
    out[6] = u[0] * th
    out[7] = u[1] * th
    out[8] = u[2] * th
    speed = np.sqrt((u * u).sum(axis=0)) + np.sqrt((b * b).sum(axis=0))
    return float(speed.max())


_TWO_PI_I = 2j * np.pi


def curl(f, k1, k2, k3, out):
    """out = 2*pi*i*(k x f) on broadcast-shaped wavenumber arrays."""
    out[0] = _TWO_PI_I * (k2 * f[2] - k3 * f[1])
    out[1] = _TWO_PI_I * (k3 * f[0] - k1 * f[2])
    out[2] = _TWO_PI_I * (k1 * f[1] - k2 * f[0])
    return out


def neg_divergence(q, k1, k2, k3, out):
    """out = -2*pi*i*(k . q) on broadcast-shaped wavenumber arrays."""
    out[...] = -_TWO_PI_I * (k1 * q[0] + k2 * q[1] + k3 * q[2])
    return out


def leray_inplace(v, k1, k2, k3, inv_ksq):
    """v <- v - k (k.v)/|k|^2 on a (3, ...) complex coefficient array."""
    s = (k1 * v[0] + k2 * v[1] + k3 * v[2]) * inv_ksq
    v[0] -= k1 * s
    v[1] -= k2 * s
    v[2] -= k3 * s
    return v
