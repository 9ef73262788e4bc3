"""JAX-compiled per-node derivatives of the dynamics right-hand side."""

from __future__ import annotations

import functools

import jax
import jax.numpy as jnp
import numpy as np

from ..dynamics import N_STATES, ModelConstants, rhs

jax.config.update("jax_enable_x64", True)


@functools.lru_cache(maxsize=32)
def node_functions(c: ModelConstants):
    """Return jitted ``(f, jac, hess)`` acting on stacks of node vectors ``z = [s, u]``.

    ``f(Z)`` is ``(N, 16)``, ``jac(Z)`` is ``(N, 16, 20)`` and ``hess(Z, MU)`` is
    ``(N, 20, 20)``, the Hessian of ``MU[k] @ f(Z[k])`` for each node.
    """

    def f(z):
        return rhs(z[:N_STATES], z[N_STATES:], c, jnp)

    def weighted(z, mu):
        return jnp.dot(mu, f(z))

    F = jax.jit(jax.vmap(f))
    J = jax.jit(jax.vmap(jax.jacfwd(f)))
    H = jax.jit(jax.vmap(jax.hessian(weighted)))

    def f_np(Z):
        return np.asarray(F(jnp.asarray(Z)))

    def j_np(Z):
        return np.asarray(J(jnp.asarray(Z)))

    def h_np(Z, MU):
        return np.array(H(jnp.asarray(Z), jnp.asarray(MU)))

    return f_np, j_np, h_np
