"""Numba kernels for the hot paths: batch walk sampling and SGNS training.

Random numbers come from a counter-based splitmix64 stream, so every worker
thread owns an independent (seed, counter) pair and training needs no RNG
synchronization. Embedding updates in multi-threaded mode are lock-free:
racing writes may drop coordinate updates, which asynchronous SGD tolerates.
"""

import numpy as np
from numba import njit

U64 = np.uint64
_PHI = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True, inline="always")
def _u01(seed, counter):
    return (_mix64(seed + counter * _PHI) >> U64(11)) * _INV_2_53


def stream_seed(seed: int, stream: int) -> np.uint64:
    """Derive an independent stream seed for worker `stream`."""
    with np.errstate(over="ignore"):
        z = (U64(seed) + U64(1)) * _PHI + U64(stream) * _M2
        z = (z ^ (z >> U64(30))) * _M1
        z = (z ^ (z >> U64(27))) * _M2
        return z ^ (z >> U64(31))


@njit(cache=True, nogil=True, inline="always")
def _alias_node(prob, alias, seed, c):
    """Draw from a node-level alias table; consumes two uniforms."""
    c += U64(1)
    u1 = _u01(seed, c)
    c += U64(1)
    u2 = _u01(seed, c)
    k = prob.shape[0]
    slot = np.int64(u1 * k)
    if slot >= k:
        slot = k - 1
    if u2 >= prob[slot]:
        slot = alias[slot]
    return slot, c


@njit(cache=True, nogil=True, inline="always")
def _alias_step(indptr, nbrs, aprob, aalias, v, seed, c):
    """One weighted transition out of `v` along a CSR direction."""
    c += U64(1)
    u1 = _u01(seed, c)
    c += U64(1)
    u2 = _u01(seed, c)
    base = indptr[v]
    deg = indptr[v + 1] - base
    slot = np.int64(u1 * deg)
    if slot >= deg:
        slot = deg - 1
    if u2 >= aprob[base + slot]:
        slot = aalias[base + slot]
    return nbrs[base + slot], c


@njit(cache=True, nogil=True)
def sample_walks(
    out_indptr, out_nbrs, out_aprob, out_aalias,
    in_indptr, in_nbrs, in_aprob, in_aalias,
    ps_prob, ps_alias, pt_prob, pt_alias,
    n, count, kind_mode, seed, counter,
):
    """Sample `count` alternating walks of 2n+1 nodes.

    kind_mode: 0 = fair coin per walk, 1 = all source walks, 2 = all target.
    Returns (kinds, nodes, counter) with kinds[w] = 1 for a source walk.
    """
    length = 2 * n + 1
    nodes = np.empty((count, length), dtype=np.int64)
    kinds = np.empty(count, dtype=np.uint8)
    c = counter
    for w in range(count):
        if kind_mode == 0:
            c += U64(1)
            is_source = _u01(seed, c) > 0.5
        else:
            is_source = kind_mode == 1
        kinds[w] = 1 if is_source else 0
        if is_source:
            cur, c = _alias_node(ps_prob, ps_alias, seed, c)
        else:
            cur, c = _alias_node(pt_prob, pt_alias, seed, c)
        nodes[w, 0] = cur
        forward = is_source
        for step in range(2 * n):
            if forward:
                cur, c = _alias_step(out_indptr, out_nbrs, out_aprob, out_aalias, cur, seed, c)
            else:
                cur, c = _alias_step(in_indptr, in_nbrs, in_aprob, in_aalias, cur, seed, c)
            nodes[w, step + 1] = cur
            forward = not forward
    return kinds, nodes, c


@njit(cache=True, nogil=True, inline="always")
def _sigmoid_lookup(table, x):
    # table[i] = sigmoid((2*i/size - 1) * 6); out-of-range x clamps to the ends
    size = table.shape[0]
    idx = np.int64((x + 6.0) * (size / 12.0))
    if idx < 0:
        idx = 0
    elif idx >= size:
        idx = size - 1
    return table[idx]


@njit(cache=True, nogil=True)
def train_walks(
    out_indptr, out_nbrs, out_aprob, out_aalias,
    in_indptr, in_nbrs, in_aprob, in_aalias,
    ps_prob, ps_alias, pt_prob, pt_alias,
    ns_prob, ns_alias, nt_prob, nt_alias,
    phi_s, phi_t, sig_table,
    n, kappa, joint,
    rho0, lr_floor, gamma_total,
    n_walks, t0, t_stride,
    seed, counter,
):
    """Run `n_walks` walk-train iterations on the shared embedding matrices.

    Walk w of this call has global index t0 + w*t_stride, which sets its
    learning rate under the linear decay. The error accumulated for the input
    node's row is applied once at the end of each walk; all other rows update
    eagerly. Negative draws equal to the current positive context are skipped.
    """
    d = phi_s.shape[1]
    length = 2 * n + 1
    nodes = np.empty(length, dtype=np.int64)
    err = np.empty(d, dtype=np.float64)
    c = counter

    for w in range(n_walks):
        t = t0 + w * t_stride
        lr = rho0 * (1.0 - t / gamma_total)
        if lr < lr_floor:
            lr = lr_floor

        c += U64(1)
        is_source = _u01(seed, c) > 0.5
        if is_source:
            cur, c = _alias_node(ps_prob, ps_alias, seed, c)
        else:
            cur, c = _alias_node(pt_prob, pt_alias, seed, c)
        nodes[0] = cur
        forward = is_source
        for step in range(2 * n):
            if forward:
                cur, c = _alias_step(out_indptr, out_nbrs, out_aprob, out_aalias, cur, seed, c)
            else:
                cur, c = _alias_step(in_indptr, in_nbrs, in_aprob, in_aalias, cur, seed, c)
            nodes[step + 1] = cur
            forward = not forward

        if is_source:
            phi_u = phi_s
            phi_opp = phi_t
            phi_same = phi_s
            no_prob, no_alias = nt_prob, nt_alias
            ns_prob_same, ns_alias_same = ns_prob, ns_alias
        else:
            phi_u = phi_t
            phi_opp = phi_s
            phi_same = phi_t
            no_prob, no_alias = ns_prob, ns_alias
            ns_prob_same, ns_alias_same = nt_prob, nt_alias

        u = nodes[0]
        for k in range(d):
            err[k] = 0.0

        for i in range(1, 2 * n, 2):
            pos1 = nodes[i]
            pos2 = nodes[i + 1]
            for j in range(kappa + 1):
                if j == 0:
                    v1 = pos1
                    label = 1.0
                else:
                    v1, c = _alias_node(no_prob, no_alias, seed, c)
                    label = 0.0
                if j == 0 or v1 != pos1:
                    x = 0.0
                    for k in range(d):
                        x += phi_u[u, k] * phi_opp[v1, k]
                    g = (label - _sigmoid_lookup(sig_table, x)) * lr
                    for k in range(d):
                        err[k] += g * phi_opp[v1, k]
                    for k in range(d):
                        phi_opp[v1, k] += g * phi_u[u, k]
                if joint:
                    if j == 0:
                        v2 = pos2
                    else:
                        v2, c = _alias_node(ns_prob_same, ns_alias_same, seed, c)
                    if j == 0 or v2 != pos2:
                        x = 0.0
                        for k in range(d):
                            x += phi_u[u, k] * phi_same[v2, k]
                        g = (label - _sigmoid_lookup(sig_table, x)) * lr
                        for k in range(d):
                            err[k] += g * phi_same[v2, k]
                        for k in range(d):
                            phi_same[v2, k] += g * phi_u[u, k]

        for k in range(d):
            phi_u[u, k] += err[k]
    return c
