"""Reference computations that avoid the package's own code paths."""

import math

import numpy as np


def permutation_matrix(dims, order):
    """Matrix sending the row-major vector in party order to ``order``."""
    total = math.prod(dims)
    idx = np.arange(total).reshape(dims).transpose(order).reshape(-1)
    M = np.zeros((total, total))
    M[np.arange(total), idx] = 1.0
    return M


def full_operator(dims, parties, local_op):
    """``local_op`` on ``parties`` (ascending), identity elsewhere, as a dense matrix."""
    rest = [p for p in range(len(dims)) if p not in parties]
    order = list(parties) + rest
    d_rest = math.prod(dims[p] for p in rest) if rest else 1
    big = np.kron(local_op, np.eye(d_rest))
    P = permutation_matrix(dims, order)
    return P.T @ big @ P


def projector_from(vectors):
    V = np.atleast_2d(np.asarray(vectors, dtype=complex))
    return sum(np.outer(v, v.conj()) for v in V)


def dense_probability(psi, dims, ops):
    """``<psi| prod_k O_k |psi>`` with ``ops = [(parties, local projector), ...]``."""
    M = np.eye(len(psi), dtype=complex)
    for parties, local in ops:
        M = M @ full_operator(dims, parties, local)
    return float(np.real(np.vdot(psi, M @ psi)))


def schmidt_weights_rdm(psi, dims, group1):
    """Schmidt weights from the eigenvalues of the group-1 reduced density matrix."""
    n = len(dims)
    group2 = [p for p in range(n) if p not in group1]
    t = np.asarray(psi).reshape(dims).transpose(list(group1) + group2)
    dL = math.prod(dims[p] for p in group1)
    m = t.reshape(dL, -1)
    rho = m @ m.conj().T
    ev = np.clip(np.linalg.eigvalsh(rho), 0, None)
    return np.sort(np.sqrt(ev))[::-1]


def eq3_unitaries(p1, p2):
    U = np.array([[math.sqrt(p2), -1j * math.sqrt(p1)], [-1j * math.sqrt(p1), math.sqrt(p2)]]) / math.sqrt(p1 + p2)
    D = p1**2 + p2**2 - p1 * p2
    V = np.array([[-1j * (p2 - p1), math.sqrt(p1 * p2)], [math.sqrt(p1 * p2), -1j * (p2 - p1)]]) / math.sqrt(D)
    return U, V


def golden_section_max(f, a, b, tol=1e-12):
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    while abs(b - a) > tol:
        if f(c) > f(d):
            b = d
        else:
            a = c
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
    x = (a + b) / 2
    return x, f(x)


def random_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def hardy_two_qubit(theta):
    c, s = math.cos(theta), math.sin(theta)
    return (c * s * (c - s)) ** 2 / (c * c + s * s - c * s) ** 2
