"""One-sided Jacobi SVD for small dense complex matrices.

Columns are orthogonalized in place by complex plane rotations; after
convergence the column norms are the singular values. High relative accuracy
at desk scale, no external solver. Pairs within a sweep follow the
round-robin tournament ordering, so disjoint pairs can be rotated
simultaneously with vectorized column operations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class JacobiSVD:
    singular_values: np.ndarray  # descending
    rotated: np.ndarray          # A after rotations; column i = sigma_i * u_i (unsorted)
    sweeps: int
    rotations: int
    off_final: float             # max relative off-diagonal at exit


def _round_robin(n: int):
    """Tournament schedule: n-1 rounds of disjoint pairs covering all (p, q)."""
    players = list(range(n)) + ([n] if n % 2 else [])  # n = dummy when odd
    m = len(players)
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        yield pairs
        players = [players[0]] + [players[-1]] + players[1:-1]


def jacobi_svd(A: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60) -> JacobiSVD:
    """Singular values of a complex matrix by one-sided Jacobi.

    Stops when every column pair satisfies |<u_p, u_q>| <= tol * |u_p| |u_q|.
    """
    U = np.array(A, dtype=np.complex128, order="F", copy=True)
    n = U.shape[1]
    rotations = 0
    off = 0.0
    sweeps = 0
    if n == 1:
        return JacobiSVD(np.array([np.linalg.norm(U[:, 0])]), U, 0, 0, 0.0)
    schedule = list(_round_robin(n))
    for sweeps in range(1, max_sweeps + 1):
        off = 0.0
        for pairs in schedule:
            P = np.array([p for p, _ in pairs])
            Q = np.array([q for _, q in pairs])
            Up = U[:, P]
            Uq = U[:, Q]
            a = np.einsum("ij,ij->j", Up.conj(), Up).real
            b = np.einsum("ij,ij->j", Uq.conj(), Uq).real
            c = np.einsum("ij,ij->j", Up.conj(), Uq)
            ab = a * b
            absc = np.abs(c)
            rel = np.where(ab > 0, absc / np.sqrt(np.maximum(ab, 1e-300)), 0.0)
            off = max(off, float(rel.max(initial=0.0)))
            act = rel > tol
            if not act.any():
                continue
            rotations += int(act.sum())
            phase = c[act] / absc[act]
            tau = (b[act] - a[act]) / (2.0 * absc[act])
            with np.errstate(over="ignore"):  # tau^2 -> inf gives the t -> 0 limit
                t = np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t[tau == 0] = 1.0  # symmetric pair: rotate by 45 degrees
            cs = 1.0 / np.sqrt(1.0 + t * t)
            sn = t * cs
            up = Up[:, act]
            uq = Uq[:, act]
            U[:, P[act]] = cs * up - (sn * np.conj(phase)) * uq
            U[:, Q[act]] = (sn * phase) * up + cs * uq
        if off <= tol:
            break
    s = np.linalg.norm(U, axis=0)
    return JacobiSVD(np.sort(s)[::-1], U, sweeps, rotations, off)
