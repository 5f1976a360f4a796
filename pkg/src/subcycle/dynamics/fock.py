"""Truncated-Fock brute force, used only as an oracle on tiny systems."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import expm

from ..errors import ConfigError, ConvergenceError
from ..gaussian_mode import MomentSet
from .discrete import DiscretizedMode

MAX_MODES = 4
MAX_DIM = 4096


def _destroy(cutoff):
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1)


@dataclass(frozen=True, eq=False)
class FockOperatorSet:
    """Dense ladder operators on ``cutoff**mode_count`` Fock states."""

    mode_count: int
    cutoff: int
    annihilators: tuple
    creators: tuple

    @classmethod
    def build(cls, mode_count: int, cutoff: int) -> "FockOperatorSet":
        if not 1 <= mode_count <= MAX_MODES:
            raise ConfigError(f"mode_count must be in 1..{MAX_MODES}")
        if cutoff < 2:
            raise ConfigError("cutoff must be at least 2")
        if cutoff**mode_count > MAX_DIM:
            raise ConfigError(f"Fock dimension {cutoff}**{mode_count} exceeds {MAX_DIM}")
        a = _destroy(cutoff)
        eye = np.eye(cutoff)
        ann = []
        for k in range(mode_count):
            factors = [a if j == k else eye for j in range(mode_count)]
            ann.append(reduce(np.kron, factors))
        return cls(mode_count, cutoff, tuple(ann), tuple(op.T.copy() for op in ann))

    @property
    def dim(self) -> int:
        return self.cutoff**self.mode_count

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def quadratures(self):
        """``(q_0, p_0, q_1, p_1, ...)`` with ``q = (b + b^dagger)/sqrt 2``."""
        out = []
        for b, bd in zip(self.annihilators, self.creators):
            out.append((b + bd) / np.sqrt(2.0))
            out.append((b - bd) / (1j * np.sqrt(2.0)))
        return out

    def commutator_defect(self) -> float:
        """Largest deviation of ``[b_k, b_k^dagger]`` from identity below the top level."""
        worst = 0.0
        keep = np.ones(self.dim, dtype=bool)
        for k in range(self.mode_count):
            level = (np.arange(self.dim) // self.cutoff ** (self.mode_count - 1 - k)) % self.cutoff
            keep &= level < self.cutoff - 1
        for b, bd in zip(self.annihilators, self.creators):
            c = b @ bd - bd @ b
            worst = max(worst, np.abs(c[np.ix_(keep, keep)] - np.eye(keep.sum())).max())
        return worst


def _fock_moments(mode: DiscretizedMode, cutoff: int) -> MomentSet:
    ops = FockOperatorSet.build(len(mode), cutoff)
    A = sum(a * b + c * bd for a, c, b, bd in
            zip(mode.alpha, mode.beta, ops.annihilators, ops.creators))
    vac = ops.vacuum()
    v1 = A @ vac                     # a_g |0>
    v2 = A.conj().T @ v1             # a_g^dagger a_g |0>
    n = float(np.vdot(v1, v1).real)
    m = complex(np.vdot(vac, A @ v1))
    n2 = float(np.vdot(v2, v2).real)
    return MomentSet(n=n, m=m, n2=n2, var=n2 - n * n)


def fock_brute_force(mode: DiscretizedMode, cutoff: int = 4, tol: float = 1e-10) -> MomentSet:
    """Vacuum moments of ``a_g`` from explicit Fock matrices.

    The result is accepted only if doubling the cutoff moves every moment by
    less than ``tol``.
    """
    if len(mode) > 3:
        raise ConfigError("fock_brute_force handles at most 3 bins")
    if cutoff < 4:
        raise ConfigError("cutoff must be at least 4")
    res = _fock_moments(mode, cutoff)
    ref = _fock_moments(mode, 2 * cutoff)
    change = max(abs(res.n - ref.n), abs(res.m - ref.m), abs(res.n2 - ref.n2))
    if change > tol:
        raise ConvergenceError(f"Fock moments moved by {change:.3g} when doubling the cutoff")
    return res


def fock_evolve_detector(factors, cutoff: int = 6) -> MomentSet:
    """Detector moments after applying quadratic step factors in Fock space.

    ``factors`` is the chronological sequence produced by
    :func:`subcycle.dynamics.symplectic.step_factors` for a field of at most
    three bins. Mode 0 is the detector.
    """
    factors = list(factors)
    if not factors:
        raise ConfigError("no step factors")
    n_bins = factors[0][1].shape[0] // 2
    ops = FockOperatorSet.build(n_bins + 1, cutoff)
    x = ops.quadratures()
    xd, xf = x[:2], x[2:]
    psi = ops.vacuum()
    for D, F in factors:
        H = np.zeros((ops.dim, ops.dim), dtype=complex)
        for i in range(D.shape[1]):
            det = D[0, i] * xd[0] + D[1, i] * xd[1]
            fld = sum(F[j, i] * xf[j] for j in range(F.shape[0]))
            H += det @ fld
        psi = expm(-1j * H) @ psi
    u = ops.annihilators[0]
    v1 = u @ psi
    v2 = u.conj().T @ v1
    n = float(np.vdot(v1, v1).real)
    n2 = float(np.vdot(v2, v2).real)
    return MomentSet(n=n, m=complex(np.vdot(psi, u @ v1)), n2=n2, var=n2 - n * n)
