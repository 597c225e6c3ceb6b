"""Second moments of the Stokes modes and the spin wave.

``MomentMatrix.matrix[i, j] = <d xi_i d xi_j>`` with ``d xi = xi - <xi>`` and
``xi`` ordered as in :mod:`spinwave_entangler.propagator`.  Because the
evolution is linear, ``C(t) = M C(0) M^T``.

The spin wave starts in the coherent spin state ``(cos th|1> + sin th|2>)^N_a``.
For ``S = N_a^{-1/2} sum_i |1>_i<2|`` the product structure gives, for every
``N_a``::

    <dS dS^dag> = cos^4 th,   <dS^dag dS> = sin^4 th,   <dS dS> = -sin^2 th cos^2 th

(the ``N_a`` dependent pieces of ``<S S^dag>`` and ``|<S>|^2`` cancel).  The
difference of the first two is ``a``, matching the rescaled commutator.
``spin_init="vacuum"`` instead uses ``<dS dS^dag> = 1`` and no other spin
moments; that choice does not satisfy ``C - C^T = K`` once ``a < 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal

import mpmath
import numpy as np

from .errors import ConfigurationError, ContractError
from .model import ModelConfig
from .propagator import BogoliubovTransform, analytic_matrix_mp, basis_dim, spin_index, stokes_index

__all__ = [
    "SpinInit",
    "MomentMatrix",
    "QuadratureCovariance",
    "spin_moments",
    "initial_moments",
    "propagate",
    "to_quadratures",
    "quadrature_map",
    "initial_moments_mp",
    "transform_mp",
]

SpinInit = Literal["css", "vacuum"]
SPIN_INITS = ("css", "vacuum")


def spin_moments(config: ModelConfig, spin_init: SpinInit = "css") -> tuple[float, float, float]:
    """``(<dS dS^dag>, <dS^dag dS>, <dS dS>)`` of the initial spin state."""
    if spin_init == "css":
        c2, s2 = config.cos2, config.sin2
        return c2 * c2, s2 * s2, -c2 * s2
    if spin_init == "vacuum":
        return 1.0, 0.0, 0.0
    raise ConfigurationError(f"spin_init must be one of {SPIN_INITS}, got {spin_init!r}")


@dataclass(frozen=True)
class MomentMatrix:
    matrix: np.ndarray
    config: ModelConfig
    time: float = 0.0
    spin_init: str = "css"

    @property
    def n_stokes(self) -> int:
        return self.config.n_stokes

    def antisymmetric_part(self) -> np.ndarray:
        """``C - C^T``; equals the commutator matrix for a consistent state."""
        return self.matrix - self.matrix.T


def initial_moments(config: ModelConfig, spin_init: SpinInit = "css") -> MomentMatrix:
    """Vacuum Stokes modes times the initial spin state, no cross correlations."""
    return _assemble(config, spin_init, spin_moments(config, spin_init), np.zeros)


def _assemble(config, spin_init, moments, zeros):
    ss_dag, sdag_s, ss = moments
    N = config.n_stokes
    C = zeros((basis_dim(N), basis_dim(N)))
    for n in range(N):
        i = stokes_index(n)
        C[i, i + 1] = 1.0  # <a a^dag>
    s = spin_index(N)
    C[s, s + 1] = ss_dag
    C[s + 1, s] = sdag_s
    C[s, s] = C[s + 1, s + 1] = ss
    return MomentMatrix(C, config, 0.0, spin_init)


def initial_moments_mp(config: ModelConfig, spin_init: SpinInit = "css") -> MomentMatrix:
    """:func:`initial_moments` as an object array of ``mpf`` at the working precision.

    Everything downstream (:func:`propagate`, :func:`to_quadratures` and the
    criteria) accepts such arrays, so a whole evaluation can run in mpmath.
    """
    if spin_init == "css":
        r2 = mpmath.mpf(config.pump_ratio) ** 2
        c2, s2 = 1 / (1 + r2), r2 / (1 + r2)
        moments = (c2 * c2, s2 * s2, -c2 * s2)
    else:
        moments = tuple(mpmath.mpf(v) for v in spin_moments(config, spin_init))

    def zeros(shape):
        out = np.empty(shape, dtype=object)
        out[...] = mpmath.mpf(0)
        return out

    return _assemble(config, spin_init, moments, zeros)


def transform_mp(config: ModelConfig, t: float) -> BogoliubovTransform:
    """Closed-form propagator as an object array of ``mpf`` (current working precision)."""
    M = analytic_matrix_mp(config, t, mpmath.mp.dps)
    return BogoliubovTransform(np.array(M.tolist(), dtype=object), float(t), config)


def propagate(C0: MomentMatrix, M: BogoliubovTransform) -> MomentMatrix:
    """``C(t) = M C0 M^T``."""
    if C0.matrix.shape != M.matrix.shape:
        raise ContractError(
            f"moment matrix {C0.matrix.shape} and transform {M.matrix.shape} differ in dimension"
        )
    if C0.config.n_stokes != M.config.n_stokes:
        raise ContractError("moment matrix and transform belong to different mode counts")
    C = M.matrix @ C0.matrix @ M.matrix.T
    return replace(C0, matrix=C, time=C0.time + M.time)


def quadrature_map(n_stokes: int) -> np.ndarray:
    """``T`` with ``(x_1, p_1, ..., x_s, p_s) = T xi``; ``x = b + b^dag``, ``p = -i(b - b^dag)``."""
    d = basis_dim(n_stokes)
    T = np.zeros((d, d), dtype=complex)
    for j in range(0, d, 2):
        T[j, j], T[j, j + 1] = 1.0, 1.0
        T[j + 1, j], T[j + 1, j + 1] = -1j, 1j
    return T


@dataclass(frozen=True)
class QuadratureCovariance:
    """Symmetrized covariance of ``(x_1, p_1, ..., x_N, p_N, x_s, p_s)``."""

    matrix: np.ndarray
    n_stokes: int

    def x(self, mode: int) -> int:
        """Index of ``x`` for Stokes ``mode`` (0-based); ``mode == n_stokes`` is the spin."""
        if not 0 <= mode <= self.n_stokes:
            raise IndexError(f"mode {mode} out of range for {self.n_stokes} Stokes modes")
        return 2 * mode

    def p(self, mode: int) -> int:
        return self.x(mode) + 1

    @property
    def spin(self) -> int:
        return self.n_stokes

    def cov(self, i: int, j: int):
        return self.matrix[i, j]

    def variance(self, coeffs: dict[int, float]):
        """Variance of ``sum_i coeffs[i] * q_i`` (keys are quadrature indices)."""
        v = np.zeros(self.matrix.shape[0], dtype=self.matrix.dtype)
        for i, c in coeffs.items():
            v[i] += c
        return v @ self.matrix @ v

    def mode_block(self, mode: int) -> np.ndarray:
        i = self.x(mode)
        return self.matrix[i : i + 2, i : i + 2]


def to_quadratures(C: MomentMatrix) -> QuadratureCovariance:
    """Change basis to quadratures and keep the symmetric (real) part.

    With ``T = R + iI`` and real ``C``, ``Re(T C T^T) = R C R^T - I C I^T``; working
    with the real pieces keeps ``mpf`` object arrays usable.
    """
    T = quadrature_map(C.n_stokes)
    R, I = T.real, T.imag
    if C.matrix.dtype == object:
        R, I = R.astype(int).astype(object), I.astype(int).astype(object)
    Q = R @ C.matrix @ R.T - I @ C.matrix @ I.T
    Q = (Q + Q.T) / 2
    return QuadratureCovariance(np.ascontiguousarray(Q), C.n_stokes)
