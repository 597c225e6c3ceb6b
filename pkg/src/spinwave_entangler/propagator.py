"""Heisenberg-picture input/output maps for N Stokes modes coupled to one spin wave.

The Hamiltonian ``H = i hbar sum_n k_n (a_n^dag S^dag - a_n S)`` is quadratic, so
the operator vector

    xi = (a_1, a_1^dag, a_2, a_2^dag, ..., a_N, a_N^dag, S, S^dag)

evolves linearly, ``xi(t) = M(t) xi(0)``, with ``M(t) = expm(A t)``.  The spin wave
carries the rescaled commutator ``[S, S^dag] = a``, which gives

    d a_n / dt = k_n S^dag,        d S / dt = a sum_n k_n a_n^dag.

With ``beta = sqrt(a sum_n k_n^2)`` the closed form is

    S(t)   = cosh(beta t) S + a sinh(beta t)/beta * sum_n k_n a_n^dag
    a_n(t) = a_n + k_n sinh(beta t)/beta * S^dag
             + a k_n (cosh(beta t) - 1)/beta^2 * sum_m k_m a_m

Checking it: differentiate ``S(t)`` and substitute ``a_n^dag(t)``; the
``S^dag`` terms sum to ``a sum k_n^2 sinh/beta = beta sinh`` and the ``a^dag``
terms to ``a cosh``, so ``dS/dt = a sum k_n a_n^dag(t)`` holds.  A unit spin
commutator would instead leave a stray factor ``a`` in one of the two rows, which
is why the single-mode solution pairs ``sqrt(a)`` with ``1/sqrt(a)``.

For one mode this is the familiar two-mode squeezer at rate ``k sqrt(a)``; for
two modes it reproduces the three-operator solution.  Only the symmetric
combination ``sum k_n a_n`` couples to the spin, so orthogonal combinations of
Stokes modes are left untouched.

Two independent routes are provided: :func:`analytic_transform` evaluates the
closed form, :func:`numeric_transform` exponentiates the generator ``A`` built
mechanically from the commutators.  Both have arbitrary-precision twins
(``*_mp``) built on :mod:`mpmath`; these are needed wherever absolute residuals
are checked on matrices whose entries reach ``e^{beta t}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.linalg import expm

from .errors import ContractError, NumericalError
from .model import ModelConfig

__all__ = [
    "BogoliubovTransform",
    "basis_dim",
    "stokes_index",
    "spin_index",
    "adjoint_swap",
    "commutator_gram",
    "generator",
    "analytic_transform",
    "numeric_transform",
    "analytic_matrix_mp",
    "numeric_matrix_mp",
    "required_dps",
]

_SERIES_CUTOFF = 1e-8


def basis_dim(n_stokes: int) -> int:
    return 2 * (n_stokes + 1)


def stokes_index(n: int) -> int:
    """Row of ``a_n`` (0-based mode number); ``a_n^dag`` sits one below."""
    return 2 * n


def spin_index(n_stokes: int) -> int:
    """Row of ``S``; ``S^dag`` sits one below."""
    return 2 * n_stokes


def adjoint_swap(n_stokes: int) -> np.ndarray:
    """Permutation matrix exchanging every operator with its adjoint."""
    d = basis_dim(n_stokes)
    P = np.zeros((d, d))
    for j in range(0, d, 2):
        P[j, j + 1] = P[j + 1, j] = 1.0
    return P


def commutator_gram(config: ModelConfig) -> np.ndarray:
    """``K[i, j] = [xi_i, xi_j]`` (c-numbers in the bosonized model)."""
    N = config.n_stokes
    K = np.zeros((basis_dim(N), basis_dim(N)))
    for n in range(N):
        i = stokes_index(n)
        K[i, i + 1], K[i + 1, i] = 1.0, -1.0
    s = spin_index(N)
    K[s, s + 1], K[s + 1, s] = config.boson_factor, -config.boson_factor
    return K


def generator(config: ModelConfig) -> np.ndarray:
    """Matrix ``A`` with ``d xi / dt = A xi``.

    Built from ``d O/dt = (i/hbar)[H, O]`` term by term:
    ``[a_n^dag S^dag, a_n] = -S^dag`` and ``[a_n^dag S^dag, S] = -a a_n^dag``.
    """
    N, a = config.n_stokes, config.boson_factor
    A = np.zeros((basis_dim(N), basis_dim(N)))
    s = spin_index(N)
    for n, k in enumerate(config.couplings):
        i = stokes_index(n)
        A[i, s + 1] = k  # a_n    <- S^dag
        A[i + 1, s] = k  # a_n^dag <- S
        A[s, i + 1] = a * k  # S    <- a_n^dag
        A[s + 1, i] = a * k  # S^dag <- a_n
    return A


@dataclass(frozen=True)
class BogoliubovTransform:
    """Real matrix ``M`` with ``xi(t) = M xi(0)``."""

    matrix: np.ndarray
    time: float
    config: ModelConfig

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def commutator_residual(self) -> float:
        """``max |M K M^T - K|``."""
        K = commutator_gram(self.config)
        return float(np.abs(self.matrix @ K @ self.matrix.T - K).max())

    def compose(self, other: "BogoliubovTransform") -> "BogoliubovTransform":
        """Evolve by ``other`` first, then by ``self``."""
        if self.config != other.config:
            raise ContractError("cannot compose transforms of different configurations")
        return BogoliubovTransform(self.matrix @ other.matrix, self.time + other.time, self.config)

    def coefficient(self, out_row: int, in_col: int) -> float:
        return float(self.matrix[out_row, in_col])


def _coefficients(beta, t, cosh, sinh, cutoff=_SERIES_CUTOFF):
    """``(cosh(beta t), sinh(beta t)/beta, (cosh(beta t) - 1)/beta^2)``.

    ``cosh - 1`` is written as ``2 sinh^2(x/2)`` so small ``beta t`` does not
    cancel; ``beta t -> 0`` uses the limits ``t`` and ``t^2/2``.
    """
    x = beta * t
    if abs(x) < cutoff:
        return 1 + x * x / 2, t * (1 + x * x / 6), t * t * (1 + x * x / 12) / 2
    half = sinh(x / 2)
    return cosh(x), sinh(x) / beta, 2 * half * half / (beta * beta)


def _fill(M, ks, a, c, f1, f2):
    N = len(ks)
    s = spin_index(N)
    M[s, s] = c
    M[s + 1, s + 1] = c
    for n, kn in enumerate(ks):
        i = stokes_index(n)
        M[s, i + 1] = a * kn * f1
        M[s + 1, i] = a * kn * f1
        M[i, s + 1] = kn * f1
        M[i + 1, s] = kn * f1
        for m, km in enumerate(ks):
            j = stokes_index(m)
            val = a * kn * km * f2 + (1 if m == n else 0)
            M[i, j] = val
            M[i + 1, j + 1] = val
    return M


def analytic_transform(config: ModelConfig, t: float) -> BogoliubovTransform:
    """Closed-form propagator at time ``t`` (negative ``t`` gives the inverse)."""
    t = float(t)
    try:
        c, f1, f2 = _coefficients(config.beta, t, math.cosh, math.sinh)
    except OverflowError as exc:
        raise NumericalError(f"cosh(beta*t) overflows at beta*t = {config.beta * t:.4g}") from exc
    d = basis_dim(config.n_stokes)
    M = _fill(np.zeros((d, d)), config.couplings, config.boson_factor, c, f1, f2)
    return BogoliubovTransform(M, t, config)


def numeric_transform(config: ModelConfig, t: float) -> BogoliubovTransform:
    """Propagator from ``expm(A t)`` with ``A`` from :func:`generator`.

    Raises
    ------
    NumericalError
        If the exponential overflows or violates commutator preservation by
        more than ``1e-8`` relative to ``|M|^2``.
    """
    t = float(t)
    M = expm(generator(config) * t)
    if not np.all(np.isfinite(M)):
        raise NumericalError(f"matrix exponential overflowed (beta*t = {config.beta * t:.3g})")
    out = BogoliubovTransform(M, t, config)
    scale = max(1.0, float(np.abs(M).max()) ** 2)
    resid = out.commutator_residual()
    if resid > 1e-8 * scale:
        raise NumericalError(
            f"commutator residual {resid:.3e} exceeds 1e-8 * |M|^2 = {1e-8 * scale:.3e}"
        )
    return out


def required_dps(config: ModelConfig, t: float, target_digits: int = 16) -> int:
    """Decimal digits needed so products ``M X M^T`` keep ``target_digits`` absolute digits."""
    growth = abs(config.beta * t) / math.log(10)
    spread = math.log10(2.0 + sum(abs(k) for k in config.couplings) * (1.0 + abs(t)) ** 2)
    return int(2 * (growth + spread) + target_digits + 10)


def analytic_matrix_mp(config: ModelConfig, t, dps: int | None = None) -> mpmath.matrix:
    """Closed form in arbitrary precision; inputs are taken as exact binary floats."""
    dps = dps or required_dps(config, float(t))
    with mpmath.workdps(dps):
        a = mpmath.mpf(1) - mpmath.mpf(config.pump_ratio) ** 2
        a = a / (1 + mpmath.mpf(config.pump_ratio) ** 2)
        ks = [mpmath.mpf(k) for k in config.couplings]
        beta = mpmath.sqrt(a * mpmath.fsum(k * k for k in ks))
        cutoff = mpmath.mpf(10) ** (-(dps // 4 + 1))
        c, f1, f2 = _coefficients(beta, mpmath.mpf(t), mpmath.cosh, mpmath.sinh, cutoff)
        d = basis_dim(config.n_stokes)
        return _fill(mpmath.zeros(d, d), ks, a, c, f1, f2)


def numeric_matrix_mp(config: ModelConfig, t, dps: int | None = None) -> mpmath.matrix:
    """``expm(A t)`` in arbitrary precision, with ``A`` assembled as in :func:`generator`."""
    dps = dps or required_dps(config, float(t))
    with mpmath.workdps(dps):
        N = config.n_stokes
        a = (1 - mpmath.mpf(config.pump_ratio) ** 2) / (1 + mpmath.mpf(config.pump_ratio) ** 2)
        A = mpmath.zeros(basis_dim(N), basis_dim(N))
        s = spin_index(N)
        for n, k in enumerate(config.couplings):
            i = stokes_index(n)
            k = mpmath.mpf(k)
            A[i, s + 1] = k
            A[i + 1, s] = k
            A[s, i + 1] = a * k
            A[s + 1, i] = a * k
        return mpmath.expm(A * mpmath.mpf(t))
