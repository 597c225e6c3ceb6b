"""Exact state-vector evolution in truncated Hilbert spaces.

Two models are available:

``"boson"``
    The spin wave is ``S = sqrt(a) b`` with ``[b, b^dag] = 1``.  The coherent
    spin state becomes the squeezed vacuum with ``sinh(rho) = sin^2(th)/sqrt(a)``,
    which has exactly the coherent-spin second moments.  The dynamics is
    Gaussian, so this checks the moment engine up to Fock truncation.
``"dicke"``
    ``N_a`` two-level atoms in the symmetric subspace, ``S = J_-/sqrt(N_a)``
    acting as ``S|m> = sqrt(m (N_a - m + 1) / N_a) |m-1>`` where ``m`` counts
    atoms in ``|2>``.  This checks the bosonization itself.

Every term of ``H = i sum_n k_n (a_n^dag S^dag - a_n S)`` creates or destroys a
photon together with a spin excitation, so ``D = m - sum_n n_n`` is conserved.
The basis is built sector by sector: the sectors occupied by the initial state
plus their neighbours ``D +- 1``.  The neighbours never get populated; they
only let single ladder operators act on the state when second moments are
measured.  Within the kept sectors the per-mode cutoffs are applied exactly as
in the full product basis.

``-iH`` is real and antisymmetric in this basis, so states stay real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

from .criteria import evaluate, evaluate_point
from .errors import ConfigurationError, DomainError, NumericalError, TruncationError
from .model import ModelConfig, build_config
from .moments import MomentMatrix, to_quadratures
from .propagator import basis_dim

__all__ = [
    "OracleConfig",
    "OracleState",
    "OracleBasis",
    "prepare_initial",
    "evolve",
    "measure_moments",
    "measure_criteria",
    "adaptive_cutoff",
    "TRUNCATION_TOL",
    "AGREEMENT_POINTS",
    "boson_agreement",
    "dicke_discrepancies",
]

Which = Literal["boson", "dicke"]
TRUNCATION_TOL = 1e-8
NORM_TOL = 1e-10
_NEGLIGIBLE = 1e-24
MIN_CUTOFF = 4


@dataclass(frozen=True)
class OracleConfig:
    """Truncation settings for one oracle run.

    ``fock_cutoff`` bounds every Stokes mode (and the spin boson in the
    ``"boson"`` model).  For ``"dicke"`` the default cutoff ``n_atoms + 1``
    makes the Stokes truncation exact, since photon numbers never exceed
    the number of atoms.
    """

    config: ModelConfig
    which: Which = "boson"
    fock_cutoff: int | None = None
    n_atoms: int | None = None

    def __post_init__(self):
        if self.which not in ("boson", "dicke"):
            raise ConfigurationError(f"unknown oracle {self.which!r}")
        if self.config.boson_factor <= 0:
            raise DomainError("oracle needs a > 0")
        if self.which == "dicke":
            if not isinstance(self.n_atoms, int) or self.n_atoms < 1:
                raise ConfigurationError("dicke oracle needs a positive integer n_atoms")
            if self.fock_cutoff is None:
                object.__setattr__(self, "fock_cutoff", self.n_atoms + 1)
        elif self.fock_cutoff is None:
            object.__setattr__(self, "fock_cutoff", 32)
        if self.which == "boson" and self.fock_cutoff < MIN_CUTOFF:
            raise ConfigurationError(f"fock_cutoff must be >= {MIN_CUTOFF}")

    @property
    def spin_max(self) -> int:
        return self.n_atoms if self.which == "dicke" else self.fock_cutoff

    @property
    def stokes_exact(self) -> bool:
        return self.which == "dicke" and self.fock_cutoff >= self.n_atoms + 1

    def with_cutoff(self, cutoff: int) -> "OracleConfig":
        return OracleConfig(self.config, self.which, cutoff, self.n_atoms)


def _spin_amplitudes(ocfg: OracleConfig) -> np.ndarray:
    """Initial spin amplitudes over ``m = 0..spin_max``."""
    cfg = ocfg.config
    m = np.arange(ocfg.spin_max + 1)
    if ocfg.which == "dicke":
        N = ocfg.n_atoms
        if cfg.pump_ratio == 0:
            amp = (m == 0).astype(float)
        else:
            # sqrt(binom(N, m)) cos^(N-m) sin^m, in logs to avoid overflow
            logc = 0.5 * math.log(cfg.cos2)
            logs = 0.5 * math.log(cfg.sin2)
            lb = gammaln(N + 1) - gammaln(m + 1) - gammaln(N - m + 1)
            amp = np.exp(0.5 * lb + (N - m) * logc + m * logs)
        return amp
    # squeezed vacuum, <b b> = -sinh(rho) cosh(rho)
    sinh_rho = cfg.sin2 / math.sqrt(cfg.boson_factor)
    tanh_rho = sinh_rho / math.sqrt(1.0 + sinh_rho**2)
    cosh_rho = math.sqrt(1.0 + sinh_rho**2)
    amp = np.zeros(len(m))
    if tanh_rho == 0:
        amp[0] = 1.0
        return amp
    j = m[m % 2 == 0] // 2
    log_mag = (
        j * math.log(tanh_rho)
        + 0.5 * gammaln(2 * j + 1)
        - j * math.log(2.0)
        - gammaln(j + 1)
        - 0.5 * math.log(cosh_rho)
    )
    amp[2 * j] = (-1.0) ** j * np.exp(log_mag)
    return amp


class OracleBasis:
    """Product states ``(n_1, ..., n_N, m)`` in a set of conserved sectors."""

    def __init__(self, ocfg: OracleConfig, sectors):
        self.ocfg = ocfg
        self.n_modes = ocfg.config.n_stokes
        self.sectors = tuple(sorted(set(sectors)))
        n_max, m_max = ocfg.fock_cutoff, ocfg.spin_max
        blocks = []
        for D in self.sectors:
            budget = m_max - D  # sum of photon numbers allowed in this sector
            if budget < 0:
                continue
            rows = np.zeros((1, 0), dtype=np.int64)
            for _ in range(self.n_modes):
                used = rows.sum(axis=1)
                room = np.minimum(n_max, budget - used)
                reps = room + 1
                rows = np.repeat(rows, reps, axis=0)
                new = np.concatenate([np.arange(r) for r in reps])
                rows = np.column_stack([rows, new])
            spin = D + rows.sum(axis=1)
            keep = spin >= 0
            blocks.append(np.column_stack([rows[keep], spin[keep]]))
        self.states = np.concatenate(blocks) if blocks else np.zeros((0, self.n_modes + 1), int)
        self._radix = max(n_max, m_max) + 2
        keys = self._keys(self.states)
        order = np.argsort(keys)
        self.states = self.states[order]
        self._sorted_keys = keys[order]

    def __len__(self) -> int:
        return len(self.states)

    def _keys(self, states: np.ndarray) -> np.ndarray:
        k = np.zeros(len(states), dtype=np.int64)
        for col in range(states.shape[1]):
            k = k * self._radix + states[:, col]
        return k

    def index(self, states: np.ndarray) -> np.ndarray:
        """Indices of ``states``; ``-1`` where a state is not in the basis."""
        keys = self._keys(states)
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.clip(pos, 0, len(self._sorted_keys) - 1)
        return np.where(self._sorted_keys[pos] == keys, pos, -1)

    def _raise(self, col: int, values: np.ndarray) -> sp.csr_matrix:
        """Sparse matrix for a ladder raising operator on column ``col`` (``values`` per source state)."""
        target = self.states.copy()
        target[:, col] += 1
        dst = self.index(target)
        ok = (dst >= 0) & (values != 0)
        src = np.nonzero(ok)[0]
        n = len(self)
        return sp.csr_matrix((values[ok], (dst[ok], src)), shape=(n, n))

    def spin_raise_values(self, m: np.ndarray) -> np.ndarray:
        ocfg = self.ocfg
        if ocfg.which == "dicke":
            N = ocfg.n_atoms
            return np.sqrt(np.clip((m + 1) * (N - m), 0, None) / N)
        return math.sqrt(ocfg.config.boson_factor) * np.sqrt(m + 1.0)

    @cached_property
    def stokes_raising(self) -> list[sp.csr_matrix]:
        return [
            self._raise(i, np.sqrt(self.states[:, i] + 1.0)) for i in range(self.n_modes)
        ]

    @cached_property
    def spin_raising(self) -> sp.csr_matrix:
        return self._raise(self.n_modes, self.spin_raise_values(self.states[:, -1]))

    @cached_property
    def generator(self) -> sp.csr_matrix:
        """``-iH`` (real antisymmetric)."""
        n = len(self)
        X = sp.csr_matrix((n, n))
        spin_vals = self.spin_raise_values(self.states[:, -1])
        for i, k in enumerate(self.ocfg.config.couplings):
            if k == 0:
                continue
            target = self.states.copy()
            target[:, i] += 1
            target[:, -1] += 1
            dst = self.index(target)
            vals = k * np.sqrt(self.states[:, i] + 1.0) * spin_vals
            ok = (dst >= 0) & (vals != 0)
            X = X + sp.csr_matrix((vals[ok], (dst[ok], np.nonzero(ok)[0])), shape=(n, n))
        return (X - X.T).tocsr()

    def ladder_operators(self) -> list[sp.csr_matrix]:
        """``[a_1, a_1^dag, ..., a_N, a_N^dag, S, S^dag]`` in the propagator ordering."""
        ops = []
        for R in self.stokes_raising + [self.spin_raising]:
            ops += [R.T.tocsr(), R]
        return ops


@dataclass(frozen=True)
class OracleState:
    amplitudes: np.ndarray
    basis: OracleBasis = field(repr=False)
    time: float = 0.0
    initial_tail: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def truncation_estimate(self) -> float:
        """Largest population sitting on an artificial cutoff level."""
        ocfg = self.basis.ocfg
        pop = self.populations()
        st = self.basis.states
        worst = 0.0
        if not ocfg.stokes_exact:
            for i in range(self.basis.n_modes):
                worst = max(worst, float(pop[st[:, i] == ocfg.fock_cutoff].sum()))
        if ocfg.which == "boson":
            worst = max(worst, float(pop[st[:, -1] == ocfg.fock_cutoff].sum()))
        return max(worst, self.initial_tail)

    @property
    def flagged(self) -> bool:
        return self.truncation_estimate() >= TRUNCATION_TOL

    def photon_number(self) -> float:
        pop = self.populations()
        return float(pop @ self.basis.states[:, :-1].sum(axis=1))

    def spin_excitations(self) -> float:
        return float(self.populations() @ self.basis.states[:, -1])


def prepare_initial(ocfg: OracleConfig) -> OracleState:
    """Initial spin state times vacuum Stokes modes.

    Raises
    ------
    TruncationError
        If the spin cutoff discards population ``>= 1e-8`` of the initial state.
    """
    amp = _spin_amplitudes(ocfg)
    kept = float(np.sum(amp**2))
    tail = max(0.0, 1.0 - kept)
    if tail >= TRUNCATION_TOL:
        raise TruncationError(
            f"cutoff {ocfg.fock_cutoff} drops population {tail:.2e} of the initial spin state"
        )
    occupied = np.nonzero(amp**2 > _NEGLIGIBLE)[0]
    sectors = {int(D) + s for D in occupied for s in (-1, 0, 1)}
    basis = OracleBasis(ocfg, sectors)
    psi = np.zeros(len(basis))
    vac = np.zeros((len(occupied), basis.n_modes + 1), dtype=np.int64)
    vac[:, -1] = occupied
    psi[basis.index(vac)] = amp[occupied]
    psi /= np.linalg.norm(psi)
    return OracleState(psi, basis, 0.0, tail)


def evolve(state: OracleState, ocfg: OracleConfig, t: float) -> OracleState:
    """Apply ``exp(-i H t)``.  Cutoff leakage is reported via :meth:`OracleState.flagged`."""
    if state.basis.ocfg != ocfg:
        raise ConfigurationError("state was prepared for a different oracle configuration")
    if t == 0:
        return state
    psi = expm_multiply(state.basis.generator * float(t), state.amplitudes)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise NumericalError(f"norm drifted to {norm!r} during evolution")
    return OracleState(psi, state.basis, state.time + float(t), state.initial_tail)


def measure_moments(state: OracleState) -> MomentMatrix:
    """Centered ``<d xi_i d xi_j>`` computed from the state vector."""
    ops = state.basis.ladder_operators()
    psi = state.amplitudes
    right = [op @ psi for op in ops]  # xi_j |psi>
    left = [op.T @ psi for op in ops]  # xi_i^dag |psi> (operators are real)
    means = np.array([psi @ v for v in right])
    d = len(ops)
    C = np.empty((d, d))
    for i in range(d):
        for j in range(d):
            C[i, j] = left[i] @ right[j] - means[i] * means[j]
    cfg = state.basis.ocfg.config
    assert C.shape[0] == basis_dim(cfg.n_stokes)
    return MomentMatrix(C, cfg, state.time, f"oracle-{state.basis.ocfg.which}")


def measure_criteria(state: OracleState, ocfg: OracleConfig | None = None) -> dict[str, float]:
    """Criteria from the exact state, through the same code path as the Gaussian engine.

    The returned row also carries ``truncation`` (the cutoff-population estimate).
    """
    if ocfg is not None and state.basis.ocfg != ocfg:
        raise ConfigurationError("state was prepared for a different oracle configuration")
    row = evaluate_point(to_quadratures(measure_moments(state)))
    row["truncation"] = state.truncation_estimate()
    return row


def adaptive_cutoff(
    ocfg: OracleConfig,
    t: float,
    tol: float = TRUNCATION_TOL,
    start: int = 16,
    max_cutoff: int = 512,
) -> tuple[OracleConfig, OracleState]:
    """Double the Fock cutoff until the evolved state's cutoff population is below ``tol``."""
    cutoff = max(start, MIN_CUTOFF)
    while True:
        trial = ocfg.with_cutoff(cutoff)
        try:
            state = evolve(prepare_initial(trial), trial, t)
        except TruncationError:
            state = None
        if state is not None and state.truncation_estimate() < tol:
            return trial, state
        if cutoff >= max_cutoff:
            raise TruncationError(f"cutoff {cutoff} still leaks population at t={t}")
        cutoff = min(2 * cutoff, max_cutoff)


#: (pump_ratio, couplings, t) points used by the agreement check.
AGREEMENT_POINTS: tuple[tuple[float, tuple[float, ...], float], ...] = (
    (0.0, (1.0,), 0.8),
    (0.05, (1.0,), 0.5),
    (0.2, (1.0,), 1.0),
    (0.1, (-1.0,), 1.2),
    (0.0, (1.0, 1.0), 0.5),
    (0.05, (1.0, 1.0), 0.6),
    (0.05, (1.0, 0.1), 1.0),
    (0.1, (1.0, 0.5), 0.7),
    (0.0, (1.0, 1.0), 1.0),
    (0.05, (1.0, 1.0, 1.0), 0.4),
)

AGREEMENT_KEYS = ("V", "V12", "V1s", "V2s")


def boson_agreement(ratio: float, couplings, t: float) -> dict[str, float]:
    """Compare the boson oracle with the Gaussian engine at one point.

    Returns the cutoff used, the truncation estimate and ``d<key>`` absolute
    differences for every criterion in :data:`AGREEMENT_KEYS` that applies.
    """
    cfg = build_config(ratio, couplings)
    ocfg, state = adaptive_cutoff(OracleConfig(cfg, "boson"), t)
    exact = measure_criteria(state)
    gauss = evaluate(cfg, [t])
    out = {"cutoff": float(ocfg.fock_cutoff), "truncation": exact["truncation"]}
    for key in AGREEMENT_KEYS:
        if key in gauss.series:
            out["d" + key] = abs(exact[key] - float(gauss[key][0]))
    return out


def dicke_discrepancies(
    ratio: float, couplings, t: float, atom_numbers=(4, 8, 16, 32)
) -> list[float]:
    """``|V_dicke(N_a) - V_gaussian|`` for each atom number."""
    cfg = build_config(ratio, couplings)
    v_gauss = float(evaluate(cfg, [t]).V[0])
    out = []
    for n_atoms in atom_numbers:
        ocfg = OracleConfig(cfg, "dicke", n_atoms=n_atoms)
        state = evolve(prepare_initial(ocfg), ocfg, t)
        out.append(abs(measure_criteria(state)["V"] - v_gauss))
    return out
