"""Physical configuration of the entangler and the dimensionless numbers derived from it.

A configuration fixes the probe/coupling Rabi-frequency ratio ``r`` and the
Raman couplings ``k_n`` of the ``N`` Stokes modes to the collective spin wave.
From ``r`` follow the mixing angle ``theta = arctan(r)`` and the bosonization
factor ``a = cos^2(theta) - sin^2(theta) = (1 - r^2) / (1 + r^2)``, which is the
commutator ``[S, S^dag]`` of the spin-wave operator.

Config files
------------
:func:`parse_config` reads a plain-text key/value format::

    # comments start with '#' or ';'
    pump_ratio = 0.05
    couplings  = 1.0, 0.5

    [physical]          # optional
    g23       = 1.0
    omega_m   = 2.0, 1.0    # one mixing Rabi frequency per Stokes mode
    n_atoms   = 4
    detuning  = 4.0, 4.0    # one detuning per Stokes mode

Keys are case-insensitive and either ``=`` or ``:`` separates key and value.
Keys above the first section header belong to the model. ``pump_ratio`` is
required. ``couplings`` may be omitted when a ``[physical]`` block is present;
the couplings are then the physical ones divided by ``|k_1|`` so that time is
measured in units of ``1/|k_1|``.
"""

from __future__ import annotations

import configparser
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ConfigurationError, DomainError

__all__ = [
    "ModelConfig",
    "PhysicalCoupling",
    "build_config",
    "coupling_from_physical",
    "boson_factor",
    "parse_config",
    "load_config",
    "ConfigFile",
    "SPEED_OF_LIGHT_CM_S",
    "unit_time_seconds",
]

SPEED_OF_LIGHT_CM_S = 2.99792458e10

#: |Omega_m / Delta| above which adiabatic elimination is questionable.
ADIABATIC_RATIO_LIMIT = 0.1


def boson_factor(pump_ratio: float) -> float:
    """Return ``a = (1 - r^2) / (1 + r^2)``."""
    r2 = pump_ratio * pump_ratio
    return (1.0 - r2) / (1.0 + r2)


@dataclass(frozen=True)
class ModelConfig:
    """Immutable model configuration.

    Only ``pump_ratio`` and ``couplings`` are stored; ``theta`` and
    ``boson_factor`` are derived on access so they can never disagree with
    the ratio.
    """

    pump_ratio: float
    couplings: tuple[float, ...]

    @property
    def n_stokes(self) -> int:
        return len(self.couplings)

    @property
    def theta(self) -> float:
        return math.atan(self.pump_ratio)

    @property
    def boson_factor(self) -> float:
        return boson_factor(self.pump_ratio)

    @property
    def cos2(self) -> float:
        """``cos^2(theta) = 1 / (1 + r^2)``."""
        return 1.0 / (1.0 + self.pump_ratio**2)

    @property
    def sin2(self) -> float:
        """``sin^2(theta) = r^2 / (1 + r^2)``."""
        r2 = self.pump_ratio**2
        return r2 / (1.0 + r2)

    @property
    def beta(self) -> float:
        """Collective gain rate ``sqrt(a * sum k_n^2)``."""
        return math.sqrt(self.boson_factor * sum(k * k for k in self.couplings))

    def with_couplings(self, couplings: Sequence[float]) -> "ModelConfig":
        return build_config(self.pump_ratio, couplings)

    def to_dict(self) -> dict:
        return {"pump_ratio": self.pump_ratio, "couplings": list(self.couplings)}


def build_config(pump_ratio: float, couplings: Sequence[float]) -> ModelConfig:
    """Validate the inputs and return a :class:`ModelConfig`.

    Raises
    ------
    DomainError
        If ``pump_ratio`` is negative, not finite, or ``>= 1`` (the spin wave
        is then not bosonizable since ``a <= 0``).
    ConfigurationError
        If ``couplings`` is empty or contains non-finite values.
    """
    try:
        r = float(pump_ratio)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"invalid ratio {pump_ratio!r}") from exc
    if not math.isfinite(r) or r < 0.0 or r >= 1.0:
        raise DomainError(
            f"spin wave not bosonizable / invalid ratio: pump_ratio={pump_ratio!r} "
            "must satisfy 0 <= r < 1"
        )
    ks = tuple(float(k) for k in couplings)
    if not ks:
        raise ConfigurationError("at least one Stokes coupling is required")
    if not all(math.isfinite(k) for k in ks):
        raise ConfigurationError(f"couplings must be finite, got {ks}")
    return ModelConfig(r, ks)


@dataclass(frozen=True)
class PhysicalCoupling:
    """Raman coupling of one Stokes mode in laboratory units.

    ``omega_m`` and ``detuning`` share frequency units; ``g23`` carries the
    unit of the resulting coupling (e.g. cm^-1 when quoted as a spatial rate).
    """

    g23: float
    omega_m: float
    n_atoms: int
    detuning: float
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not isinstance(self.n_atoms, int) or self.n_atoms < 1:
            raise ConfigurationError(f"n_atoms must be a positive integer, got {self.n_atoms!r}")
        if self.detuning == 0:
            raise DomainError("detuning must be nonzero (adiabatic elimination needs off-resonance)")
        msgs = []
        if abs(self.omega_m / self.detuning) > ADIABATIC_RATIO_LIMIT:
            msgs.append(
                f"|omega_m/detuning| = {abs(self.omega_m / self.detuning):.3g} > "
                f"{ADIABATIC_RATIO_LIMIT}: adiabatic elimination is marginal"
            )
        object.__setattr__(self, "warnings", tuple(msgs))

    @property
    def adiabatic(self) -> bool:
        return not self.warnings


def coupling_from_physical(p: PhysicalCoupling) -> float:
    """Raman coupling ``k = g23 * omega_m * sqrt(N_a) / detuning``."""
    if p.detuning == 0:
        raise DomainError("division by zero detuning")
    return p.g23 * p.omega_m * math.sqrt(p.n_atoms) / p.detuning


def unit_time_seconds(k_per_cm: float) -> float:
    """Time at which ``k t = 1`` for a coupling quoted as a spatial rate (cm^-1).

    A rate of 1 cm^-1 corresponds to about 33 ps.
    """
    if k_per_cm == 0:
        raise DomainError("zero coupling never reaches k t = 1")
    return 1.0 / (abs(k_per_cm) * SPEED_OF_LIGHT_CM_S)


@dataclass(frozen=True)
class ConfigFile:
    """Parsed config file: the model plus the optional physical block."""

    config: ModelConfig
    physical: tuple[PhysicalCoupling, ...] = ()

    @property
    def physical_couplings(self) -> tuple[float, ...]:
        return tuple(coupling_from_physical(p) for p in self.physical)


def _floats(text: str, key: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"{key}: expected comma-separated numbers, got {text!r}") from exc


def parse_config(text: str) -> ConfigFile:
    """Parse the key/value grammar described in the module docstring."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string("[model]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from exc

    unknown = set(parser.sections()) - {"model", "physical"}
    if unknown:
        raise ConfigurationError(f"unknown section(s): {sorted(unknown)}")
    model = parser["model"]
    extra = set(model) - {"pump_ratio", "couplings"}
    if extra:
        raise ConfigurationError(f"unknown key(s) in model block: {sorted(extra)}")
    if "pump_ratio" not in model:
        raise ConfigurationError("pump_ratio is required")
    try:
        ratio = float(model["pump_ratio"])
    except ValueError as exc:
        raise ConfigurationError(f"pump_ratio: not a number: {model['pump_ratio']!r}") from exc

    physical: tuple[PhysicalCoupling, ...] = ()
    if parser.has_section("physical"):
        ph = parser["physical"]
        missing = {"g23", "omega_m", "n_atoms", "detuning"} - set(ph)
        if missing:
            raise ConfigurationError(f"physical block missing: {sorted(missing)}")
        omegas = _floats(ph["omega_m"], "omega_m")
        detunings = _floats(ph["detuning"], "detuning")
        if len(omegas) != len(detunings):
            raise ConfigurationError("omega_m and detuning must list one value per Stokes mode")
        try:
            g23 = float(ph["g23"])
            n_atoms = int(ph["n_atoms"])
        except ValueError as exc:
            raise ConfigurationError(f"physical block: {exc}") from exc
        physical = tuple(
            PhysicalCoupling(g23, om, n_atoms, det) for om, det in zip(omegas, detunings)
        )
        for p in physical:
            for msg in p.warnings:
                warnings.warn(msg, stacklevel=2)

    if "couplings" in model:
        ks = _floats(model["couplings"], "couplings")
    elif physical:
        raw = [coupling_from_physical(p) for p in physical]
        if raw[0] == 0:
            raise ConfigurationError("cannot normalize couplings: k_1 = 0")
        ks = [k / abs(raw[0]) for k in raw]
    else:
        raise ConfigurationError("either couplings or a [physical] block is required")

    return ConfigFile(build_config(ratio, ks), physical)


def load_config(path: str | Path) -> ConfigFile:
    return parse_config(Path(path).read_text())
