"""Command-line front end: sweeps, figure series and oracle cross-checks.

Every command writes one table.  CSV output has a ``t,<series...>`` header and
values printed with 9 significant digits; JSON output carries the full run
spec next to the data so ``spinwave-entangler replay out.json`` reproduces it.

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.  Nothing is
written when a run fails.

Time columns are in units of ``1/|k_1|`` (the normalized time ``k_1 t``).
``SPINWAVE_THREADS`` sets the number of worker threads used for sweeps;
output order never depends on it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .criteria import CriteriaReport, evaluate
from .errors import ConfigurationError, DomainError, EntanglerError, NumericalError
from .model import build_config, load_config
from .moments import SPIN_INITS
from .oracle import AGREEMENT_KEYS, AGREEMENT_POINTS, boson_agreement, dicke_discrepancies

__all__ = ["RunSpec", "Table", "compute", "run", "main", "FIG2_RATIOS", "FIG3_K2"]

COMMANDS = ("bipartite", "tripartite", "nmode", "fig2", "fig3", "oracle-check")
FIG2_RATIOS = (1 / 50, 1 / 20, 1 / 10, 1 / 5)
FIG3_K2 = (0.1, 0.5, 1.0, 10.0)
FIG3_RATIO = 1 / 20
ORACLE_TOL = 1e-5

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


@dataclass
class RunSpec:
    command: str
    pump_ratio: float = 0.05
    couplings: list[float] = field(default_factory=lambda: [1.0])
    tmax: float = 5.0
    steps: int = 501
    spin_init: str = "css"
    fmt: str = "csv"
    out: str | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}")
        if self.steps < 2:
            raise ConfigurationError("steps must be >= 2")
        if not (self.tmax > 0 and math.isfinite(self.tmax)):
            raise ConfigurationError("tmax must be a positive number")
        if self.spin_init not in SPIN_INITS:
            raise ConfigurationError(f"spin-init must be one of {SPIN_INITS}")
        if self.fmt not in ("csv", "json"):
            raise ConfigurationError("format must be csv or json")
        cfg = build_config(self.pump_ratio, self.couplings)
        if self.command == "bipartite" and cfg.n_stokes != 1:
            raise ConfigurationError("bipartite takes exactly one coupling")
        if self.command == "tripartite" and cfg.n_stokes != 2:
            raise ConfigurationError("tripartite takes exactly two couplings")
        if cfg.couplings[0] == 0 and self.command not in ("oracle-check",):
            raise ConfigurationError("k_1 must be nonzero: time is measured in units of 1/|k_1|")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunSpec":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.tmax, self.steps)


@dataclass
class Table:
    columns: list[str]
    data: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        n = len(self.data[self.columns[0]])
        for i in range(n):
            w.writerow([format(float(self.data[c][i]) + 0.0, ".9g") for c in self.columns])
        return buf.getvalue()

    def to_json(self, spec: RunSpec) -> str:
        payload = {
            "spec": spec.to_dict(),
            "metadata": self.metadata,
            "columns": self.columns,
            "data": {c: [float(v) for v in self.data[c]] for c in self.columns},
        }
        return json.dumps(payload, indent=1, sort_keys=True, allow_nan=True) + "\n"


def _report_table(report: CriteriaReport, keys, suffix: str = "") -> dict:
    return {k + suffix: report[k] for k in keys if k in report.series}


def _sweep(spec: RunSpec, ratio: float, couplings) -> CriteriaReport:
    cfg = build_config(ratio, couplings)
    return evaluate(cfg, spec.grid() / abs(cfg.couplings[0]), spec.spin_init)


def compute(spec: RunSpec) -> Table:
    """Evaluate a validated spec into a table (no I/O)."""
    spec.validate()
    meta = {"spin_init": spec.spin_init, "time_unit": "1/|k1|"}
    data: dict[str, np.ndarray] = {}

    if spec.command == "bipartite":
        rep = _sweep(spec, spec.pump_ratio, spec.couplings)
        data.update(V=rep.V)
    elif spec.command == "tripartite":
        rep = _sweep(spec, spec.pump_ratio, spec.couplings)
        data.update(_report_table(rep, ("V12", "V1s", "V2s", "g1", "g2", "gs", "V")))
        data["tripartite"] = rep.flags.tripartite.astype(float)
    elif spec.command == "nmode":
        rep = _sweep(spec, spec.pump_ratio, spec.couplings)
        keys = ["V"] + sorted(k for k in rep.series if k.startswith("duan_"))
        keys += ["V12", "V1s", "V2s", "g1", "g2", "gs"]
        data.update(_report_table(rep, keys))
    elif spec.command == "fig2":
        meta["ratios"] = list(FIG2_RATIOS)
        meta["couplings"] = [1.0]
        for r in FIG2_RATIOS:
            rep = _sweep(spec, r, [1.0])
            data[f"V_r{r:g}"] = rep.V
    elif spec.command == "fig3":
        meta["k2"] = list(FIG3_K2)
        meta["pump_ratio"] = FIG3_RATIO
        for k2 in FIG3_K2:
            rep = _sweep(spec, FIG3_RATIO, [1.0, k2])
            data.update(_report_table(rep, ("V12", "V1s", "V2s", "g1", "g2", "gs"), f"_k2_{k2:g}"))
    elif spec.command == "oracle-check":
        return _oracle_table()

    columns = ["t"] + list(data)
    data["t"] = spec.grid()
    return Table(columns, data, meta)


def _oracle_table() -> Table:
    rows = []
    for ratio, ks, t in AGREEMENT_POINTS:
        res = boson_agreement(ratio, ks, t)
        row = {"t": t, "ratio": ratio, "n_stokes": len(ks), "k1": ks[0],
               "k2": ks[1] if len(ks) > 1 else math.nan}
        row["cutoff"] = res["cutoff"]
        row["truncation"] = res["truncation"]
        for key in AGREEMENT_KEYS:
            row["d" + key] = res.get("d" + key, math.nan)
        rows.append(row)
    columns = list(rows[0])
    data = {c: np.array([r[c] for r in rows], dtype=float) for c in columns}
    dicke = dicke_discrepancies(0.0, [1.0], 0.5)
    meta = {
        "oracle": "boson",
        "tolerance": ORACLE_TOL,
        "dicke_atoms": [4, 8, 16, 32],
        "dicke_discrepancy": dicke,
    }
    return Table(columns, data, meta)


def _oracle_failures(table: Table) -> list[str]:
    bad = []
    for i in range(len(table.data["t"])):
        allowed = max(ORACLE_TOL, table.data["truncation"][i])
        for key in AGREEMENT_KEYS:
            d = table.data["d" + key][i]
            if not math.isnan(d) and d > allowed:
                bad.append(f"point {i}: |d{key}| = {d:.3e} > {allowed:.1e}")
    dk = table.metadata["dicke_discrepancy"]
    if not all(b < a for a, b in zip(dk, dk[1:])):
        bad.append(f"Dicke discrepancy not strictly decreasing: {dk}")
    return bad


def _write_svg(table: Table, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "spinwave-entangler"
    fig, ax = plt.subplots(figsize=(6, 4))
    t = table.data["t"]
    for c in table.columns[1:]:
        if c.startswith(("V", "duan_")):
            ax.plot(t, table.data[c], label=c, lw=1.2)
    ax.axhline(4.0, color="0.5", ls="--", lw=0.8)
    ax.set_xlabel("k1 t")
    ax.set_ylabel("correlation")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def run(spec: RunSpec, svg: str | None = None, stdout=None, stderr=None) -> int:
    """Run a spec and write its artifact; return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        table = compute(spec)
    except (DomainError, ConfigurationError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL

    status = EXIT_OK
    if spec.command == "oracle-check":
        for key in AGREEMENT_KEYS:
            col = table.data["d" + key]
            if not np.all(np.isnan(col)):
                print(f"max |d{key}| = {np.nanmax(col):.3e}", file=stderr)
        print(f"dicke |V - V_gauss| for N_a=4,8,16,32: {table.metadata['dicke_discrepancy']}",
              file=stderr)
        failures = _oracle_failures(table)
        for msg in failures:
            print(f"FAIL {msg}", file=stderr)
        status = EXIT_NUMERICAL if failures else EXIT_OK

    text = table.to_json(spec) if spec.fmt == "json" else table.to_csv()
    if spec.out:
        Path(spec.out).write_text(text)
    else:
        stdout.write(text)
    if svg:
        _write_svg(table, svg)
    return status


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spinwave-entangler",
        description="Entanglement of Stokes fields with a collective spin wave.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--ratio", type=float, help="probe/coupling Rabi ratio r (0 <= r < 1)")
        sp.add_argument("--k", type=_floats, help="couplings k1,k2,... (comma-separated)")
        sp.add_argument("--k2", type=float, help="second coupling (tripartite), k1 stays 1")
        sp.add_argument("--tmax", type=float, default=5.0)
        sp.add_argument("--steps", type=int, default=501)
        sp.add_argument("--spin-init", choices=SPIN_INITS, default="css")
        sp.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
        sp.add_argument("--out")
        sp.add_argument("--config", help="model config file")
        sp.add_argument("--svg", help="also write an SVG line chart")
    rp = sub.add_parser("replay", help="rerun the spec stored in a JSON output")
    rp.add_argument("json_file")
    rp.add_argument("--out")
    return p


def spec_from_args(args: argparse.Namespace) -> RunSpec:
    ratio, couplings = 0.05, None
    if args.config:
        cf = load_config(args.config)
        ratio, couplings = cf.config.pump_ratio, list(cf.config.couplings)
    if args.ratio is not None:
        ratio = args.ratio
    if args.k is not None:
        couplings = args.k
    if args.k2 is not None:
        couplings = [couplings[0] if couplings else 1.0, args.k2]
    if couplings is None:
        couplings = [1.0, 1.0] if args.command == "tripartite" else [1.0]
    return RunSpec(args.command, ratio, couplings, args.tmax, args.steps,
                   args.spin_init, args.fmt, args.out)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "replay":
            spec = RunSpec.from_dict(json.loads(Path(args.json_file).read_text())["spec"])
            spec.out = args.out
            return run(spec)
        return run(spec_from_args(args), svg=args.svg)
    except (EntanglerError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
