"""``heqvpe`` command-line interface.

Exit codes: 0 success, 1 usage, 2 bad input (missing/malformed files, shape
or photon-number errors, capacity limits), 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, plotting
from .errors import HeqvpeError, NumericError
from .integrals import BUNDLED, bundled_path, load_integrals
from .jw import PauliSum, qubit_hamiltonian
from .optimizers import OptimizerConfig
from .photonic import (
    check_unitary,
    fig1_unitary,
    format_fock,
    matrix_from_json,
    permanent,
    transition_distribution,
    unitary_to_json,
)
from .vqe import AnsatzSpec, ground_truth, run_vqe

log = logging.getLogger("heqvpe")

EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
CSV_SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    out: Path | None = None
    verbosity: int = 0
    options: dict = field(default_factory=dict)


def _read_json(path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise FileNotFoundError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None


def _write_json(path, data):
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _parse_fock(text):
    try:
        occ = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"--input must be comma-separated integers, got {text!r}") from None
    if any(k < 0 for k in occ):
        raise ValueError("occupation numbers must be non-negative")
    return occ


def cmd_ham_build(cfg: RunConfig) -> int:
    src = cfg.options["integrals"] or bundled_path(cfg.options["bundled"])
    mi = load_integrals(src)
    ham = qubit_hamiltonian(mi)
    _write_json(cfg.out, ham.to_json())
    print(f"terms: {len(ham)}")
    print(f"E0: {ground_truth(ham).energy!r}")
    return 0


def _load_hamiltonian(path) -> PauliSum:
    data = _read_json(path)
    try:
        return PauliSum.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: not a PauliSum JSON ({exc})") from None


def _write_trace(out: Path, trace):
    n_theta = len(trace.theta_opt)
    with open(out / "trace.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "energy", "fidelity"] + [f"theta_{i}" for i in range(n_theta)])
        for rec in trace.records:
            w.writerow([rec.iteration, repr(rec.energy), repr(rec.fidelity)] + [repr(float(t)) for t in rec.theta])
    with open(out / "histogram.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count"])
        edges = trace.histogram_edges
        for lo, hi, c in zip(edges[:-1], edges[1:], trace.histogram_counts):
            w.writerow([repr(float(lo)), repr(float(hi)), int(c)])


def cmd_vqe_run(cfg: RunConfig) -> int:
    o = cfg.options
    ham = _load_hamiltonian(o["ham"])
    ansatz = AnsatzSpec(kind=o["ansatz"], n_qubits=ham.n_qubits, layers=o["layers"])
    opt = OptimizerConfig(
        method=o["optimizer"], max_iterations=o["max_iter"], tolerance=o["tolerance"], seed=cfg.seed
    )
    trace = run_vqe(
        ham,
        ansatz,
        opt,
        shots=o["objective_shots"],
        seed=cfg.seed,
        histogram_shots=o["shots"],
        histogram_bins=o["bins"],
    )
    out = cfg.out
    out.mkdir(parents=True, exist_ok=True)
    _write_trace(out, trace)
    summary = {"schema_version": 1, "csv_schema_version": CSV_SCHEMA_VERSION, "hamiltonian": str(o["ham"])}
    summary.update(trace.summary())
    _write_json(out / "summary.json", summary)
    its = [r.iteration for r in trace.records]
    plotting.plot_convergence(its, [r.energy for r in trace.records], trace.e0, out / "convergence.svg")
    plotting.plot_histogram(trace.histogram_edges, trace.histogram_counts, out / "histogram.svg")
    plotting.plot_fidelity(its, [r.fidelity for r in trace.records], out / "fidelity.svg")
    print(f"E0: {trace.e0!r}")
    print(f"E*: {trace.energy_opt!r}")
    print(f"F*: {trace.fidelity_opt!r}")
    return 0


def cmd_photonic_dist(cfg: RunConfig) -> int:
    o = cfg.options
    inp = _parse_fock(o["input"])
    if o["from_fig1"]:
        u = fig1_unitary()
    else:
        u = matrix_from_json(_read_json(o["unitary"]))
        u = check_unitary(u)
    dist = transition_distribution(u, inp)
    rows = sorted(dist.items(), key=lambda kv: (-kv[1], kv[0]))
    out = Path(cfg.out)
    src = format_fock(inp)
    labels = []
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["input", "output", "probability"])
        for state, p in rows:
            w.writerow([src, format_fock(state), repr(p)])
            labels.append(f"|{src}>->|{format_fock(state)}>")
    plotting.plot_distribution(labels, [p for _, p in rows], out.with_suffix(".svg"))
    if o["from_fig1"] and o["save_unitary"]:
        _write_json(o["save_unitary"], unitary_to_json(u))
    print(f"states: {len(rows)}")
    print(f"total: {sum(dist.values())!r}")
    return 0


def cmd_perm(cfg: RunConfig) -> int:
    o = cfg.options
    a = matrix_from_json(_read_json(o["matrix"]))
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got {a.shape}")
    t0 = time.perf_counter()
    value = permanent(a, o["algo"])
    elapsed = time.perf_counter() - t0
    print(f"{value.real!r} {value.imag!r}")
    print(f"time_s: {elapsed:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="heqvpe", description="He VQE / photonic chip toolkit")
    p.add_argument("--version", action="version", version=f"heqvpe {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ham = sub.add_parser("ham", help="qubit Hamiltonians").add_subparsers(
        dest="action", required=True, parser_class=_Parser
    )
    hb = ham.add_parser("build", help="integrals -> JW PauliSum JSON")
    src = hb.add_mutually_exclusive_group(required=True)
    src.add_argument("--integrals", type=Path)
    src.add_argument("--bundled", choices=sorted(BUNDLED))
    hb.add_argument("--out", type=Path, required=True)

    vqe = sub.add_parser("vqe", help="variational eigensolver").add_subparsers(
        dest="action", required=True, parser_class=_Parser
    )
    vr = vqe.add_parser("run", help="optimize an ansatz and write traces/plots")
    vr.add_argument("--ham", type=Path, required=True)
    vr.add_argument("--ansatz", choices=["fig1", "layered"], default="layered")
    vr.add_argument("--layers", type=int, default=2)
    vr.add_argument("--optimizer", choices=["simplex", "spsa"], default="simplex")
    vr.add_argument("--shots", type=int, default=10_000, help="shots for the final histogram pass")
    vr.add_argument("--objective-shots", type=int, default=0, help="0 = exact expectation values")
    vr.add_argument("--max-iter", type=int, default=None)
    vr.add_argument("--tolerance", type=float, default=1e-8)
    vr.add_argument("--bins", type=int, default=40)
    vr.add_argument("--seed", type=int, default=0)
    vr.add_argument("--out", type=Path, required=True)

    ph = sub.add_parser("photonic", help="mode-level chip model").add_subparsers(
        dest="action", required=True, parser_class=_Parser
    )
    pd = ph.add_parser("dist", help="output Fock-state distribution")
    usrc = pd.add_mutually_exclusive_group(required=True)
    usrc.add_argument("--unitary", type=Path)
    usrc.add_argument("--from-fig1", action="store_true")
    pd.add_argument("--input", required=True, help="occupations, e.g. 0,0,0,3")
    pd.add_argument("--out", type=Path, required=True)
    pd.add_argument("--save-unitary", type=Path, default=None)

    pm = sub.add_parser("perm", help="matrix permanent")
    pm.add_argument("--matrix", type=Path, required=True)
    pm.add_argument("--algo", choices=["ryser", "naive"], default="ryser")
    return p


_HANDLERS = {
    ("ham", "build"): cmd_ham_build,
    ("vqe", "run"): cmd_vqe_run,
    ("photonic", "dist"): cmd_photonic_dist,
    ("perm", None): cmd_perm,
}


def _validate(args):
    checks = {
        "layers": lambda v: v >= 0,
        "shots": lambda v: v >= 1,
        "objective_shots": lambda v: v >= 0,
        "max_iter": lambda v: v is None or v >= 1,
        "tolerance": lambda v: v > 0,
        "bins": lambda v: v >= 1,
    }
    for name, ok in checks.items():
        if hasattr(args, name) and not ok(getattr(args, name)):
            raise UsageError(f"heqvpe: error: --{name.replace('_', '-')} out of range: {getattr(args, name)}")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _validate(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "action", "verbose", "seed", "out")}
    cfg = RunConfig(
        command=f"{args.command} {getattr(args, 'action', '')}".strip(),
        seed=getattr(args, "seed", 0),
        out=getattr(args, "out", None),
        verbosity=args.verbose,
        options=opts,
    )
    handler = _HANDLERS[(args.command, getattr(args, "action", None))]
    try:
        return handler(cfg)
    except NumericError as exc:
        print(f"heqvpe: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except HeqvpeError as exc:
        print(f"heqvpe: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"heqvpe: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError) as exc:
        print(f"heqvpe: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except np.linalg.LinAlgError as exc:
        print(f"heqvpe: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
