"""Command-line entry points: compile, counts, verify, synthesize, targets.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
All randomness in a command flows from the single --seed flag, split
deterministically per consumer with a SeedSequence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from .algebra import build_srbb, check_basis_properties
from .circuit import Circuit, to_json_dict, to_qasm, unitary_of
from .compiler import gate_counts, count_from_circuit, naive_circuit, synthesize_circuit
from .targets import named_target, random_su, target_names
from .varopt import TrainConfig, train


@dataclass
class RunManifest:
    """Everything needed to regenerate a command's outputs."""

    command: str
    n: int
    target: str | None
    cfg: dict
    seed: int | None
    outputs: tuple[str, ...]

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["outputs"] = list(self.outputs)
        return d


def _matrix_to_json(u: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in u]


def _matrix_from_json(doc) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in doc])


def cmd_compile(args) -> int:
    if args.n < 2:
        print("error: n must be >= 2", file=sys.stderr)
        return 2
    if args.naive:
        if args.n < 3:
            print("error: the naive layout needs n >= 3", file=sys.stderr)
            return 2
        circuit = naive_circuit(args.n)
    else:
        circuit = synthesize_circuit(args.n, layers=args.layers)
    tally = count_from_circuit(circuit)
    if args.qasm:
        with open(args.qasm, "w") as fh:
            fh.write(to_qasm(circuit))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(to_json_dict(circuit), fh)
    print(f"n_cnot={tally.n_cnot} n_rot={tally.n_rot}")
    return 0


def cmd_counts(args) -> int:
    if args.n < 2:
        print("error: n must be >= 2", file=sys.stderr)
        return 2
    print(json.dumps(gate_counts(args.n).to_json_dict()))
    return 0


def _verify_basis(n: int) -> dict:
    report = check_basis_properties(build_srbb(n))
    return {
        "pass": report.all_pass,
        "failures": list(report.failures),
        "max_deviation": dict(report.max_deviation),
    }


def _verify_counts(n: int) -> dict:
    formula = gate_counts(n)
    tally = count_from_circuit(synthesize_circuit(n))
    ok = (formula.n_cnot, formula.n_rot) == (tally.n_cnot, tally.n_rot)
    out = {
        "pass": ok,
        "formula": formula.to_json_dict(),
        "tally": {"n_cnot": tally.n_cnot, "n_rot": tally.n_rot},
    }
    if n >= 3:
        naive = count_from_circuit(naive_circuit(n))
        red_ok = naive.n_cnot - formula.n_cnot == formula.cnot_reduction
        out["naive_cnot"] = naive.n_cnot
        out["pass"] = ok and red_ok
    return out


def _verify_equivalence(n: int, seed: int, draws: int = 5) -> dict:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    reduced = synthesize_circuit(n)
    worst = 0.0
    if n == 2:
        # no naive layout below n=3: check the zero-angle identity and
        # unitarity of random-angle instances instead
        zero = unitary_of(reduced)
        worst = float(np.linalg.norm(zero - np.eye(4)))
        for _ in range(draws):
            vals = {p: rng.uniform(-np.pi, np.pi) for p in reduced.free_parameters}
            u = unitary_of(reduced, vals)
            worst = max(worst, float(np.linalg.norm(u.conj().T @ u - np.eye(4))))
    else:
        naive = naive_circuit(n)
        for _ in range(draws):
            vals = {p: rng.uniform(-np.pi, np.pi) for p in reduced.free_parameters}
            d = float(np.linalg.norm(unitary_of(reduced, vals) - unitary_of(naive, vals)))
            worst = max(worst, d)
    return {"pass": worst < 1e-10, "max_frobenius": worst, "draws": draws}


def cmd_verify(args) -> int:
    if args.n < 2:
        print("error: n must be >= 2", file=sys.stderr)
        return 2
    if args.suite in ("equivalence", "all") and args.n > 5:
        print("error: equivalence suite is limited to n <= 5", file=sys.stderr)
        return 2
    suites = {}
    if args.suite in ("basis", "all"):
        suites["basis"] = _verify_basis(args.n)
    if args.suite in ("counts", "all"):
        suites["counts"] = _verify_counts(args.n)
    if args.suite in ("equivalence", "all"):
        suites["equivalence"] = _verify_equivalence(args.n, args.seed)
    ok = all(s["pass"] for s in suites.values())
    print(json.dumps({"n": args.n, "pass": ok, "suites": suites}, indent=2))
    return 0 if ok else 1


def _load_target(ref: str, n: int, seed: int) -> np.ndarray:
    if ref.startswith("file:"):
        path = ref[5:]
        with open(path) as fh:
            u = _matrix_from_json(json.load(fh))
        d = 2**n
        if u.shape != (d, d):
            raise ValueError(f"matrix in {path} is {u.shape}, expected {d}x{d}")
        if np.linalg.norm(u.conj().T @ u - np.eye(d)) > 1e-8:
            raise ValueError(f"matrix in {path} is not unitary")
        return u
    if ref.lower() == "random-su":
        return random_su(n, seed).unitary
    return named_target(ref, n).unitary


def cmd_synthesize(args) -> int:
    if args.n < 2:
        print("error: n must be >= 2", file=sys.stderr)
        return 2
    # one user-facing seed, split per consumer
    target_seed, train_seed = (int(s) for s in
                               np.random.SeedSequence(args.seed).generate_state(2))
    try:
        target = _load_target(args.target, args.n, target_seed)
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    cfg = TrainConfig(
        loss=args.loss,
        optimizer="nm" if args.optimizer in ("nm", "nelder_mead") else args.optimizer,
        seed=train_seed,
        dataset_size=args.dataset_size,
        batch=args.batch,
        lr=args.lr,
        epochs=args.epochs,
        max_iter=args.max_iter,
        tol=args.tol,
        restarts=args.restarts,
        target_loss=args.target_loss,
    )
    report = train(args.n, target, cfg)
    outputs = []
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json(indent=2))
        outputs.append(args.out)
        manifest = RunManifest(
            command="synthesize", n=args.n, target=args.target,
            cfg={k: v for k, v in asdict(cfg).items()},
            seed=args.seed, outputs=tuple(outputs),
        )
        with open(args.out + ".manifest.json", "w") as fh:
            json.dump(manifest.to_json_dict(), fh, indent=2)
    print(" ".join(f"{k}={v:.6e}" for k, v in report.final_loss.items()))
    return 0


def cmd_targets(args) -> int:
    if args.action == "list":
        for name, n in target_names(args.n):
            print(f"{n} {name}")
        return 0
    # emit
    try:
        spec = named_target(args.name, args.target_n)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    doc = _matrix_to_json(spec.unitary)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh)
    else:
        print(json.dumps(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="srbb",
        description="Recursive block basis circuits: compile, verify, train.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="emit the layer circuit and its gate counts")
    c.add_argument("-n", type=int, required=True)
    c.add_argument("--layers", type=int, default=1)
    c.add_argument("--naive", action="store_true",
                   help="emit the unsimplified layout instead")
    c.add_argument("--qasm", metavar="PATH", help="write OpenQASM 2.0")
    c.add_argument("--json", metavar="PATH", help="write circuit JSON")
    c.set_defaults(func=cmd_compile)

    k = sub.add_parser("counts", help="closed-form gate counts as JSON")
    k.add_argument("-n", type=int, required=True)
    k.set_defaults(func=cmd_counts)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("-n", type=int, required=True)
    v.add_argument("--suite", choices=("basis", "equivalence", "counts", "all"),
                   default="all")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("synthesize", help="train the circuit against a target")
    s.add_argument("target", help="registry name, random-su, or file:PATH")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--loss", choices=("frobenius", "trace", "fidelity"),
                   default="frobenius")
    s.add_argument("--optimizer", choices=("nm", "nelder_mead", "adam"),
                   default="nm")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", metavar="PATH", help="write the training report JSON")
    s.add_argument("--dataset-size", type=int, default=1000)
    s.add_argument("--batch", type=int, default=64)
    s.add_argument("--lr", type=float, default=0.01)
    s.add_argument("--epochs", type=int, default=20)
    s.add_argument("--max-iter", type=int, default=None)
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--restarts", type=int, default=8)
    s.add_argument("--target-loss", type=float, default=1e-8)
    s.set_defaults(func=cmd_synthesize)

    t = sub.add_parser("targets", help="list registry targets or emit one as JSON")
    tsub = t.add_subparsers(dest="action", required=True)
    tl = tsub.add_parser("list")
    tl.add_argument("-n", type=int, default=None)
    tl.set_defaults(func=cmd_targets, action="list")
    te = tsub.add_parser("emit")
    te.add_argument("name")
    te.add_argument("target_n", type=int)
    te.add_argument("--out", metavar="PATH")
    te.set_defaults(func=cmd_targets, action="emit")

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
