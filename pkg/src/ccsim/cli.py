"""Command-line entry point: ``ccsim <verb> ...``.

Every run writes a ``.manifest.json`` sidecar (next to ``--output`` when
given, otherwise ``ccsim-<verb>.manifest.json`` in the output directory,
which ``CCSIM_OUTPUT_DIR`` may override). Exit codes: 0 success, 1 a check
failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analysis, constructions as K, pauli, postselect as PS, serialize
from . import statevector as sv, weaksim as W
from .circuit import INPUT, Circuit, depth
from .errors import CircuitError, DomainError, ResourceError, UnconditionableError
from . import gates as G

OUTPUT_DIR_ENV = "CCSIM_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# -- helpers ---------------------------------------------------------------------

def _bits(text: str | None) -> tuple[int, ...]:
    if text is None or text == "":
        return ()
    if set(text) - {"0", "1"}:
        raise UsageError(f"not a bitstring: {text!r}")
    return tuple(int(c) for c in text)


def _ints(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(t) for t in text.split(",") if t.strip() != "")
    except ValueError:
        raise UsageError(f"not a comma-separated list of integers: {text!r}") from None


def _condition(text: str | None) -> dict[int, int]:
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        q, _, b = part.partition("=")
        try:
            out[int(q)] = int(b)
        except ValueError:
            raise UsageError(f"condition entries look like 3=0, got {part!r}") from None
    return out


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class Run:
    """Collects inputs and outputs of one invocation and writes its manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.argv = list(argv)
        self.start = time.perf_counter()
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        self.extra: dict = {}

    def out_dir(self) -> Path:
        d = Path(os.environ.get(OUTPUT_DIR_ENV) or getattr(self.args, "out_dir", None) or ".")
        d.mkdir(parents=True, exist_ok=True)
        return d

    def load_circuit(self, path) -> Circuit:
        self.inputs[str(path)] = _digest(path)
        return serialize.load(path)

    def load_distribution(self, path) -> sv.Distribution:
        self.inputs[str(path)] = _digest(path)
        return sv.load_distribution(path)

    def output_path(self, default_name: str) -> Path:
        given = getattr(self.args, "output", None)
        if given:
            p = Path(given)
            if not p.is_absolute() and os.environ.get(OUTPUT_DIR_ENV):
                p = self.out_dir() / p
            p.parent.mkdir(parents=True, exist_ok=True)
            return p
        return self.out_dir() / default_name

    def write_json(self, obj, path: Path):
        path.write_text(json.dumps(obj, indent=1, sort_keys=False) + "\n", encoding="utf-8")
        self.outputs.append(str(path))

    def write_circuit(self, c: Circuit, path: Path):
        serialize.dump(c, path)
        self.outputs.append(str(path))

    def manifest(self, verb: str, status: int) -> Path:
        if self.outputs:
            path = Path(self.outputs[0] + ".manifest.json") if not self.outputs[0].endswith(".json") \
                else Path(self.outputs[0][:-5] + ".manifest.json")
        else:
            path = self.out_dir() / f"ccsim-{verb}.manifest.json"
        args = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
        body = {
            "command": verb,
            "argv": self.argv,
            "arguments": args,
            "seed": getattr(self.args, "seed", None),
            "version": __version__,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "exit_code": status,
            "elapsed_s": round(time.perf_counter() - self.start, 6),
        }
        body.update(self.extra)
        path.write_text(json.dumps(body, indent=1, default=str) + "\n", encoding="utf-8")
        return path


def _emit(args, obj, text: str):
    print(json.dumps(obj, indent=1) if getattr(args, "json", False) else text)


# -- build -----------------------------------------------------------------------

def _build(run: Run, args) -> int:
    what = args.what
    extra: dict = {}
    if what == "or-reduction":
        c = (K.or_reduction_commuting(args.b) if args.variant == "commuting"
             else K.or_reduction_noncommuting(args.b))
    elif what == "fanout-or":
        dec = K.decompose_fanout_or(K.or_reduction_middle(args.b))
        c = dec.circuit
        extra = {"ancillas": list(dec.ancillas), "phase_gates": list(dec.phase_gates)}
    elif what == "example":
        c = K.small_example()
    else:
        src = args.input or args.a
        if not src:
            raise UsageError(f"build {what} needs --in/--a FILE")
        a = run.load_circuit(src)
        if what == "compress3":
            cc = K.compress_depth3(a, teleport_measured=not args.no_trailing)
            c = cc.circuit
            extra = {"teleport_qubits": list(cc.teleport_qubits),
                     "origin_map": {str(k): v for k, v in cc.origin_map.items()},
                     "layers": [list(layer) for layer in cc.layers], "b": cc.b}
        elif what == "en":
            c = K.build_En(a)
        elif what == "conjugate":
            c = K.build_commuting_En(a)
        elif what == "magic-compile":
            mc = K.magic_compile(a)
            c = mc.circuit
            extra = {"gadget_qubits": list(mc.gadget_qubits)}
        elif what == "en-prime":
            c = K.build_En_prime_fanout(a) if args.fanout else K.build_En_prime(a)
        else:  # pragma: no cover - argparse restricts choices
            raise UsageError(f"unknown build target {what}")
    path = run.output_path(f"{c.name or what}.json".replace("'", "p"))
    run.write_circuit(c, path)
    run.extra = {"circuit": {"n_qubits": c.n_qubits, "gates": len(c.gates), "depth": depth(c),
                             "roles": [r.kind for r in c.roles],
                             "outputs": list(c.outputs), "postselect": list(c.postselect)},
                 **extra}
    _emit(args, {"output": str(path), **run.extra},
          f"wrote {path} ({c.n_qubits} qubits, {len(c.gates)} gates, depth {depth(c)})")
    return 0


# -- simulate / strong-sim / weak-sim ----------------------------------------------

def _simulate(run: Run, args) -> int:
    c = run.load_circuit(args.circuit)
    x = _bits(args.x)
    qubits = _ints(args.qubits) or c.outputs or tuple(range(c.n_qubits))
    cond = _condition(args.condition)
    if cond:
        dist = sv.conditional_distribution(c, x, cond, qubits)
    else:
        dist = sv.output_distribution(c, x, qubits)
    if args.output:
        run.write_json(dist.to_json(), run.output_path("distribution.json"))
    _emit(args, dist.to_json(), dist.table(args.threshold))
    return 0


def _strong_sim(run: Run, args) -> int:
    c = run.load_circuit(args.circuit)
    x = _bits(args.x)
    qubits = _ints(args.qubits) or c.outputs
    if args.y is None:
        dist = pauli.strong_sim_distribution(c, x, qubits)
        if args.output:
            run.write_json(dist.to_json(), run.output_path("strong-sim.json"))
        _emit(args, dist.to_json(), dist.table())
        return 0
    res = pauli.strong_sim_marginal(c, x, qubits, args.y, audit=args.audit)
    if args.audit:
        obj = {"y": args.y, "qubits": list(qubits), "probability": res.probability,
               "terms": [{"subset": s, "value": v} for s, v in res.terms]}
        text = f"Pr[{args.y}] = {res.probability:.12f}\n" + "\n".join(
            f"  Z({s}) -> {v:+.12f}" for s, v in res.terms)
    else:
        obj = {"y": args.y, "qubits": list(qubits), "probability": res}
        text = f"Pr[{args.y}] = {res:.12f}"
    if args.output:
        run.write_json(obj, run.output_path("strong-sim.json"))
    _emit(args, obj, text)
    return 0


def _weak_sim(run: Run, args) -> int:
    f = run.load_circuit(args.f)
    d = run.load_circuit(args.d)
    spec = W.SandwichSpec(f, d, args.l)
    x = _bits(args.x)
    counts = W.weak_sample(spec, x, W.OracleFSampler(f), args.seed, args.shots, threads=args.threads)
    obj: dict = {"counts": dict(sorted(counts.items())), "shots": args.shots, "seed": args.seed,
                 "qubits": list(spec.ancillas)}
    lines = [f"{'outcome':<8} count"] + [f"{k:<8} {v}" for k, v in sorted(counts.items())]
    if args.exact:
        exact = W.sandwich_exact(spec, x)
        tv = sv.total_variation(sv.empirical(counts), exact)
        obj["exact"] = exact.to_json()["outcomes"]
        obj["tv"] = tv
        lines.append(f"TV vs exact = {tv:.6f}")
    if args.output:
        run.write_json(obj, run.output_path("weak-sim.json"))
    _emit(args, obj, "\n".join(lines))
    return 0


# -- check -------------------------------------------------------------------------

def _check(run: Run, args) -> int:
    c = run.load_circuit(args.input)
    if args.what == "commuting":
        rep = analysis.check_pairwise_commuting(c, tol=args.tol)
        text = (f"commuting: {'pass' if rep.ok else 'FAIL'} ({rep.pairs_checked} pairs, "
                f"max residual {rep.max_residual:.3e})")
        if not rep.ok:
            text += f"\n  witness gates {rep.witness}: residual {rep.witness_residual:.3e}"
    else:
        if args.c is None:
            raise UsageError("check locality needs --c N")
        rep = analysis.check_c_local(c, args.c, tol=args.tol)
        text = f"{args.c}-local: {'pass' if rep.ok else 'FAIL'} (max support {rep.max_size})"
        if not rep.ok:
            text += f"\n  gates over the bound: {rep.violations()}"
    if args.output:
        run.write_json(rep.to_json(), run.output_path(f"check-{args.what}.json"))
    _emit(args, rep.to_json(), text)
    return 0 if rep.ok else 1


# -- postselect ----------------------------------------------------------------------

def _postselect(run: Run, args) -> int:
    c = run.load_circuit(args.circuit)
    x = _bits(args.x)
    if args.sampler == "oracle":
        post, q_out = K.split_measured(c)
        sampler = W.OracleFSampler(c, tuple(post) + (q_out,))
    else:
        if not args.d or args.l is None:
            raise UsageError("--sampler weak-sim needs --d FILE and --l N (circuit is F)")
        spec = W.SandwichSpec(c, run.load_circuit(args.d), args.l)
        sampler = W.WeakSimSampler(spec, W.OracleFSampler(c))
    est = PS.conditional_acceptance(sampler, x, args.shots, args.seed, exact=args.exact,
                                    confidence=args.confidence)
    rep = PS.threshold_report(est, args.accept_at, args.reject_at)
    obj = rep.to_json()
    if isinstance(est, PS.NoPostselectionMass):
        text = "no postselection mass: Pr[out=1 | post=0] undefined"
    else:
        text = (f"Pr[out=1 | post=0] = {est.value:.6f}  "
                f"[{est.lower:.6f}, {est.upper:.6f}]  post=0 events: {est.post_zero:g}  "
                f"verdict: {rep.verdict}")
    if args.output:
        run.write_json(obj, run.output_path("postselect.json"))
    _emit(args, obj, text)
    return 0


# -- compare -----------------------------------------------------------------------

def _compare(run: Run, args) -> int:
    a = run.load_distribution(args.a)
    b = run.load_distribution(args.b)
    tv = sv.total_variation(a, b)
    mx = sv.max_abs_difference(a, b)
    ok = args.tol is None or mx <= args.tol
    obj = {"tv": tv, "max_abs": mx, "tol": args.tol, "pass": ok}
    if args.output:
        run.write_json(obj, run.output_path("compare.json"))
    _emit(args, obj, f"TV = {tv:.3e}  max|diff| = {mx:.3e}" + ("" if ok else "  FAIL"))
    return 0 if ok else 1


# -- demo ----------------------------------------------------------------------------

def random_small_circuit(rng: np.random.Generator, n: int = 2, n_gates: int = 2) -> Circuit:
    """Seeded toy C: H, T, CZ and CR gates on ``n`` inputs, output 0 and postselection 1."""
    gates = []
    for _ in range(n_gates):
        a, b = (int(v) for v in rng.choice(n, 2, replace=False))
        kind = int(rng.integers(4))
        gates.append([G.h(a), G.t(a), G.cz(a, b), G.cr(a, b, int(rng.integers(2, 4)))][kind])
    return Circuit(n, gates, (INPUT,) * n, outputs=(0,), postselect=(1,), name="C")


def en_pipeline(seed: int, tol: float = 1e-9) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    c = random_small_circuit(rng)
    cc = K.compress_depth3(c)
    a = cc.circuit
    e = K.build_En(a)
    com = K.build_commuting_En(a)
    rows = []
    d = depth(a)
    rows.append(("depth<=3", d <= 3, f"depth {d}, b={cc.b}, {a.n_qubits} qubits"))

    worst = 0.0
    for xi in range(1 << c.n_inputs):
        x = tuple(int(v) for v in format(xi, f"0{c.n_inputs}b"))
        want = sv.conditional_distribution(c, x, {c.postselect[0]: 0}, c.outputs,
                                           min_probability=1e-12) if _has_mass(c, x) else None
        cond = {q: 0 for q in a.postselect}
        if want is not None:
            got = sv.conditional_distribution(a, x, cond, a.outputs)
            worst = max(worst, sv.max_abs_difference(got, want))
    rows.append(("compression-match", worst <= tol, f"max diff {worst:.2e}"))

    rep = analysis.check_pairwise_commuting(com, tol=tol)
    rows.append(("commuting", rep.ok, f"max residual {rep.max_residual:.2e}"))
    loc = analysis.check_c_local(com, 5)
    rows.append(("locality<=5", loc.ok, f"max support {loc.max_size}"))

    lay = K.en_layout(a)
    worst_d = worst_id = 0.0
    target = "0" * lay.m + "1"
    for xi in range(1 << a.n_inputs):
        x = tuple(int(v) for v in format(xi, f"0{a.n_inputs}b"))
        de = sv.output_distribution(e, x, lay.outputs)
        dc = sv.output_distribution(com, x, lay.outputs)
        worst_d = max(worst_d, sv.max_abs_difference(de, dc))
        da = sv.output_distribution(a, x, tuple(lay.postselect) + (lay.q_out,))
        worst_id = max(worst_id, abs(de[target] - da["0" * (lay.b + 1) + "1"]))
    rows.append(("distribution-match", worst_d <= tol, f"max diff {worst_d:.2e}"))
    rows.append(("Pr[E=0^m1]=Pr[A=0^(b+1)1]", worst_id <= tol, f"max diff {worst_id:.2e}"))
    return rows


def _has_mass(c: Circuit, x) -> bool:
    st = sv.run(c, x)
    return sv.condition_probability(st, {c.postselect[0]: 0}) > 1e-12


def _demo(run: Run, args) -> int:
    rows = en_pipeline(args.seed)
    ok = all(r[1] for r in rows)
    width = max(len(r[0]) for r in rows)
    text = "\n".join(f"{name:<{width}}  {'pass' if good else 'FAIL'}  {note}"
                     for name, good, note in rows)
    obj = {"seed": args.seed, "pass": ok,
           "checks": [{"name": n, "pass": g, "detail": d} for n, g, d in rows]}
    if args.output:
        run.write_json(obj, run.output_path("demo-theorem1.json"))
    _emit(args, obj, text)
    return 0 if ok else 1


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", help="write the result here")
    common.add_argument("--out-dir", help=f"directory for outputs and manifests (env {OUTPUT_DIR_ENV} wins)")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("--threads", type=int, default=1, help="cap on internal parallelism")

    p = _Parser(prog="ccsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ccsim {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="construct a circuit family")
    b.add_argument("what", choices=["or-reduction", "compress3", "en", "conjugate", "magic-compile",
                                    "en-prime", "fanout-or", "example"])
    b.add_argument("--b", type=int, help="number of OR inputs")
    b.add_argument("--variant", choices=["plain", "commuting"], default="plain")
    b.add_argument("--in", dest="input", help="input circuit file")
    b.add_argument("--a", help="circuit A carrying postselection bookkeeping")
    b.add_argument("--no-trailing", action="store_true",
                   help="compress3: do not teleport after the last gate of measured wires")
    b.add_argument("--fanout", action="store_true", help="en-prime: use the fan-out decomposition")
    b.set_defaults(func=_build)

    s = sub.add_parser("simulate", parents=[common], help="statevector distribution")
    s.add_argument("--circuit", required=True)
    s.add_argument("--x", default="", help="input bits")
    s.add_argument("--qubits", help="comma-separated measured qubits (default: outputs)")
    s.add_argument("--condition", help="e.g. 3=0,4=0")
    s.add_argument("--threshold", type=float, default=0.0, help="hide rows at or below this")
    s.set_defaults(func=_simulate)

    st = sub.add_parser("strong-sim", parents=[common], help="Pauli-propagation probabilities")
    st.add_argument("--circuit", required=True)
    st.add_argument("--x", default="")
    st.add_argument("--qubits", help="measured subset (default: outputs)")
    st.add_argument("--y", help="outcome on the measured qubits; omit for the full table")
    st.add_argument("--audit", action="store_true", help="print the per-subset terms")
    st.set_defaults(func=_strong_sim)

    w = sub.add_parser("weak-sim", parents=[common], help="sample a sandwich circuit")
    w.add_argument("--f", required=True)
    w.add_argument("--d", required=True)
    w.add_argument("--l", type=int, required=True)
    w.add_argument("--x", default="")
    w.add_argument("--shots", type=int, default=10000)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--exact", action="store_true", help="also report TV against the exact value")
    w.set_defaults(func=_weak_sim)

    c = sub.add_parser("check", parents=[common], help="commutation and locality checks")
    c.add_argument("what", choices=["commuting", "locality"])
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--c", type=int)
    c.add_argument("--tol", type=float)
    c.set_defaults(func=_check)

    ps = sub.add_parser("postselect", parents=[common], help="conditional acceptance estimate")
    ps.add_argument("--sampler", choices=["oracle", "weak-sim"], default="oracle")
    ps.add_argument("--circuit", required=True)
    ps.add_argument("--d", help="weak-sim: diagonal part D")
    ps.add_argument("--l", type=int, help="weak-sim: ancilla count")
    ps.add_argument("--x", default="")
    ps.add_argument("--shots", type=int, default=10000)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--exact", action="store_true")
    ps.add_argument("--confidence", type=float, default=0.99)
    ps.add_argument("--accept-at", type=float, default=3 / 5)
    ps.add_argument("--reject-at", type=float, default=2 / 5)
    ps.set_defaults(func=_postselect)

    cm = sub.add_parser("compare", parents=[common], help="TV and max-entry delta of two distributions")
    cm.add_argument("a")
    cm.add_argument("b")
    cm.add_argument("--tol", type=float)
    cm.set_defaults(func=_compare)

    d = sub.add_parser("demo", parents=[common], help="end-to-end toy pipelines")
    d.add_argument("which", choices=["theorem1"])
    d.add_argument("--seed", type=int, default=7)
    d.set_defaults(func=_demo)
    return p


def _validate(args):
    if args.verb == "build" and args.what in ("or-reduction", "fanout-or"):
        if args.b is None or args.b < 1:
            raise UsageError(f"build {args.what} needs --b N with N >= 1")
    for name in ("shots", "threads"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            raise UsageError(f"--{name} must be >= 1")
    if getattr(args, "l", None) is not None and args.l < 0:
        raise UsageError("--l must be >= 0")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    run = Run(args, argv)
    try:
        status = args.func(run, args)
    except UsageError as exc:
        print(f"ccsim {args.verb}: {exc}", file=sys.stderr)
        status = 2
    except (CircuitError, DomainError, ResourceError, UnconditionableError, OSError,
            ValueError) as exc:
        print(f"ccsim {args.verb}: error: {exc}", file=sys.stderr)
        status = 2
    try:
        run.manifest(args.verb, status)
    except OSError as exc:
        print(f"ccsim: could not write manifest: {exc}", file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
