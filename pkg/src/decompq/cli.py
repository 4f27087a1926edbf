"""Command-line front end.

Exit codes: 0 success, 1 invariant violation, 2 I/O failure, 3 infeasible
entropy-reduction request, 64 usage error, 65 unparsable input file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import coherent, randsphere, special
from .ensembles import (ClassicalJointState, Partition, TradeoffPoint, analyze,
                        induced_ensemble, qubit_fixture)
from .errors import InfeasibleError, ValidationError
from .optimizer import DEFAULT_EPSILON, optimal_exhaustive, optimal_greedy

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_IO = 2
EXIT_INFEASIBLE = 3
EXIT_USAGE = 64
EXIT_DATAERR = 65

CSV_HEADER = "param,delta_h_bits,info_bits"
PUBLISHED_H1 = 0.81


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_ANGLE_RE = re.compile(r"^\s*([0-9.]*)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


def angle(text: str) -> float:
    """Parse a float or a multiple of pi such as ``pi/2`` or ``0.5pi``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE_RE.match(text.lower())
    if not m:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    coef = float(m.group(1)) if m.group(1) else 1.0
    div = float(m.group(2)) if m.group(2) else 1.0
    return coef * math.pi / div


# --- ensemble files -----------------------------------------------------------

def _complex_array(obj) -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if a.ndim == 1:
        return a.astype(complex)
    if a.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def parse_ensemble(doc) -> ClassicalJointState:
    """Build a joint state from the JSON ensemble document.

    ``{"d_sys": D, "branches": [{"weight": w, "state": S}, ...]}`` where S is
    a ket (list of reals, or list of [re, im] pairs) or a density matrix
    (list of rows of [re, im] pairs).
    """
    if not isinstance(doc, dict) or "branches" not in doc:
        raise ValueError("ensemble document needs a 'branches' list")
    d_sys = doc.get("d_sys")
    branches = []
    for k, br in enumerate(doc["branches"]):
        try:
            w = float(br["weight"])
            raw = np.asarray(br["state"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"branch {k + 1}: {exc}") from None
        state = _complex_array(raw)
        if d_sys is not None and state.shape[0] != d_sys:
            raise ValueError(f"branch {k + 1}: dimension {state.shape[0]} != d_sys {d_sys}")
        branches.append((w, state))
    return ClassicalJointState.from_branches(branches)


def load_ensemble_file(path) -> ClassicalJointState:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return parse_ensemble(doc)


def _pairs(a: np.ndarray):
    return np.stack([a.real, a.imag], axis=-1).tolist()


def ensemble_document(joint: ClassicalJointState) -> dict:
    if joint.is_pure:
        states = [_pairs(k) for k in joint.kets]
    else:
        states = [_pairs(r) for r in joint.densities]
    return {
        "d_sys": joint.d_sys,
        "branches": [{"weight": float(w), "state": s} for w, s in zip(joint.weights, states)],
    }


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".decompq-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_ensemble_file(joint: ClassicalJointState, path):
    doc = ensemble_document(joint)
    rows = ",\n".join("  " + json.dumps(br) for br in doc["branches"])
    _atomic_write(path, f'{{"d_sys": {doc["d_sys"]}, "branches": [\n{rows}\n]}}\n')


# --- curves -------------------------------------------------------------------

def format_curve(points) -> str:
    lines = [CSV_HEADER]
    for pt in points:
        lines.append(f"{pt.param:.12g},{pt.deltaHbar:.12g},{pt.info:.12g}")
    return "\n".join(lines) + "\n"


def read_curve(path) -> list:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        return [TradeoffPoint(*(float(x) for x in line.split(","))) for line in fh if line.strip()]


def _grid(hi: float, lo: float, steps: int) -> list:
    if steps == 1:
        return [hi]
    return [float(x) for x in np.linspace(hi, lo, steps)]


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out, text)


def cmd_curve_randsphere(args) -> int:
    if not (0.0 < args.phi_min < args.phi_max <= math.pi / 2) or args.steps < 1 or args.dim < 2:
        raise UsageError("need 0 < phi-min < phi-max <= pi/2, steps >= 1 and dim >= 2")
    points = randsphere.tradeoff_curve(args.dim, _grid(args.phi_max, args.phi_min, args.steps))
    _emit(format_curve(points), args.out)
    return EXIT_OK


def cmd_curve_coherent(args) -> int:
    if not (0.0 < args.theta_min < args.theta_max <= math.pi) or args.steps < 1:
        raise UsageError("need 0 < theta-min < theta-max <= pi and steps >= 1")
    try:
        coherent.two_j(args.j)
    except ValidationError as exc:
        raise UsageError(str(exc)) from None
    grid = _grid(args.theta_max, args.theta_min, args.steps)
    # the hemisphere grouping is the reference point of this curve; keep it exact
    if args.theta_min < math.pi / 2 < args.theta_max and math.pi / 2 not in grid:
        grid = sorted(grid + [math.pi / 2], reverse=True)
    points = coherent.tradeoff_curve_coherent(args.j, grid)
    _emit(format_curve(points), args.out)
    return EXIT_OK


# --- reports ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _print_report(title, ens, rep, out):
    print(title, file=out)
    print("  p_r   = " + "  ".join(_fmt(p) for p in ens.probs), file=out)
    print("  H_r   = " + "  ".join(_fmt(h) for h in rep.H_r), file=out)
    print(f"  H = {_fmt(rep.H)}  H_bar = {_fmt(rep.Hbar)}  "
          f"delta_H_bar = {_fmt(rep.deltaHbar)}  I_bar = {_fmt(rep.Ibar)}", file=out)


def cmd_example_qubit(args, out=None) -> int:
    out = out or sys.stdout
    joint = qubit_fixture()
    print("Qubit example: |0>, |1>, |+>, |-> with weight 1/4 on orthogonal environment labels", file=out)
    print(f"  reduced state entropy H = {_fmt(analyze(induced_ensemble(joint, Partition.trivial(4))).H)} bits",
          file=out)
    singles = induced_ensemble(joint, Partition.singletons(4))
    _print_report("Singleton measurement E_r = P_r (pure members):", singles, analyze(singles), out)
    paired = induced_ensemble(joint, Partition(4, ((0, 2), (1, 3))))
    rep = analyze(paired)
    _print_report("Paired measurement E_1 = P_1 + P_3, E_2 = P_2 + P_4:", paired, rep, out)
    h1 = rep.H_r[0]
    h_sq = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
    print(f"  DISCREPANCY: computed H_1 = {_fmt(h1)} (eigenvalues (1 +- 1/sqrt2)/2) differs from the "
          f"quoted H_1 ~ {PUBLISHED_H1:.2f}; {h_sq:.4f} is the binary entropy of 3/4, i.e. of the "
          f"squared overlap rather than the spectrum.", file=out)
    print(f"  with the computed H_1, delta_H_bar = {_fmt(rep.deltaHbar)} instead of ~0.19", file=out)
    return EXIT_OK


def cmd_decompose(args, out=None) -> int:
    out = out or sys.stdout
    try:
        joint = load_ensemble_file(args.path)
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ValidationError) as exc:
        print(f"error: cannot parse {args.path}: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    if args.delta_h < 0:
        raise UsageError("delta-h must be non-negative")
    try:
        if args.mode == "exhaustive":
            if joint.n_env > 13:
                raise UsageError("exhaustive mode supports at most 13 branches; use --mode greedy")
            res = optimal_exhaustive(joint, args.delta_h, args.epsilon)
        else:
            if not joint.is_pure:
                raise UsageError("greedy mode needs pure-state branches")
            res = optimal_greedy(joint, args.delta_h, args.target_groups, args.seed)
    except InfeasibleError as exc:
        print(f"infeasible: requested delta_H = {_fmt(exc.requested)} bits; "
              f"max achievable delta_H_bar = {_fmt(exc.max_delta_h)} bits", file=out)
        return EXIT_INFEASIBLE
    rep = res.report
    print(f"partition (1-based branch labels): {res.partition}", file=out)
    print(f"groups = {len(res.partition)}", file=out)
    print(f"I_bar = {_fmt(rep.Ibar)} bits", file=out)
    print(f"delta_H_bar = {_fmt(rep.deltaHbar)} bits (requested {_fmt(args.delta_h)})", file=out)
    print(f"H = {_fmt(rep.H)}  H_bar = {_fmt(rep.Hbar)}", file=out)
    print(f"optimality: {res.optimal}", file=out)
    return EXIT_OK


# --- verification suite -------------------------------------------------------

VERIFY_THETAS = (0.1, 0.5, 1.0, math.pi / 3, math.pi / 2, 2.0, 2.8, math.pi)


def verification_suite(j_max):
    """Run the cap-spectrum identities up to spin ``j_max``.

    Yields ``(name, ok, detail)`` triples, one per identity family.
    """
    tj_max = int(round(2 * j_max))

    worst = 0.0
    for tj in range(1, min(tj_max, 20) + 1):
        for th in VERIFY_THETAS:
            lams = coherent.cap_eigenvalues(tj / 2, th).lambdas
            for p in range(tj + 1):
                ref = (2.0 / math.sin(0.5 * th) ** 2 * math.comb(tj, p)
                       * special.lambda_quadrature(p, tj - p, th))
                worst = max(worst, abs(lams[p] / ref - 1.0))
    yield ("oracle equivalence (hypergeometric vs quadrature, j <= 10)", worst <= 1e-9,
           f"max relative error {worst:.2e}")

    worst = 0.0
    for p in range(13):
        for q in range(13):
            for th in (0.3, 1.0, math.pi / 2, 2.5):
                lhs = special.lambda_quadrature(p, q, th) + special.lambda_quadrature(q, p, math.pi - th)
                worst = max(worst, abs(lhs - special.lambda_full(p, q)))
    yield ("reflection identity (p, q <= 12)", worst <= 1e-12, f"max abs error {worst:.2e}")

    worst_pair = worst_rec = 0.0
    for tj in range(1, tj_max + 1):
        lam = coherent.hemisphere_eigenvalues(tj / 2).lambdas
        n = tj + 1
        worst_pair = max(worst_pair, float(np.max(np.abs(lam + lam[::-1] - 2.0 / n))))
        worst_rec = max(worst_rec, float(np.max(np.abs(0.5 * lam + 0.5 * lam[::-1] - 1.0 / n))))
    yield ("hemisphere pairing lambda_m + lambda_-m = 2/(2j+1)", worst_pair <= 1e-12,
           f"max abs error {worst_pair:.2e}")
    yield ("two-hemisphere reconstruction of I/D", worst_rec <= 1e-12, f"max abs error {worst_rec:.2e}")

    worst = 0.0
    for a in range(3, 31):
        for b in range(2, a):
            al = special.gauss_alpha(a, b)
            lhs = special.hyp_at_minus_one(a, b)
            rhs = al * special.hyp_at_minus_one(a, b - 1) + special.gauss_beta(a, b)
            worst = max(worst, abs(lhs - rhs))
    yield ("Gauss contiguous recurrence (a <= 30)", worst <= 1e-10, f"max abs error {worst:.2e}")

    bad, vacuous = [], []
    for j in range(2, int(j_max) + 1):
        rep = coherent.chernoff_bounds_check(j)
        if rep.vacuous:
            vacuous.append(j)
        bad.extend(f"j={j} m={c.m:g}: {c.value:.3e} not in [{c.lower:.3e}, {c.upper:.3e}]"
                   for c in rep.violations)
    detail = f"{len(bad)} violations"
    if vacuous:
        detail += f"; index ranges empty (vacuously satisfied) for j in {vacuous}"
    yield ("Chernoff tail bounds", not bad, detail + ("".join("\n      " + b for b in bad)))

    worst = 0.0
    for tj in range(1, tj_max + 1):
        for th in VERIFY_THETAS:
            worst = max(worst, abs(math.fsum(coherent.cap_eigenvalues(tj / 2, th).lambdas) - 1.0))
    yield ("cap spectrum normalization", worst <= 1e-10, f"max |sum - 1| {worst:.2e}")


def cmd_verify(args, out=None) -> int:
    out = out or sys.stdout
    if not 0.5 <= args.j_max <= 60:
        raise UsageError("j-max must lie in [0.5, 60]")
    failures = 0
    for name, ok, detail in verification_suite(args.j_max):
        failures += not ok
        print(f"[{'ok' if ok else 'FAIL'}] {name}: {detail}", file=out)
    if args.j_max >= 50:
        hb = coherent.cap_entropy(50, math.pi / 2)
        print(f"H_bar(j=50, Theta=pi/2) = {hb:.6f} bits; |H_bar - log2 50| = {abs(hb - math.log2(50)):.6f}",
              file=out)
    print("all identities hold" if not failures else f"{failures} identity families violated", file=out)
    return EXIT_OK if not failures else EXIT_VIOLATION


# --- entry point --------------------------------------------------------------

def _seed_default():
    env = os.environ.get("DECOMPQ_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"DECOMPQ_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="decompq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("example-qubit", help="worked qubit example with both decompositions")

    p = sub.add_parser("curve-randsphere", help="information vs entropy reduction for random states")
    p.add_argument("--dim", type=int, default=101)
    p.add_argument("--phi-min", type=angle, default=0.3)
    p.add_argument("--phi-max", type=angle, default=math.pi / 2)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out")

    p = sub.add_parser("curve-coherent", help="information vs entropy reduction for coherent states")
    p.add_argument("--j", type=float, default=50.0)
    p.add_argument("--theta-min", type=angle, default=0.05)
    p.add_argument("--theta-max", type=angle, default=math.pi)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out")

    p = sub.add_parser("decompose", help="optimal grouping for an ensemble file")
    p.add_argument("path")
    p.add_argument("--delta-h", type=float, required=True)
    p.add_argument("--mode", choices=("exhaustive", "greedy"), default="exhaustive")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--target-groups", type=int, default=2)

    p = sub.add_parser("verify", help="check the cap-spectrum identities and bounds")
    p.add_argument("--j-max", "--j", dest="j_max", type=float, default=10.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "example-qubit": cmd_example_qubit,
        "curve-randsphere": cmd_curve_randsphere,
        "curve-coherent": cmd_curve_coherent,
        "decompose": cmd_decompose,
        "verify": cmd_verify,
    }
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _seed_default()
        return handlers[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"decompq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"decompq: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
