"""Command-line front end.

    sl2cactus verify etingof --weights 1,1,1 --word "[[1,3]]" --mode all
    sl2cactus verify relations --weights 2,2,2
    sl2cactus crystal act|highest ...
    sl2cactus hives labels|act ...
    sl2cactus gaudin spectrum|eigenbasis|simplicity ...
    sl2cactus transport edge|loop ...

Exit codes: 0 success, 2 numeric certification failure, 3 disagreement,
4 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .cactus import CactusError, CactusWord, pure_loop_n3
from .crystal import CrystalElem, CrystalError, cactus_act, closed_form_swap, commutor, highest_elements
from .gaudin import GaudinError, bracketing_eigenbasis, casimir_value, check_simple_spectrum, hamiltonians_on_singular
from .hives import HiveError, cactus_act_labels, occurrence_set, realize_word
from .linalg import frac_str
from .transport import MODES, PossibleCrossing, TransportError, edge_transport, loop_monodromy, numeric_edge_blocks, rp1_loop
from .trees import Move, TreeError, apply_shape_move, leaves_from_weights, left_comb, parse_tree, strip_labels
from .verify import (
    EXIT_DISAGREE,
    EXIT_OK,
    EXIT_UNCERTIFIED,
    EXIT_USAGE,
    MAX_N,
    MAX_WEIGHT,
    SCHEMA,
    ExperimentConfig,
    UsageError,
    emit,
    run_verification,
)

# flags whose values may also come from a --config JSON file
CONFIG_KEYS = ("weights", "nu", "word", "mode", "out", "curves", "tol", "grid", "tree", "commutor", "large", "timing", "jobs", "z", "coords", "path", "direction", "loop")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _ints(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    return [int(x) for x in str(text).replace(" ", "").split(",") if x != ""]


def _fracs(text) -> list[Fraction]:
    if isinstance(text, (list, tuple)):
        return [Fraction(str(x)) for x in text]
    return [Fraction(x) for x in str(text).replace(" ", "").split(",") if x != ""]


def _word(text, n: int) -> Optional[CactusWord]:
    if text is None:
        return None
    pairs = json.loads(text) if isinstance(text, str) else text
    if isinstance(pairs, dict):
        return CactusWord.from_json(pairs)
    return CactusWord.from_pairs(n, pairs)


def _common(p: argparse.ArgumentParser, nu=True, word=False, mode=None):
    p.add_argument("--config", help="JSON file with default values for any flag")
    p.add_argument("--weights", help="comma separated highest weights, e.g. 1,1,1")
    if nu:
        p.add_argument("--nu", help="top weight, or 'all'")
    if word:
        p.add_argument("--word", help='cactus word as JSON pairs, e.g. "[[1,3],[1,2]]"')
    if mode:
        p.add_argument("--mode", choices=mode)
    p.add_argument("--tree", help="bracketing as nested JSON leaf indices, e.g. [[1,2],3]")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--tol", type=float)
    p.add_argument("--grid", type=int)
    p.add_argument("--large", action="store_true", default=None, help=f"allow n > {MAX_N} or weights > {MAX_WEIGHT}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sl2cactus", description="Cactus group actions on sl2 crystals, labels and Gaudin spectra.")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    verify = sub.add_parser("verify").add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("etingof", "relations"):
        p = verify.add_parser(name)
        _common(p, word=name == "etingof", mode=("crystal", "hives", "spectral-numeric", "all"))
        p.add_argument("--commutor", choices=("normative", "closed-form"), help="closed-form is a diagnostic")
        p.add_argument("--curves", help="CSV file for the pencil eigenvalue curves")
        p.add_argument("--timing", action="store_true", default=None, help="include per-instance timings")
        p.add_argument("--jobs", type=int, help="worker processes")

    crystal = sub.add_parser("crystal").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = crystal.add_parser("act")
    _common(p, nu=False, word=True)
    p.add_argument("--coords", help="comma separated coordinates of the element")
    p.add_argument("--commutor", choices=("normative", "closed-form"))
    p = crystal.add_parser("highest")
    _common(p)

    hives = sub.add_parser("hives").add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(hives.add_parser("labels"))
    _common(hives.add_parser("act"), word=True)

    gaudin = sub.add_parser("gaudin").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = gaudin.add_parser("spectrum")
    _common(p)
    p.add_argument("--z", help="comma separated distinct rationals")
    _common(gaudin.add_parser("eigenbasis"))
    p = gaudin.add_parser("simplicity")
    _common(p)
    p.add_argument("--z", help="comma separated distinct rationals")

    transport = sub.add_parser("transport").add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = transport.add_parser("edge")
    _common(p, mode=MODES + ("all",))
    p.add_argument("--path", help="vertex path of the rotation (L/R steps, empty for the root)")
    p.add_argument("--direction", choices=("right", "left"))
    p.add_argument("--curves", help="CSV file for the pencil eigenvalue curves")
    p = transport.add_parser("loop")
    _common(p, word=True, mode=MODES + ("all",))
    p.add_argument("--loop", choices=("rp1", "word"), help="rp1: the projective line loop for n=3")
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    values = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        values.update({k: v for k, v in data.items() if k in CONFIG_KEYS})
    for k in CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    return values


def _check_caps(weights: Sequence[int], large: bool):
    if not large and (len(weights) > MAX_N or max(weights) > MAX_WEIGHT):
        raise UsageError(f"instance exceeds n <= {MAX_N}, weights <= {MAX_WEIGHT}; pass --large to run it anyway")


def _tree(values: dict, weights):
    if values.get("tree"):
        t = values["tree"]
        return parse_tree(t if isinstance(t, str) else json.dumps(t), weights)
    return left_comb(leaves_from_weights(weights))


def _nu(values: dict, weights) -> list[int]:
    nu = values.get("nu", "all")
    if nu == "all" or nu is None:
        total = sum(weights)
        return list(range(total % 2, total + 1, 2))
    return [int(nu)]


def _write(payload: dict, out: Optional[str]):
    text = json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_verify(args, values) -> int:
    if "weights" not in values:
        raise UsageError("--weights is required")
    weights = _ints(values["weights"])
    cfg = ExperimentConfig(
        weights=tuple(weights),
        nu=values.get("nu", "all"),
        word=_word(values.get("word"), len(weights)),
        relations=args.command == "relations",
        mode=values.get("mode", "all"),
        tol=float(values.get("tol", 1e-8)),
        grid=int(values.get("grid", 1024)),
        out=values.get("out"),
        curves=values.get("curves"),
        tree=json.dumps(values["tree"]) if isinstance(values.get("tree"), list) else values.get("tree"),
        commutor=values.get("commutor", "normative"),
        large=bool(values.get("large", False)),
        timing=bool(values.get("timing", False)),
        jobs=int(values.get("jobs", 1)),
    )
    report = run_verification(cfg)
    curves_csv = None
    if cfg.curves:
        curves_csv = _verify_curves(cfg)
    code = emit(report, cfg.out, cfg.curves, curves_csv)
    if not cfg.out:
        sys.stdout.write(report.to_json())
    return code


def _verify_curves(cfg: ExperimentConfig) -> str:
    """Curves of the first rotation in the realisation of each requested word."""
    tree = strip_labels(cfg.start_tree())
    words = [cfg.word] if cfg.word is not None else []
    lines = []
    for w in words:
        cur = tree
        _, moves = realize_word(w, tree)
        for m in moves:
            if m.kind == "rotate":
                for nu in cfg.nus():
                    for blk in numeric_edge_blocks(cur, m, nu, cfg.tol, cfg.grid):
                        lines.append(f"# move={m} nu={nu} sources={[str(s) for s in blk.sources]}\n")
                        lines.append(blk.report.curves_csv())
            cur = apply_shape_move(cur, m)
    return "".join(lines)


def _run_crystal(args, values) -> int:
    weights = _ints(values["weights"])
    _check_caps(weights, bool(values.get("large")))
    if args.command == "highest":
        out = [highest_elements(weights, nu).to_dict() for nu in _nu(values, weights)]
        _write({"command": "crystal highest", "producer": "crystal-core.highest_elements", "results": out}, values.get("out"))
        return EXIT_OK
    if "coords" not in values:
        raise UsageError("--coords is required")
    b = CrystalElem(tuple(weights), tuple(_ints(values["coords"])))
    w = _word(values.get("word", "[]"), len(weights))
    rule = closed_form_swap if values.get("commutor") == "closed-form" else commutor
    r = cactus_act(w, b, rule)
    _write(
        {"command": "crystal act", "producer": "crystal-core.cactus_act", "word": w.pairs(), "input": b.to_dict(), "result": r.to_dict()},
        values.get("out"),
    )
    return EXIT_OK


def _run_hives(args, values) -> int:
    weights = _ints(values["weights"])
    _check_caps(weights, bool(values.get("large")))
    tree = _tree(values, weights)
    results = []
    for nu in _nu(values, weights):
        states = occurrence_set(tree, nu)
        if args.command == "labels":
            results.append({"nu": nu, "states": [s.to_dict(weights) for s in states]})
        else:
            w = _word(values.get("word", "[]"), len(weights))
            results.append({"nu": nu, "map": {str(s): str(cactus_act_labels(w, s)) for s in states}})
    _write({"command": f"hives {args.command}", "producer": "hive-labels.occurrence_set" if args.command == "labels" else "hive-labels.cactus_act_labels", "results": results}, values.get("out"))
    return EXIT_OK


def _run_gaudin(args, values) -> int:
    import numpy as np

    weights = _ints(values["weights"])
    _check_caps(weights, bool(values.get("large")))
    results = []
    if args.command == "eigenbasis":
        tree = _tree(values, weights)
        for nu in _nu(values, weights):
            for vec, state in bracketing_eigenbasis(tree, nu):
                results.append(
                    {
                        "state": state.to_dict(weights),
                        "casimir_eigenvalues": {p or "root": frac_str(casimir_value(mu)) for p, mu in sorted(state.labels.items())},
                        "vector": {",".join(map(str, k)): frac_str(c) for k, c in sorted(vec.items())},
                    }
                )
        _write({"command": "gaudin eigenbasis", "producer": "gaudin-exact.bracketing_eigenbasis", "results": results}, values.get("out"))
        return EXIT_OK
    if "z" not in values:
        raise UsageError("--z is required")
    z = _fracs(values["z"])
    if len(z) != len(weights):
        raise UsageError("need one z per weight")
    if args.command == "simplicity":
        tol = float(values.get("tol", 1e-8))
        reports = [check_simple_spectrum(z, weights, nu, tol).to_dict() for nu in _nu(values, weights)]
        _write({"command": "gaudin simplicity", "producer": "gaudin-exact.check_simple_spectrum", "results": reports}, values.get("out"))
        return EXIT_OK if all(r["certified"] for r in reports) else EXIT_UNCERTIFIED
    for nu in _nu(values, weights):
        sing, ops = hamiltonians_on_singular(z, weights, nu)
        entry = {"nu": nu, "dim": sing.dim, "singular_basis": [[frac_str(x) for x in v] for v in sing.basis], "hamiltonians": []}
        for i, op in enumerate(ops, 1):
            ev = np.linalg.eigvals(op.to_float()) if op.dim else np.array([])
            entry["hamiltonians"].append(
                {"site": i, "matrix": [[frac_str(x) for x in r] for r in op.rows], "eigenvalues": sorted(float(x.real) for x in ev)}
            )
        results.append(entry)
    _write({"command": "gaudin spectrum", "producer": "gaudin-exact.hamiltonian", "results": results}, values.get("out"))
    return EXIT_OK


def _run_transport(args, values) -> int:
    weights = _ints(values["weights"])
    _check_caps(weights, bool(values.get("large")))
    mode = values.get("mode", "all")
    modes = MODES if mode == "all" else (mode,)
    tol, grid = float(values.get("tol", 1e-8)), int(values.get("grid", 1024))
    results, agree, curves = [], True, []
    for nu in _nu(values, weights):
        maps, reports = {}, []
        for md in modes:
            if args.command == "edge":
                tree = _tree(values, weights)
                m = Move("rotate", values.get("path", ""), values.get("direction", "right"))
                lm = edge_transport(tree, m, nu, md, tol, grid)
            elif values.get("loop", "word") == "rp1":
                lm = rp1_loop(weights, nu, md, tol, grid)
            else:
                w = _word(values.get("word"), len(weights)) if values.get("word") else pure_loop_n3()
                lm = loop_monodromy(w, weights, nu, md, _tree(values, weights), tol, grid)
            maps[md] = lm.to_dict()
            reports.extend(r.to_dict() for r in lm.reports)
            curves.extend(r.curves_csv() for r in lm.reports)
        same = len({json.dumps(m, sort_keys=True) for m in maps.values()}) <= 1
        agree = agree and same
        results.append({"nu": nu, "maps": maps, "agreement": same, "certificates": reports})
    if values.get("curves"):
        with open(values["curves"], "w") as fh:
            fh.write("".join(curves))
    _write({"command": f"transport {args.command}", "producer": f"spectral-transport.{'edge_transport' if args.command == 'edge' else 'loop_monodromy'}", "results": results}, values.get("out"))
    return EXIT_OK if agree else EXIT_DISAGREE


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        values = _merge_config(args)
        if args.group != "verify" and "weights" not in values:
            raise UsageError("--weights is required")
        handler = {"verify": _run_verify, "crystal": _run_crystal, "hives": _run_hives, "gaudin": _run_gaudin, "transport": _run_transport}[args.group]
        return handler(args, values)
    except PossibleCrossing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNCERTIFIED
    except (UsageError, CactusError, CrystalError, HiveError, GaudinError, TransportError, TreeError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
