"""Cross-checks of the crystal, label and spectral cactus actions, and report output."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .cactus import CactusWord, all_generators, relation_instances
from .crystal import (
    CrystalError,
    bracketing_label,
    cactus_act,
    closed_form_swap,
    commutor,
    elements,
    highest_elements,
)
from .hives import HiveError, act_in_shape, cactus_act_labels, occurrence_set, psi_rule, realize_word
from .trees import Tree, leaves_from_weights, left_comb, parse_tree, strip_labels, to_nested
from .transport import DEFAULT_GRID, DEFAULT_TOL, NumericRule, PossibleCrossing

SCHEMA = 1
VERIFY_MODES = ("crystal", "hives", "spectral-numeric")
EXIT_OK, EXIT_UNCERTIFIED, EXIT_DISAGREE, EXIT_USAGE = 0, 2, 3, 4
MAX_N, MAX_WEIGHT = 4, 3

PRODUCERS = {
    "crystal": "crystal-core.cactus_act + crystal-core.bracketing_label",
    "hives": "hive-labels.cactus_act_labels",
    "spectral-numeric": "spectral-transport.NumericRule via hive-labels.cactus_act_labels",
}

RELATION_PRODUCERS = {
    "crystal": "crystal-core.cactus_act",
    "hives": "hive-labels.act_in_shape",
    "spectral-numeric": "spectral-transport.NumericRule via hive-labels.act_in_shape",
}


class UsageError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    weights: tuple[int, ...]
    nu: object = "all"
    word: Optional[CactusWord] = None
    relations: bool = False
    mode: str = "all"
    tol: float = DEFAULT_TOL
    grid: int = DEFAULT_GRID
    out: Optional[str] = None
    curves: Optional[str] = None
    tree: Optional[str] = None
    commutor: str = "normative"
    large: bool = False
    timing: bool = False
    jobs: int = 1

    def __post_init__(self):
        self.weights = tuple(int(w) for w in self.weights)
        if not self.weights or any(w < 0 for w in self.weights):
            raise UsageError("weights must be a nonempty list of nonnegative integers")
        if self.word is not None and self.word.n != len(self.weights):
            raise UsageError(f"word acts on {self.word.n} factors but {len(self.weights)} weights were given")
        if self.nu != "all":
            self.nu = int(self.nu)
        if self.mode not in VERIFY_MODES + ("all",):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.commutor not in ("normative", "closed-form"):
            raise UsageError(f"unknown commutor {self.commutor!r}")
        if not self.large and (len(self.weights) > MAX_N or max(self.weights) > MAX_WEIGHT):
            raise UsageError(f"instance exceeds n <= {MAX_N}, weights <= {MAX_WEIGHT}; pass --large to run it anyway")
        if self.tol <= 0 or self.grid < 1:
            raise UsageError("tolerance and grid must be positive")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def modes(self) -> tuple[str, ...]:
        return VERIFY_MODES if self.mode == "all" else (self.mode,)

    def start_tree(self) -> Tree:
        if self.tree:
            return parse_tree(self.tree, self.weights)
        return left_comb(leaves_from_weights(self.weights))

    def nus(self) -> list[int]:
        if self.nu != "all":
            return [self.nu]
        total = sum(self.weights)
        return list(range(total % 2, total + 1, 2))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weights"] = list(self.weights)
        d["word"] = self.word.pairs() if self.word is not None else None
        for k in ("out", "curves", "timing", "jobs"):
            d.pop(k)
        return d


@dataclass
class Instance:
    key: str
    kind: str
    word: list
    nu: Optional[int]
    maps: dict = field(default_factory=dict)
    agreement: bool = True
    certificates: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    diff: list = field(default_factory=list)
    uncertified: bool = False
    seconds: Optional[float] = None

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "key": self.key,
            "kind": self.kind,
            "word": self.word,
            "nu": self.nu,
            "maps": self.maps,
            "agreement": self.agreement,
            "certificates": self.certificates,
            "errors": self.errors,
        }
        if self.diff:
            d["diff"] = self.diff
        if timing:
            d["seconds"] = self.seconds
        return d


@dataclass
class VerificationReport:
    command: str
    config: dict
    instances: list[Instance]
    timing: bool = False

    @property
    def agreement(self) -> bool:
        return all(i.agreement for i in self.instances)

    @property
    def certified(self) -> bool:
        return not any(i.uncertified for i in self.instances)

    def exit_code(self) -> int:
        if not self.agreement:
            return EXIT_DISAGREE
        if not self.certified:
            return EXIT_UNCERTIFIED
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "summary": {
                "instances": len(self.instances),
                "agreement": self.agreement,
                "certified": self.certified,
                "exit_code": self.exit_code(),
            },
            "instances": [i.to_dict(self.timing) for i in self.instances],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _compare(inst: Instance, order: Sequence[str]):
    """Set agreement and a per-source diff from the collected maps."""
    present = [m for m in order if m in inst.maps]
    if inst.errors:
        inst.agreement = not any(e["class"] == "disagreement" for e in inst.errors) and inst.agreement
    if len(present) < 2:
        return
    ref = inst.maps[present[0]]["map"]
    for m in present[1:]:
        other = inst.maps[m]["map"]
        for src in sorted(set(ref) | set(other)):
            if ref.get(src) != other.get(src):
                inst.agreement = False
                inst.diff.append({"source": src, present[0]: ref.get(src), m: other.get(src)})


def _record_error(inst: Instance, mode: str, exc: Exception):
    if isinstance(exc, PossibleCrossing):
        inst.uncertified = True
        inst.errors.append({"mode": mode, "class": "uncertified", "message": str(exc)})
    else:
        inst.agreement = False
        inst.errors.append({"mode": mode, "class": "disagreement", "message": f"{type(exc).__name__}: {exc}"})


def _etingof_instance(cfg: ExperimentConfig, w: CactusWord, nu: int) -> Instance:
    t0 = time.perf_counter()
    tree = strip_labels(cfg.start_tree())
    inst = Instance(f"etingof {w} nu={nu}", "etingof", w.pairs(), nu)
    swap_rule = closed_form_swap if cfg.commutor == "closed-form" else commutor
    highest = list(highest_elements(_tree_weights(tree), nu))
    end_tree, _ = realize_word(w, tree)
    starts = [bracketing_label(b, tree) for b in highest]
    for mode in cfg.modes:
        try:
            if mode == "crystal":
                mp = {}
                for b, s in zip(highest, starts):
                    try:
                        mp[str(s)] = str(bracketing_label(cactus_act(w, b, swap_rule), end_tree))
                    except CrystalError as exc:
                        # keep going so the diff shows every affected element
                        mp[str(s)] = f"error: {exc}"
                        inst.agreement = False
                        if len(cfg.modes) == 1:
                            inst.diff.append({"source": str(s), "crystal": mp[str(s)]})
            else:
                rule = psi_rule if mode == "hives" else NumericRule(cfg.tol, cfg.grid)
                mp = {str(s): str(cactus_act_labels(w, s, rule)) for s in starts}
                if mode == "spectral-numeric":
                    for r in rule.reports:
                        inst.certificates.append({"producer": "spectral-transport.pencil_track", **r.to_dict()})
            inst.maps[mode] = {"producer": PRODUCERS[mode], "map": mp}
        except (CrystalError, HiveError, ValueError) as exc:
            _record_error(inst, mode, exc)
    inst.certificates.sort(key=lambda c: json.dumps(c, sort_keys=True))
    _compare(inst, VERIFY_MODES)
    inst.seconds = time.perf_counter() - t0
    return inst


def _tree_weights(tree: Tree) -> tuple[int, ...]:
    return tuple(leaf.weight for leaf in tree.leaves())


def _relation_instance(cfg: ExperimentConfig, pair: tuple[CactusWord, CactusWord]) -> Instance:
    t0 = time.perf_counter()
    w1, w2 = pair
    inst = Instance(f"relation {w1} = {w2}", "relation", [w1.pairs(), w2.pairs()], None)
    swap_rule = closed_form_swap if cfg.commutor == "closed-form" else commutor
    tree = strip_labels(cfg.start_tree())
    for mode in cfg.modes:
        mismatches = []
        checked = 0
        try:
            if mode == "crystal":
                for b in elements(cfg.weights):
                    checked += 1
                    r1, r2 = cactus_act(w1, b, swap_rule), cactus_act(w2, b, swap_rule)
                    if r1 != r2:
                        mismatches.append({"source": str(b), "lhs": str(r1), "rhs": str(r2)})
            else:
                rule = psi_rule if mode == "hives" else NumericRule(cfg.tol, cfg.grid)
                for nu in cfg.nus():
                    for s in occurrence_set(tree, nu):
                        checked += 1
                        r1, r2 = act_in_shape(w1, s, rule), act_in_shape(w2, s, rule)
                        if r1.key() != r2.key():
                            mismatches.append({"source": str(s), "lhs": str(r1), "rhs": str(r2)})
                if mode == "spectral-numeric":
                    for r in rule.reports:
                        inst.certificates.append({"producer": "spectral-transport.pencil_track", **r.to_dict()})
            producer = RELATION_PRODUCERS[mode]
            inst.maps[mode] = {"producer": producer, "checked": checked, "mismatches": len(mismatches)}
            if mismatches:
                inst.agreement = False
                inst.diff.extend({"mode": mode, **m} for m in mismatches)
        except (CrystalError, HiveError, ValueError) as exc:
            _record_error(inst, mode, exc)
    inst.certificates.sort(key=lambda c: json.dumps(c, sort_keys=True))
    inst.seconds = time.perf_counter() - t0
    return inst


def _run_one(args):
    kind, cfg, payload = args
    if kind == "etingof":
        return _etingof_instance(cfg, *payload)
    return _relation_instance(cfg, payload)


def run_verification(cfg: ExperimentConfig) -> VerificationReport:
    """Run the relation sweep or the three-way agreement check described by ``cfg``."""
    if cfg.relations:
        tasks = [("relations", cfg, pair) for pair in relation_instances(cfg.n)]
        command = "verify relations"
    else:
        words = [cfg.word] if cfg.word is not None else [CactusWord(cfg.n, (g,)) for g in all_generators(cfg.n)]
        tasks = []
        for w in words:
            for nu in cfg.nus():
                if highest_elements(_tree_weights(cfg.start_tree()), nu).elements:
                    tasks.append(("etingof", cfg, (w, nu)))
        command = "verify etingof"
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            instances = list(pool.map(_run_one, tasks))
    else:
        instances = [_run_one(t) for t in tasks]
    instances.sort(key=lambda i: i.key)
    return VerificationReport(command, cfg.to_dict(), instances, cfg.timing)


def emit(report: VerificationReport, out: Optional[str] = None, curves: Optional[str] = None, curves_csv: Optional[str] = None) -> int:
    """Write the JSON report (and optional CSV curves); return the exit code."""
    text = report.to_json()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    if curves and curves_csv is not None:
        with open(curves, "w") as fh:
            fh.write(curves_csv)
    return report.exit_code()


def tree_json(tree: Tree) -> str:
    return json.dumps(to_nested(tree))
