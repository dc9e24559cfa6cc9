"""Adaptive adversary that drives deterministic online algorithms towards
ratio 3.

The adversary grows chains ("T-sets") from a base vertex, stopping a chain
as soon as the algorithm selects its newest vertex, and it re-bases inside a
chain when that helps.  Lengths modulo 3 decide how cheaply an offline
solution can cover each chain, which is what pushes the ratio up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algorithms import make_algorithm
from .online import ContractViolation, OnlineAlgorithm, OnlineRun
from .opt import opt_size
from .tree import OnlineTree, is_dominating, undominated

T0, T1, T2, T3 = "T0", "T1", "T2", "T3"

# termination case -> label of the matching ratio argument
CASE_LABELS = {"3.2.2": "2-1", "3.3.1": "2-2", "3.4": "2-3", "3.1.2": "2-4", "3.3.2": "2-5"}


class AdversaryError(RuntimeError):
    """The run broke an invariant the construction relies on."""


@dataclass(frozen=True)
class AdversaryParams:
    max_length: int = 98
    max_t0: int = 100
    max_t1: int = 100

    def __post_init__(self) -> None:
        for name in ("max_length", "max_t0", "max_t1"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 2:
                raise ValueError(f"{name} must be an integer >= 2, got {value!r}")
        if self.max_length % 3 != 2:
            raise ValueError(f"max_length must be 2 mod 3, got {self.max_length}")

    @classmethod
    def at_level(cls, level: int) -> "AdversaryParams":
        """All three knobs near ``level``; the chain cap rounds down to 2 mod 3."""
        length = level - ((level - 2) % 3)
        return cls(max_length=length, max_t0=level, max_t1=level)

    @property
    def reveal_bound(self) -> int:
        return self.max_t1 * (self.max_t0 + 2) * (self.max_length + 2)


def kind_for_length(length: int, max_length: int) -> str:
    if length == max_length:
        return T3
    return (T0, T1, T2)[length % 3]


@dataclass(frozen=True)
class TSet:
    """A chain ``chain[0..]`` hanging from ``base`` plus an optional sibling
    of the last-but-one chain vertex.  ``chain[i - 1]`` is u_i."""

    base: int
    rank: int
    chain: tuple[int, ...]
    sibling: int | None
    kind: str

    @property
    def length(self) -> int:
        return len(self.chain)

    @property
    def members(self) -> frozenset[int]:
        out = set(self.chain)
        if self.sibling is not None:
            out.add(self.sibling)
        return frozenset(out)

    def off_pattern(self) -> list[int]:
        """Chain vertices the offline cover takes (the base is decided per base)."""
        ell = self.length
        if self.kind == T0:
            residue = 2
        elif self.kind == T1:
            residue = 0
        else:
            residue = 1
        return [self.chain[i - 1] for i in range(1, ell) if i % 3 == residue]

    def on_lower_bound(self, max_length: int) -> int:
        return max_length - 1 if self.kind == T3 else self.length

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "rank": self.rank,
            "kind": self.kind,
            "length": self.length,
            "chain": list(self.chain),
            "sibling": self.sibling,
        }


def off_cost_for_tset(tset: TSet, max_length: int | None = None) -> int:
    """Offline cost of one T-set; a T1-set's cost includes its base vertex."""
    ell, kind = tset.length, tset.kind
    if kind == T3:
        if max_length is not None and ell != max_length:
            raise ValueError(f"T3-set of length {ell} but the chain cap is {max_length}")
        if ell % 3 != 2:
            raise ValueError(f"T3-set length {ell} is not 2 mod 3")
        return (ell + 1) // 3
    expected = {T0: 0, T1: 1, T2: 2}[kind]
    if ell % 3 != expected or (max_length is not None and ell >= max_length):
        raise ValueError(f"{kind}-set cannot have length {ell}")
    if kind == T0:
        return ell // 3
    if kind == T1:
        return (ell + 2) // 3
    return (ell + 1) // 3


@dataclass
class AdversaryTranscript:
    algorithm: str
    params: AdversaryParams
    tree: OnlineTree
    bases: list[int]
    ledger: dict[int, list[TSet]]
    case: str
    on_cost: int
    on_selected: frozenset[int]
    off_witness: frozenset[int] = frozenset()
    off_repairs: tuple[int, ...] = ()
    steps: list[dict] = field(default_factory=list)

    @property
    def off_cost(self) -> int:
        return len(self.off_witness)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.on_cost, self.off_cost)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "params": vars(self.params),
            "case": self.case,
            "case_label": CASE_LABELS[self.case],
            "bases": self.bases,
            "ledger": {str(b): [t.to_dict() for t in ts] for b, ts in self.ledger.items()},
            "on_cost": self.on_cost,
            "off_cost": self.off_cost,
            "off_witness": sorted(self.off_witness),
            "off_repairs": list(self.off_repairs),
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "ratio_float": float(self.ratio),
            "parents": list(self.tree.parents),
        }


class _Driver:
    def __init__(self, alg: OnlineAlgorithm, params: AdversaryParams) -> None:
        self.run = OnlineRun(alg)
        self.params = params
        self.reveals = 0

    def reveal(self, parent: int) -> int:
        self.reveals += 1
        if self.reveals > self.params.reveal_bound:
            raise AdversaryError(f"exceeded the reveal bound {self.params.reveal_bound}")
        return self.run.reveal(parent)

    def selected(self, v: int) -> bool:
        return v in self.run.selected


def subtree_routine(driver: _Driver, base: int, rank: int) -> TSet:
    """Grow one chain from ``base`` until the algorithm takes its newest vertex."""
    if not driver.selected(base):
        raise AdversaryError(f"base vertex v{base} is not selected by the algorithm")
    ml = driver.params.max_length
    chain: list[int] = []
    prev = base
    sibling = None
    while len(chain) < ml:
        u = driver.reveal(prev)
        chain.append(u)
        if driver.selected(u):
            sibling = driver.reveal(prev)
            break
        prev = u
    return TSet(base, rank, tuple(chain), sibling, kind_for_length(len(chain), ml))


def tree_routine(alg: OnlineAlgorithm | str, params: AdversaryParams | None = None) -> AdversaryTranscript:
    if isinstance(alg, str):
        alg = make_algorithm(alg)
    params = params or AdversaryParams()
    driver = _Driver(alg, params)
    driver.reveal(0)
    base = 1
    bases = [1]
    ledger: dict[int, list[TSet]] = {1: []}
    steps: list[dict] = []
    count = 1
    case = ""
    while not case:
        cnt_t0 = cnt_t1 = 0
        while True:
            tset = subtree_routine(driver, base, len(ledger[base]) + 1)
            steps.append({"base": base, "kind": tset.kind, "length": tset.length})
            if tset.kind == T0:
                ledger[base].append(tset)
                cnt_t0 += 1
                if cnt_t0 == params.max_t0:
                    case = "3.1.2"
                    break
            elif tset.kind == T1:
                # the routine's listing also bumps the T0 counter here; it only
                # counts T1-sets, so we leave the T0 counter alone
                ledger[base].append(tset)
                if cnt_t1 == 0:
                    cnt_t1 = 1
                else:
                    case = "3.2.2"
                    break
            elif tset.kind == T2:
                if cnt_t1 == 0:
                    ledger[base].append(tset)
                    case = "3.3.1"
                    break
                head, new_base = tset.chain[0], tset.chain[1]
                short_sibling = tset.sibling if tset.length == 2 else None
                ledger[base].append(TSet(base, tset.rank, (head,), short_sibling, T1))
                rest_sibling = tset.sibling if tset.length > 2 else None
                ledger[new_base] = [TSet(new_base, 1, tset.chain[2:], rest_sibling, T0)]
                base = new_base
                bases.append(base)
                if count == params.max_t1:
                    case = "3.3.2"
                else:
                    count += 1
                break
            else:
                ledger[base].append(tset)
                case = "3.4"
                break
    for b in bases:
        if not driver.selected(b):
            raise AdversaryError(f"base vertex v{b} ended unselected")
    tree = driver.run.tree.freeze()
    transcript = AdversaryTranscript(
        algorithm=alg.name,
        params=params,
        tree=tree,
        bases=bases,
        ledger=ledger,
        case=case,
        on_cost=driver.run.trace.cost,
        on_selected=frozenset(driver.run.selected),
        steps=steps,
    )
    witness, repairs = off_witness(transcript)
    transcript.off_witness = witness
    transcript.off_repairs = tuple(repairs)
    return transcript


def base_selected_by_off(tsets: list[TSet]) -> bool:
    return any(t.kind == T1 for t in tsets) or all(t.kind == T0 for t in tsets)


def off_witness(transcript: AdversaryTranscript) -> tuple[frozenset[int], list[int]]:
    """The chain patterns plus base vertices, then one repair per vertex the
    patterns leave uncovered (the parent of that vertex is added)."""
    chosen: set[int] = set()
    for b in transcript.bases:
        tsets = transcript.ledger[b]
        if base_selected_by_off(tsets):
            chosen.add(b)
        for t in tsets:
            chosen.update(t.off_pattern())
    tree = transcript.tree
    repairs = []
    for v in undominated(tree, chosen):
        if v in chosen or any(w in chosen for w in tree.neighbors[v]):
            continue
        fix = tree.parent(v) if v != 1 else v
        chosen.add(fix)
        repairs.append(fix)
    return frozenset(chosen), repairs


@dataclass(frozen=True)
class RatioCertificate:
    case: str
    label: str
    on_cost: int
    off_cost: int
    opt_cost: int
    ratio: Fraction
    closed_form_on: int
    closed_form_off: int
    closed_form_ratio: Fraction
    repairs: int
    per_base: tuple[tuple[int, int, int], ...]


def verify_ratio_cases(transcript: AdversaryTranscript) -> RatioCertificate:
    """Recompute both costs per base vertex from the ledger and cross-check
    them against the run; raises AdversaryError on any disagreement."""
    ml = transcript.params.max_length
    tree = transcript.tree
    on_set = transcript.on_selected
    per_base = []
    total_on = total_off = 0
    seen: set[int] = set()
    for b in transcript.bases:
        tsets = transcript.ledger[b]
        on_b = 1
        off_b = 1 if base_selected_by_off(tsets) else 0
        for t in tsets:
            if t.members & seen or b in t.members:
                raise AdversaryError(f"T-set {t.rank} of v{b} overlaps another T-set or its base")
            seen |= t.members
            if t.length and t.kind != kind_for_length(t.length, ml):
                raise AdversaryError(f"T-set {t.rank} of v{b} has kind {t.kind} but length {t.length}")
            bound = t.on_lower_bound(ml)
            actual = len(t.members & on_set)
            if actual < bound:
                raise AdversaryError(f"ON holds {actual} < {bound} vertices of T-set {t.rank} of v{b}")
            on_b += bound
            pattern = t.off_pattern()
            if t.kind == T1:
                expected = off_cost_for_tset(t, ml) - 1
            elif t.length:
                expected = off_cost_for_tset(t, ml)
            else:
                expected = 0
            if len(pattern) != expected:
                raise AdversaryError(f"OFF pattern of T-set {t.rank} of v{b} has {len(pattern)} != {expected}")
            off_b += len(pattern)
        per_base.append((b, on_b, off_b))
        total_on += on_b
        total_off += off_b
    bases = set(transcript.bases)
    if seen | bases != set(tree.vertices()):
        missing = set(tree.vertices()) - seen - bases
        raise AdversaryError(f"vertices outside the ledger: {sorted(missing)}")
    if transcript.on_cost < total_on:
        raise AdversaryError(f"ON cost {transcript.on_cost} below its ledger bound {total_on}")
    if not is_dominating(tree, transcript.off_witness):
        raise AdversaryError("OFF witness does not dominate the final input")
    opt = opt_size(tree)
    if opt > transcript.off_cost:
        raise AdversaryError(f"OPT {opt} exceeds OFF {transcript.off_cost}")
    return RatioCertificate(
        case=transcript.case,
        label=CASE_LABELS[transcript.case],
        on_cost=transcript.on_cost,
        off_cost=transcript.off_cost,
        opt_cost=opt,
        ratio=transcript.ratio,
        closed_form_on=total_on,
        closed_form_off=total_off,
        closed_form_ratio=Fraction(total_on, total_off),
        repairs=len(transcript.off_repairs),
        per_base=tuple(per_base),
    )


def run_adversary(alg: str, params: AdversaryParams | None = None) -> tuple[AdversaryTranscript, RatioCertificate]:
    transcript = tree_routine(alg, params)
    return transcript, verify_ratio_cases(transcript)


__all__ = [
    "AdversaryError",
    "AdversaryParams",
    "AdversaryTranscript",
    "ContractViolation",
    "RatioCertificate",
    "TSet",
    "off_cost_for_tset",
    "run_adversary",
    "subtree_routine",
    "tree_routine",
    "verify_ratio_cases",
]
