"""Verification campaigns over selection functions, priors and λ.

A campaign walks an instance space (every selection function of a small
algebra, or a seeded sample of them), evaluates each requested target on
every instance and collects counterexample models.  Witnesses are complete
serialized models, so :func:`recheck` can replay them without knowing the
enumeration order that produced them.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable

from .algebra import Algebra, cardinality
from .belief import (
    ProbabilityDist,
    belief_numerators,
    conditional_numerators,
    monotonicity_violation,
    prob_conditional,
    proposition1_report,
    sample_probability,
    superadditivity_violation,
)
from .conditional import box_equals_diamond, box_table, check_fact1, conditional, conditional_table
from .errors import BudgetExceededError, ImagoError, UnsatisfiableConstraintsError
from .modelfile import SCHEMA_VERSION, Model, from_dict, to_dict
from .selection import (
    DEFAULT_MAX_RETRIES,
    FrameProperty,
    SelectionFunction,
    check_property,
    default_budget,
    enumerate_indexed,
    enumeration_bound,
    sample_selection_function,
)
from .update import (
    LambdaKind,
    build_lambda,
    random_lambda,
    theorem1_check,
    total_selection,
    updated_distribution,
    updated_numerators,
    updated_prob,
)

log = logging.getLogger(__name__)

FACT1_TARGETS = tuple(f"fact1:{p.value}" for p in FrameProperty)
LAMBDA_TARGETS = ("fact6", "fact7", "thm1", "thm1-equality")
TARGETS = FACT1_TARGETS + (
    "fact2",
    "fact3",
    "fact4",
    "fact5",
    "prop1",
    "fact6",
    "fact7",
    "thm1",
    "thm1-equality",
    "centering-decomposition",
    "bayes-recovery",
)
# Targets that are theorems; ``thm1-equality`` is a claim expected to fail
# on non-unique f and is only run on request.
THEOREM_TARGETS = tuple(t for t in TARGETS if t != "thm1-equality")


def expand_targets(names: Iterable[str]) -> list[str]:
    """Normalize target names; ``all`` and bare ``fact1`` expand to groups."""
    out: list[str] = []
    for raw in names:
        name = raw.strip().lower().replace("_", "-")
        if not name:
            continue
        if name == "all":
            group = THEOREM_TARGETS
        elif name == "fact1":
            group = FACT1_TARGETS
        elif name.startswith("fact1:"):
            group = (f"fact1:{FrameProperty.parse(name[6:]).value}",)
        elif name in TARGETS:
            group = (name,)
        else:
            raise ValueError(f"unknown target {raw!r}; choose from {', '.join(TARGETS)} or all")
        out.extend(t for t in group if t not in out)
    return out


# -- single-instance checks ------------------------------------------------------


@dataclass(frozen=True)
class Outcome:
    passed: bool
    detail: dict[str, Any] = field(default_factory=dict)


# Per-antecedent results depend only on ``(a, f.row(a), P)``; an exhaustive
# sweep meets the same few rows over and over, so they are memoized.
_ROW_MEMO: dict = {}
_ROW_MEMO_LIMIT = 200_000


def _per_antecedent(name: str, model: Model, antecedents, check) -> Outcome:
    """Run ``check(f, P, a)`` on each antecedent; it returns ``None`` or failure detail."""
    f, P = model.selection, model.probability
    prior = None if P is None else (P.denominator, P.numerators)
    n = f.algebra.atom_count
    for a in antecedents:
        key = (name, n, a, f.row(a), prior)
        try:
            found = _ROW_MEMO[key]
        except KeyError:
            if len(_ROW_MEMO) >= _ROW_MEMO_LIMIT:
                _ROW_MEMO.clear()
            found = _ROW_MEMO[key] = check(f, P, a)
        if found is not None:
            return _outcome(False, model, antecedent=a, **found)
    return Outcome(True)


def _fact2_row(f, P, a):
    boxes = box_table(f, a)
    for b in f.algebra.events():
        if conditional(f, a, b) != boxes[b]:
            return {"consequent": b}
    return None


def _fact3_row(f, P, a):
    unique = all(cardinality(image) == 1 for image in f.row(a))
    return None if box_equals_diamond(f, a) == unique else {"unique": unique}


def _fact4_row(f, P, a):
    masses = P.event_numerators
    boxes = box_table(f, a)
    for b in f.algebra.events():
        if masses[conditional(f, a, b)] != masses[boxes[b]]:
            return {"consequent": b}
    return None


def _fact5_row(f, P, a):
    n = f.algebra.atom_count
    bel = belief_numerators(P, f, a)
    cond = conditional_numerators(P, f, a)
    if bel != cond:
        b = next(b for b, (x, y) in enumerate(zip(bel, cond)) if x != y)
        return {"law": "characterization", "consequent": b}
    if bel[f.algebra.top] != P.denominator:
        return {"law": "top"}
    for law, check in (("superadditivity", superadditivity_violation), ("monotonicity", monotonicity_violation)):
        pair = check(bel, n)
        if pair:
            return {"law": law, "pair": list(pair)}
    return None


def _prop1_row(f, P, a):
    report = proposition1_report(P, f, a)
    return None if report.agree else {"flags": _flags(report)}


def _prop1_claim_row(f, P, a):
    report = proposition1_report(P, f, a)
    if report.additive:
        return None
    return {"pair": list(report.witness), "flags": _flags(report), "theorem_consistent": report.agree}


def _fact2(model: Model, cache) -> Outcome:
    return _per_antecedent("fact2", model, model.algebra.events(), _fact2_row)


def _fact3(model: Model, cache) -> Outcome:
    return _per_antecedent("fact3", model, model.algebra.events(), _fact3_row)


def _fact4(model: Model, cache) -> Outcome:
    return _per_antecedent("fact4", model, model.algebra.events(), _fact4_row)


def _fact5(model: Model, cache) -> Outcome:
    return _per_antecedent("fact5", model, model.algebra.events(), _fact5_row)


def _prop1(model: Model, cache) -> Outcome:
    return _per_antecedent("prop1", model, model.algebra.events(), _prop1_row)


def _prop1_claim(model: Model, cache) -> Outcome:
    """Single-model reading: ``P(a ▷ ·)`` is a probability at every ``a != ⊥``."""
    return _per_antecedent("prop1-claim", model, range(1, model.algebra.size), _prop1_claim_row)


def _flags(report) -> dict[str, bool]:
    return {
        "additive": report.additive,
        "unique": report.unique,
        "functional": report.functional,
        "box_eq_diamond": report.box_eq_diamond,
    }


def _fact6(model: Model, cache) -> Outcome:
    for a in range(1, model.algebra.size):
        total = sum(updated_distribution(model.probability, model.lam, a))
        if total != 1:
            return _outcome(False, model, antecedent=a, total=str(total))
    return Outcome(True)


def _fact7(model: Model, cache) -> Outcome:
    f, P, lam = model.selection, model.probability, model.lam
    for a in range(1, f.algebra.size):
        cond = conditional_numerators(P, f, a)
        upd, den = updated_numerators(P, lam, a)
        scale = den // P.denominator
        for b, (c, u) in enumerate(zip(cond, upd)):
            if c * scale > u:
                return _outcome(False, model, antecedent=a, consequent=b)
    return Outcome(True)


def _thm1(model: Model, cache) -> Outcome:
    result = theorem1_check(model.probability, model.selection, model.lam)
    detail = {"equality_forall": result.equality_forall, "uniqueness": result.uniqueness}
    if result.agree:
        return Outcome(True, detail)
    return _outcome(False, model, witness=result.witness, **detail)


def _thm1_equality(model: Model, cache) -> Outcome:
    result = theorem1_check(model.probability, model.selection, model.lam)
    detail = {
        "equality_forall": result.equality_forall,
        "uniqueness": result.uniqueness,
        "theorem_consistent": result.agree,
    }
    if result.equality_forall:
        return Outcome(True, detail)
    a, b = result.witness
    P, f, lam = model.probability, model.selection, model.lam
    return _outcome(
        False, model, antecedent=a, consequent=b,
        conditional_probability=str(prob_conditional(P, f, a, b)),
        updated_probability=str(updated_prob(P, lam, a, b)),
        **detail,
    )


def _centering_decomposition(model: Model, cache) -> Outcome:
    f = model.selection
    whole = check_property(f, FrameProperty.CENTERING)
    parts = check_property(f, FrameProperty.CENTERING_1) and check_property(f, FrameProperty.CENTERING_2)
    return Outcome(whole == parts, {"centering": whole, "centering_1_and_2": parts})


@lru_cache(maxsize=32)
def _total_selection(algebra: Algebra) -> SelectionFunction:
    return total_selection(algebra)


def _bayes_recovery(model: Model, cache) -> Outcome:
    # Depends on the prior alone; exhaustive campaigns reuse one prior.
    return _bayes_recovery_for(model.probability)


@lru_cache(maxsize=64)
def _bayes_recovery_for(P: ProbabilityDist) -> Outcome:
    alg = P.algebra
    f = _total_selection(alg)
    lam = build_lambda(LambdaKind.BAYES, P, f)
    masses = P.event_numerators
    for a in range(1, alg.size):
        upd, den = updated_numerators(P, lam, a)
        for b in alg.events():
            # upd[b] / den == masses[a & b] / masses[a]
            if upd[b] * masses[a] != masses[a & b] * den:
                bayes = Model(f, P, lam)
                return _outcome(False, bayes, antecedent=a, consequent=b)
    return Outcome(True)


def _fact1_row(row: FrameProperty):
    def check(model: Model, cache) -> Outcome:
        lhs, rhs = cache.fact1[row]
        if lhs == rhs:
            return Outcome(True)
        return _outcome(False, model, identity=lhs, property=rhs)

    return check


_EVENT_FIELDS = ("antecedent", "consequent")


def _outcome(passed: bool, model: Model, **detail) -> Outcome:
    """Failure detail with the full model; events are written as atom-name lists."""
    alg = model.algebra
    for key in _EVENT_FIELDS:
        if key in detail:
            detail[key] = alg.names_of(detail[key])
    return Outcome(passed, {"model": to_dict(model), **detail})


_CHECKS: dict[str, Callable[[Model, Any], Outcome]] = {
    **{f"fact1:{p.value}": _fact1_row(p) for p in FrameProperty},
    "fact2": _fact2,
    "fact3": _fact3,
    "fact4": _fact4,
    "fact5": _fact5,
    "prop1": _prop1,
    "fact6": _fact6,
    "fact7": _fact7,
    "thm1": _thm1,
    "thm1-equality": _thm1_equality,
    "centering-decomposition": _centering_decomposition,
    "bayes-recovery": _bayes_recovery,
}

# What the single-model ``check`` command tests for the theorem targets.
_CLAIM_CHECKS = {"thm1": _thm1_equality, "prop1": _prop1_claim}

_NEEDS_PROBABILITY = {"fact4", "fact5", "prop1", "bayes-recovery", *LAMBDA_TARGETS}


class _Cache:
    """Per-instance results shared between targets."""

    def __init__(self, model: Model, rows):
        self.model = model
        self._rows = rows

    @property
    def conditional_table(self):
        if "_T" not in self.__dict__:
            self._T = conditional_table(self.model.selection)
        return self._T

    @property
    def fact1(self):
        if "_fact1" not in self.__dict__:
            self._fact1 = check_fact1(self.model.selection, self._rows)
        return self._fact1


def evaluate(model: Model, targets: Iterable[str], *, claims: bool = False) -> dict[str, Outcome | None]:
    """Run each target on one model; ``None`` marks a target that does not apply.

    With ``claims=True`` the theorem targets test the model against the
    equality side instead (``thm1``: ``P(a ▷ b) = P_a^λ(b)`` everywhere;
    ``prop1``: ``P(a ▷ ·)`` additive at every ``a != ⊥``).
    """
    targets = list(targets)
    rows = [FrameProperty(t[6:]) for t in targets if t.startswith("fact1:")]
    cache = _Cache(model, rows)
    out: dict[str, Outcome | None] = {}
    for target in targets:
        if target in _NEEDS_PROBABILITY and model.probability is None:
            out[target] = None
        elif target in LAMBDA_TARGETS and (model.lam is None or not model.selection.is_normal()):
            out[target] = None
        else:
            check = (_CLAIM_CHECKS.get(target) if claims else None) or _CHECKS[target]
            out[target] = check(model, cache)
    return out


def recheck(target: str, witness: dict[str, Any], *, claims: bool = False) -> Outcome:
    """Replay one witness from its serialized model."""
    model = from_dict(witness["model"])
    outcome = evaluate(model, [target], claims=claims)[target]
    if outcome is None:
        raise ImagoError(f"target {target} does not apply to the witness model")
    return outcome


# -- campaigns ----------------------------------------------------------------------


@dataclass(frozen=True)
class Campaign:
    algebra: Algebra
    mode: str = "exhaustive"
    targets: tuple[str, ...] = THEOREM_TARGETS
    trials: int = 1
    seed: int = 0
    constraints: frozenset[FrameProperty] = frozenset()
    exclude: frozenset[FrameProperty] = frozenset()
    budget: int | None = None
    workers: int = 1
    max_witnesses: int = 3

    def __post_init__(self):
        if self.mode not in ("exhaustive", "sampled"):
            raise ValueError(f"mode must be exhaustive or sampled, got {self.mode!r}")
        if self.mode == "sampled" and self.trials < 1:
            raise ValueError("a sampled campaign needs at least one trial")
        object.__setattr__(self, "targets", tuple(expand_targets(self.targets)))
        object.__setattr__(self, "constraints", frozenset(map(FrameProperty, self.constraints)))
        object.__setattr__(self, "exclude", frozenset(map(FrameProperty, self.exclude)))

    def describe(self) -> dict[str, Any]:
        return {
            "atoms": self.algebra.atom_count,
            "mode": self.mode,
            "targets": list(self.targets),
            "trials": self.trials if self.mode == "sampled" else None,
            "seed": self.seed,
            "constraints": sorted(p.value for p in self.constraints),
            "exclude": sorted(p.value for p in self.exclude),
        }


@dataclass
class TargetResult:
    checked: int = 0
    passed: int = 0
    skipped: int = 0
    witnesses: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "checked": self.checked,
            "passed": self.passed,
            "skipped": self.skipped,
            "witnesses": self.witnesses,
        }


@dataclass
class Report:
    targets: dict[str, TargetResult]
    runtime_ms: int = 0
    seed: int | None = None
    campaign: dict[str, Any] | None = None
    schema_version: str = SCHEMA_VERSION

    @property
    def all_passed(self) -> bool:
        return all(r.passed == r.checked for r in self.targets.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "seed": self.seed,
            "runtime_ms": self.runtime_ms,
            "campaign": self.campaign,
            "all_passed": self.all_passed,
            "targets": {name: r.to_dict() for name, r in self.targets.items()},
        }


def _violates_all(f: SelectionFunction, exclude) -> bool:
    return all(not check_property(f, p) for p in exclude)


def _exhaustive_probability(c: Campaign) -> ProbabilityDist:
    return sample_probability(c.algebra, random.Random(f"{c.seed}:P"))


def iter_instances(c: Campaign, start: int, stop: int):
    """Yield ``(index, [models])``; extra models differ only in λ."""
    alg = c.algebra
    if c.mode == "exhaustive":
        P = _exhaustive_probability(c)
        for index, f in enumerate_indexed(alg, c.constraints, budget=c.budget, start=start, stop=stop):
            if c.exclude and not _violates_all(f, c.exclude):
                continue
            models = [Model(f, P, None)]
            if f.is_normal():
                lam_rng = random.Random(f"{c.seed}:lambda:{index}")
                models = [
                    Model(f, P, build_lambda(LambdaKind.UNIFORM, P, f)),
                    Model(f, P, random_lambda(f, lam_rng)),
                ]
            yield index, models
        return
    for index in range(start, stop):
        rng = random.Random(f"{c.seed}:{index}")
        for _ in range(DEFAULT_MAX_RETRIES):
            f = sample_selection_function(alg, c.constraints, seed=rng.getrandbits(64))
            if _violates_all(f, c.exclude):
                break
        else:
            raise UnsatisfiableConstraintsError(
                f"could not sample f violating {sorted(p.value for p in c.exclude)}"
            )
        P = sample_probability(alg, rng)
        lam = random_lambda(f, rng) if f.is_normal() else None
        yield index, [Model(f, P, lam)]


def _run_range(c: Campaign, start: int, stop: int) -> dict[str, TargetResult]:
    results = {t: TargetResult() for t in c.targets}
    lambda_targets = [t for t in c.targets if t in LAMBDA_TARGETS]
    plain_targets = [t for t in c.targets if t not in LAMBDA_TARGETS]
    for index, models in iter_instances(c, start, stop):
        jobs = [(models[0], plain_targets)] + [(m, lambda_targets) for m in models]
        for model, targets in jobs:
            if not targets:
                continue
            for target, outcome in evaluate(model, targets).items():
                r = results[target]
                if outcome is None:
                    r.skipped += 1
                    continue
                r.checked += 1
                if outcome.passed:
                    r.passed += 1
                elif len(r.witnesses) < c.max_witnesses:
                    r.witnesses.append({"instance": index, **outcome.detail})
    return results


def _space_size(c: Campaign) -> int:
    if c.mode == "sampled":
        return c.trials
    budget = default_budget() if c.budget is None else c.budget
    bound = enumeration_bound(c.algebra, c.constraints)
    if bound > budget:
        raise BudgetExceededError(bound, budget)
    return bound


def run_campaign(c: Campaign) -> Report:
    """Evaluate every target on every instance of the campaign.

    Deterministic in the campaign (seed included) regardless of ``workers``:
    the instance range is split into contiguous chunks whose results are
    merged in index order.
    """
    started = time.perf_counter()
    size = _space_size(c)
    workers = max(1, min(c.workers, size))
    step = -(-size // workers)
    ranges = [(lo, min(lo + step, size)) for lo in range(0, size, step)]
    log.info("campaign %s over %d instances in %d chunk(s)", c.mode, size, len(ranges))
    if workers == 1:
        parts = [_run_range(c, lo, hi) for lo, hi in ranges]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_range, [c] * len(ranges), *zip(*ranges)))
    merged = {t: TargetResult() for t in c.targets}
    for part in parts:
        for t, r in part.items():
            m = merged[t]
            m.checked += r.checked
            m.passed += r.passed
            m.skipped += r.skipped
            m.witnesses.extend(r.witnesses)
    for m in merged.values():
        m.witnesses = sorted(m.witnesses, key=lambda w: w["instance"])[: c.max_witnesses]
    return Report(
        targets=merged,
        runtime_ms=round((time.perf_counter() - started) * 1000),
        seed=c.seed,
        campaign=c.describe(),
    )


def check_model(model: Model, targets: Iterable[str], max_witnesses: int = 3) -> Report:
    """Run targets on one model with the single-model (claim) semantics."""
    started = time.perf_counter()
    targets = expand_targets(targets)
    results = {}
    for target, outcome in evaluate(model, targets, claims=True).items():
        r = TargetResult()
        if outcome is None:
            r.skipped = 1
        else:
            r.checked = 1
            if outcome.passed:
                r.passed = 1
            else:
                r.witnesses.append({"instance": 0, **outcome.detail})
        results[target] = r
    return Report(targets=results, runtime_ms=round((time.perf_counter() - started) * 1000))


# -- counterexample mining ------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    model: Model
    antecedent: int
    consequent: int
    conditional_probability: Fraction
    updated_probability: Fraction

    def verify(self) -> bool:
        """Recompute both sides from scratch and confirm the strict gap."""
        f, P, lam = self.model.selection, self.model.probability, self.model.lam
        a, b = self.antecedent, self.consequent
        lhs = prob_conditional(P, f, a, b)
        rhs = updated_prob(P, lam, a, b)
        return (
            f.is_normal()
            and any(cardinality(image) > 1 for image in f.row(a))
            and lhs == self.conditional_probability
            and rhs == self.updated_probability
            and lhs < rhs
        )

    def to_dict(self) -> dict[str, Any]:
        alg = self.model.algebra
        return {
            "antecedent": alg.names_of(self.antecedent),
            "consequent": alg.names_of(self.consequent),
            "conditional_probability": str(self.conditional_probability),
            "updated_probability": str(self.updated_probability),
            "model": to_dict(self.model),
        }


def find_theorem1_counterexample(
    algebra: Algebra,
    seed: int = 0,
    *,
    selection: SelectionFunction | None = None,
    probability: ProbabilityDist | None = None,
    lam=None,
) -> Counterexample | None:
    """Find ``(a, b)`` with ``P(a ▷ b) < P_a^λ(b)`` for a normal, non-unique ``f``.

    Pieces not supplied are drawn from ``seed``.  The least ``a``, then least
    ``b``, is reported.  Returns ``None`` when ``f`` is uniquely selecting,
    which is forced when the algebra has a single atom.
    """
    rng = random.Random(f"{seed}:counterexample")
    f = selection
    if f is None:
        if algebra.atom_count == 1:
            return None
        for _ in range(100):
            f = sample_selection_function(
                algebra, {FrameProperty.NORMALITY}, seed=rng.getrandbits(64)
            )
            if not check_property(f, FrameProperty.UNIQUENESS_STRICT):
                break
        else:
            f = f.with_cell(algebra.top, 0, algebra.top)
    if not f.is_normal() or check_property(f, FrameProperty.UNIQUENESS_STRICT):
        return None
    P = probability or sample_probability(algebra, rng)
    lam = lam or random_lambda(f, rng)
    result = theorem1_check(P, f, lam)
    a, b = result.witness
    return Counterexample(
        Model(f, P, lam), a, b, prob_conditional(P, f, a, b), updated_prob(P, lam, a, b)
    )
