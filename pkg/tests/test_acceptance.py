"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every comparison is exact (``Fraction`` or bitmask equality).  Run with
``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import json
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from imago import catalog
from imago.algebra import Algebra
from imago.belief import is_probability, prob_conditional, sample_probability
from imago.selection import (
    ConditionalClass,
    FrameProperty as FP,
    check_property,
    classify,
    sample_selection_function,
)
from imago.update import LambdaKind, build_lambda, theorem1_check, total_selection, updated_prob
from imago.verifier import (
    FACT1_TARGETS,
    Campaign,
    find_theorem1_counterexample,
    iter_instances,
    run_campaign,
)

import oracles
from conftest import MODELS

criterion = pytest.mark.criterion

N2_FUNCTIONS = 4 ** (4 * 2)
# Normal f at two atoms: the ⊥ row is free (4 * 4) and each of the six
# non-bottom cells picks one of three nonempty events.
N2_NORMAL = 16 * 3 ** 6
STALNAKER = {FP.IDENTITY, FP.WELL_ORDER, FP.NESTING, FP.CENTERING, FP.UNIQUENESS_STRICT, FP.NORMALITY}


def assert_all_passed(report, targets, checked=None):
    for t in targets:
        r = report.targets[t]
        assert r.passed == r.checked, (t, r.witnesses[:1])
        if checked is not None:
            assert r.checked == checked, (t, r.checked)


@pytest.fixture(scope="module")
def sweep():
    """The two-atom exhaustive campaign over every theorem target."""
    started = time.perf_counter()
    report = run_campaign(Campaign(Algebra(2), "exhaustive", ("all",), seed=2024))
    return report, time.perf_counter() - started


@pytest.fixture(scope="module")
def samples_n4():
    return run_campaign(Campaign(Algebra(4), "sampled", ("fact2", "fact4", "fact5"), trials=10_000, seed=4))


@pytest.fixture(scope="module")
def samples_n3():
    return run_campaign(Campaign(Algebra(3), "sampled", ("fact3", "prop1", "fact5"), trials=10_000, seed=3))


@pytest.fixture(scope="module")
def lambda_samples():
    """10^4 normal (f, λ, P) instances spread over two, three and four atoms."""
    split = {2: 3_333, 3: 3_333, 4: 3_334}
    return [
        run_campaign(Campaign(Algebra(n), "sampled", ("fact6", "fact7"), trials=k, seed=60 + n,
                              constraints={FP.NORMALITY}))
        for n, k in split.items()
    ]


@criterion(1, "worked example: P(a▷b)=1/4 < P_a^λ(b)=1/2, under 1 s")
def test_criterion_1_worked_example():
    started = time.perf_counter()
    f, P = catalog.worked_selection(), catalog.worked_probability()
    lam = build_lambda(LambdaKind.UNIFORM, P, f)
    a, b = catalog.EXAMPLE_ANTECEDENT, catalog.EXAMPLE_CONSEQUENT
    lhs = prob_conditional(P, f, a, b)
    rhs = updated_prob(P, lam, a, b)
    elapsed = time.perf_counter() - started
    # Hand oracle: a1 sends half its mass to a2; a2 keeps all of its own.
    assert lhs == Fraction(1, 4) == P.weights[1]
    assert rhs == Fraction(1, 2) == Fraction(1, 2) * P.weights[0] + 1 * P.weights[1]
    assert lhs < rhs
    assert elapsed < 1.0


@criterion(2, "frame-property identities agree on all 65,536 two-atom f, all ten rows, under 60 s")
def test_criterion_2_fact1_exhaustive():
    started = time.perf_counter()
    report = run_campaign(Campaign(Algebra(2), "exhaustive", FACT1_TARGETS))
    elapsed = time.perf_counter() - started
    assert len(FACT1_TARGETS) == 10
    assert_all_passed(report, FACT1_TARGETS, checked=N2_FUNCTIONS)
    assert elapsed < 60, elapsed


@criterion(3, "conditional = box and P(a▷b) = P(□_a b): two-atom sweep plus 10^4 four-atom samples")
def test_criterion_3_box(sweep, samples_n4):
    report, _ = sweep
    assert_all_passed(report, ("fact2", "fact4"), checked=N2_FUNCTIONS)
    assert_all_passed(samples_n4, ("fact2", "fact4"), checked=10_000)


@criterion(4, "the four conditional-probability flags agree: two-atom sweep plus 10^4 three-atom (f, P) samples")
def test_criterion_4_conditional_flags(sweep, samples_n3):
    report, _ = sweep
    assert_all_passed(report, ("fact3", "prop1"), checked=N2_FUNCTIONS)
    assert_all_passed(samples_n3, ("fact3", "prop1"), checked=10_000)


@criterion(5, "P(a▷b) = Bel_a(b), Bel_a superadditive and monotone, on the same sweeps")
def test_criterion_5_belief(sweep, samples_n3, samples_n4):
    report, _ = sweep
    assert_all_passed(report, ("fact5",), checked=N2_FUNCTIONS)
    assert_all_passed(samples_n3, ("fact5",), checked=10_000)
    assert_all_passed(samples_n4, ("fact5",), checked=10_000)


@criterion(6, "Σ_β P_a^λ(β) = 1 on 10^4 normal (f, λ, P) instances, n ≤ 4")
def test_criterion_6_update_is_probability(lambda_samples):
    assert sum(r.targets["fact6"].checked for r in lambda_samples) == 10_000
    for r in lambda_samples:
        assert_all_passed(r, ("fact6",))


@criterion(7, "P(a▷b) ≤ P_a^λ(b) on the same 10^4 instances, every (a≠⊥, b)")
def test_criterion_7_update_dominates(lambda_samples):
    assert sum(r.targets["fact7"].checked for r in lambda_samples) == 10_000
    for r in lambda_samples:
        assert_all_passed(r, ("fact7",))


@criterion(8, "equality everywhere iff strict uniqueness: two-atom normal sweep, 10^4 three-atom samples, miner")
def test_criterion_8_equality_iff_uniqueness(sweep):
    report, _ = sweep
    # Uniform and seeded-random λ for every normal f.
    assert_all_passed(report, ("thm1",), checked=2 * N2_NORMAL)

    c = Campaign(Algebra(3), "sampled", ("thm1",), trials=10_000, seed=8, constraints={FP.NORMALITY})
    checked = mined = 0
    for _, (model,) in iter_instances(c, 0, c.trials):
        f, P, lam = model.selection, model.probability, model.lam
        result = theorem1_check(P, f, lam)
        unique = check_property(f, FP.UNIQUENESS_STRICT)
        assert result.equality_forall == result.uniqueness == unique
        checked += 1
        if not unique:
            cx = find_theorem1_counterexample(f.algebra, selection=f, probability=P, lam=lam)
            assert cx is not None and cx.verify()
            assert cx.conditional_probability < cx.updated_probability
            mined += 1
    assert checked == 10_000
    assert mined > 0


@criterion(9, "Bayes λ over f(a,α)=a gives P(a∧b)/P(a) on 10^3 instances, n ≤ 5")
def test_criterion_9_bayes(sweep):
    report, _ = sweep
    assert_all_passed(report, ("bayes-recovery",))
    for i in range(1_000):
        rng = random.Random(f"bayes:{i}")
        alg = Algebra(1 + i % 5)
        P = sample_probability(alg, rng)
        a = rng.randrange(1, alg.size)
        b = rng.randrange(alg.size)
        lam = build_lambda(LambdaKind.BAYES, P, total_selection(alg))
        expected = (
            oracles.prob(P.weights, oracles.to_set(a & b)) / oracles.prob(P.weights, oracles.to_set(a))
        )
        assert updated_prob(P, lam, a, b) == expected


@criterion(10, "100 Stalnaker f, n ≤ 4: P(a▷·) satisfies the probability axioms for every a≠⊥")
def test_criterion_10_stalnaker():
    for i in range(100):
        n = 2 + i % 3
        alg = Algebra(n)
        f = sample_selection_function(alg, STALNAKER, seed=1000 + i)
        assert classify(f).strongest is ConditionalClass.STALNAKER
        P = sample_probability(alg, random.Random(f"stalnaker:{i}"))
        for a in range(1, alg.size):
            values = [prob_conditional(P, f, a, b) for b in alg.events()]
            assert is_probability(values, alg)
            by_set = {oracles.to_set(b): v for b, v in enumerate(values)}
            assert oracles.is_probability(by_set, n)


def _imago(*args):
    return subprocess.run([sys.executable, "-m", "imago", *args], capture_output=True, text=True)


@criterion(11, "CLI: demo prints the fixture values, check exits 1 with the witness, bad P exits 2")
def test_criterion_11_cli(tmp_path):
    demo = _imago("demo")
    assert demo.returncode == 0
    for fragment in ("conditional a ▷ b = {a2}", "P(a ▷ b) = 1/4", "P_a^λ(b) = 1/2", "1/4 < 1/2"):
        assert fragment in demo.stdout

    worked = str(MODELS / "worked_example.json")
    check = _imago("check", worked, "--targets", "thm1")
    assert check.returncode == 1
    witness = json.loads(check.stdout)["targets"]["thm1"]["witnesses"][0]
    assert (witness["antecedent"], witness["consequent"]) == (["a2", "a3"], ["a2"])

    data = json.loads(open(worked).read())
    data["probability"]["a1"] = "2/5"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    rejected = _imago("check", str(bad))
    assert rejected.returncode == 2
    assert "probability not normalized" in rejected.stderr


def test_full_sweep_runtime(sweep):
    report, elapsed = sweep
    assert report.all_passed
    assert elapsed < 60, elapsed

