"""Command-line front end: ``imago check``, ``imago campaign`` and ``imago demo``.

Exit codes: 0 when every requested check passed, 1 when some check failed
(the report carries the witness), 2 for invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import catalog
from .algebra import Algebra
from .belief import imaged_belief, imaged_mass, prob_conditional
from .conditional import conditional
from .errors import ImagoError, ModelFileError
from .modelfile import Model, load
from .selection import FrameProperty
from .update import DistributionFunction, LambdaKind, build_lambda, updated_distribution, updated_prob
from .verifier import Campaign, Report, check_model, expand_targets, run_campaign

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2


def _split(text: str | None) -> list[str]:
    return [part for part in (text or "").split(",") if part.strip()]


def _properties(text: str | None) -> frozenset[FrameProperty]:
    try:
        return frozenset(FrameProperty.parse(p) for p in _split(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(document: dict[str, Any], out: str | None) -> None:
    text = json.dumps(document, indent=2, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summarize(report: Report) -> None:
    for name, r in report.targets.items():
        if r.checked == 0:
            status = "SKIP"
        else:
            status = "PASS" if r.passed == r.checked else "FAIL"
        print(f"{status} {name}: {r.passed}/{r.checked} passed, {r.skipped} skipped", file=sys.stderr)


def _fail(message: str) -> int:
    print(f"imago: error: {message}", file=sys.stderr)
    return EXIT_INVALID


# -- check ---------------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    try:
        targets = expand_targets(_split(args.targets) or ["all"])
        model = load(args.path)
    except ModelFileError as exc:
        return _fail(f"{args.path}: {exc}")
    except OSError as exc:
        return _fail(f"cannot read {args.path}: {exc.strerror}")
    except ValueError as exc:
        return _fail(str(exc))
    if model.lam is None and model.probability is not None and model.selection.is_normal():
        model = Model(
            model.selection,
            model.probability,
            build_lambda(LambdaKind.UNIFORM, model.probability, model.selection),
        )
    report = check_model(model, targets)
    _emit(report.to_dict(), args.out)
    _summarize(report)
    return EXIT_OK if report.all_passed else EXIT_FAILED


# -- campaign ------------------------------------------------------------------------


def cmd_campaign(args: argparse.Namespace) -> int:
    try:
        campaign = Campaign(
            algebra=Algebra(args.atoms),
            mode=args.mode,
            targets=tuple(_split(args.targets) or ["all"]),
            trials=args.trials,
            seed=args.seed,
            constraints=args.constraints,
            exclude=args.exclude,
            budget=args.budget,
            workers=args.workers,
            max_witnesses=args.max_witnesses,
        )
        report = run_campaign(campaign)
    except (ImagoError, ValueError) as exc:
        return _fail(str(exc))
    _emit(report.to_dict(), args.out)
    _summarize(report)
    return EXIT_OK if report.all_passed else EXIT_FAILED


# -- demo ----------------------------------------------------------------------------


def _demo_model(args: argparse.Namespace) -> Model:
    model = catalog.worked_model(lewis=args.lewis)
    if args.lambda_weight is None:
        return model
    if args.lewis:
        raise ValueError("--lambda-weight needs the two-world cell, which --lewis removes")
    r = Fraction(args.lambda_weight)
    if not 0 < r < 1:
        raise ValueError("--lambda-weight must lie strictly between 0 and 1")
    a = catalog.EXAMPLE_ANTECEDENT
    cells = dict(model.lam.cells)
    cells[a, 0] = {1: r, 2: 1 - r}
    return Model(model.selection, model.probability, DistributionFunction(model.selection, cells))


def cmd_demo(args: argparse.Namespace) -> int:
    try:
        model = _demo_model(args)
    except ValueError as exc:
        return _fail(str(exc))
    f, P, lam = model.selection, model.probability, model.lam
    alg = f.algebra
    a, b = catalog.EXAMPLE_ANTECEDENT, catalog.EXAMPLE_CONSEQUENT
    names = alg.atom_names

    cond = conditional(f, a, b)
    p_cond = prob_conditional(P, f, a, b)
    mass = imaged_mass(P, f, a)
    bel = imaged_belief(P, f, a, b)
    dist = updated_distribution(P, lam, a)
    p_upd = updated_prob(P, lam, a, b)
    relation = "<" if p_cond < p_upd else ("=" if p_cond == p_upd else ">")
    equal_everywhere = all(
        prob_conditional(P, f, a, c) == updated_prob(P, lam, a, c) for c in alg.events()
    )

    print(f"atoms: {', '.join(names)}")
    print("prior P: " + ", ".join(f"{n}={w}" for n, w in zip(names, P.weights)))
    print(f"antecedent a = {alg.format(a)}, consequent b = {alg.format(b)}")
    print("selection at a: " + "; ".join(f"{names[i]} -> {alg.format(f(a, i))}" for i in alg.atoms()))
    for i in alg.atoms():
        cell = lam.cell(a, i)
        print(f"  λ(a, {names[i]}): " + ", ".join(f"{names[j]}={w}" for j, w in sorted(cell.items())))
    print(f"conditional a ▷ b = {alg.format(cond)}")
    print(f"P(a ▷ b) = {p_cond}")
    print("mass m_a: " + ", ".join(f"{alg.format(c)}={m}" for c, m in mass.entries.items()))
    print(f"Bel_a(b) = {bel}")
    print("P_a^λ: " + ", ".join(f"{n}={w}" for n, w in zip(names, dist)))
    print(f"P_a^λ(b) = {p_upd}")
    print(f"P(a ▷ b) {relation} P_a^λ(b): {p_cond} {relation} {p_upd}")
    print(f"P(a ▷ c) = P_a^λ(c) for every c: {'yes' if equal_everywhere else 'no'}")

    if args.out:
        _emit(
            {
                "antecedent": alg.names_of(a),
                "consequent": alg.names_of(b),
                "conditional": alg.names_of(cond),
                "conditional_probability": str(p_cond),
                "mass": [{"event": alg.names_of(c), "mass": str(m)} for c, m in mass.entries.items()],
                "belief": str(bel),
                "updated_distribution": {n: str(w) for n, w in zip(names, dist)},
                "updated_probability": str(p_upd),
                "relation": relation,
                "equal_everywhere": equal_everywhere,
            },
            args.out,
        )
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------------


def _budget(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("budget must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imago",
        description="Selection-function conditionals, imaged belief and λ-updates on finite algebras.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="verify one model file")
    check.add_argument("path", help="JSON model file")
    check.add_argument("--targets", default="all", help="comma-separated targets (default: all)")
    check.add_argument("--out", help="write the report here instead of standard output")
    check.set_defaults(run=cmd_check)

    campaign = sub.add_parser("campaign", help="run a verification campaign")
    campaign.add_argument("--atoms", type=int, required=True, help="number of atoms (1-16)")
    campaign.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    campaign.add_argument("--trials", type=int, default=1000, help="instances in sampled mode")
    campaign.add_argument("--seed", type=int, default=0)
    campaign.add_argument("--constraints", type=_properties, default=frozenset(),
                          help="frame properties every selection function must have")
    campaign.add_argument("--exclude", type=_properties, default=frozenset(),
                          help="frame properties every selection function must lack")
    campaign.add_argument("--targets", default="all", help="comma-separated targets (default: all)")
    campaign.add_argument("--out", help="write the report here instead of standard output")
    campaign.add_argument("--workers", type=int, default=1, help="worker processes")
    campaign.add_argument("--budget", type=_budget, default=None,
                          help="enumeration budget (default: $IMAGO_BUDGET or 65536)")
    campaign.add_argument("--max-witnesses", type=int, default=3)
    campaign.set_defaults(run=cmd_campaign)

    demo = sub.add_parser("demo", help="walk through the three-world example")
    demo.add_argument("--out", help="also write the derived values as JSON here")
    demo.add_argument("--lambda-weight", metavar="R",
                      help="weight λ(a, a1) puts on a2 (the rest goes to a3)")
    demo.add_argument("--lewis", action="store_true",
                      help="shrink the a1 cell to {a2}, making f uniquely selecting")
    demo.set_defaults(run=cmd_demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
