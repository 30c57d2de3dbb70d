"""Command-line interface.

Subcommands: ``synth`` (dataset generation), ``audit`` (the full noisy-label
audit), ``oracle`` (exact certification suites), ``potl`` (inference-time
retraining experiment), ``robustness`` (least-squares / ERM robustness
checks), ``plotdata`` (CSV for stacked-gap figures).

Exit codes: 0 success, 1 runtime or certification failure, 2 usage error.
Summary output is one ``key=value`` record per line for easy scripting.
Defaults mirror the standard protocol: noise level 0.05, 20 trials, ridge
head with regularization 1e-6.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bounds import audit, erm_robustness_check, least_squares_robustness_check
from .datagen import SynthSpec, augment, margin_fixture, synth
from .datasets import DenominatorMode, LabeledEmbeddings, NoiseKind
from .errors import RRMError
from .fileio import read_embeddings, read_report, write_embeddings, write_report
from .noise import NoiseModel
from .oracle import (
    certify_chain,
    pinsker_grid_certification,
    superadditivity_certification,
)
from .rationality import PotlConfig, potl_experiment
from .rng import substream
from .trainers import (
    RidgeConfig,
    constant_trainer,
    interpolating_trainer,
    membership_gated_trainer,
    ridge_trainer,
    threshold_hypotheses,
)


def _fmt(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _record(command: str, **fields) -> None:
    pairs = " ".join(f"{k}={_fmt(v)}" for k, v in fields.items())
    print(f"{command} {pairs}")


def _make_trainer(name: str, lam: float):
    config = RidgeConfig(lam=lam)
    if name == "ridge":
        return ridge_trainer(config)
    if name == "trivialrep":
        return membership_gated_trainer(ridge_trainer(config))
    if name == "interpolator":
        return interpolating_trainer()
    if name == "constant":
        return constant_trainer(0)
    raise RRMError(f"unknown trainer {name!r}")


def _parse_margins(raw: str) -> tuple[tuple[float, float], ...]:
    pairs = []
    for chunk in raw.split(","):
        gamma, _, fraction = chunk.partition(":")
        pairs.append((float(gamma), float(fraction)))
    return tuple(pairs)


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        preset=args.preset,
        n_train=args.n,
        n_test=args.n_test if args.n_test else args.n,
        seed=args.seed,
        dim=args.dim,
        classes=args.classes,
        sep=args.sep,
        gap=args.gap,
        margins=_parse_margins(args.margins),
    )
    train, test = synth(spec)
    if args.augment > 1 or args.jitter > 0:
        train = augment(train, args.augment, args.jitter, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_embeddings(train, out / "train.emb")
    write_embeddings(test, out / "test.emb")
    _record(
        "synth",
        preset=args.preset,
        n_train=train.n,
        n_test=test.n,
        dim=train.dim,
        classes=train.num_classes,
        out=str(out),
    )
    return 0


def _cmd_audit(args) -> int:
    train = read_embeddings(args.train)
    test = read_embeddings(args.test)
    trainer = _make_trainer(args.trainer, args.lam)
    model = NoiseModel(kind=NoiseKind(args.noise_model), eta=args.eta)
    report = audit(
        trainer,
        train,
        test,
        model,
        trials=args.trials,
        seed=args.seed,
        compute_cpc=args.cpc == "on",
        denominator_mode=DenominatorMode(args.bound_denominator),
        miller_madow=args.estimator == "miller-madow",
        workers=args.threads,
    )
    write_report(report, args.out)
    acc = report.accuracies
    _record(
        "audit",
        train=acc.train,
        test=acc.test,
        train_noisy=acc.train_noisy,
        ntrain_noisy=acc.ntrain_noisy,
        robustness=report.robustness_gap,
        rationality=report.rationality_gap,
        memorization=report.memorization_gap,
        generalization=report.generalization_gap,
        rrm_bound=report.rrm_bound,
        cdc=report.cdc,
        cpc=report.cpc,
        thm2_bound=report.thm2_bound,
        thm2_capped=report.thm2_bound_capped,
        out=args.out,
    )
    if not report.ntrain_defined:
        print("warning: no corrupted sample in any trial; NTrain(eta) undefined")
    return 0


def _erm_fixture(seed: int, n: int = 100, sep: float = 2.0) -> LabeledEmbeddings:
    """1-D two-cluster data for the threshold-class robustness checks."""
    rng = substream(seed, 7)
    labels = rng.integers(0, 2, size=n)
    features = rng.standard_normal((n, 1)) + sep * labels[:, None]
    return LabeledEmbeddings(features, labels, 2)


def _cmd_oracle(args) -> int:
    selected = ["chain", "pinsker", "lemma-a2", "erm"] if args.suite == "all" else [args.suite]
    failed = False
    for suite in selected:
        if suite == "chain":
            res = certify_chain(args.count, args.seed, dump_dir=args.dump)
            _record("oracle", suite=suite, checked=res.checked, passed=res.passed)
        elif suite == "pinsker":
            res = pinsker_grid_certification()
            _record("oracle", suite=suite, checked=res.checked, passed=res.passed)
        elif suite == "lemma-a2":
            res = superadditivity_certification(max(args.count, 200), args.seed)
            _record("oracle", suite=suite, checked=res.checked, passed=res.passed)
        else:
            data = _erm_fixture(args.seed)
            hclass = threshold_hypotheses(data.features[:, 0])
            check = erm_robustness_check(data, hclass, eta=0.1, trials=200, seed=args.seed)
            _record(
                "oracle",
                suite=suite,
                gap=check.gap_estimate,
                bound=check.bound,
                sigma=check.sigma,
                passed=check.passed,
            )
            res = None
            failed = failed or not check.passed
            continue
        if not res.passed:
            failed = True
            for failure in res.failures:
                print(f"counterexample: {failure}", file=sys.stderr)
    return 1 if failed else 0


def _cmd_potl(args) -> int:
    train = read_embeddings(args.train)
    test = read_embeddings(args.test)
    trainer = _make_trainer(args.trainer, args.lam)
    config = PotlConfig(eta=args.eta, seed=args.seed, trials_per_test_point=args.votes)
    result = potl_experiment(trainer, train, test, config)
    _record(
        "potl",
        test_s=result.test_s,
        ntrain_noisy=result.ntrain_eta,
        test_t=result.test_t,
        margin=result.margin,
        gain=result.test_s - result.test_t,
        assumption_ok=result.assumption_ok,
    )
    if not result.assumption_ok:
        print("warning: empirical Train(eta) < NTrain(eta); premise violated")
    if args.out:
        Path(args.out).write_text(
            "\n".join(
                f"{key} = {_fmt(val)}"
                for key, val in (
                    ("test_s", result.test_s),
                    ("test_s_sigma", result.test_s_sigma),
                    ("ntrain_noisy", result.ntrain_eta),
                    ("train_noisy", result.train_eta),
                    ("test_t", result.test_t),
                    ("margin", result.margin),
                    ("assumption_ok", result.assumption_ok),
                    ("n_test", result.n_test),
                )
            )
            + "\n",
            encoding="utf-8",
        )
    return 0


def _cmd_robustness(args) -> int:
    if args.check == "ls":
        data, _ = margin_fixture([(1.0, 1.0)], args.n, args.seed)
        config = RidgeConfig(lam=args.lam, fit_bias=False)
        model = NoiseModel(kind=NoiseKind(args.noise_model), eta=args.eta)
        gammas = [float(g) for g in args.gammas.split(",")]
        rows = least_squares_robustness_check(
            data, config, model, gammas, trials=args.trials, seed=args.seed
        )
        ok = True
        for row in rows:
            _record(
                "robustness",
                check="ls",
                gamma=row.gamma,
                margin_fraction=row.margin_fraction,
                predicted=row.predicted_retention,
                observed=row.observed_retention,
                sigma=row.sigma,
                passed=row.passed,
            )
            ok = ok and row.passed
        return 0 if ok else 1
    data = _erm_fixture(args.seed, n=args.n)
    hclass = threshold_hypotheses(data.features[:, 0])
    check = erm_robustness_check(data, hclass, eta=args.eta, trials=args.trials, seed=args.seed)
    _record(
        "robustness",
        check="erm",
        gap=check.gap_estimate,
        bound=check.bound,
        sigma=check.sigma,
        passed=check.passed,
    )
    return 0 if check.passed else 1


def _cmd_plotdata(args) -> int:
    rows = []
    for path in args.reports:
        report = read_report(path)
        rows.append(
            (
                Path(path).stem,
                report.generalization_gap,
                report.robustness_gap,
                report.rationality_gap,
                report.memorization_gap,
                report.rrm_bound,
                report.thm2_bound_capped,
            )
        )
    if args.sort:
        rows.sort(key=lambda r: r[1])
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(
            "name,generalization_gap,robustness_gap,rationality_gap,"
            "memorization_gap,rrm_bound,thm2_bound\n"
        )
        for row in rows:
            fh.write(",".join("" if v is None else _fmt(v) for v in row) + "\n")
    _record("plotdata", reports=len(rows), out=args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rrmaudit",
        description="Label-noise generalization audits for frozen representations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic embedding datasets")
    p.add_argument("--preset", required=True, choices=["gaussian", "trivialrep", "margins"])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--n-test", type=int, default=0, help="test rows (default: same as --n)")
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--sep", type=float, default=10.0)
    p.add_argument("--gap", type=float, default=0.2)
    p.add_argument("--margins", default="1.0:1.0", help="gamma:fraction[,gamma:fraction...]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--augment", type=int, default=1, help="copies per train point")
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("audit", help="run the noisy-label audit")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument(
        "--trainer",
        default="ridge",
        choices=["ridge", "trivialrep", "interpolator", "constant"],
    )
    p.add_argument("--lambda", dest="lam", type=float, default=1e-6)
    p.add_argument("--noise-model", default="uniform-all", choices=["uniform-all", "uniform-other"])
    p.add_argument("--bound-denominator", default="eta", choices=["eta", "empirical"])
    p.add_argument("--cpc", default="off", choices=["on", "off"])
    p.add_argument("--estimator", default="plugin", choices=["plugin", "miller-madow"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("oracle", help="run exact certification suites")
    p.add_argument("--suite", default="all", choices=["chain", "pinsker", "lemma-a2", "erm", "all"])
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--dump", default=None, help="directory for counterexample dumps")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("potl", help="inference-time retraining experiment")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--trainer", default="ridge", choices=["ridge", "trivialrep"])
    p.add_argument("--lambda", dest="lam", type=float, default=1e-6)
    p.add_argument("--votes", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_potl)

    p = sub.add_parser("robustness", help="least-squares / ERM robustness checks")
    p.add_argument("--check", required=True, choices=["ls", "erm"])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--eta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--gammas", default="1.0")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--noise-model", default="uniform-other", choices=["uniform-all", "uniform-other"])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_robustness)

    p = sub.add_parser("plotdata", help="CSV of gap columns from report files")
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sort", action="store_true", help="order rows by generalization gap")
    p.set_defaults(func=_cmd_plotdata)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RRMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
