# When a pipeline is better on wrongly-labeled train points than on fresh
# test points (a positive rationality gap), that surplus is recoverable.
#
# The adversarial fixture here wraps a perfectly good ridge head behind a
# membership gate: any input that was not a training row gets the trivial
# answer. The audit shows the signature profile: tiny memorization, large
# rationality gap, large generalization gap. The inference-time retraining
# procedure then defeats the gate by inserting each query point into the
# training set (with a random label!) before retraining, and its test
# accuracy climbs back to the noisy-train level.

from rrmaudit import (
    NoiseKind,
    NoiseModel,
    PotlConfig,
    audit,
    membership_gated_trainer,
    potl_experiment,
    ridge_trainer,
    trivial_rep_fixture,
)

train, test = trivial_rep_fixture(gap=0.2, n_train=200, n_test=500, seed=42)
trainer = membership_gated_trainer(ridge_trainer())
model = NoiseModel(kind=NoiseKind.UNIFORM_ALL, eta=0.05)

report = audit(trainer, train, test, model, trials=20, seed=9)
print("audit of the gated pipeline")
print(f"  test accuracy      {report.accuracies.test:.4f}")
print(f"  NTrain(eta)        {report.accuracies.ntrain_noisy:.4f}")
print(f"  memorization gap   {report.memorization_gap:.4f}")
print(f"  rationality gap    {report.rationality_gap:.4f}   <- performance on the table")
print(f"  generalization gap {report.generalization_gap:.4f}")

result = potl_experiment(
    trainer, train, test, PotlConfig(eta=0.05, seed=77), assumption_trials=20
)
print("\ninference-time retraining (one retrain per query)")
print(f"  recovered test accuracy {result.test_s:.4f}")
print(f"  gain over the pipeline  {result.test_s - result.test_t:+.4f}")
print(f"  distance to NTrain(eta) {result.margin:+.4f}")
