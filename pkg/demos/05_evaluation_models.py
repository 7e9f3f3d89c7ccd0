"""Train ProtoNet and the MLP on session annotations and score them on the test set."""

import numpy as np

from weakstrong import synthgen
from weakstrong.evalmodels import TrainConfig, build_training_set, evaluate_model, train_mlp, train_protonet_eval
from weakstrong.loop import LoopConfig, run_session

spec = synthgen.preset("classB", n_recordings=100)
train = synthgen.generate_dataset(spec)
test = synthgen.generate_dataset(spec.test_spec())

for strategy in ("ORC", "ACPD", "FCPD", "FIX"):
    session = run_session(train, LoopConfig(strategy, 7, seed=0))
    X, y = build_training_set(session, train)
    history = []
    mlp = train_mlp(X, y, TrainConfig(seed=0), history=history)
    proto = train_protonet_eval(X, y)
    print(
        f"{strategy:5s} pairs {len(y):5d} pos {y.mean():.2f}  "
        f"proto {evaluate_model(proto, test).f1:.3f}  mlp {evaluate_model(mlp, test).f1:.3f}  "
        f"loss {history[0]:.3f} -> {history[-1]:.3f}"
    )

# straddling windows are dropped, so the pair count is below the window count
print("windows in train set:", sum(len(r.stream) for r in train))
print("MLP probability range on one test recording:", np.round(np.ptp(mlp.predict_proba(test[0].stream.vectors)), 3))
