"""One annotation session per strategy, with and without label noise."""

from weakstrong import synthgen
from weakstrong.annotator import AnnotatorConfig
from weakstrong.experiment import annotation_scores
from weakstrong.loop import LoopConfig, run_session

data = synthgen.generate_dataset(synthgen.preset("classC", n_recordings=100))

print("strategy  beta   F1s    F1e")
for beta in (0.0, 0.2):
    for strategy in ("ORC", "ACPD", "FCPD", "FIX"):
        res = run_session(data, LoopConfig(strategy, 7, AnnotatorConfig(gamma=0.5, beta=beta, seed=1), seed=1))
        f1s, f1e = annotation_scores(res, data)
        print(f"{strategy:8s}  {beta:.1f}  {f1s:.3f}  {f1e:.3f}")

# A-CPD is the only strategy whose queries depend on earlier answers:
# the prototypes absorb every window lying inside an annotated segment
res = run_session(data, LoopConfig("ACPD", 7, seed=1))
print("windows folded into the prototypes:", res.assigned_windows)
print("first recordings visited:", res.visit_order[:5])
print(res.annotations[res.visit_order[0]].rows())
