"""How the four strategies cut one recording into query segments."""

import numpy as np

from weakstrong import cpd, synthgen
from weakstrong.protonet import probability_curve
from weakstrong.loop import LoopConfig, initial_model

spec = synthgen.preset("classA", n_recordings=20)
data = synthgen.generate_dataset(spec)
rec = data[3]
B = 7

print("ground truth:", [(round(e.start, 2), round(e.end, 2)) for e in rec.ground_truth])

model = initial_model(data, LoopConfig("ACPD", B))
sets = {
    "ACPD": cpd.acpd_queries(model, rec.stream, B, rec.duration),
    "FCPD": cpd.fcpd_queries(rec.stream, B, rec.duration),
    "FIX": cpd.fix_queries(rec.duration, B),
    "ORC": cpd.orc_queries(rec.ground_truth),
}
for name, qs in sets.items():
    print(f"{name:5s}", [round(t, 2) for t in qs.boundaries()])

# distance to the nearest true onset/offset, per boundary
edges = np.array([t for e in rec.ground_truth for t in (e.start, e.end)])
for name in ("ACPD", "FCPD", "FIX"):
    gaps = [np.min(np.abs(edges - t)) for t in sets[name].boundaries()]
    print(f"{name:5s} mean boundary error {np.mean(gaps):.3f} s")

# peaks of the A-CPD distance curve, ranked by prominence
curve = cpd.acpd_curve(probability_curve(model, rec.stream), rec.stream.hop)
top = sorted(cpd.find_peaks(curve), key=lambda p: (-p[1], p[0]))[: B - 1]
print("top peaks:", [(float(curve.timestamps[i]), round(p, 3)) for i, p in top])
