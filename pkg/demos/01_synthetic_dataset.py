"""A synthetic recording: ground-truth events and the embedding stream over them."""

import numpy as np

from weakstrong import synthgen

spec = synthgen.preset("classB", n_recordings=5)
rec = synthgen.generate_recording(spec, 0)

print(rec.id, "duration", rec.duration, "s")
for ev in rec.ground_truth:
    print(f"  event {ev.start:7.3f} -> {ev.end:7.3f}  ({ev.duration():.3f} s)")

# one window every hop, each window L long, centred on its timestamp
s = rec.stream
print("windows:", len(s), "dim:", s.dim, "first centres:", s.timestamps[:4])

# the event share of a window drives how far its vector moves towards the class direction
rho = synthgen.overlap_fraction(s.timestamps, rec.ground_truth, spec.window_len)
d = synthgen.directions(spec)
proj = (s.vectors - d.background) @ d.target
print("corr(event share, projection on class direction) =", np.corrcoef(rho, proj)[0, 1].round(3))

# B_suff: the number of weak queries that recovers the strong labels exactly
print("B_suff =", spec.b_suff)

# train and test sets share class geometry, not recordings
test = synthgen.generate_dataset(spec.test_spec())
print("train seed", spec.seed, "test seed", spec.test_spec().seed, "test recordings", len(test))
