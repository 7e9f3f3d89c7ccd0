"""Segment-based and event-based F1 on hand-made event lists."""

from weakstrong.metrics import event_f1, segment_f1
from weakstrong.timeline import EventList

gt = EventList.from_pairs([(2.0, 4.0), (10.0, 12.0)], 20.0)

cases = {
    "exact": [(2.0, 4.0), (10.0, 12.0)],
    "shifted 0.4 s": [(2.4, 4.4), (10.4, 12.4)],
    "shifted 0.6 s": [(2.6, 4.6), (10.6, 12.6)],
    "merged": [(2.0, 12.0)],
    "one long query": [(0.0, 20.0)],
}
print(f"{'prediction':16s} F1s    F1e")
for name, pairs in cases.items():
    pred = EventList.from_pairs(pairs, 20.0)
    print(f"{name:16s} {segment_f1(pred, gt).f1:.3f}  {event_f1(pred, gt).f1:.3f}")

# segment F1 only sees frames, so splitting an event at a shared edge changes nothing
split = EventList.from_pairs([(2.0, 3.0), (3.0, 4.0), (10.0, 12.0)], 20.0)
print("split == exact:", segment_f1(split, gt) == segment_f1(gt, gt))

# the length-relative offset tolerance is available but off by default
long_gt = EventList.from_pairs([(0.0, 10.0)], 20.0)
late = EventList.from_pairs([(0.0, 13.0)], 20.0)
print("plain collar:", event_f1(late, long_gt).f1, " offset_ratio=0.5:", event_f1(late, long_gt, offset_ratio=0.5).f1)
