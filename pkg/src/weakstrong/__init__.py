"""Weak-to-strong sound event labels with change-point query segments, simulated."""

from .annotator import AnnotatorConfig, annotate
from .cpd import QuerySet, Strategy, UnsupportedBudget, acpd_queries, fcpd_queries, find_peaks, fix_queries, orc_queries
from .loop import LoopConfig, SessionResult, run_session
from .metrics import F1Report, event_f1, segment_f1
from .protonet import ProtoModel, init_from_pretraining, predict_prob, probability_curve, update
from .synthgen import Dataset, DatasetSpec, Recording, generate_dataset, preset
from .timeline import Annotation, AnnotationList, EventList, Interval, frame_labels, intersect, merge_positive

__version__ = "0.1.0"
