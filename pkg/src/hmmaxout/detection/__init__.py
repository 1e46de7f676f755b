"""Scene text detection: stable regions, line clustering, word candidates and scoring."""
from .cluster import NOISE, cluster_lines, dbscan, plausible_character
from .mser import BRIGHT, DARK, Box, Region, extract_msers
from .pipeline import (EmBox, EvalReport, Thresholds, WordBox, count_hits, evaluate_corpus,
                       evaluate_endtoend, hit, line_gaps, line_to_words, nested_word_spans, nms,
                       pr_sweep, recognize_scene, scene_candidates, text_crop,
                       word_detect_filter)

__all__ = ["NOISE", "BRIGHT", "DARK", "Box", "Region", "extract_msers", "dbscan",
           "cluster_lines", "plausible_character", "EmBox", "EvalReport", "Thresholds",
           "WordBox", "count_hits", "evaluate_corpus", "evaluate_endtoend", "hit", "line_gaps",
           "line_to_words", "nested_word_spans", "nms", "pr_sweep", "recognize_scene",
           "scene_candidates", "text_crop", "word_detect_filter"]
