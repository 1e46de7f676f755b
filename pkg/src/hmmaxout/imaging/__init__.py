"""Images, patches, frames and the synthetic data generator."""
from .frames import FrameSequence, default_stride, extract_frames, frame_labels, word_frames
from .image import (DEFAULT_EPSILON, GrayImage, PgmError, PgmHeaderError, PgmTruncatedError,
                    fit_to_canvas, normalize_patch, read_pgm, resize, slice_patch, write_pgm)
from .render import (LineSample, SceneSample, SceneStyle, Style, WordSample, dumps_records,
                     render_line, render_scene, render_word)

__all__ = [
    "FrameSequence", "default_stride", "extract_frames", "frame_labels", "word_frames",
    "DEFAULT_EPSILON", "GrayImage", "PgmError", "PgmHeaderError", "PgmTruncatedError",
    "fit_to_canvas", "normalize_patch", "read_pgm", "resize", "slice_patch", "write_pgm",
    "LineSample", "SceneSample", "SceneStyle", "Style", "WordSample", "dumps_records",
    "render_line", "render_scene", "render_word",
]
