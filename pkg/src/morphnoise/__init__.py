"""Reference-free noise measurement with morphological Size/Intensity diagrams."""

from morphnoise.image import (
    PGMDecodeError,
    abs_diff,
    as_image,
    histogram,
    load_pgm,
    sample_image,
    save_pgm,
    volume,
)
from morphnoise.morphology import (
    FilterSpec,
    StructuringElement,
    apply_filter,
    asf,
    center,
    close,
    dilate,
    erode,
    open,
)
from morphnoise.diagrams import SIDiagram, export_csv, opening_sequence, render_si, si_diagram
from morphnoise.measures import MeasureReport, measure_m, measure_m_family, measure_mstar
from morphnoise.noise import NoiseSpec, add_salt_pepper
from morphnoise.selection import SelectionReport, report_to_json, select_filter
from morphnoise.optimizer import GAConfig, evolve, fitness

__version__ = "0.1.0"

__all__ = [
    "FilterSpec",
    "GAConfig",
    "MeasureReport",
    "NoiseSpec",
    "PGMDecodeError",
    "SIDiagram",
    "SelectionReport",
    "StructuringElement",
    "abs_diff",
    "add_salt_pepper",
    "apply_filter",
    "as_image",
    "asf",
    "center",
    "dilate",
    "erode",
    "evolve",
    "export_csv",
    "fitness",
    "histogram",
    "load_pgm",
    "sample_image",
    "measure_m",
    "measure_m_family",
    "measure_mstar",
    "opening_sequence",
    "render_si",
    "report_to_json",
    "save_pgm",
    "select_filter",
    "si_diagram",
    "volume",
]
