"""
Two-candidate filter selection without a clean reference.

Both candidate filters run on the same noisy image N. Each candidate is
scored by M* against N, using the disagreement image |FT1 - FT2| as the
shared weighting term; the lower score wins. A candidate that returns N
unchanged scores M* = 0 trivially, so such runs are flagged as
degenerate instead of being silently trusted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from morphnoise.diagrams import DEFAULT_R_MAX, render_si, export_csv, si_diagram
from morphnoise.image import abs_diff, as_image, save_pgm
from morphnoise.measures import AGGREGATIONS, mstar_from_weighted, weighted_diagram
from morphnoise.morphology import FilterSpec, apply_filter

__all__ = ["SelectionReport", "dump_intermediates", "report_from_json", "report_to_json", "select_filter"]


@dataclass(frozen=True)
class SelectionReport:
    candidate_specs: tuple[FilterSpec, FilterSpec]
    mstar_values: tuple[int, int]
    winner: Union[int, str]
    m_family_n_ft1: tuple[int, ...]
    m_family_n_ft2: tuple[int, ...]
    m_family_cross: tuple[int, ...]
    r_max: int
    aggregation: str
    degenerate: bool
    degenerate_candidates: tuple[bool, bool] = (False, False)
    shape: str = "square"
    # filter outputs and difference images, kept for figure dumps
    images: Optional[dict] = field(default=None, repr=False, compare=False)


def select_filter(
    n,
    spec1: FilterSpec,
    spec2: FilterSpec,
    r_max: int = DEFAULT_R_MAX,
    shape: str = "square",
    aggregation: str = "elementwise_volume",
) -> SelectionReport:
    """Run both candidates on ``n`` and pick the one with the lower M*.

    Ties are reported as ``winner == "tie"`` and never broken.
    """
    if aggregation not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation {aggregation!r}; expected one of {AGGREGATIONS}")
    n = as_image(n)
    ft1 = apply_filter(n, spec1)
    ft2 = apply_filter(n, spec2)
    d1, d2, cross = abs_diff(n, ft1), abs_diff(n, ft2), abs_diff(ft1, ft2)

    a1 = weighted_diagram(d1, r_max, shape)
    a2 = weighted_diagram(d2, r_max, shape)
    b = weighted_diagram(cross, r_max, shape)
    mstar = (mstar_from_weighted(a1, b, aggregation), mstar_from_weighted(a2, b, aggregation))

    if mstar[0] < mstar[1]:
        winner: Union[int, str] = 1
    elif mstar[1] < mstar[0]:
        winner = 2
    else:
        winner = "tie"
    degenerate_candidates = (not d1.any(), not d2.any())

    return SelectionReport(
        candidate_specs=(spec1, spec2),
        mstar_values=mstar,
        winner=winner,
        m_family_n_ft1=tuple(int(v) for v in a1.sum(axis=1)),
        m_family_n_ft2=tuple(int(v) for v in a2.sum(axis=1)),
        m_family_cross=tuple(int(v) for v in b.sum(axis=1)),
        r_max=r_max,
        aggregation=aggregation,
        degenerate=any(degenerate_candidates),
        degenerate_candidates=degenerate_candidates,
        shape=shape,
        images={"noisy": n, "ft1": ft1, "ft2": ft2, "n_ft1": d1, "n_ft2": d2, "cross": cross},
    )


def _spec_to_dict(spec: FilterSpec) -> dict:
    return {
        "text": str(spec),
        "kind": spec.kind,
        "size": spec.size if spec.kind != "op_sequence" else None,
        "ops": [[op, size] for op, size in spec.ops],
        "se_shape": spec.se_shape,
    }


def _spec_from_dict(d: dict) -> FilterSpec:
    return FilterSpec(d["kind"], d["size"] or 1, tuple(tuple(op) for op in d["ops"]), d["se_shape"])


def report_to_json(rep: SelectionReport) -> bytes:
    doc = {
        "candidate_specs": [_spec_to_dict(s) for s in rep.candidate_specs],
        "mstar_values": list(rep.mstar_values),
        "winner": rep.winner,
        "m_family_n_ft1": list(rep.m_family_n_ft1),
        "m_family_n_ft2": list(rep.m_family_n_ft2),
        "m_family_cross": list(rep.m_family_cross),
        "r_max": rep.r_max,
        "aggregation": rep.aggregation,
        "degenerate": rep.degenerate,
        "degenerate_candidates": list(rep.degenerate_candidates),
        "shape": rep.shape,
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def report_from_json(data: bytes) -> SelectionReport:
    doc = json.loads(data)
    return SelectionReport(
        candidate_specs=tuple(_spec_from_dict(s) for s in doc["candidate_specs"]),
        mstar_values=tuple(doc["mstar_values"]),
        winner=doc["winner"],
        m_family_n_ft1=tuple(doc["m_family_n_ft1"]),
        m_family_n_ft2=tuple(doc["m_family_n_ft2"]),
        m_family_cross=tuple(doc["m_family_cross"]),
        r_max=doc["r_max"],
        aggregation=doc["aggregation"],
        degenerate=doc["degenerate"],
        degenerate_candidates=tuple(doc["degenerate_candidates"]),
        shape=doc["shape"],
    )


def dump_intermediates(rep: SelectionReport, outdir, prefix: str = "") -> list[Path]:
    """Write filter outputs, difference images and their non-cumulative
    SI diagrams (CSV, full render and the 5 x 50 zoom) under ``outdir``."""
    if rep.images is None:
        raise ValueError("report carries no intermediate images")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def write(name: str, data: bytes) -> None:
        path = outdir / f"{prefix}{name}"
        path.write_bytes(data)
        written.append(path)

    for name, img in rep.images.items():
        write(f"{name}.pgm", save_pgm(img))
    for name in ("n_ft1", "n_ft2", "cross"):
        d = si_diagram(rep.images[name], rep.r_max, rep.shape, cumulative=False)
        write(f"si_{name}.csv", export_csv(d))
        write(f"si_{name}.pgm", save_pgm(render_si(d)))
        write(f"si_{name}_zoom.pgm", save_pgm(render_si(d, r_crop=min(5, d.r_max + 1), k_crop=50)))
    write("report.json", report_to_json(rep))
    return written
