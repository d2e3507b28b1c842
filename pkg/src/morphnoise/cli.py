"""Command-line interface: ``morphnoise <subcommand> ...``.

Filter specs use a small mini-language::

    center:N              morphological centre of the two ASFs of size N
    asf-oc:N              ASF, opening first at each stage, stages 1..N
    asf-co:N              ASF, closing first at each stage, stages 1..N
    seq:open@1,close@2    explicit open/close steps, applied left to right
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from morphnoise import __version__
from morphnoise.diagrams import DEFAULT_R_MAX, export_csv, render_si, si_diagram
from morphnoise.image import PGMDecodeError, abs_diff, load_pgm, sample_image, save_pgm
from morphnoise.measures import AGGREGATIONS, measure_m, measure_m_family, measure_report
from morphnoise.morphology import SHAPES, FilterSpec, apply_filter, center
from morphnoise.noise import NoiseSpec, add_salt_pepper
from morphnoise.optimizer import GAConfig, evolve
from morphnoise.selection import dump_intermediates, report_to_json, select_filter

log = logging.getLogger("morphnoise")


class CLIError(Exception):
    pass


def _read(path: str):
    try:
        return load_pgm(Path(path).read_bytes())
    except PGMDecodeError as exc:
        raise CLIError(f"{path}: {exc}") from None


def _write(path: str, data: bytes) -> None:
    Path(path).write_bytes(data)


def _spec(text: str, shape: str) -> FilterSpec:
    try:
        return FilterSpec.parse(text, shape)
    except ValueError as exc:
        raise CLIError(str(exc)) from None


def cmd_add_noise(args) -> None:
    img = _read(args.input)
    _write(args.output, save_pgm(add_salt_pepper(img, NoiseSpec(args.p, args.seed)), args.ascii))


def cmd_filter(args) -> None:
    img = _read(args.input)
    _write(args.output, save_pgm(apply_filter(img, _spec(args.spec, args.shape)), args.ascii))


def cmd_center(args) -> None:
    img = _read(args.input)
    _write(args.output, save_pgm(center(img, args.size, args.shape), args.ascii))


def cmd_si(args) -> None:
    img = _read(args.input)
    d = si_diagram(img, args.rmax, args.shape, args.cumulative, "close" if args.closing else "open")
    if args.csv:
        _write(args.csv, export_csv(d))
    if args.render:
        rendered = render_si(d, args.x_scale, args.y_scale, args.value_scale, args.r_crop, args.k_crop)
        _write(args.render, save_pgm(rendered))
    if not (args.csv or args.render):
        sys.stdout.write(export_csv(d).decode("ascii"))


def cmd_measure(args) -> None:
    images = [_read(p) for p in args.images]
    if len(images) == 3:
        rep = measure_report(*images, args.rmax, args.shape, args.aggregation)
        doc = {"m_scalar": rep.m_scalar, "m_per_r": list(rep.m_per_r), "mstar": rep.mstar, "aggregation": rep.aggregation}
    else:
        diff = images[0] if len(images) == 1 else abs_diff(*images)
        doc = {"m": measure_m(diff), "m_per_r": measure_m_family(diff, args.rmax, args.shape)}
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _write(args.out, text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def cmd_select(args) -> None:
    noisy = _read(args.input)
    rep = select_filter(
        noisy, _spec(args.ft1, args.shape), _spec(args.ft2, args.shape), args.rmax, args.shape, args.aggregation
    )
    if args.report:
        _write(args.report, report_to_json(rep))
    if args.dump:
        dump_intermediates(rep, args.dump)
    winner = {1: "ft1", 2: "ft2"}.get(rep.winner, "tie")
    print(f"M*(ft1)={rep.mstar_values[0]} M*(ft2)={rep.mstar_values[1]} winner={winner}"
          + (" degenerate" if rep.degenerate else ""))


_GA_FLAGS = {
    "population": "population_size",
    "generations": "generations",
    "max_stages": "max_stages",
    "max_se_size": "max_se_size",
    "mutation_rate": "mutation_rate",
    "crossover_rate": "crossover_rate",
    "tournament_size": "tournament_size",
    "reference": "reference_spec",
    "rmax": "r_max",
    "aggregation": "aggregation",
    "shape": "shape",
}


def _ga_config(args) -> GAConfig:
    values: dict = {}
    if args.config:
        text = Path(args.config).read_text()
        base = GAConfig.from_text(text)
        values = {k: getattr(base, k) for k in base.__dataclass_fields__}
    for flag, key in _GA_FLAGS.items():
        v = getattr(args, flag)
        if v is not None:
            values[key] = v
    values["seed"] = args.seed
    shape = values.get("shape", "square")
    ref = values.get("reference_spec")
    if isinstance(ref, str):
        values["reference_spec"] = _spec(ref, shape)
    for key, value in values.items():
        if not isinstance(value, (str, FilterSpec)):
            values[key] = str(value)
    return GAConfig.from_mapping(values)


def cmd_optimize(args) -> None:
    noisy = _read(args.input)
    cfg = _ga_config(args)
    best, history = evolve(noisy, cfg)
    if args.history:
        _write(args.history, history.to_csv())
    if args.output:
        _write(args.output, save_pgm(apply_filter(noisy, best.to_spec(cfg.shape))))
    mimics = sum(g.reference_mimics for g in history.generations)
    print(f"best={best} fitness={history.best_fitness} evaluations={history.evaluations} reference_mimics={mimics}")


def cmd_reproduce(args) -> None:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    original = _read(args.input) if args.input else sample_image()
    _write(outdir / "original.pgm", save_pgm(original))
    spec1, spec2 = _spec(args.ft1, args.shape), _spec(args.ft2, args.shape)

    def diagrams(img, stem: str) -> None:
        for cumulative, tag in ((False, "hist"), (True, "si")):
            d = si_diagram(img, args.rmax, args.shape, cumulative)
            _write(outdir / f"{stem}_{tag}.csv", export_csv(d))
            _write(outdir / f"{stem}_{tag}.pgm", save_pgm(render_si(d)))

    diagrams(original, "original")
    summary = {"ft1": str(spec1), "ft2": str(spec2), "r_max": args.rmax, "seed": args.seed, "levels": []}
    for p in args.levels:
        tag = f"p{round(p * 100):02d}"
        noisy = add_salt_pepper(original, NoiseSpec(p, args.seed))
        _write(outdir / f"noisy_{tag}.pgm", save_pgm(noisy))
        diagrams(noisy, f"noisy_{tag}")
        rep = select_filter(noisy, spec1, spec2, args.rmax, args.shape, args.aggregation)
        dump_intermediates(rep, outdir / tag)
        summary["levels"].append(
            {"p": p, "mstar_values": list(rep.mstar_values), "winner": rep.winner, "degenerate": rep.degenerate}
        )
        print(f"p={p}: M*(ft1)={rep.mstar_values[0]} M*(ft2)={rep.mstar_values[1]} winner={rep.winner}")
    _write(outdir / "summary.json", (json.dumps(summary, indent=2) + "\n").encode("utf-8"))


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must be in [0, 1], got {text}")
    return value


def _levels(text: str) -> list[float]:
    return [_probability(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphnoise",
        description="Reference-free noise measures from morphological Size/Intensity diagrams.",
        epilog=__doc__.split("\n", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def common(p, rmax=True, aggregation=False):
        p.add_argument("--shape", choices=SHAPES, default="square", help="structuring element shape")
        if rmax:
            p.add_argument("--rmax", type=int, default=DEFAULT_R_MAX, help="largest opening size (default 15)")
        if aggregation:
            p.add_argument("--aggregation", choices=AGGREGATIONS, default="elementwise_volume")

    p = sub.add_parser("add-noise", help="add salt-and-pepper noise")
    p.add_argument("--p", type=_probability, required=True, help="per-pixel corruption probability")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_add_noise)

    p = sub.add_parser("filter", help="apply a filter spec")
    p.add_argument("--spec", required=True, help="filter spec, e.g. center:2 or seq:open@1,close@2")
    p.add_argument("--ascii", action="store_true")
    common(p, rmax=False)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("center", help="morphological centre of the two ASFs")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--ascii", action="store_true")
    common(p, rmax=False)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_center)

    p = sub.add_parser("si", help="Size/Intensity diagram")
    common(p)
    p.add_argument("--cumulative", action="store_true", help="cumulate histograms over intensity")
    p.add_argument("--closing", action="store_true", help="use closings instead of openings")
    p.add_argument("--csv", help="write the diagram as CSV")
    p.add_argument("--render", help="write the rendered diagram as PGM")
    p.add_argument("--x-scale", type=int, default=5)
    p.add_argument("--y-scale", type=int, default=2)
    p.add_argument("--value-scale", type=int, default=50)
    p.add_argument("--r-crop", type=int)
    p.add_argument("--k-crop", type=int)
    p.add_argument("input")
    p.set_defaults(func=cmd_si)

    p = sub.add_parser(
        "measure",
        help="M of a difference image, or M* of NOISY FT OTHER",
        description="One image: M of it. Two images: M of their absolute difference. "
        "Three images (noisy, candidate output, other output): full M* report.",
    )
    common(p, aggregation=True)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("images", nargs="+")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("select", help="pick the better of two filters by M*")
    p.add_argument("--ft1", required=True)
    p.add_argument("--ft2", required=True)
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--dump", help="directory for intermediate images and diagrams")
    common(p, aggregation=True)
    p.add_argument("input")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("optimize", help="genetic search for an open/close sequence")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--config", help="key=value GA config file; flags override it")
    p.add_argument("--population", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--max-stages", type=int)
    p.add_argument("--max-se-size", type=int)
    p.add_argument("--mutation-rate", type=_probability)
    p.add_argument("--crossover-rate", type=_probability)
    p.add_argument("--tournament-size", type=int)
    p.add_argument("--reference", help="reference filter spec (default center:1)")
    p.add_argument("--rmax", type=int)
    p.add_argument("--aggregation", choices=AGGREGATIONS)
    p.add_argument("--shape", choices=SHAPES)
    p.add_argument("--history", help="write per-generation CSV here")
    p.add_argument("--output", help="write the best filter's output image here")
    p.add_argument("input")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("reproduce", help="run the two-filter experiment end to end")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--levels", type=_levels, default=[0.1, 0.5], help="comma-separated noise levels")
    p.add_argument("--ft1", default="center:2")
    p.add_argument("--ft2", default="center:5")
    common(p, aggregation=True)
    p.add_argument("input", nargs="?", help="clean input image (default: bundled sample)")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except (CLIError, ValueError, OSError) as exc:
        print(f"morphnoise: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
