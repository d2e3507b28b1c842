"""
Genetic search over open/close operator sequences.

A genome is a short list of ``(op, size)`` steps. Its fitness is the M*
score of the filtered image against the noisy input, with a fixed
reference filter supplying the second candidate (lower is better). Runs
are fully determined by ``GAConfig.seed``.
"""

from __future__ import annotations

import csv
import io
import logging
import random
from dataclasses import dataclass, field, fields
from typing import Iterable, Optional, Sequence

import numpy as np

from morphnoise.diagrams import DEFAULT_R_MAX
from morphnoise.image import as_image
from morphnoise.measures import AGGREGATIONS, measure_mstar
from morphnoise.morphology import OPS, SHAPES, FilterSpec, apply_filter

__all__ = [
    "GAConfig",
    "Genome",
    "GenerationStats",
    "History",
    "evolve",
    "fitness",
    "worst_fitness",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Genome:
    ops: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple((str(op), int(size)) for op, size in self.ops))
        if not self.ops:
            raise ValueError("genome needs at least one operation")

    def to_spec(self, se_shape: str = "square") -> FilterSpec:
        return FilterSpec.sequence(self.ops, se_shape=se_shape)

    def __str__(self) -> str:
        return str(self.to_spec())


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 20
    generations: int = 50
    max_stages: int = 4
    max_se_size: int = 5
    mutation_rate: float = 0.1
    crossover_rate: float = 0.7
    tournament_size: int = 3
    seed: int = 0
    reference_spec: FilterSpec = field(default_factory=lambda: FilterSpec("center", 1))
    r_max: int = DEFAULT_R_MAX
    aggregation: str = "elementwise_volume"
    shape: str = "square"

    def __post_init__(self):
        for name in ("population_size", "generations", "max_stages", "max_se_size", "tournament_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.tournament_size > self.population_size:
            raise ValueError("tournament_size cannot exceed population_size")
        for name in ("mutation_rate", "crossover_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"unknown aggregation {self.aggregation!r}")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown structuring element shape {self.shape!r}")
        if self.r_max < 0:
            raise ValueError("r_max must be non-negative")

    @classmethod
    def from_mapping(cls, values: dict) -> "GAConfig":
        """Build a config from string values, e.g. parsed ``key=value`` lines."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            if key not in types:
                raise ValueError(f"unknown GA config key {key!r}")
            raw = raw.strip() if isinstance(raw, str) else raw
            if key == "reference_spec":
                kwargs[key] = raw if isinstance(raw, FilterSpec) else FilterSpec.parse(raw, values.get("shape", "square"))
            elif types[key] == "int":
                kwargs[key] = int(raw)
            elif types[key] == "float":
                kwargs[key] = float(raw)
            else:
                kwargs[key] = raw
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "GAConfig":
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
            values[key.strip()] = value.strip()
        return cls.from_mapping(values)


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_fitness: int
    mean_fitness: float
    reference_mimics: int


@dataclass
class History:
    generations: list[GenerationStats] = field(default_factory=list)
    best_fitness: Optional[int] = None
    evaluations: int = 0

    def to_csv(self) -> bytes:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["generation", "best_fitness", "mean_fitness"])
        for g in self.generations:
            writer.writerow([g.generation, g.best_fitness, repr(g.mean_fitness)])
        return buf.getvalue().encode("ascii")


def worst_fitness(n, cfg: GAConfig) -> int:
    """Sentinel strictly above any attainable M* for an image of this size."""
    npix = as_image(n).size
    return (cfg.r_max + 1) * (255 * npix) ** 2 + 1


class _Evaluator:
    """Memoised fitness for one (image, config) pair."""

    def __init__(self, n, cfg: GAConfig):
        self.n = as_image(n)
        self.cfg = cfg
        self.reference = apply_filter(self.n, cfg.reference_spec)
        self.worst = worst_fitness(self.n, cfg)
        self.cache: dict[Genome, tuple[int, bool]] = {}

    def __call__(self, genome: Genome) -> int:
        return self.evaluate(genome)[0]

    def evaluate(self, genome: Genome) -> tuple[int, bool]:
        """Fitness and whether the genome reproduces the reference output."""
        if genome not in self.cache:
            cfg = self.cfg
            out = apply_filter(self.n, genome.to_spec(cfg.shape))
            mimic = bool(np.array_equal(out, self.reference))
            if np.array_equal(out, self.n):
                value = self.worst
            else:
                value = measure_mstar(self.n, out, self.reference, cfg.r_max, cfg.shape, cfg.aggregation)
            self.cache[genome] = (value, mimic)
        return self.cache[genome]


def fitness(genome: Genome, n, cfg: GAConfig) -> int:
    """M* of the genome's filter against ``cfg.reference_spec``; lower is better.

    Genomes whose output equals ``n`` get :func:`worst_fitness`, since a
    filter that does nothing would otherwise score a perfect 0.
    """
    return _Evaluator(n, cfg)(genome)


def _random_genome(rng: random.Random, cfg: GAConfig) -> Genome:
    length = rng.randint(1, cfg.max_stages)
    return Genome(tuple((rng.choice(OPS), rng.randint(1, cfg.max_se_size)) for _ in range(length)))


def _tournament(rng: random.Random, pop: Sequence[Genome], scores: Sequence[int], k: int) -> Genome:
    picks = rng.sample(range(len(pop)), k)
    return pop[min(picks, key=lambda i: scores[i])]


def _crossover(rng: random.Random, a: Genome, b: Genome, max_stages: int) -> tuple[Genome, Genome]:
    # cut points are independent, so lengths can change; children keep >= 1 op
    i = rng.randint(1, len(a.ops))
    j = rng.randint(1, len(b.ops))
    c1 = (a.ops[:i] + b.ops[j:])[:max_stages]
    c2 = (b.ops[:j] + a.ops[i:])[:max_stages]
    return Genome(c1), Genome(c2)


def _mutate(rng: random.Random, g: Genome, cfg: GAConfig) -> Genome:
    ops = list(g.ops)
    for idx, (op, size) in enumerate(ops):
        if rng.random() < cfg.mutation_rate:
            if rng.random() < 0.5:
                op = rng.choice(OPS)
            else:
                size = rng.randint(1, cfg.max_se_size)
            ops[idx] = (op, size)
    return Genome(tuple(ops))


def evolve(
    n,
    cfg: GAConfig = GAConfig(),
    initial_population: Optional[Iterable[Genome]] = None,
) -> tuple[Genome, History]:
    """Run the GA and return the best genome ever evaluated plus its history.

    Tournament selection, one-point crossover with independent cut points,
    per-gene mutation and an elite of one. ``history.generations[0]``
    describes the initial population.
    """
    rng = random.Random(cfg.seed)
    evaluator = _Evaluator(n, cfg)

    if initial_population is None:
        pop = [_random_genome(rng, cfg) for _ in range(cfg.population_size)]
    else:
        pop = [g if isinstance(g, Genome) else Genome(g) for g in initial_population]
        if len(pop) != cfg.population_size:
            raise ValueError(f"initial population has {len(pop)} genomes, expected {cfg.population_size}")
        for g in pop:
            if len(g.ops) > cfg.max_stages or any(not 1 <= s <= cfg.max_se_size or op not in OPS for op, s in g.ops):
                raise ValueError(f"genome {g} lies outside the configured search space")

    history = History()
    best: Optional[Genome] = None

    def record(generation: int) -> list[int]:
        nonlocal best
        results = [evaluator.evaluate(g) for g in pop]
        scores = [value for value, _ in results]
        for g, value in zip(pop, scores):
            if history.best_fitness is None or value < history.best_fitness:
                best, history.best_fitness = g, value
        history.generations.append(
            GenerationStats(
                generation=generation,
                best_fitness=min(scores),
                mean_fitness=sum(scores) / len(scores),
                reference_mimics=sum(mimic for _, mimic in results),
            )
        )
        history.evaluations = len(evaluator.cache)
        return scores

    scores = record(0)
    for generation in range(1, cfg.generations + 1):
        elite = pop[scores.index(min(scores))]
        nxt = [elite]
        while len(nxt) < cfg.population_size:
            p1 = _tournament(rng, pop, scores, cfg.tournament_size)
            p2 = _tournament(rng, pop, scores, cfg.tournament_size)
            if rng.random() < cfg.crossover_rate:
                p1, p2 = _crossover(rng, p1, p2, cfg.max_stages)
            nxt.append(_mutate(rng, p1, cfg))
            if len(nxt) < cfg.population_size:
                nxt.append(_mutate(rng, p2, cfg))
        pop = nxt
        scores = record(generation)
        logger.debug("generation %d: best=%d", generation, history.generations[-1].best_fitness)

    return best, history
