"""NSGA-II generational engine.

Generation 0 evaluates a random population. Every later generation produces
offspring, evaluates them under that generation's fold seed (dynamic mode also
re-scores every survivor under the same seed, appending to lifetime ledgers),
selects the next population from parents+offspring, and rebuilds the Pareto
frontier from the current population only.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._rng import spawn_rng
from .data import Dataset
from .fitness import Fitness, PipelineFailure, ScoreLedger, individual_fitness, kfold_score, record_generation
from .pipeline import DEFAULT_MAX_DEPTH, Individual, PipelineTree, crossover, mutate, random_pipeline

MUTATION_PROB = 0.9  # crossover gets the remaining 0.1


class InsufficientBudgetError(RuntimeError):
    """The time budget expired before a single generation completed."""


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 24
    offspring_size: int | None = None  # defaults to population_size
    k: int = 5
    max_generations: int | None = 20
    time_budget_seconds: float | None = None
    mode: str = "dynamic"
    master_seed: int = 0
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.offspring_size is not None and self.offspring_size < 1:
            raise ValueError("offspring_size must be at least 1")
        if self.mode not in ("dynamic", "static"):
            raise ValueError(f"mode must be 'dynamic' or 'static', got {self.mode!r}")
        if self.max_generations is None and self.time_budget_seconds is None:
            raise ValueError("at least one of max_generations / time_budget_seconds must be finite")

    @property
    def n_offspring(self) -> int:
        return self.offspring_size if self.offspring_size is not None else self.population_size


@dataclass(frozen=True)
class GenerationLog:
    generation: int
    evaluations_performed: int  # cumulative model trainings, k per evaluation
    best_objective1: float
    frontier: tuple[tuple[str, float, int, int], ...]  # (text, obj1, obj2, birth)

    def to_dict(self) -> dict:
        return {
            "generation": self.generation,
            "evaluations_performed": self.evaluations_performed,
            "best_objective1": self.best_objective1,
            "frontier": [list(f) for f in self.frontier],
        }


@dataclass
class EvolveResult:
    final_tree: PipelineTree
    final_individual: Individual
    frontier: list[Individual]
    logs: list[GenerationLog]
    generations_completed: int
    evaluations_total: int
    wall_seconds: float


# ------------------------------------------------------------------- NSGA-II


def fast_nondominated_sort(points: list[Fitness]) -> list[list[int]]:
    """Fronts of indices; front 0 is the non-dominated set."""
    n = len(points)
    if n == 0:
        raise ValueError("empty point list")
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = [0] * n
    fronts: list[list[int]] = [[]]
    for p in range(n):
        for q in range(n):
            if points[p].dominates(points[q]):
                dominated_by[p].append(q)
            elif points[q].dominates(points[p]):
                domination_count[p] += 1
        if domination_count[p] == 0:
            fronts[0].append(p)
    i = 0
    while fronts[i]:
        nxt = []
        for p in fronts[i]:
            for q in dominated_by[p]:
                domination_count[q] -= 1
                if domination_count[q] == 0:
                    nxt.append(q)
        fronts.append(sorted(nxt))
        i += 1
    fronts.pop()
    return fronts


def crowding_distance(front: list[Fitness]) -> list[float]:
    """Standard NSGA-II crowding: boundary points infinite, interior points
    sum of normalized neighbor gaps per objective. Stable index tie-break."""
    n = len(front)
    if n == 0:
        raise ValueError("empty front")
    dist = [0.0] * n
    for values in ([p.objective1 for p in front], [float(p.objective2) for p in front]):
        order = sorted(range(n), key=lambda i: (values[i], i))
        lo, hi = values[order[0]], values[order[-1]]
        dist[order[0]] = dist[order[-1]] = float("inf")
        if hi == lo:
            continue
        for j in range(1, n - 1):
            dist[order[j]] += (values[order[j + 1]] - values[order[j - 1]]) / (hi - lo)
    return dist


def nsga2_select(pool: list[Individual], n: int) -> list[Individual]:
    """Elitist selection: fill by front rank, split the cut front by
    descending crowding distance with lower id breaking ties."""
    if len(pool) < n:
        raise ValueError(f"pool of {len(pool)} cannot fill {n} slots")
    max_depth = pool[0].tree.max_depth
    fits = [individual_fitness(ind, max_depth) for ind in pool]
    selected: list[Individual] = []
    for front in fast_nondominated_sort(fits):
        if len(selected) + len(front) <= n:
            selected.extend(pool[i] for i in front)
            if len(selected) == n:
                break
            continue
        crowd = crowding_distance([fits[i] for i in front])
        ranked = sorted(
            range(len(front)), key=lambda j: (-crowd[j], pool[front[j]].id)
        )
        selected.extend(pool[front[j]] for j in ranked[: n - len(selected)])
        break
    return selected


# ----------------------------------------------------------------- main loop


def _evaluate(inds: list[Individual], train: Dataset, k: int, fold_seed: int,
              generation: int, workers: int) -> list[Individual]:
    """Score each individual with one k-fold run and append to its ledger.

    Failures append a zero score and set the sticky failed flag. Results are
    merged in id order, so output is independent of worker count.
    """

    def one(ind: Individual) -> Individual:
        try:
            score = kfold_score(ind.tree, train, k, fold_seed)
        except PipelineFailure:
            ledger = ScoreLedger(ind.ledger.entries, failed=True).append(generation, 0.0)
            return Individual(ind.tree, ind.birth_generation, ind.id, ledger)
        return record_generation(ind, score, generation)

    if workers <= 1 or len(inds) <= 1:
        return [one(ind) for ind in inds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        done = {ind.id: ind for ind in pool.map(one, inds)}
    return [done[ind.id] for ind in inds]


def _make_offspring(population: list[Individual], cfg: EvolutionConfig,
                    generation: int, next_id: int) -> list[Individual]:
    """offspring_size independent draws: mutation (p=0.9) of a tournament-of-2
    winner by front rank, or crossover (p=0.1) of two winners."""
    max_depth = cfg.max_depth
    fits = [individual_fitness(ind, max_depth) for ind in population]
    rank = [0] * len(population)
    for r, front in enumerate(fast_nondominated_sort(fits)):
        for i in front:
            rank[i] = r
    rng = spawn_rng(cfg.master_seed, generation, 0x0FF5)

    def tournament() -> Individual:
        i, j = int(rng.integers(len(population))), int(rng.integers(len(population)))
        if rank[i] < rank[j]:
            return population[i]
        if rank[j] < rank[i]:
            return population[j]
        return population[i if rng.integers(2) == 0 else j]

    offspring = []
    for _ in range(cfg.n_offspring):
        op_seed = int(rng.integers(2**62))
        if rng.random() < MUTATION_PROB:
            tree = mutate(tournament().tree, op_seed, max_depth)
        else:
            tree = crossover(tournament().tree, tournament().tree, op_seed, max_depth)
        offspring.append(Individual(tree, generation, next_id))
        next_id += 1
    return offspring


def _frontier(population: list[Individual], max_depth: int) -> list[Individual]:
    fits = [individual_fitness(ind, max_depth) for ind in population]
    return [population[i] for i in fast_nondominated_sort(fits)[0]]


def _log(generation: int, evaluations: int, population: list[Individual],
         frontier: list[Individual], max_depth: int) -> GenerationLog:
    best = max(individual_fitness(i, max_depth).objective1 for i in population)
    entries = tuple(
        (ind.tree.to_text(),
         individual_fitness(ind, max_depth).objective1,
         individual_fitness(ind, max_depth).objective2,
         ind.birth_generation)
        for ind in sorted(frontier, key=lambda i: i.id)
    )
    return GenerationLog(generation, evaluations, best, entries)


def evolve(cfg: EvolutionConfig, train: Dataset, *, workers: int = 1,
           initial_trees: list[PipelineTree] | None = None,
           survivor_selector=None, log_stream=None) -> EvolveResult:
    """Run the full generational loop and pick the final model.

    The final model is the frontier member with the highest objective 1,
    ties resolved to lower complexity and then lower id. ``initial_trees``
    and ``survivor_selector`` exist for experiments that need a fixed seed
    population or non-standard survival (e.g. everyone survives).
    """
    start = time.monotonic()
    select = survivor_selector or (lambda pop, off, n: nsga2_select(pop + off, n))

    if initial_trees is not None:
        if len(initial_trees) != cfg.population_size:
            raise ValueError("initial_trees length must equal population_size")
        trees = list(initial_trees)
    else:
        trees = [
            random_pipeline(int(s), cfg.max_depth)
            for s in spawn_rng(cfg.master_seed, 0x1417).integers(2**62, size=cfg.population_size)
        ]
    population = [Individual(t, 0, i) for i, t in enumerate(trees)]
    next_id = len(population)

    evaluations = 0
    logs: list[GenerationLog] = []

    def emit(log: GenerationLog):
        logs.append(log)
        if log_stream is not None:
            log_stream.write(json.dumps(log.to_dict()) + "\n")
            log_stream.flush()

    def out_of_time() -> bool:
        return (
            cfg.time_budget_seconds is not None
            and time.monotonic() - start > cfg.time_budget_seconds
        )

    # generation 0: whole population under seed master+0 in both modes
    population = _evaluate(population, train, cfg.k, cfg.master_seed, 0, workers)
    evaluations += cfg.k * len(population)
    frontier = _frontier(population, cfg.max_depth)
    emit(_log(0, evaluations, population, frontier, cfg.max_depth))

    generations_completed = 0
    g = 0
    while True:
        if cfg.max_generations is not None and generations_completed >= cfg.max_generations:
            break
        if out_of_time():
            if generations_completed == 0 and cfg.max_generations != 0:
                raise InsufficientBudgetError(
                    "time budget expired before any generation completed"
                )
            break
        g += 1
        offspring = _make_offspring(population, cfg, g, next_id)
        next_id += len(offspring)
        fold_seed = cfg.master_seed + g
        if cfg.mode == "dynamic":
            offspring = _evaluate(offspring, train, cfg.k, fold_seed, g, workers)
            population = _evaluate(population, train, cfg.k, fold_seed, g, workers)
            evaluations += cfg.k * (len(offspring) + len(population))
        else:
            offspring = _evaluate(offspring, train, cfg.k, cfg.master_seed, g, workers)
            evaluations += cfg.k * len(offspring)
        population = select(population, offspring, cfg.population_size)
        frontier = _frontier(population, cfg.max_depth)
        generations_completed = g
        emit(_log(g, evaluations, population, frontier, cfg.max_depth))

    best = min(
        frontier,
        key=lambda ind: (
            -individual_fitness(ind, cfg.max_depth).objective1,
            ind.tree.complexity,
            ind.id,
        ),
    )
    return EvolveResult(
        final_tree=best.tree,
        final_individual=best,
        frontier=frontier,
        logs=logs,
        generations_completed=generations_completed,
        evaluations_total=evaluations,
        wall_seconds=time.monotonic() - start,
    )


def evaluation_count(mode: str, k: int, generations: int, population_size: int,
                     offspring_size: int) -> int:
    """Total model trainings: per-generation cost formula plus the
    generation-0 population term."""
    if min(k, generations, population_size, offspring_size) < 0:
        raise ValueError("inputs must be nonnegative")
    gen0 = k * population_size
    if mode == "dynamic":
        return gen0 + k * generations * (offspring_size + population_size)
    if mode == "static":
        return gen0 + k * generations * offspring_size
    if mode == "repeated":
        raise ValueError("repeated r*k is a reference formula; use repeated_evaluation_count")
    raise ValueError(f"unknown mode {mode!r}")


def repeated_evaluation_count(r: int, k: int, generations: int, offspring_size: int) -> int:
    """Reference cost of conventional r*k-fold evaluation."""
    return r * k * generations * offspring_size
