"""Population search over node orderings.

Each individual is a permutation vector; its fitness is the penalized
least-squares objective at the optimal inner weight solution for that
ordering, so every evaluation runs the proximal solver.  One generation is
selection (inverse-fitness proportional resampling), order-based crossover on
a random even subset, adjacent-swap mutation of the children, and in-place
replacement.  The loop stops when the population entropy collapses, when the
mean fitness stops moving over a trailing window, or at the generation cap.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonPositiveFitnessError
from .model import Permutation
from .solver import SolverConfig, data_matrix, lipschitz_bound, solve

FITNESS_FLOOR = 1e-12  # below this, inverse weighting blows up; fall back to ranks


class StopReason(str, Enum):
    ENTROPY = "entropy"
    FITNESS_PLATEAU = "fitness_plateau"
    MAX_GENERATIONS = "max_generations"


@dataclass(frozen=True)
class Individual:
    perm: Permutation
    fitness: float | None = None
    t_star: np.ndarray | None = None


@dataclass(frozen=True)
class GaConfig:
    """Search tunables.  population_size and max_generations default to 5*p
    when left None (resolved against the data at run time)."""

    population_size: int | None = None
    crossover_prob: float = 0.25
    mutation_prob: float = 0.5
    entropy_tol: float = 1e-6
    fitness_tol: float = 1e-4
    plateau_window: int = 5
    max_generations: int | None = None
    max_evaluations: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.population_size is not None and self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        for name in ("crossover_prob", "mutation_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if not self.entropy_tol > 0 or not self.fitness_tol > 0:
            raise ValueError("tolerances must be > 0")
        if self.plateau_window < 1:
            raise ValueError("plateau_window must be >= 1")
        if self.max_generations is not None and self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    mean_fitness: float
    best_fitness: float
    entropy: float
    evals: int


@dataclass(frozen=True)
class GaReport:
    """Search outcome.  `generations` counts evaluated population states, the
    initial population being generation 1; `best` is the lowest-fitness
    individual ever evaluated, which selection may since have discarded."""

    best: Individual
    generations: int
    stop_reason: StopReason
    history: tuple[GenerationRecord, ...]


def evaluate(
    ind: Individual,
    X,
    lam: float,
    lipschitz: float | None = None,
    *,
    solver: SolverConfig | None = None,
    t_init=None,
) -> Individual:
    """Solve the inner problem for this ordering and cache (t_star, fitness)."""
    template = solver if solver is not None else SolverConfig(lam=lam)
    cfg = replace(template, lam=lam, lipschitz=lipschitz if lipschitz is not None else template.lipschitz)
    report = solve(X, ind.perm, cfg, t_init=t_init)
    return Individual(perm=ind.perm, fitness=report.objective, t_star=report.t_star.entries)


def selection_probabilities(fitnesses) -> np.ndarray:
    """Inverse-fitness proportional weights (1/J_i) / sum(1/J_m).

    Near-zero fitnesses make inverse weighting blow up, so when any J_i falls
    below FITNESS_FLOOR the weights fall back to 1/rank with rank 1 the best.
    """
    f = np.asarray(fitnesses, dtype=np.float64)
    if np.any(f < 0):
        raise NonPositiveFitnessError("fitness values must be positive for selection")
    if np.any(f <= FITNESS_FLOOR):
        order = np.argsort(f, kind="stable")
        w = np.empty(len(f))
        w[order] = 1.0 / np.arange(1, len(f) + 1)
    else:
        w = 1.0 / f
    return w / w.sum()


def select(pop: Sequence[Individual], rng: np.random.Generator) -> list[Individual]:
    """Resample N individuals with replacement, inverse-proportionally to fitness."""
    probs = selection_probabilities([ind.fitness for ind in pop])
    idx = rng.choice(len(pop), size=len(pop), replace=True, p=probs)
    return [pop[i] for i in idx]


def order_crossover(
    p1: Permutation, p2: Permutation, omega: Iterable[int]
) -> tuple[Permutation, Permutation]:
    """Order-based crossover with a fixed retained value set.

    Child 1 keeps the omega values at their positions in p1 and fills the rest
    in the order they appear in p2; child 2 swaps the parents' roles.
    """
    if p1.p != p2.p:
        raise ValueError("parents must have the same length")
    omega_set = frozenset(int(v) for v in omega)
    if not omega_set <= set(range(1, p1.p + 1)):
        raise ValueError("omega must be a subset of the gene values 1..p")

    def fill(keep_from: tuple[int, ...], fill_from: tuple[int, ...]) -> tuple[int, ...]:
        rest = iter(v for v in fill_from if v not in omega_set)
        return tuple(v if v in omega_set else next(rest) for v in keep_from)

    return Permutation(fill(p1.ranks, p2.ranks)), Permutation(fill(p2.ranks, p1.ranks))


def crossover(
    p1: Permutation, p2: Permutation, rng: np.random.Generator
) -> tuple[Permutation, Permutation]:
    """Draw k uniform on {0..p} and a k-subset of gene values, then recombine."""
    p = p1.p
    k = int(rng.integers(0, p + 1))
    omega = rng.choice(p, size=k, replace=False) + 1
    return order_crossover(p1, p2, omega)


def adjacent_swap(perm: Permutation, index: int) -> Permutation:
    """Swap the entries at 0-based positions index and index+1."""
    if not 0 <= index < perm.p - 1:
        raise ValueError(f"index must be in [0, {perm.p - 2}]")
    ranks = list(perm.ranks)
    ranks[index], ranks[index + 1] = ranks[index + 1], ranks[index]
    return Permutation(tuple(ranks))


def mutate(perm: Permutation, rng: np.random.Generator) -> Permutation:
    """Swap one uniformly chosen pair of neighbouring genes."""
    if perm.p < 2:
        raise ValueError("mutation needs p >= 2")
    return adjacent_swap(perm, int(rng.integers(0, perm.p - 1)))


def entropy(pop: Sequence[Individual | Permutation]) -> tuple[float, np.ndarray]:
    """Shannon entropy of the population, per rank position and in total.

    Position j contributes -sum_i (N_ij/N) ln(N_ij/N) where N_ij counts
    individuals with value i at position j; zero when everyone agrees.
    """
    perms = [ind.perm if isinstance(ind, Individual) else ind for ind in pop]
    if not perms:
        raise ValueError("population is empty")
    p = perms[0].p
    n = len(perms)
    counts = np.zeros((p, p))
    cols = np.arange(p)
    for perm in perms:
        counts[np.asarray(perm.ranks, dtype=np.intp) - 1, cols] += 1.0
    freq = counts / n
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(freq > 0, freq * np.log(freq), 0.0)
    per_position = -terms.sum(axis=0)
    return float(per_position.sum()), per_position


def _default_threads() -> int:
    return os.cpu_count() or 1


def run(
    X,
    lam: float,
    cfg: GaConfig,
    *,
    solver: SolverConfig | None = None,
    threads: int | None = None,
    seed_individuals: Sequence[Permutation] = (),
    warm_start: tuple[Permutation, np.ndarray] | None = None,
    on_generation: Callable[[GenerationRecord], None] | None = None,
) -> GaReport:
    """Run the full search and return the best individual ever evaluated.

    The initial population is `seed_individuals` (if any) topped up with
    uniform random permutations.  `warm_start` is an optional (perm, T) pair
    used to initialize the inner solver the first time that exact ordering is
    evaluated.  Results are deterministic given cfg.seed: randomness is
    consumed only by the operators, never by evaluation, and the per-ordering
    fitness cache makes the thread count invisible in the output.
    """
    x = data_matrix(X)
    n, p = x.shape
    pop_size = cfg.population_size if cfg.population_size is not None else 5 * p
    if pop_size < 2:
        raise ValueError("population_size must be >= 2")
    max_gen = cfg.max_generations if cfg.max_generations is not None else 5 * p
    template = solver if solver is not None else SolverConfig(lam=lam)
    lip = template.lipschitz if template.lipschitz is not None else lipschitz_bound(x)
    solver_cfg = replace(template, lam=lam, lipschitz=lip)
    n_threads = max(1, threads if threads is not None else _default_threads())
    rng = np.random.default_rng(cfg.seed)

    warm: dict[tuple[int, ...], np.ndarray] = {}
    if warm_start is not None:
        warm_perm, warm_t = warm_start
        warm[warm_perm.ranks] = np.asarray(warm_t, dtype=np.float64)

    cache: dict[tuple[int, ...], tuple[float, np.ndarray]] = {}

    def solve_ranks(ranks: tuple[int, ...]) -> tuple[float, np.ndarray]:
        report = solve(x, Permutation(ranks), solver_cfg, t_init=warm.get(ranks))
        return report.objective, report.t_star.entries

    def ensure_evaluated(perms: Sequence[Permutation]) -> int:
        missing = sorted({pm.ranks for pm in perms} - cache.keys())
        if not missing:
            return 0
        if n_threads > 1 and len(missing) > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                results = list(pool.map(solve_ranks, missing))
        else:
            results = [solve_ranks(r) for r in missing]
        cache.update(zip(missing, results))
        return len(missing)

    def materialize(perms: Sequence[Permutation]) -> list[Individual]:
        return [
            Individual(pm, fitness=cache[pm.ranks][0], t_star=cache[pm.ranks][1]) for pm in perms
        ]

    perms = [Permutation(pm.ranks) for pm in seed_individuals][:pop_size]
    while len(perms) < pop_size:
        perms.append(Permutation.random(p, rng))
    evals = ensure_evaluated(perms)
    total_evals = evals
    pop = materialize(perms)

    best = pop[0]
    for ind in pop[1:]:
        if ind.fitness < best.fitness:
            best = ind

    h_total, _ = entropy(pop)
    means = [float(np.mean([ind.fitness for ind in pop]))]
    history = [
        GenerationRecord(1, means[-1], min(ind.fitness for ind in pop), h_total, evals)
    ]
    if on_generation is not None:
        on_generation(history[-1])
    e_j = math.inf
    cycles = 0

    while True:
        if h_total <= cfg.entropy_tol:
            reason = StopReason.ENTROPY
            break
        if e_j <= cfg.fitness_tol:
            reason = StopReason.FITNESS_PLATEAU
            break
        if cycles >= max_gen or (
            cfg.max_evaluations is not None and total_evals >= cfg.max_evaluations
        ):
            reason = StopReason.MAX_GENERATIONS
            break

        pop = select(pop, rng)
        subset = list(np.flatnonzero(rng.random(pop_size) < cfg.crossover_prob))
        if len(subset) % 2 == 1:
            subset.pop(int(rng.integers(0, len(subset))))
        pairing = rng.permutation(len(subset))
        children: dict[int, Permutation] = {}
        for t in range(0, len(subset), 2):
            slot_a, slot_b = subset[pairing[t]], subset[pairing[t + 1]]
            child_a, child_b = crossover(pop[slot_a].perm, pop[slot_b].perm, rng)
            if rng.random() < cfg.mutation_prob:
                child_a = mutate(child_a, rng)
            if rng.random() < cfg.mutation_prob:
                child_b = mutate(child_b, rng)
            children[slot_a] = child_a
            children[slot_b] = child_b

        evals = ensure_evaluated(list(children.values()))
        total_evals += evals
        new_individuals = materialize(list(children.values()))
        for slot, ind in zip(children.keys(), new_individuals):
            pop[slot] = ind
        assert len(pop) == pop_size

        for ind in pop:
            if ind.fitness < best.fitness:
                best = ind

        h_total, _ = entropy(pop)
        mean_now = float(np.mean([ind.fitness for ind in pop]))
        window = means[-(cfg.plateau_window + 1) :]
        e_j = max(abs(mean_now - past) for past in window)
        means.append(mean_now)
        cycles += 1
        history.append(
            GenerationRecord(
                cycles + 1, mean_now, min(ind.fitness for ind in pop), h_total, evals
            )
        )
        if on_generation is not None:
            on_generation(history[-1])

    return GaReport(
        best=best,
        generations=len(history),
        stop_reason=reason,
        history=tuple(history),
    )
