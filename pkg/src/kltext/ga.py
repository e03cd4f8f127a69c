"""Binary-mask reduction of class dimension by an elitist genetic algorithm.

A chromosome is a 0/1 mask over a class's nonzero centroid coordinates.
A mask is admissible when every class document, after masking and
renormalization, stays strictly closer to the masked own centroid than to
the (unmasked) centroids of the other classes.  Fitness gates on the
fraction of documents that stay contained, then rewards zeroed coordinates,
with retained masked energy as a small tie-breaker.

All randomness flows through one numpy PCG64 generator seeded from the
config; draws happen in a fixed order (initial population row by row, then
per generation: parent pairs, crossover points, mutations), so a run is
fully replayable from its seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InfeasibleClassError

# Weight of the retained-energy tie-breaker among equally reduced masks.
ENERGY_TIEBREAK = 0.01
# Gene-1 probability when drawing the random part of the initial population.
INIT_ONE_PROB = 0.9


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 64
    mutation_probability: float = 0.2
    max_generations: int = 200
    stagnation_limit: int = 30
    theta: float = 0.9  # containment threshold
    rho: float = 0.5  # reduction weight once feasible
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 2")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ValueError("mutation_probability must be in [0, 1]")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.stagnation_limit < 1:
            raise ValueError("stagnation_limit must be >= 1")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must be in [0, 1]")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must be in [0, 1]")


@dataclass
class GaResult:
    best: np.ndarray
    best_fitness: float
    containment: float  # fraction of docs separated under `best`
    reduction: float  # fraction of genes zeroed
    generations_run: int
    fitness_history: list[float] = field(default_factory=list)


def _as_genes(genes) -> np.ndarray:
    g = np.asarray(genes, dtype=np.uint8)
    if g.ndim != 1:
        raise DimensionMismatchError("a chromosome must be a 1-d bit vector")
    return g


def mask_apply(genes, b):
    """Coordinate-wise product of mask and vector, renormalized to unit length.

    Returns (vector, raw_norm).  A mask that zeroes the whole vector yields
    (zero vector, 0.0) so callers can treat it as degenerate without a crash.
    """
    g = _as_genes(genes)
    b = np.asarray(b, dtype=np.float64)
    if b.shape != g.shape:
        raise DimensionMismatchError(f"mask length {g.size} != vector length {b.size}")
    masked = b * g
    raw_norm = float(np.linalg.norm(masked))
    if raw_norm == 0.0:
        return masked, 0.0
    return masked / raw_norm, raw_norm


def _stats(g: np.ndarray, docs: np.ndarray, centroid: np.ndarray, others: np.ndarray):
    """(separated count, retained masked energy) for one mask, vectorized.

    The document-side norm cancels from both sides of the separation
    inequality, so masked documents are compared unnormalized.
    """
    gf = g.astype(np.float64)
    masked_docs = docs * gf
    doc_energy = np.einsum("ij,ij->i", masked_docs, masked_docs)
    masked_cent = centroid * gf
    cent_norm = float(np.linalg.norm(masked_cent))
    if cent_norm == 0.0:
        return 0, float(doc_energy.sum())
    own = masked_docs @ (masked_cent / cent_norm)
    if others.size:
        rival = (masked_docs @ others.T).max(axis=1)
    else:
        rival = np.full(docs.shape[0], -np.inf)
    satisfied = (doc_energy > 0.0) & (own > rival)
    return int(satisfied.sum()), float(doc_energy.sum())


def is_allowed(genes, class_docs, own_centroid, other_centroids):
    """Does every class document stay separated under this mask?

    Documents and the own centroid are masked then renormalized; the other
    classes' centroids are compared unmasked.  Returns (allowed,
    satisfied_count); a mask that zeroes a document or the centroid counts
    as unsatisfied, never as an error.
    """
    g = _as_genes(genes)
    docs, centroid, others = _as_instance(class_docs, own_centroid, other_centroids)
    if g.size != centroid.size:
        raise DimensionMismatchError(f"mask length {g.size} != coordinate count {centroid.size}")
    count, _ = _stats(g, docs, centroid, others)
    return count == docs.shape[0], count


def _fitness_value(count, energy, g, n_docs, total_energy, cfg: GaConfig) -> float:
    containment = count / n_docs
    if containment < cfg.theta:
        return containment
    reduction = 1.0 - float(g.sum()) / g.size
    retained = energy / total_energy if total_energy > 0 else 0.0
    return cfg.theta + cfg.rho * reduction + (1.0 - cfg.rho) * retained * ENERGY_TIEBREAK


def fitness(genes, class_docs, own_centroid, other_centroids, cfg: GaConfig) -> float:
    """Containment below theta; past the gate, reduction with an energy tie-break.

    Any mask meeting the containment threshold outranks every mask that does
    not; among feasible masks, more zeroed genes win and retained energy
    breaks ties.
    """
    g = _as_genes(genes)
    docs, centroid, others = _as_instance(class_docs, own_centroid, other_centroids)
    count, energy = _stats(g, docs, centroid, others)
    return _fitness_value(count, energy, g, docs.shape[0], float(np.sum(docs * docs)), cfg)


def select_parents(fitnesses, rng, n_pairs: int | None = None) -> list[tuple[int, int]]:
    """Threshold selection: parents come from the at-or-above-mean pool.

    Pairs are drawn uniformly from the eligible pool with replacement across
    pairs; the two members of one pair are always distinct.  If fewer than
    two individuals clear the mean (all-equal fitness), the whole population
    is eligible.
    """
    fitnesses = list(fitnesses)
    if not fitnesses:
        raise ValueError("population is empty")
    if n_pairs is None:
        n_pairs = len(fitnesses) // 2
    mean = float(np.mean(fitnesses))
    eligible = [i for i, f in enumerate(fitnesses) if f >= mean]
    if len(eligible) < 2:
        eligible = list(range(len(fitnesses)))
    pairs: list[tuple[int, int]] = []
    for _ in range(n_pairs):
        a = int(rng.integers(len(eligible)))
        if len(eligible) == 1:
            b = a  # a lone survivor pairs with itself
        else:
            b = int(rng.integers(len(eligible) - 1))
            if b >= a:
                b += 1
        pairs.append((eligible[a], eligible[b]))
    return pairs


def splice(x, y, point: int):
    """Exchange tails at `point`: (x[:p] + y[p:], y[:p] + x[p:])."""
    x = _as_genes(x)
    y = _as_genes(y)
    if x.size != y.size:
        raise DimensionMismatchError("parents must have equal length")
    if not 1 <= point < x.size:
        raise ValueError(f"crossover point must be in 1..{x.size - 1}")
    return (
        np.concatenate([x[:point], y[point:]]),
        np.concatenate([y[:point], x[point:]]),
    )


def crossover(x, y, rng):
    """Single-point crossover at a break point drawn uniformly from 1..L-1."""
    x = _as_genes(x)
    y = _as_genes(y)
    if x.size != y.size:
        raise DimensionMismatchError("parents must have equal length")
    if x.size < 2:
        raise ValueError("crossover needs chromosomes of length >= 2")
    point = int(rng.integers(1, x.size))
    return splice(x, y, point)


def mutate(genes, cfg: GaConfig, rng) -> np.ndarray:
    """With probability cfg.mutation_probability, flip one uniformly chosen gene."""
    g = _as_genes(genes).copy()
    if float(rng.random()) < cfg.mutation_probability:
        g[int(rng.integers(g.size))] ^= 1
    return g


def _rank_key(fitness_value: float, genes: np.ndarray):
    # Best first: higher fitness, then fewer ones, then lexicographic genes.
    return (-fitness_value, int(genes.sum()), genes.tobytes())


def next_generation(population, offspring, fitness_fn, size: int | None = None) -> list[np.ndarray]:
    """Elite survival: best `size` individuals of parents | offspring.

    The union collapses duplicate chromosomes, so clones of the current best
    cannot crowd every explorer out of the pool; the population may therefore
    temporarily hold fewer individuals than its nominal size.
    """
    if size is None:
        size = len(population)
    union: dict[bytes, np.ndarray] = {}
    for g in list(population) + list(offspring):
        union.setdefault(g.tobytes(), g)
    survivors = sorted(union.values(), key=lambda g: _rank_key(fitness_fn(g), g))
    return survivors[:size]


def _as_instance(class_docs, own_centroid, other_centroids):
    docs = np.asarray(class_docs, dtype=np.float64)
    centroid = np.asarray(own_centroid, dtype=np.float64)
    others = np.asarray(other_centroids, dtype=np.float64)
    if others.size == 0:
        others = np.empty((0, centroid.size))
    if docs.ndim != 2 or centroid.ndim != 1 or docs.shape[1] != centroid.size:
        raise DimensionMismatchError("class docs and centroid must share one coordinate order")
    if others.ndim != 2 or others.shape[1] != centroid.size:
        raise DimensionMismatchError("other centroids must share the class coordinate order")
    return docs, centroid, others


def run_ga(class_docs, own_centroid, other_centroids, cfg: GaConfig) -> GaResult:
    """Search for the most reduced admissible mask of one class.

    The initial population is the all-ones mask plus random masks with
    gene-1 probability 0.9, so a separable class always starts feasible.
    Raises InfeasibleClassError when even the all-ones mask falls short of
    the containment threshold (the class is inseparable as given).
    """
    docs, centroid, others = _as_instance(class_docs, own_centroid, other_centroids)
    n_docs, length = docs.shape
    if n_docs < 1:
        raise ValueError("class must contain at least one document")

    cache: dict[bytes, tuple[float, int]] = {}
    total_energy = float(np.sum(docs * docs))

    def evaluate(g: np.ndarray) -> tuple[float, int]:
        key = g.tobytes()
        hit = cache.get(key)
        if hit is None:
            count, energy = _stats(g, docs, centroid, others)
            hit = (_fitness_value(count, energy, g, n_docs, total_energy, cfg), count)
            cache[key] = hit
        return hit

    all_ones = np.ones(length, dtype=np.uint8)
    _, ones_count = evaluate(all_ones)
    ones_containment = ones_count / n_docs
    if ones_containment < cfg.theta:
        raise InfeasibleClassError(
            f"class is inseparable: identity mask contains only "
            f"{ones_containment:.3f} < theta={cfg.theta}",
            ones_containment,
        )

    rng = np.random.default_rng(cfg.seed)
    random_block = (rng.random((cfg.population_size - 1, length)) < INIT_ONE_PROB).astype(np.uint8)
    population = next_generation(
        [all_ones] + [row for row in random_block], [],
        lambda g: evaluate(g)[0], size=cfg.population_size,
    )

    best_fitness = evaluate(population[0])[0]
    history = [best_fitness]
    stagnant = 0
    generations = 0
    for _ in range(cfg.max_generations):
        fitnesses = [evaluate(g)[0] for g in population]
        pairs = select_parents(fitnesses, rng, n_pairs=cfg.population_size // 2)
        offspring: list[np.ndarray] = []
        for i, j in pairs:
            if length >= 2 and i != j:
                child_a, child_b = crossover(population[i], population[j], rng)
            else:
                child_a, child_b = population[i].copy(), population[j].copy()
            offspring.append(mutate(child_a, cfg, rng))
            offspring.append(mutate(child_b, cfg, rng))
        population = next_generation(
            population, offspring, lambda g: evaluate(g)[0], size=cfg.population_size
        )
        generations += 1
        current = evaluate(population[0])[0]
        history.append(current)
        if current > best_fitness:
            best_fitness = current
            stagnant = 0
        else:
            stagnant += 1
        if stagnant >= cfg.stagnation_limit:
            break

    best = population[0]
    fit, count = evaluate(best)
    return GaResult(
        best=best.copy(),
        best_fitness=fit,
        containment=count / n_docs,
        reduction=1.0 - float(best.sum()) / length,
        generations_run=generations,
        fitness_history=history,
    )
