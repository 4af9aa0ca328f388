"""Tuner implementations behind a single run interface.

``cotune_run`` co-evolves an auxiliary proposition with two configuration
populations; ``ga_run`` is the same engine without requirement co-evolution
(satisfaction objective) or a plain single-population GA on raw performance;
``random_run`` is the uniform sampling sanity baseline.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from . import reqevolve
from .entropy import differential_entropy
from .ga import GAParams, Member, make_offspring, preserve_top
from .landscape import BudgetExhausted, BudgetMeter, Landscape, measure
from .requirement import Proposition


@dataclass
class TunerParams:
    budget: int = 300
    population_size: int = 10
    generations: int = 30
    stagnation_cap: int = 3
    mutation_rate: float = 0.1
    crossover_rate: float = 0.9
    early_stop: bool = True
    # ablation switches for the three requirement-evolution cases
    enable_case0: bool = True
    enable_case1: bool = True
    enable_case2: bool = True
    # "history": best over every measured configuration (default, strictly
    # safer); "populations": best over the two current populations only
    best_from: str = "history"

    def ga_params(self) -> GAParams:
        return GAParams(
            mutation_rate=self.mutation_rate,
            crossover_rate=self.crossover_rate,
            population_size=self.population_size,
            generations=self.generations,
        )


@dataclass(frozen=True)
class TrajectoryRow:
    iteration: int
    budget_used: int
    best_pt_score: float
    guiding_proposition: str
    case_fired: str
    theta: float
    entropy_pa: float


@dataclass
class TunerResult:
    tuner: str
    best_config: tuple
    best_score: float
    trajectory: list = field(default_factory=list)
    events: list = field(default_factory=list)
    budget_consumed: int = 0


def compute_theta(mean_pt_a, mean_pt_t, improvement_a, improvement_t):
    """Probability of letting the auxiliary proposition guide this iteration.

    Each weight combines how well the population serves the target with the
    progress its own proposition achieved last iteration (floored at 0).
    """
    w_a = mean_pt_a + max(0.0, improvement_a)
    w_t = mean_pt_t + max(0.0, improvement_t)
    if w_a == 0.0 and w_t == 0.0:
        return 1.0
    return w_a / (w_a + w_t)


def _mean(xs):
    return sum(xs) / len(xs)


def _sample_distinct_configs(landscape, n, rng):
    configs, seen = [], set()
    attempts = 0
    limit = min(n, landscape.space_size)
    while len(configs) < limit and attempts < 1000 * n:
        c = landscape.random_config(rng)
        if c not in seen:
            seen.add(c)
            configs.append(c)
        attempts += 1
    while len(configs) < n:  # tiny spaces: pad with repeats, cache makes it free
        configs.append(landscape.random_config(rng))
    return configs


def cotune_run(landscape: Landscape, p_t: Proposition, params: TunerParams,
               seed: int, label: str = "CoTune",
               meter: BudgetMeter | None = None) -> TunerResult:
    """Co-evolutionary tuning of configurations and an auxiliary proposition.

    Deterministic for a fixed seed. Disabling all three cases turns this into
    the plain requirement-guided GA (identical trace for the same seed).
    """
    if params.budget < 2 * params.population_size:
        raise ValueError("budget is smaller than the initialization cost")
    rng = random.Random(seed)
    meter = meter or BudgetMeter(params.budget)
    n = params.population_size
    p_a = p_t

    order = 0
    pop_t, pop_a = [], []
    for config in _sample_distinct_configs(landscape, n, rng):
        perf = measure(landscape, meter, config)
        pop_t.append(Member(config, perf, p_t.evaluate(perf), order))
        pop_a.append(Member(config, perf, p_a.evaluate(perf), order))
        order += 1

    result = TunerResult(label, None, float("-inf"))

    def best_candidates():
        if params.best_from == "history":
            return meter.cache.items()
        return [(m.config, m.perf) for m in pop_t + pop_a]

    def current_best():
        return max(
            ((c, p_t.evaluate(v)) for c, v in best_candidates()),
            key=lambda cv: cv[1],
        )

    best_config, best_score = current_best()
    result.best_config, result.best_score = best_config, best_score
    prev_best_score = best_score
    stagnation = 0
    pa_changed_last = False
    prev_perfs_a = None  # previous iteration's population snapshots, for the
    prev_perfs_t = None  # progress terms of theta

    def record(iteration, guiding, case, theta):
        result.trajectory.append(TrajectoryRow(
            iteration, meter.consumed, result.best_score,
            guiding, case or "", theta,
            differential_entropy([p_a.evaluate(m.perf) for m in pop_a]),
        ))

    record(0, "", "", 0.0)
    if params.early_stop and best_score == 1.0:
        result.budget_consumed = meter.consumed
        return result

    iteration = 0
    while meter.consumed + n < params.budget and iteration < params.generations:
        iteration += 1

        # (a) guidance probability from both populations' standing
        if prev_perfs_a is None:
            improvement_a = improvement_t = 0.0
        else:
            improvement_a = max(p_a.evaluate(m.perf) for m in pop_a) - max(
                p_a.evaluate(v) for v in prev_perfs_a)
            improvement_t = max(m.fitness for m in pop_t) - max(
                p_t.evaluate(v) for v in prev_perfs_t)
        theta = compute_theta(
            _mean([p_t.evaluate(m.perf) for m in pop_a]),
            _mean([m.fitness for m in pop_t]),
            improvement_a, improvement_t,
        )

        # (b) evolve new configurations under the chosen proposition
        use_aux = rng.random() < theta or pa_changed_last
        guiding = "p_a" if use_aux else "p_t"
        source = pop_a if use_aux else pop_t
        offspring = make_offspring(source, landscape.options, params.ga_params(), rng)

        newcomers = []
        for config in offspring:
            try:
                perf = measure(landscape, meter, config)
            except BudgetExhausted:
                break
            newcomers.append((config, perf))

        # (c) dual elitist preservation
        next_order = order
        pop_t = preserve_top(
            pop_t + [Member(c, v, p_t.evaluate(v), next_order + i)
                     for i, (c, v) in enumerate(newcomers)], n)
        pop_a = preserve_top(
            pop_a + [Member(c, v, p_a.evaluate(v), next_order + i)
                     for i, (c, v) in enumerate(newcomers)], n)
        order += len(newcomers)
        prev_perfs_a = [m.perf for m in pop_a]
        prev_perfs_t = [m.perf for m in pop_t]

        # (d) evolve the auxiliary proposition when a case fires
        pa_changed_last = False
        case = reqevolve.detect_case(
            pop_t, pop_a, p_t, p_a, stagnation, params.stagnation_cap,
            enable=(params.enable_case0, params.enable_case1, params.enable_case2),
        )
        if case is not None:
            perfs_a = [m.perf for m in pop_a]
            old_p_a = p_a
            try:
                if case == reqevolve.CASE0:
                    outcome = reqevolve.relax_case0(p_a, perfs_a, rng)
                elif case == reqevolve.CASE1:
                    outcome = reqevolve.tighten_case1(p_a, perfs_a, rng)
                else:
                    outcome = reqevolve.escape_case2(p_a, perfs_a, n, rng)
                p_a = outcome.proposition
                flagged = not outcome.by_entropy
            except reqevolve.RequirementEvolutionError as exc:
                outcome = None
                flagged = True
                result.events.append({
                    "iteration": iteration, "case": case, "error": str(exc)})
            if outcome is not None:
                result.events.append({
                    "iteration": iteration,
                    "case": case,
                    "flagged": flagged,
                    "old_encoding": old_p_a.encode(),
                    "new_encoding": p_a.encode(),
                    "old_integral": old_p_a.integral(),
                    "new_integral": p_a.integral(),
                    "old_entropy": differential_entropy(
                        [old_p_a.evaluate(v) for v in perfs_a]),
                    "new_entropy": differential_entropy(
                        [p_a.evaluate(v) for v in perfs_a]),
                })
            if p_a != old_p_a:
                pop_a = [replace(m, fitness=p_a.evaluate(m.perf)) for m in pop_a]
                pa_changed_last = True

        # (e) best-on-target tracking and stagnation accounting
        best_config, best_score = current_best()
        if best_score > prev_best_score:
            prev_best_score = best_score
            result.best_config, result.best_score = best_config, best_score
            stagnation = 0
            if params.early_stop and best_score == 1.0:
                record(iteration, guiding, case, theta)
                result.budget_consumed = meter.consumed
                return result
        else:
            stagnation += 1
        record(iteration, guiding, case, theta)

    result.budget_consumed = meter.consumed
    return result


def ga_run(landscape: Landscape, p_t: Proposition, params: TunerParams,
           seed: int, objective: str = "satisfaction") -> TunerResult:
    """GA baselines: the requirement-guided GA is the co-evolution engine
    with every case disabled; the raw variant optimizes negated performance
    in a single population and reports the target score of its best point."""
    if objective == "satisfaction":
        ga_params = replace(
            params, enable_case0=False, enable_case1=False, enable_case2=False)
        result = cotune_run(landscape, p_t, ga_params, seed, label="GA_p")
        return result
    if objective != "raw":
        raise ValueError(f"unknown objective {objective!r}")
    return _ga_raw_run(landscape, p_t, params, seed)


def _ga_raw_run(landscape, p_t, params, seed):
    if params.budget < 2 * params.population_size:
        raise ValueError("budget is smaller than the initialization cost")
    rng = random.Random(seed)
    meter = BudgetMeter(params.budget)
    n = params.population_size

    order = 0
    pop = []
    for config in _sample_distinct_configs(landscape, n, rng):
        perf = measure(landscape, meter, config)
        pop.append(Member(config, perf, -perf, order))
        order += 1

    result = TunerResult("GA_r", None, float("-inf"))

    def update_best():
        config, perf = min(meter.cache.items(), key=lambda cv: cv[1])
        score = p_t.evaluate(perf)
        if score > result.best_score:
            result.best_config, result.best_score = config, score

    update_best()
    result.trajectory.append(TrajectoryRow(
        0, meter.consumed, result.best_score, "raw", "", 0.0, 0.0))
    if params.early_stop and result.best_score == 1.0:
        result.budget_consumed = meter.consumed
        return result

    iteration = 0
    while meter.consumed + n < params.budget and iteration < params.generations:
        iteration += 1
        offspring = make_offspring(pop, landscape.options, params.ga_params(), rng)
        newcomers = []
        for config in offspring:
            try:
                perf = measure(landscape, meter, config)
            except BudgetExhausted:
                break
            newcomers.append(Member(config, perf, -perf, order))
            order += 1
        pop = preserve_top(pop + newcomers, n)
        update_best()
        result.trajectory.append(TrajectoryRow(
            iteration, meter.consumed, result.best_score, "raw", "", 0.0, 0.0))
        if params.early_stop and result.best_score == 1.0:
            break

    result.budget_consumed = meter.consumed
    return result


def random_run(landscape: Landscape, p_t: Proposition, budget: int,
               seed: int, early_stop: bool = True) -> TunerResult:
    """Uniform random sampling of distinct configurations."""
    if budget < 1:
        raise ValueError("budget must be positive")
    rng = random.Random(seed)
    meter = BudgetMeter(budget)
    result = TunerResult("Random", None, float("-inf"))
    seen = set()
    attempts = 0
    while meter.consumed < budget and len(seen) < landscape.space_size:
        config = landscape.random_config(rng)
        attempts += 1
        if config in seen and attempts < 10000 * budget:
            continue
        seen.add(config)
        perf = measure(landscape, meter, config)
        score = p_t.evaluate(perf)
        if score > result.best_score:
            result.best_config, result.best_score = config, score
        result.trajectory.append(TrajectoryRow(
            meter.consumed, meter.consumed, result.best_score,
            "random", "", 0.0, 0.0))
        if early_stop and result.best_score == 1.0:
            break
    result.budget_consumed = meter.consumed
    return result
