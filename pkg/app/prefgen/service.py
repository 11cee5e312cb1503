"""
Preference Generators

Every sampler consumes only the stream derived for its own (trial, side, person),
so instances are reproducible regardless of worker count or trial order.
"""

import logging
import math
from functools import lru_cache
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from app.core.schemas import Instance
from app.core.service import validate_instance
from app.prefgen.schemas import (
    BuiltInstance, GaussianModel, LogWeights, MasterListModel, ModelDescriptor,
    ModelName, PopularityModel, RANDOMIZED_MODELS,
)
from app.shared.errors import InvalidInstanceError, ModelParameterError
from app.shared.seeding import MEN, WOMEN, SeedStream, TrialStream

logger = logging.getLogger(__name__)


# ---------------------------------------------------------
# Plackett-Luce sampling
# ---------------------------------------------------------
def sample_popularity_order(weights: LogWeights, rng: np.random.Generator) -> tuple[int, ...]:
    """Exponential race: sort candidates by log-weight plus standard Gumbel noise."""
    if weights.is_uniform:
        return tuple(int(c) for c in rng.permutation(weights.candidates))
    keys = weights.log_weights + rng.gumbel(size=len(weights.candidates))
    order = np.argsort(-keys, kind="stable")
    return tuple(int(c) for c in weights.candidates[order])


def log_weights_from_mapping(weights: Mapping[int, float]) -> LogWeights:
    """Plain positive weights keyed by candidate, converted to log-weights."""
    if not weights:
        raise ModelParameterError("popularity weights must be non-empty")
    candidates = sorted(weights)
    values = np.array([weights[c] for c in candidates], dtype=np.float64)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise ModelParameterError("popularity weights must be positive and finite")
    return LogWeights.from_logs(candidates, np.log(values))


def sample_popularity_list(weights: Mapping[int, float], rng: np.random.Generator) -> tuple[int, ...]:
    return sample_popularity_order(log_weights_from_mapping(weights), rng)


# ---------------------------------------------------------
# Popularity models
# ---------------------------------------------------------
def _check_base(base: float, name: str = "lambda") -> None:
    if not 0 < base < 1:
        raise ModelParameterError(f"{name} must lie in (0, 1), got {base}")


def geometric_log_weights(size: int, base: float, offset: int = 0) -> LogWeights:
    """D(i) = base^(i + offset), kept as (i + offset) * ln(base) so large i never underflows."""
    return LogWeights.from_logs(np.arange(size), (np.arange(size) + offset) * math.log(base))


def build_geometric_popularity(M: int, W: int, base: float, men_uniform: bool = True) -> PopularityModel:
    """Every woman gives man m_i popularity base^i; men are uniform (equal weights)."""
    _check_base(base)
    women = tuple(geometric_log_weights(M, base) for _ in range(W))
    men = tuple(LogWeights.uniform(W) for _ in range(M)) if men_uniform else None
    return PopularityModel(M=M, W=W, women=women, men=men)


def build_intrinsic_popularity(
    M: int, W: int, base: float, men_base: Optional[float] = None,
) -> PopularityModel:
    """Women agree on D(m_i) = base^i; men are uniform or themselves geometric in men_base."""
    model = build_geometric_popularity(M, W, base)
    if men_base is None:
        return model
    _check_base(men_base, "lambda_men")
    men = tuple(geometric_log_weights(W, men_base) for _ in range(M))
    return PopularityModel(M=M, W=W, women=model.women, men=men)


def build_symmetric_popularity(M: int, W: int, base_men: float, base_women: float) -> PopularityModel:
    """D_m(w_j) = D_w(m_i) = base_men^i * base_women^j on both sides."""
    _check_base(base_men, "lambda")
    _check_base(base_women, "lambda_women")
    man_logs = np.arange(M) * math.log(base_men)
    woman_logs = np.arange(W) * math.log(base_women)
    women = tuple(LogWeights.from_logs(np.arange(M), man_logs + woman_logs[j]) for j in range(W))
    men = tuple(LogWeights.from_logs(np.arange(W), woman_logs + man_logs[i]) for i in range(M))
    return PopularityModel(M=M, W=W, women=women, men=men)


def log_weights_from_table(rows: Sequence[Any], other_side: int, label: str) -> tuple[LogWeights, ...]:
    """Explicit weight tables: each row a list of positive weights (null = unacceptable) or an index map."""
    parsed = []
    for person, row in enumerate(rows):
        if isinstance(row, Mapping):
            items = [(int(k), v) for k, v in row.items()]
        elif isinstance(row, Sequence):
            items = [(i, v) for i, v in enumerate(row) if v is not None]
        else:
            raise ModelParameterError(f"{label}[{person}] must be a list or an object")
        if not items:
            raise ModelParameterError(f"{label}[{person}] has no acceptable partner")
        for idx, value in items:
            if not 0 <= idx < other_side:
                raise ModelParameterError(f"{label}[{person}] names partner {idx} out of range")
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ModelParameterError(f"{label}[{person}] weight for {idx} must be positive")
        candidates = [idx for idx, _ in items]
        parsed.append(LogWeights.from_logs(candidates, np.log([float(v) for _, v in items])))
    return tuple(parsed)


def realize_popularity(
    model: PopularityModel,
    stream: TrialStream,
    descriptor: ModelDescriptor,
    fixed_women: Optional[Mapping[int, tuple[int, ...]]] = None,
    fixed_men: Optional[Mapping[int, tuple[int, ...]]] = None,
) -> BuiltInstance:
    """Draw every weighted person's list from their own stream; others keep their fixed list."""
    fixed_women = fixed_women or {}
    fixed_men = fixed_men or {}

    women = []
    for w in range(model.W):
        weights = model.women[w]
        if weights is None:
            women.append(tuple(fixed_women[w]))
        else:
            women.append(sample_popularity_order(weights, stream.person(WOMEN, w)))

    men = []
    for m in range(model.M):
        weights = model.men[m] if model.men is not None else None
        if weights is not None:
            men.append(sample_popularity_order(weights, stream.person(MEN, m)))
        elif m in fixed_men:
            men.append(tuple(fixed_men[m]))
        else:
            men.append(tuple(int(w) for w in stream.person(MEN, m).permutation(model.W)))

    return _built(Instance(men=tuple(men), women=tuple(women)), descriptor, popularity=model)


# ---------------------------------------------------------
# Other preference models
# ---------------------------------------------------------
def _uniform_lists(size: int, other: int, side: int, stream: TrialStream) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(int(x) for x in stream.person(side, p).permutation(other)) for p in range(size)
    )


def _bernoulli_lists(size, other, side, stream, p_accept) -> tuple[tuple[int, ...], ...]:
    lists = []
    for p in range(size):
        rng = stream.person(side, p)
        acceptable = np.flatnonzero(rng.random(other) < p_accept)
        lists.append(tuple(int(x) for x in rng.permutation(acceptable)))
    return tuple(lists)


def build_uniform(
    M: int, W: int, complete: bool, stream: TrialStream,
    descriptor: Optional[ModelDescriptor] = None, accept_probability: float = 0.5,
) -> BuiltInstance:
    if M < 1 or W < 1:
        raise ModelParameterError("M and W must be at least 1")
    descriptor = descriptor or _descriptor(ModelName.UNIFORM, M, W, {"complete": complete})
    if complete:
        men = _uniform_lists(M, W, MEN, stream)
        women = _uniform_lists(W, M, WOMEN, stream)
    else:
        if not 0 < accept_probability <= 1:
            raise ModelParameterError("accept_probability must lie in (0, 1]")
        men = _bernoulli_lists(M, W, MEN, stream, accept_probability)
        women = _bernoulli_lists(W, M, WOMEN, stream, accept_probability)
    return _built(Instance(men=men, women=women), descriptor)


def build_master_list(
    M: int, W: int, stream: Optional[TrialStream] = None,
    men_lists: Optional[Sequence[Sequence[int]]] = None,
    descriptor: Optional[ModelDescriptor] = None,
) -> BuiltInstance:
    """Women all rank m_0 > m_1 > ...; men's lists supplied, uniform from the stream, or identity."""
    descriptor = descriptor or _descriptor(ModelName.MASTER, M, W, {})
    women = tuple(tuple(range(M)) for _ in range(W))
    if men_lists is not None:
        men = tuple(tuple(order) for order in men_lists)
    elif stream is not None:
        men = _uniform_lists(M, W, MEN, stream)
    else:
        men = tuple(tuple(range(W)) for _ in range(M))
    return _built(Instance(men=men, women=women), descriptor, master=MasterListModel(M=M, W=W))


def sample_gaussian_list(model: GaussianModel, w: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Ascending i + eta_i; the stable sort breaks exact score ties toward the lower index."""
    scores = np.arange(model.M) + rng.normal(0.0, model.sigma, size=model.M)
    return tuple(int(i) for i in np.argsort(scores, kind="stable"))


def build_gaussian(
    M: int, W: int, sigma: float, stream: TrialStream,
    descriptor: Optional[ModelDescriptor] = None,
) -> BuiltInstance:
    if not sigma > 0:
        raise ModelParameterError(f"sigma must be positive, got {sigma}")
    model = GaussianModel(M=M, W=W, sigma=sigma)
    descriptor = descriptor or _descriptor(ModelName.GAUSSIAN, M, W, {"sigma": sigma})
    women = tuple(sample_gaussian_list(model, w, stream.person(WOMEN, w)) for w in range(W))
    men = _uniform_lists(M, W, MEN, stream)
    return _built(Instance(men=men, women=women), descriptor, gaussian=model)


def _check_even(N: int) -> None:
    if N < 2 or N % 2:
        raise ModelParameterError(f"N must be a positive even number, got {N}")


def _swapped_identity(N: int, rng: np.random.Generator) -> tuple[int, ...]:
    order = np.arange(N)
    coins = rng.random(N // 2) < 0.5
    for pair in np.flatnonzero(coins):
        order[2 * pair], order[2 * pair + 1] = order[2 * pair + 1], order[2 * pair]
    return tuple(int(x) for x in order)


def build_swap_pairs(N: int, stream: TrialStream, descriptor: Optional[ModelDescriptor] = None) -> BuiltInstance:
    """Identity lists with each adjacent pair swapped by an independent fair coin per person."""
    _check_even(N)
    descriptor = descriptor or _descriptor(ModelName.SWAP, N, N, {})
    men = tuple(_swapped_identity(N, stream.person(MEN, m)) for m in range(N))
    women = tuple(_swapped_identity(N, stream.person(WOMEN, w)) for w in range(N))
    return _built(Instance(men=men, women=women), descriptor)


def build_grouped_incomplete(
    N: int, stream: TrialStream, descriptor: Optional[ModelDescriptor] = None,
) -> BuiltInstance:
    """Acceptability only inside groups {m_2i, m_2i+1, w_2i, w_2i+1}; uniform order within a group."""
    _check_even(N)
    descriptor = descriptor or _descriptor(ModelName.GROUPED, N, N, {})

    def group_list(person: int, side: int) -> tuple[int, ...]:
        base = 2 * (person // 2)
        return tuple(int(x) for x in stream.person(side, person).permutation([base, base + 1]))

    men = tuple(group_list(m, MEN) for m in range(N))
    women = tuple(group_list(w, WOMEN) for w in range(N))
    return _built(Instance(men=men, women=women), descriptor)


@lru_cache(maxsize=8)
def _folklore_lists(N: int) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    men = tuple(tuple((m + 1 + t) % N for t in range(N)) for m in range(N))
    women = tuple(tuple((w + t) % N for t in range(N)) for w in range(N))
    return men, women


def build_folklore_original(N: int, descriptor: Optional[ModelDescriptor] = None) -> BuiltInstance:
    """Cyclic instance in which every man-woman pair is stable."""
    if N < 2:
        raise ModelParameterError(f"N must be at least 2, got {N}")
    descriptor = descriptor or _descriptor(ModelName.FOLKLORE_ORIGINAL, N, N, {})
    men, women = _folklore_lists(N)
    return _built(Instance(men=men, women=tuple(women)), descriptor)


def build_folklore_cyclic(
    N: int, base: float, stream: TrialStream, descriptor: Optional[ModelDescriptor] = None,
) -> BuiltInstance:
    """Folklore cyclic instance where w_0 instead draws her list from D(m_i) = base^(i+1)."""
    if N < 2:
        raise ModelParameterError(f"N must be at least 2, got {N}")
    _check_base(base)
    descriptor = descriptor or _descriptor(ModelName.FOLKLORE, N, N, {"lambda": base})
    men, women = _folklore_lists(N)
    weights = (geometric_log_weights(N, base, offset=1),) + (None,) * (N - 1)
    model = PopularityModel(M=N, W=N, women=weights, men=None)
    fixed_women = {w: women[w] for w in range(1, N)}
    fixed_men = {m: men[m] for m in range(N)}
    return realize_popularity(model, stream, descriptor, fixed_women=fixed_women, fixed_men=fixed_men)


# ---------------------------------------------------------
# Descriptor dispatch
# ---------------------------------------------------------
def _descriptor(model: ModelName, M: int, W: int, params: dict) -> ModelDescriptor:
    return ModelDescriptor(model=model, M=M, W=W, params=params)


def _built(instance: Instance, descriptor: ModelDescriptor, **models) -> BuiltInstance:
    violations = validate_instance(instance)
    if violations:
        raise InvalidInstanceError(f"Generator produced an invalid instance: {violations[0]}")
    return BuiltInstance(instance=instance, descriptor=descriptor, **models)


def _float_param(params: dict, name: str, default: Optional[float] = None) -> float:
    value = params.get(name, default)
    if value is None:
        raise ModelParameterError(f"missing parameter '{name}'")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ModelParameterError(f"parameter '{name}' must be a number, got {value!r}")


def _square(desc: ModelDescriptor) -> int:
    if desc.M != desc.W:
        raise ModelParameterError(f"model '{desc.model.value}' needs M == W")
    return desc.M


def popularity_model_from_params(M: int, W: int, params: dict) -> PopularityModel:
    kind = params.get("kind", "intrinsic")
    if "women_weights" in params:
        rows = params["women_weights"]
        if not isinstance(rows, Sequence) or len(rows) != W:
            raise ModelParameterError(f"women_weights must list {W} rows")
        women = log_weights_from_table(rows, M, "women_weights")
        men = None
        if params.get("men_weights") is not None:
            men_rows = params["men_weights"]
            if not isinstance(men_rows, Sequence) or len(men_rows) != M:
                raise ModelParameterError(f"men_weights must list {M} rows")
            men = log_weights_from_table(men_rows, W, "men_weights")
        return PopularityModel(M=M, W=W, women=women, men=men)
    if "lambda" not in params:
        raise ModelParameterError("popularity model needs 'lambda' or explicit 'women_weights'")
    base = _float_param(params, "lambda")
    if kind == "symmetric":
        return build_symmetric_popularity(M, W, base, _float_param(params, "lambda_women", base))
    if kind == "intrinsic":
        men_base = params.get("lambda_men")
        return build_intrinsic_popularity(M, W, base, None if men_base is None else float(men_base))
    raise ModelParameterError(f"unknown popularity kind '{kind}'")


def build_from_descriptor(desc: ModelDescriptor, stream: Optional[TrialStream] = None) -> BuiltInstance:
    """Build the instance a descriptor names; randomized models draw from (seed, trial) unless given a stream."""
    if stream is None and desc.seed is not None:
        stream = SeedStream(desc.seed).trial(desc.trial)
    if desc.model in RANDOMIZED_MODELS and stream is None:
        raise ModelParameterError(f"model '{desc.model.value}' is randomized and needs a seed")
    params = desc.params

    if desc.model is ModelName.UNIFORM:
        return build_uniform(
            desc.M, desc.W, bool(params.get("complete", True)), stream, desc,
            accept_probability=_float_param(params, "accept_probability", 0.5),
        )
    if desc.model is ModelName.MASTER:
        return build_master_list(desc.M, desc.W, stream, descriptor=desc)
    if desc.model is ModelName.GAUSSIAN:
        return build_gaussian(desc.M, desc.W, _float_param(params, "sigma", 1.0), stream, desc)
    if desc.model is ModelName.SWAP:
        return build_swap_pairs(_square(desc), stream, desc)
    if desc.model is ModelName.GROUPED:
        return build_grouped_incomplete(_square(desc), stream, desc)
    if desc.model is ModelName.FOLKLORE:
        return build_folklore_cyclic(_square(desc), _float_param(params, "lambda"), stream, desc)
    if desc.model is ModelName.FOLKLORE_ORIGINAL:
        return build_folklore_original(_square(desc), desc)
    if desc.model is ModelName.POPULARITY:
        model = popularity_model_from_params(desc.M, desc.W, params)
        return realize_popularity(model, stream, desc)
    raise ModelParameterError(f"unknown model '{desc.model}'")


def build_popularity(
    M: int, W: int,
    women_weights: Sequence[LogWeights],
    men_weights: Optional[Sequence[LogWeights]],
    stream: TrialStream,
    descriptor: Optional[ModelDescriptor] = None,
) -> BuiltInstance:
    """Popularity instance from explicit log-weight tables; the support is the acceptable set."""
    if len(women_weights) != W or (men_weights is not None and len(men_weights) != M):
        raise ModelParameterError("weight tables must have one row per person")
    model = PopularityModel(
        M=M, W=W, women=tuple(women_weights),
        men=None if men_weights is None else tuple(men_weights),
    )
    descriptor = descriptor or _descriptor(ModelName.POPULARITY, M, W, {})
    return realize_popularity(model, stream, descriptor)


# ---------------------------------------------------------
# Service
# ---------------------------------------------------------
class PrefgenService:
    """Instance generation and weight parsing for the routers and the CLI."""

    def generate(self, descriptor: ModelDescriptor) -> BuiltInstance:
        built = build_from_descriptor(descriptor)
        logger.info(
            f"Generated {descriptor.model.value} instance {descriptor.M}x{descriptor.W} "
            f"(seed={descriptor.seed}, trial={descriptor.trial})"
        )
        return built

    def weights(self, weights: Mapping[int, float]) -> LogWeights:
        return log_weights_from_mapping(weights)


prefgen_service = PrefgenService()
