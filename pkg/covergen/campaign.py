"""
Coverage campaigns

Each of the N iterations either draws a target e from the mixing
distribution pi and generates a uniform tree of size n covering e, or
(isotropic strategy) generates a plain uniform tree of size n.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from django.conf import settings

from .counting import TableCache, get_table_cache
from .cover import sample_covering_tree
from .exceptions import GrammarValidationError, StrategyError
from .grammar import DerivationTree, Grammar, Symbol, covered_symbols, has_errors, validate, yield_string
from .optimizer import (
    build_ratio_matrix, isotropic_coverage_bound, single_covering_counts, solve_maxmin,
    strategy_certificate,
)
from .sampler import RandomSource, sample_tree

logger = logging.getLogger(__name__)

OPTIMIZED = 'optimized'
ISOTROPIC = 'isotropic'
EXPLICIT = 'explicit'
STRATEGIES = (OPTIMIZED, ISOTROPIC, EXPLICIT)

ONE_DRAW_MIN_COVERAGE = 'one_draw_min_coverage'
ALL_COVERED_LOWER_BOUND = 'all_covered_lower_bound'

_PI_TOLERANCE = Fraction(1, 10 ** 12)


@dataclass
class CampaignConfig:
    """
    Args:
        grammar: validated grammar
        n: tree size
        count: number of test data (N)
        strategy: 'optimized', 'isotropic' or 'explicit'
        seed: 64-bit seed (default settings.COVERGEN_DEFAULT_SEED)
        pi: mixing distribution for the explicit strategy
        workers: parallel streams (default settings.COVERGEN_WORKERS)
        keep_trees: False keeps only the yields in the report
    """
    grammar: Grammar
    n: int
    count: int
    strategy: str = OPTIMIZED
    seed: Optional[int] = None
    pi: Optional[Dict[Symbol, Fraction]] = None
    workers: Optional[int] = None
    keep_trees: bool = True

    def __post_init__(self):
        if self.seed is None:
            self.seed = settings.COVERGEN_DEFAULT_SEED
        if self.workers is None:
            self.workers = settings.COVERGEN_WORKERS
        if self.count < 1:
            raise StrategyError(f"N must be at least 1, got {self.count}")
        if self.n < 1:
            raise StrategyError(f"size must be at least 1, got {self.n}")
        if self.workers < 1:
            raise StrategyError(f"workers must be at least 1, got {self.workers}")
        if self.strategy not in STRATEGIES:
            raise StrategyError(f"unknown strategy '{self.strategy}'")
        if self.strategy == EXPLICIT:
            if not self.pi:
                raise StrategyError("the explicit strategy needs a mixing distribution")
            self.pi = {self.grammar.symbol(k): Fraction(v) for k, v in self.pi.items()}
            if any(v < 0 for v in self.pi.values()):
                raise StrategyError("mixing probabilities must be non-negative")
            if abs(sum(self.pi.values()) - 1) > _PI_TOLERANCE:
                raise StrategyError(f"mixing probabilities sum to {sum(self.pi.values())}, not 1")


@dataclass
class CoverageSummary:
    covered: Set[Symbol]
    per_symbol_hits: Dict[Symbol, int]
    all_covered: bool


@dataclass
class CampaignReport:
    strategy: str
    n: int
    count: int
    seed: int
    criterion: Tuple[Symbol, ...]
    excluded: Tuple[Symbol, ...]
    yields: List[str]
    targets: List[Optional[Symbol]]
    covered: Set[Symbol]
    per_symbol_hits: Dict[Symbol, int]
    all_covered: bool
    predicted_bound: Fraction
    bound_kind: str
    pi: Dict[Symbol, Fraction] = field(default_factory=dict)
    trees: List[DerivationTree] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def hit_rate(self, symbol: Symbol) -> Fraction:
        """Fraction of the N trees covering symbol"""
        return Fraction(self.per_symbol_hits.get(symbol, 0), self.count)


def coverage_report(trees: Iterable[DerivationTree], criterion: Sequence[Symbol]) -> CoverageSummary:
    """
    Union coverage and per-symbol hit counts (number of trees covering each
    symbol). Criterion symbols always appear in the hit map, possibly at 0.
    """
    hits: Dict[Symbol, int] = {symbol: 0 for symbol in criterion}
    covered: Set[Symbol] = set()
    for tree in trees:
        symbols = covered_symbols(tree)
        covered |= symbols
        for symbol in symbols:
            hits[symbol] = hits.get(symbol, 0) + 1
    ordered = {s: hits[s] for s in criterion}
    ordered.update({s: hits[s] for s in sorted(hits) if s not in ordered})
    return CoverageSummary(covered, ordered, covered.issuperset(criterion))


def draw_target(pi: Dict[Symbol, Fraction], rng: RandomSource) -> Symbol:
    """
    e with probability pi_e, from one uniform integer below the common
    denominator of pi compared with cumulative numerators.
    """
    weights = [(symbol, Fraction(p)) for symbol, p in pi.items() if p > 0]
    if not weights:
        raise StrategyError("mixing distribution has no positive entry")
    denominator = math.lcm(*(p.denominator for _, p in weights))
    scaled = [int(p * denominator) for _, p in weights]
    u = rng.uniform_below(sum(scaled))
    for (symbol, _), weight in zip(weights, scaled):
        if u < weight:
            return symbol
        u -= weight
    raise AssertionError("cumulative scan ran past the total weight")


def _blocks(count: int, workers: int) -> List[range]:
    """Contiguous iteration blocks, one per worker"""
    size = -(-count // workers)
    return [range(start, min(count, start + size)) for start in range(0, count, size)]


def run_campaign(cfg: CampaignConfig, tables: Optional[TableCache] = None) -> CampaignReport:
    """
    Generate cfg.count trees of size cfg.n with the configured strategy.

    Raises:
        GrammarValidationError: validate() reports an error
        EmptyLanguageAtSize: no tree of size n
        StrategyError: explicit pi on a symbol no tree of size n covers
    """
    grammar, n = cfg.grammar, cfg.n
    diagnostics = validate(grammar)
    if has_errors(diagnostics):
        raise GrammarValidationError(diagnostics)
    tables = tables or get_table_cache()

    warnings: List[str] = []
    pi: Dict[Symbol, Fraction] = {}
    if cfg.strategy == ISOTROPIC:
        total, singles = single_covering_counts(grammar, n, tables)
        criterion = tuple(x for x in grammar.nonterminals if singles[x])
        excluded = tuple(x for x in grammar.nonterminals if not singles[x])
        p_min = min(Fraction(singles[x], total) for x in criterion)
        predicted = isotropic_coverage_bound(p_min, cfg.count)
        bound_kind = ALL_COVERED_LOWER_BOUND
    else:
        matrix = build_ratio_matrix(grammar, n, tables)
        criterion, excluded = matrix.criterion, matrix.excluded
        warnings.extend(matrix.warnings)
        if cfg.strategy == OPTIMIZED:
            solution = solve_maxmin(matrix, 'rational')
            if not solution.is_optimal:
                raise StrategyError(f"no mixing distribution: {solution.status}")
            pi = dict(solution.pi)
            predicted = solution.p
        else:
            pi = dict(cfg.pi)
            uncoverable = [str(s) for s, p in pi.items() if p > 0 and s not in criterion]
            if uncoverable:
                raise StrategyError(f"no tree of size {n} covers {', '.join(uncoverable)}")
            predicted = strategy_certificate(matrix, pi)
        bound_kind = ONE_DRAW_MIN_COVERAGE

    table = tables.get(grammar, n)
    base = RandomSource(cfg.seed)

    def run_block(worker: int, block: range) -> List[Tuple[Optional[Symbol], DerivationTree]]:
        rng = base.spawn(worker)
        drawn = []
        for _ in block:
            if cfg.strategy == ISOTROPIC:
                drawn.append((None, sample_tree(grammar, table, grammar.start, n, rng)))
            else:
                target = draw_target(pi, rng)
                drawn.append((target, sample_covering_tree(grammar, target, n, rng, tables)))
        return drawn

    blocks = _blocks(cfg.count, cfg.workers)
    if len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            results = list(pool.map(run_block, range(len(blocks)), blocks))
    else:
        results = [run_block(0, blocks[0])]
    draws = [item for block in results for item in block]

    trees = [tree for _, tree in draws]
    summary = coverage_report(trees, criterion)
    logger.info("[CAMPAIGN] %s: %d trees of size %d, all covered: %s",
                cfg.strategy, cfg.count, n, summary.all_covered)
    return CampaignReport(
        strategy=cfg.strategy,
        n=n,
        count=cfg.count,
        seed=cfg.seed,
        criterion=tuple(criterion),
        excluded=tuple(excluded),
        yields=[yield_string(tree) for tree in trees],
        targets=[target for target, _ in draws],
        covered=summary.covered,
        per_symbol_hits=summary.per_symbol_hits,
        all_covered=summary.all_covered,
        predicted_bound=predicted,
        bound_kind=bound_kind,
        pi=pi,
        trees=trees if cfg.keep_trees else [],
        warnings=warnings,
    )
