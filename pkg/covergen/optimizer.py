"""
Optimal mixing of covering generators

For the criterion C (coverable non-terminals) the program is

    maximise p
    subject to  p <= sum_e pi_e * p_{e,f,n} / p_{e,n}   for every f in C
                sum_e pi_e = 1,  pi >= 0

solved with a dense tableau simplex using Bland's rule. The same code runs
on Fraction object arrays (exact) or float64 arrays.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from django.conf import settings

from .counting import TableCache, get_table_cache
from .cover import build_GX, covering_count, pair_covering_count
from .exceptions import EmptyLanguageAtSize
from .grammar import Grammar, Symbol

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]

OPTIMAL = 'optimal'
EMPTY_CRITERION = 'infeasible-empty-criterion'


@dataclass
class RatioMatrix:
    """
    ratios[f][e] = |E_{e,f,n}| / |E_{e,n}| over the criterion (row f, column e).
    Non-terminals no tree of size n covers are listed in `excluded`.
    """
    n: int
    total: int
    criterion: Tuple[Symbol, ...]
    ratios: List[List[Fraction]]
    excluded: Tuple[Symbol, ...] = ()
    single_counts: Dict[Symbol, int] = field(default_factory=dict)
    pair_counts: Dict[Tuple[Symbol, Symbol], int] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def ratio(self, row: Symbol, column: Symbol) -> Fraction:
        return self.ratios[self.criterion.index(row)][self.criterion.index(column)]

    def probability(self, symbol: Symbol) -> Fraction:
        """p_{e,n}"""
        if not self.total:
            return Fraction(0)
        return Fraction(self.single_counts.get(symbol, 0), self.total)

    def pair_count(self, first: Symbol, second: Symbol) -> int:
        if first == second:
            return self.single_counts[first]
        return self.pair_counts.get((first, second), self.pair_counts.get((second, first), 0))


@dataclass
class StrategySolution:
    pi: Dict[Symbol, Number]
    p: Number
    status: str = OPTIMAL
    mode: str = 'rational'
    pivots: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


def _coverable_size_above(grammar: Grammar, symbol: Symbol, n: int, limit: int,
                          tables: TableCache) -> Optional[int]:
    """First k in (n, limit] at which some tree covers symbol"""
    cover = build_GX(grammar, symbol)
    table = tables.get(cover.derived, limit)
    return next((k for k in range(n + 1, limit + 1) if table.count(cover.start, k)), None)


def single_covering_counts(grammar: Grammar, n: int,
                           tables: Optional[TableCache] = None) -> Tuple[int, Dict[Symbol, int]]:
    """
    |E_n(G)| and |E_{X,n}(G)| for every non-terminal X.

    Raises:
        EmptyLanguageAtSize: the grammar has no tree of size n
    """
    tables = tables or get_table_cache()
    total = tables.get(grammar, n).total(n)
    if not total:
        raise EmptyLanguageAtSize(n)
    return total, {x: covering_count(grammar, x, n, tables) for x in grammar.nonterminals}


def build_ratio_matrix(grammar: Grammar, n: int, tables: Optional[TableCache] = None,
                       workers: Optional[int] = None,
                       scan_factor: Optional[int] = None) -> RatioMatrix:
    """
    Single and pairwise covering counts at size n, as the ratio matrix.

    Args:
        grammar: validated grammar
        n: tree size
        tables: count-table cache (default: process-wide cache)
        workers: threads for the pair grammars (default settings.COVERGEN_WORKERS)
        scan_factor: excluded symbols are scanned for the first coverable size in
            (n, scan_factor * n] (default settings.COVERGEN_EXCLUSION_SCAN_FACTOR)

    Raises:
        EmptyLanguageAtSize: the grammar has no tree of size n
    """
    tables = tables or get_table_cache()
    workers = workers or settings.COVERGEN_WORKERS
    scan_factor = scan_factor or settings.COVERGEN_EXCLUSION_SCAN_FACTOR

    total, singles = single_covering_counts(grammar, n, tables)
    criterion = tuple(x for x in grammar.nonterminals if singles[x])
    excluded = tuple(x for x in grammar.nonterminals if not singles[x])

    warnings = []
    for symbol in excluded:
        limit = scan_factor * n
        coverable = _coverable_size_above(grammar, symbol, n, limit, tables)
        if coverable is None:
            message = f"{symbol} is covered by no tree of size {n} nor any size from {n + 1} to {limit}; excluded"
        else:
            message = f"{symbol} is covered by no tree of size {n} (coverable at size {coverable}); excluded"
        logger.warning("[LP] %s", message)
        warnings.append(message)

    pairs = list(combinations(criterion, 2))

    def count_pair(pair):
        return pair, pair_covering_count(grammar, pair[0], pair[1], n, tables)

    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pair_counts = dict(pool.map(count_pair, pairs))
    else:
        pair_counts = dict(count_pair(pair) for pair in pairs)
    logger.info("[LP] %d single and %d pair counts at n=%d", len(singles), len(pair_counts), n)

    matrix = RatioMatrix(n, total, criterion, [], excluded, singles, pair_counts, warnings)
    matrix.ratios = [
        [Fraction(matrix.pair_count(e, f), singles[e]) for e in criterion]
        for f in criterion
    ]
    return matrix


def strategy_certificate(matrix: RatioMatrix, pi: Dict[Symbol, Number]) -> Number:
    """min over rows f of sum_e pi_e * ratio[f][e]"""
    values = [
        sum(pi.get(e, 0) * row[j] for j, e in enumerate(matrix.criterion))
        for row in matrix.ratios
    ]
    return min(values)


class _DenseSimplex:
    """
    Tableau simplex for max c.x, A x <= b, x >= 0 with b >= 0 (the slack
    basis is feasible, so one phase suffices). Bland's rule: entering
    variable is the lowest index with negative reduced cost, leaving row the
    lowest basic index among minimal ratios.
    """

    def __init__(self, a, b, c, exact: bool, tolerance: float):
        rows, columns = a.shape
        dtype = object if exact else float
        self.exact = exact
        self.tolerance = 0 if exact else tolerance
        self.tableau = np.zeros((rows + 1, columns + rows + 1), dtype=dtype)
        if exact:
            self.tableau[:] = Fraction(0)
        self.tableau[:rows, :columns] = a
        for i in range(rows):
            self.tableau[i, columns + i] = Fraction(1) if exact else 1.0
        self.tableau[:rows, -1] = b
        self.tableau[rows, :columns] = -c
        self.basis = [columns + i for i in range(rows)]
        self.pivots = 0

    def _entering(self) -> Optional[int]:
        costs = self.tableau[-1, :-1]
        for j, cost in enumerate(costs):
            if cost < -self.tolerance:
                return j
        return None

    def _leaving(self, column: int) -> Optional[int]:
        best, best_ratio = None, None
        for i in range(len(self.basis)):
            entry = self.tableau[i, column]
            if entry <= self.tolerance:
                continue
            ratio = self.tableau[i, -1] / entry
            if (best is None or ratio < best_ratio - self.tolerance
                    or (abs(ratio - best_ratio) <= self.tolerance and self.basis[i] < self.basis[best])):
                best, best_ratio = i, ratio
        return best

    def _pivot(self, row: int, column: int):
        tableau = self.tableau
        tableau[row] = tableau[row] / tableau[row, column]
        for i in range(tableau.shape[0]):
            if i != row and tableau[i, column] != 0:
                tableau[i] = tableau[i] - tableau[i, column] * tableau[row]
        self.basis[row] = column
        self.pivots += 1

    def solve(self):
        while True:
            column = self._entering()
            if column is None:
                break
            row = self._leaving(column)
            if row is None:
                raise ArithmeticError("linear program is unbounded")
            self._pivot(row, column)
        values = [0] * (self.tableau.shape[1] - 1)
        for i, variable in enumerate(self.basis):
            values[variable] = self.tableau[i, -1]
        return values, self.tableau[-1, -1]


def solve_maxmin(matrix: RatioMatrix, mode: Optional[str] = None,
                 tolerance: Optional[float] = None) -> StrategySolution:
    """
    Optimal mixing distribution pi and value p for a ratio matrix.

    Args:
        matrix: output of build_ratio_matrix
        mode: 'rational' (exact Fractions) or 'float'
            (default settings.COVERGEN_LP_MODE)
        tolerance: float-mode pivot tolerance (default settings.COVERGEN_FLOAT_TOLERANCE)

    Returns:
        StrategySolution whose p equals the certificate min-row value of pi
    """
    mode = mode or settings.COVERGEN_LP_MODE
    tolerance = settings.COVERGEN_FLOAT_TOLERANCE if tolerance is None else tolerance
    if mode not in ('rational', 'float'):
        raise ValueError(f"unknown arithmetic mode '{mode}'")
    exact = mode == 'rational'
    criterion = matrix.criterion
    if not criterion:
        logger.warning("[LP] empty criterion, nothing to optimise")
        return StrategySolution({}, Fraction(0) if exact else 0.0, EMPTY_CRITERION, mode)

    size = len(criterion)
    convert = (lambda v: Fraction(v)) if exact else float
    # variables: pi_0 .. pi_{size-1}, p
    a = np.zeros((size + 1, size + 1), dtype=object if exact else float)
    b = np.zeros(size + 1, dtype=object if exact else float)
    c = np.zeros(size + 1, dtype=object if exact else float)
    for f in range(size):
        for e in range(size):
            a[f, e] = -convert(matrix.ratios[f][e])
        a[f, size] = convert(1)
        b[f] = convert(0)
    for e in range(size):
        a[size, e] = convert(1)
    a[size, size] = convert(0)
    b[size] = convert(1)
    for j in range(size):
        c[j] = convert(0)
    c[size] = convert(1)

    simplex = _DenseSimplex(a, b, c, exact, tolerance)
    values, objective = simplex.solve()
    pi = {e: convert(values[j]) for j, e in enumerate(criterion)}

    # sum(pi) <= 1 was relaxed from equality; extra mass never lowers a row
    leftover = convert(1) - sum(pi.values())
    if leftover > (0 if exact else tolerance):
        pi[criterion[0]] += leftover

    certificate = strategy_certificate(matrix, pi)
    if abs(certificate - objective) > (0 if exact else 10 * tolerance):
        logger.warning("[LP] certificate %s differs from objective %s", certificate, objective)
    logger.info("[LP] optimum p=%s after %d pivots", certificate, simplex.pivots)
    return StrategySolution(pi, certificate, OPTIMAL, mode, simplex.pivots)


def isotropic_coverage_bound(p_min: Number, count: int) -> Number:
    """
    1 - (1 - p_min)^N: probability that N criterion-blind uniform draws
    cover every element, when each is covered with probability >= p_min.
    """
    if not 0 <= p_min <= 1:
        raise ValueError(f"p_min must lie in [0, 1], got {p_min}")
    if count < 1:
        raise ValueError(f"N must be at least 1, got {count}")
    return 1 - (1 - p_min) ** count
