"""
Exhaustive enumeration of derivation trees for small sizes

Independent of the counting tables: trees are built by plain recursion over
rules and size compositions, then counted and filtered extensionally.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from django.conf import settings

from .exceptions import CapExceeded
from .grammar import (
    EPSILON, DerivationTree, Grammar, Symbol, canonical_key, covered_symbols, leaf,
)

logger = logging.getLogger(__name__)


@dataclass
class EnumerationResult:
    root: Symbol
    size: int
    trees: List[DerivationTree] = field(default_factory=list)

    def __len__(self):
        return len(self.trees)


@dataclass
class OracleCounts:
    """totals[k], singles[X][k] and pairs[(X, Y)][k] for 1 <= k <= n_max"""
    n_max: int
    totals: Dict[int, int]
    singles: Dict[Symbol, Dict[int, int]]
    pairs: Dict[Tuple[Symbol, Symbol], Dict[int, int]]

    def pair(self, first: Symbol, second: Symbol, k: int) -> int:
        if first == second:
            return self.singles[first][k]
        row = self.pairs.get((first, second)) or self.pairs[(second, first)]
        return row[k]


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered ways to write total as a sum of `parts` positive integers"""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Enumerator:
    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.memo: Dict[Tuple[Symbol, int], List[DerivationTree]] = {}

    def trees(self, symbol: Symbol, size: int) -> List[DerivationTree]:
        key = (symbol, size)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        found: List[DerivationTree] = []
        for rule in self.grammar.rules_for(symbol):
            children = rule.rhs_nonterminals
            budget = size - 1 - rule.terminal_count
            for sizes in _compositions(budget, len(children)):
                options = [self.trees(child, s) for child, s in zip(children, sizes)]
                for picked in itertools.product(*options):
                    subtrees = iter(picked)
                    nodes = tuple(next(subtrees) if s.is_nonterminal else leaf(s) for s in rule.rhs)
                    found.append(DerivationTree(symbol, nodes or (leaf(EPSILON),), rule))
        self.memo[key] = found
        return found


def enumerate_trees(grammar: Grammar, root: Symbol, n: int,
                    cap: Optional[int] = None) -> EnumerationResult:
    """
    Every derivation tree of size exactly n rooted at root.

    Args:
        grammar: grammar to enumerate
        root: non-terminal at the root
        n: tree size
        cap: largest size accepted (default settings.COVERGEN_ORACLE_CAP)

    Raises:
        CapExceeded: n > cap
    """
    cap = settings.COVERGEN_ORACLE_CAP if cap is None else cap
    if n > cap:
        raise CapExceeded(n, cap)
    root = grammar.symbol(root)
    trees = _Enumerator(grammar).trees(root, n) if n >= 1 else []
    assert len({canonical_key(t) for t in trees}) == len(trees), "enumeration produced a duplicate tree"
    return EnumerationResult(root, n, list(trees))


def oracle_counts(grammar: Grammar, n_max: int, cap: Optional[int] = None) -> OracleCounts:
    """
    |E_k|, |E_{X,k}| and |E_{X,Y,k}| for every non-terminal X, Y and
    1 <= k <= n_max, by filtering the enumerated trees.

    Raises:
        CapExceeded: n_max > cap
    """
    cap = settings.COVERGEN_ORACLE_CAP if cap is None else cap
    if n_max > cap:
        raise CapExceeded(n_max, cap)
    enumerator = _Enumerator(grammar)
    symbols = grammar.nonterminals
    pairs = list(itertools.combinations(symbols, 2))
    totals: Dict[int, int] = {}
    singles: Dict[Symbol, Dict[int, int]] = {x: {} for x in symbols}
    pair_rows: Dict[Tuple[Symbol, Symbol], Dict[int, int]] = {p: {} for p in pairs}
    for k in range(1, n_max + 1):
        trees = enumerator.trees(grammar.start, k)
        covered = [covered_symbols(t) for t in trees]
        totals[k] = len(trees)
        for x in symbols:
            singles[x][k] = sum(1 for c in covered if x in c)
        for x, y in pairs:
            pair_rows[(x, y)][k] = sum(1 for c in covered if x in c and y in c)
        logger.debug("[ORACLE] size %d: %d trees", k, len(trees))
    return OracleCounts(n_max, totals, singles, pair_rows)
