"""
Counting derivation trees by size

For every non-terminal S, s(k) is the number of derivation trees of size k
rooted at S. A rule r = S -> w1 S1 w2 ... Sm w(m+1) contributes

    alpha_r(k) = sum over i1 + ... + im = k - beta_r of s1(i1) ... sm(im)

with beta_r = 1 + (number of terminals in the rhs), and s(k) is the sum of
alpha_r(k) over the rules of S. Counts are Python ints (exact, unbounded).
"""
import logging
import threading
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .exceptions import GrammarValidationError
from .grammar import Grammar, Rule, Symbol, has_errors, validate

logger = logging.getLogger(__name__)


def beta(rule: Rule) -> int:
    """Weight of a rule: 1 + number of terminal occurrences in its rhs"""
    return 1 + rule.terminal_count


@dataclass(frozen=True)
class RuleProfile:
    rule: Rule
    beta: int
    rhs_nonterminals: Tuple[Symbol, ...]

    @classmethod
    def of(cls, rule: Rule) -> 'RuleProfile':
        return cls(rule, beta(rule), rule.rhs_nonterminals)


class CountTable:
    """
    Tree counts s(1..n) for every non-terminal of one grammar.

    The table is filled bottom-up over k and can be extended to a larger n
    later; entries already computed never change. Composition sums are folded
    left to right through per-rule partial convolutions, one new index per k.
    """

    def __init__(self, grammar: Grammar):
        self.grammar = grammar
        self.max_size = 0
        self.profiles: Tuple[RuleProfile, ...] = tuple(RuleProfile.of(r) for r in grammar.rules)
        # index 0 is the (empty) size-0 slot everywhere
        self.counts: Dict[Symbol, List[int]] = {s: [0] for s in grammar.nonterminals}
        self.rule_alphas: List[List[int]] = [[0] for _ in self.profiles]
        # _partials[r][j][t] = number of ways to spread size t over rhs non-terminals 0..j
        self._partials: List[List[List[int]]] = [
            [[0] for _ in p.rhs_nonterminals] for p in self.profiles
        ]
        self._suffixes: Dict[int, List[List[int]]] = {}
        self._lock = threading.Lock()

    def extend(self, n: int) -> 'CountTable':
        """Make counts available up to size n"""
        with self._lock:
            if n <= self.max_size:
                return self
            logger.debug("[COUNT] extending table %d -> %d (%d rules)", self.max_size, n, len(self.profiles))
            for k in range(self.max_size + 1, n + 1):
                for row in self.counts.values():
                    row.append(0)
                for index, profile in enumerate(self.profiles):
                    alpha = self._next_alpha(index, profile, k)
                    self.rule_alphas[index].append(alpha)
                    if alpha:
                        self.counts[profile.rule.lhs][k] += alpha
            self.max_size = n
            self._suffixes.clear()
        return self

    def _next_alpha(self, index: int, profile: RuleProfile, k: int) -> int:
        children = profile.rhs_nonterminals
        if not children:
            return 1 if k == profile.beta else 0
        t = k - profile.beta
        if t < 1:
            return 0
        partials = self._partials[index]
        # all sizes involved are < k, so their counts are final
        first = self.counts[children[0]]
        partials[0].append(first[t])
        for j in range(1, len(children)):
            row = self.counts[children[j]]
            previous = partials[j - 1]
            partials[j].append(sum(previous[t - i] * row[i] for i in range(1, t) if row[i]))
        return partials[-1][t]

    def _check_size(self, k: int):
        if k > self.max_size:
            raise ValueError(f"size {k} is beyond this table (max_size={self.max_size})")

    def count(self, symbol: Symbol, k: int) -> int:
        """s(k) for the non-terminal symbol"""
        self._check_size(k)
        if k < 1:
            return 0
        return self.counts[symbol][k]

    def alpha(self, rule_index: int, k: int) -> int:
        """alpha_r(k) for the rule at rule_index"""
        self._check_size(k)
        if k < 1:
            return 0
        return self.rule_alphas[rule_index][k]

    def total(self, k: int) -> int:
        """|E_k(G)|: trees of size k rooted at the start symbol"""
        return self.count(self.grammar.start, k)

    def row(self, symbol: Symbol) -> List[int]:
        """[s(1), ..., s(max_size)]"""
        return list(self.counts[symbol][1:])

    def minimal_size(self, symbol: Symbol) -> Optional[int]:
        """Smallest size with at least one tree, within the table"""
        for k, value in enumerate(self.counts[symbol]):
            if value:
                return k
        return None

    def suffix_products(self, rule_index: int) -> List[List[int]]:
        """
        Suffix convolutions for the rule's rhs non-terminals S1..Sm:
        result[j][t] = number of ways to spread size t over Sj+1..Sm
        (0-based j), so result[0][t] == alpha_r(t + beta_r).
        """
        cached = self._suffixes.get(rule_index)
        if cached is None:
            children = self.profiles[rule_index].rhs_nonterminals
            cached = suffix_convolutions([self.counts[c] for c in children], self.max_size)
            self._suffixes[rule_index] = cached
        return cached


def suffix_convolutions(rows: Sequence[List[int]], size: int) -> List[List[int]]:
    """
    For count rows c1..cm (indexed by size, c[0] == 0) return P with
    P[j][t] = sum over t_j + ... + t_m = t of c_j(t_j) ... c_m(t_m), t <= size.
    """
    products: List[List[int]] = [[] for _ in rows]
    if not rows:
        return products
    products[-1] = list(rows[-1][:size + 1])
    for j in range(len(rows) - 2, -1, -1):
        row = rows[j]
        following = products[j + 1]
        products[j] = [
            sum(row[i] * following[t - i] for i in range(1, t) if row[i])
            for t in range(size + 1)
        ]
    return products


class TableCache:
    """
    Count tables keyed by grammar. A request for a larger size extends the
    cached table instead of rebuilding it.
    """

    def __init__(self):
        self._tables: Dict[Grammar, CountTable] = {}
        self._lock = threading.Lock()

    def get(self, grammar: Grammar, n: int) -> CountTable:
        with self._lock:
            table = self._tables.get(grammar)
            if table is None:
                table = CountTable(grammar)
                self._tables[grammar] = table
        return table.extend(n)

    def __len__(self):
        return len(self._tables)


def build_count_tables(grammar: Grammar, n: int) -> CountTable:
    """
    Compute s(1..n) for every non-terminal of a validated grammar.

    Raises:
        ValueError: n < 1
        GrammarValidationError: validate() reports an error
    """
    if n < 1:
        raise ValueError(f"size must be at least 1, got {n}")
    diagnostics = validate(grammar)
    if has_errors(diagnostics):
        raise GrammarValidationError(diagnostics)
    return CountTable(grammar).extend(n)


def count_trees(grammar: Grammar, n: int) -> int:
    """|E_n(G)|"""
    return build_count_tables(grammar, n).total(n)


# Process-wide table cache
_table_cache = None


def get_table_cache() -> TableCache:
    """Get or create the process-wide table cache"""
    global _table_cache
    if _table_cache is None:
        _table_cache = TableCache()
    return _table_cache
