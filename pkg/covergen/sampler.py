"""
Uniform random generation of derivation trees of an exact size

At a node X of size n the rule r_i is picked with probability
alpha_{r_i}(n) / sum_j alpha_{r_j}(n); the sizes of its non-terminal
children are then drawn with probability prod z_j(l_j) / alpha_{r_i}(n),
one child at a time from exact marginals. All draws are exact big-integer
draws; no floating point is involved.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .counting import CountTable, suffix_convolutions
from .exceptions import SizeUnrealizable
from .grammar import EPSILON, DerivationTree, Grammar, Rule, Symbol, leaf

logger = logging.getLogger(__name__)

_WORD_BITS = 64
_SEED_MODULUS = 1 << 64


class RandomSource:
    """
    Seedable, portable random stream.

    Words come from numpy's PCG64 bit generator (64-bit output, stable
    across platforms and numpy releases for a given seed). Uniform draws
    below an arbitrary big integer B use rejection over the minimal number
    of bits needed for B - 1.
    """

    def __init__(self, seed: int = 0):
        if not 0 <= seed < _SEED_MODULUS:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._bits = np.random.PCG64(seed)

    def next_word(self) -> int:
        return int(self._bits.random_raw())

    def uniform_below(self, bound: int) -> int:
        """Uniform integer in [0, bound)"""
        if bound < 1:
            raise ValueError(f"bound must be positive, got {bound}")
        if bound == 1:
            return 0
        bits = (bound - 1).bit_length()
        words = -(-bits // _WORD_BITS)
        excess = words * _WORD_BITS - bits
        while True:
            value = 0
            for _ in range(words):
                value = (value << _WORD_BITS) | self.next_word()
            value >>= excess
            if value < bound:
                return value

    def spawn(self, index: int) -> 'RandomSource':
        """Independent stream for worker `index`, seeded seed + index"""
        return RandomSource((self.seed + index) % _SEED_MODULUS)


def pick_weighted(weights: Sequence[int], rng: RandomSource) -> int:
    """Index j with probability weights[j] / sum(weights), by prefix-sum scan"""
    total = sum(weights)
    u = rng.uniform_below(total)
    for j, weight in enumerate(weights):
        if u < weight:
            return j
        u -= weight
    raise AssertionError("prefix scan ran past the total weight")


def sample_rule(rule_indices: Sequence[int], n: int, table: CountTable, rng: RandomSource) -> int:
    """
    Pick among rules sharing a left-hand side.

    Args:
        rule_indices: positions of the candidate rules in the grammar
        n: size of the tree to build
        table: count table of the grammar, max_size >= n
        rng: random source

    Returns:
        position j in rule_indices, drawn with probability alpha_j(n) / sum alpha
    """
    alphas = [table.alpha(i, n) for i in rule_indices]
    if not any(alphas):
        raise ValueError(f"no rule derives a tree of size {n}")
    return pick_weighted(alphas, rng)


def sample_composition(children: Sequence[Symbol], budget: int, table: CountTable,
                       rng: RandomSource, products: Optional[List[List[int]]] = None) -> List[int]:
    """
    Split `budget` among the non-terminal children.

    (l_1, ..., l_m) comes out with probability prod z_j(l_j) / alpha; l_1 is
    drawn from its exact marginal z_1(l) * P_2(budget - l) / P_1(budget), then
    the rest recursively, with P_j the suffix convolutions of the counts.
    """
    if not children:
        return []
    if products is None:
        products = suffix_convolutions([table.counts[c] for c in children], table.max_size)
    if not products[0][budget]:
        raise ValueError(f"no composition of {budget} fits {len(children)} children")
    sizes = []
    remaining = budget
    for j in range(len(children) - 1):
        row = table.counts[children[j]]
        following = products[j + 1]
        weights = [row[size] * following[remaining - size] for size in range(1, remaining)]
        size = pick_weighted(weights, rng) + 1
        sizes.append(size)
        remaining -= size
    sizes.append(remaining)
    return sizes


@dataclass
class _Frame:
    symbol: Symbol
    rule: Rule
    pending: List[Tuple[Symbol, int]]
    position: int = 0
    children: List[DerivationTree] = field(default_factory=list)


def sample_tree(grammar: Grammar, table: CountTable, root: Symbol, n: int,
                rng: RandomSource) -> DerivationTree:
    """
    Uniform derivation tree of size exactly n rooted at root.

    Raises:
        SizeUnrealizable: no tree of size n exists from root
        ValueError: table too small for n
    """
    if table.max_size < n:
        raise ValueError(f"count table reaches size {table.max_size}, {n} requested")

    def open_frame(symbol: Symbol, size: int) -> _Frame:
        indices = grammar.rule_indices.get(symbol, ())
        if not any(table.alpha(i, size) for i in indices):
            raise SizeUnrealizable(symbol, size)
        rule_index = indices[sample_rule(indices, size, table, rng)]
        profile = table.profiles[rule_index]
        sizes = iter(sample_composition(profile.rhs_nonterminals, size - profile.beta, table, rng,
                                        table.suffix_products(rule_index)))
        pending = [(s, next(sizes) if s.is_nonterminal else 0) for s in profile.rule.rhs]
        return _Frame(symbol, profile.rule, pending)

    stack = [open_frame(root, n)]
    result = None
    while stack:
        frame = stack[-1]
        if frame.position < len(frame.pending):
            symbol, size = frame.pending[frame.position]
            frame.position += 1
            if symbol.is_terminal:
                frame.children.append(leaf(symbol))
            else:
                stack.append(open_frame(symbol, size))
            continue
        stack.pop()
        children = tuple(frame.children) or (leaf(EPSILON),)
        node = DerivationTree(frame.symbol, children, frame.rule)
        if stack:
            stack[-1].children.append(node)
        else:
            result = node
    logger.debug("[SAMPLE] drew a tree of size %d rooted at %s", n, root)
    return result
