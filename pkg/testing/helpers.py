"""
Shared fixtures for the covergen tests
"""
import functools
from collections import Counter

from covergen.grammar import EPSILON, DerivationTree, Rule, leaf, load_grammar, nonterminal, terminal

BUNDLED = ('binary.g', 'example1.g', 'example2.g', 'json.g')


@functools.lru_cache(maxsize=None)
def bundled(name):
    """A bundled grammar, parsed once per test run"""
    return load_grammar(name)


def node(lhs, *children):
    """
    Internal tree node: str children are terminals, DerivationTree children
    are subtrees; no children means an epsilon rule.
    """
    built = tuple(leaf(terminal(c)) if isinstance(c, str) else c for c in children)
    rule = Rule(nonterminal(lhs), tuple(c.label for c in built))
    return DerivationTree(nonterminal(lhs), built or (leaf(EPSILON),), rule)


def chi_square(observed: Counter, outcomes: int, draws: int) -> float:
    """Pearson statistic against the uniform distribution over `outcomes` values"""
    expected = draws / outcomes
    missing = outcomes - len(observed)
    return sum((count - expected) ** 2 / expected for count in observed.values()) + missing * expected
