"""
Covering grammars

G_X tags every non-terminal Z of G with
    0: an X occurs strictly above,
    1: no X above, but X at this node or below,
    2: no X above nor below.
Its trees are in bijection with the trees of G covering X; erasing the tags
(project) is the bijection. G_XY applies the same construction to G_X with
target Y, so each symbol carries two tags, ((Z,i),j).
"""
import functools
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .counting import TableCache, get_table_cache
from .exceptions import SizeUnrealizable
from .grammar import DerivationTree, Grammar, Rule, Symbol, map_tree
from .sampler import RandomSource, sample_tree

logger = logging.getLogger(__name__)

SymbolRef = Union[str, Symbol]
Word = Tuple[Symbol, ...]


def lift(word: Sequence[Symbol], tag: int) -> Word:
    """Tag every non-terminal of word with `tag`; terminals are unchanged"""
    return tuple(s.tagged(tag) if s.is_nonterminal else s for s in word)


def lift_zero(word: Sequence[Symbol]) -> Word:
    """[w]_0"""
    return lift(word, 0)


def lift_two(word: Sequence[Symbol]) -> Word:
    """[w]_2"""
    return lift(word, 2)


def expand_one_two(word: Sequence[Symbol]) -> List[Word]:
    """
    {w}_{1,2}: every tagging of the non-terminals of word with 1 or 2 where
    at least one gets 1. Empty when word has no non-terminal.
    """
    positions = [i for i, s in enumerate(word) if s.is_nonterminal]
    taggings = []
    for tags in itertools.product((1, 2), repeat=len(positions)):
        if 1 not in tags:
            continue
        tagged = list(word)
        for position, tag in zip(positions, tags):
            tagged[position] = word[position].tagged(tag)
        taggings.append(tuple(tagged))
    return taggings


@dataclass(frozen=True)
class CoverGrammar:
    """A covering grammar with the grammar it was derived from"""
    derived: Grammar
    origin: Grammar
    targets: Tuple[Symbol, ...]

    @property
    def start(self) -> Symbol:
        return self.derived.start


def _cover_layer(grammar: Grammar, target: str) -> Grammar:
    """One tagging pass; `target` is compared with the untagged name of each lhs"""
    rules = grammar.rules
    zero = [Rule(r.lhs.tagged(0), lift_zero(r.rhs)) for r in rules]
    one = [Rule(r.lhs.tagged(1), w) for r in rules if r.lhs.name != target
           for w in expand_one_two(r.rhs)]
    one_target = [Rule(r.lhs.tagged(1), lift_zero(r.rhs)) for r in rules if r.lhs.name == target]
    two = [Rule(r.lhs.tagged(2), lift_two(r.rhs)) for r in rules if r.lhs.name != target]
    every_tag = [s.tagged(tag) for tag in (0, 1, 2) for s in grammar.nonterminals]
    return Grammar.from_rules(zero + one + one_target + two,
                              start=grammar.start.tagged(1),
                              extra_nonterminals=every_tag)


@functools.lru_cache(maxsize=128)
def build_GX(grammar: Grammar, target: SymbolRef) -> CoverGrammar:
    """
    G_X: rules R_0, R_1, R_1', R_2 in that order, each following the origin
    rule order (R_1 additionally in tagging order).
    """
    x = grammar.symbol(target)
    derived = _cover_layer(grammar, x.name)
    logger.info("[COVER] G_%s: %d rules", x, len(derived.rules))
    return CoverGrammar(derived, grammar, (x,))


@functools.lru_cache(maxsize=256)
def build_GXY(grammar: Grammar, first: SymbolRef, second: SymbolRef) -> CoverGrammar:
    """G_XY: the single-target construction applied to G_X with target Y"""
    x, y = grammar.symbol(first), grammar.symbol(second)
    if x == y:
        raise ValueError(f"G_XY needs two distinct targets, got {x} twice")
    single = build_GX(grammar, x)
    derived = _cover_layer(single.derived, y.name)
    logger.info("[COVER] G_%s%s: %d rules", x, y, len(derived.rules))
    return CoverGrammar(derived, grammar, (x, y))


def cover_grammar(grammar: Grammar, targets: Union[SymbolRef, Sequence[SymbolRef]]) -> CoverGrammar:
    """G_X for one target, G_XY for two (G_X when both are equal)"""
    if isinstance(targets, (str, Symbol)):
        targets = (targets,)
    resolved = [grammar.symbol(t) for t in targets]
    if len(resolved) == 1 or (len(resolved) == 2 and resolved[0] == resolved[1]):
        return build_GX(grammar, resolved[0])
    if len(resolved) == 2:
        return build_GXY(grammar, resolved[0], resolved[1])
    raise ValueError(f"one or two targets expected, got {len(resolved)}")


def _erase_rule(rule: Rule) -> Rule:
    return Rule(rule.lhs.base, tuple(s.base for s in rule.rhs))


def project(tree: DerivationTree) -> DerivationTree:
    """Erase all tags: a tree of the covering grammar becomes a tree of the origin"""
    return map_tree(tree, lambda symbol: symbol.base, _erase_rule)


def covering_count(grammar: Grammar, targets, n: int, tables: Optional[TableCache] = None) -> int:
    """|E_{X,n}(G)| (or |E_{X,Y,n}(G)| for two targets)"""
    tables = tables or get_table_cache()
    cover = cover_grammar(grammar, targets)
    return tables.get(cover.derived, n).total(n)


def pair_covering_count(grammar: Grammar, first: SymbolRef, second: SymbolRef, n: int,
                        tables: Optional[TableCache] = None) -> int:
    return covering_count(grammar, (first, second), n, tables)


def coverage_probability(grammar: Grammar, tables: Optional[TableCache], target: SymbolRef,
                         n: int) -> Fraction:
    """p_{X,n} = |E_{X,n}(G)| / |E_n(G)|, 0 when E_n(G) is empty"""
    tables = tables or get_table_cache()
    total = tables.get(grammar, n).total(n)
    if not total:
        return Fraction(0)
    return Fraction(covering_count(grammar, target, n, tables), total)


def pair_coverage_probability(grammar: Grammar, tables: Optional[TableCache], first: SymbolRef,
                              second: SymbolRef, n: int) -> Fraction:
    """p_{X,Y,n}; equal to p_{X,n} when X == Y"""
    tables = tables or get_table_cache()
    total = tables.get(grammar, n).total(n)
    if not total:
        return Fraction(0)
    return Fraction(pair_covering_count(grammar, first, second, n, tables), total)


def sample_covering_tree(grammar: Grammar, targets, n: int, rng: RandomSource,
                         tables: Optional[TableCache] = None) -> DerivationTree:
    """
    Uniform tree of G of size n among those covering the target(s).

    Raises:
        SizeUnrealizable: no covering tree of size n exists
    """
    tables = tables or get_table_cache()
    cover = cover_grammar(grammar, targets)
    table = tables.get(cover.derived, n)
    if not table.total(n):
        names = "+".join(str(t) for t in cover.targets)
        raise SizeUnrealizable(f"{grammar.start} covering {names}", n)
    tree = sample_tree(cover.derived, table, cover.start, n, rng)
    return project(tree)
