"""
Management command: exact coverage probabilities p_{X,n} and p_{X,Y,n}
"""
from fractions import Fraction
from itertools import combinations

from covergen.counting import get_table_cache
from covergen.cover import pair_covering_count
from covergen.optimizer import single_covering_counts

from ._base import GrammarCommand


class Command(GrammarCommand):
    help = 'Exact probabilities that a uniform tree of size n covers each non-terminal'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--pairs', action='store_true', help='also report every pair of non-terminals')

    def run(self, grammar, options):
        n = options['size']
        tables = get_table_cache()
        total, singles = single_covering_counts(grammar, n, tables)

        results = {
            'total': total,
            'single_counts': singles,
            'single': {x: Fraction(c, total) for x, c in singles.items()},
        }
        if options['pairs']:
            pair_counts = {
                f"{x},{y}": pair_covering_count(grammar, x, y, n, tables)
                for x, y in combinations(grammar.nonterminals, 2)
            }
            results['pair_counts'] = pair_counts
            results['pairs'] = {key: Fraction(c, total) for key, c in pair_counts.items()}
        return {'pairs': options['pairs']}, results, []
