"""
Management command (debugging): exhaustive-enumeration counts
"""
from covergen.oracle import oracle_counts

from ._base import GrammarCommand


class Command(GrammarCommand):
    help = '[debug] Brute-force counts of all, covering and pair-covering trees up to size n'

    def run(self, grammar, options):
        counts = oracle_counts(grammar, options['size'])
        sizes = range(1, counts.n_max + 1)
        results = {
            'totals': [counts.totals[k] for k in sizes],
            'singles': {x: [row[k] for k in sizes] for x, row in counts.singles.items()},
            'pairs': {f"{x},{y}": [row[k] for k in sizes] for (x, y), row in counts.pairs.items()},
        }
        return {}, results, []
