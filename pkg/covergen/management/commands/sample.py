"""
Management command: uniform random trees of size n
"""
from covergen.counting import get_table_cache
from covergen.grammar import yield_string
from covergen.sampler import RandomSource, sample_tree

from ._base import GrammarCommand, seed_value

FORMATS = ('yield', 'tree')


class Command(GrammarCommand):
    help = 'Draw derivation trees of size n uniformly at random'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--count', type=int, default=1, help='number of trees (default 1)')
        parser.add_argument('--seed', type=seed_value, help='64-bit seed')
        parser.add_argument('--format', choices=FORMATS, default='yield', help='emit yields or nested-list trees')

    def run(self, grammar, options):
        n, count = options['size'], options['count']
        if count < 1:
            raise ValueError(f"--count must be at least 1, got {count}")
        seed = self.default_seed(options)
        table = get_table_cache().get(grammar, n)
        rng = RandomSource(seed)

        trees = [sample_tree(grammar, table, grammar.start, n, rng) for _ in range(count)]
        if options['format'] == 'yield':
            samples = [yield_string(t) for t in trees]
        else:
            samples = trees
        parameters = {'count': count, 'seed': seed, 'format': options['format']}
        return parameters, {'total': table.total(n), 'samples': samples}, []
