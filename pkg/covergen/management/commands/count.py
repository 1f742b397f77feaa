"""
Management command: tree counts by size
"""
from covergen.counting import get_table_cache

from ._base import GrammarCommand


class Command(GrammarCommand):
    help = 'Count derivation trees of size 1..n (per non-terminal, or for one root)'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--root', help='non-terminal at the root (default: start symbol)')

    def run(self, grammar, options):
        n = options['size']
        table = get_table_cache().get(grammar, n)
        root = grammar.symbol(options['root']) if options['root'] else grammar.start

        results = {
            'root': root,
            'count': table.count(root, n),
            'row': table.row(root),
            'minimal_size': table.minimal_size(root),
        }
        if not options['root']:
            results['rows'] = {x: table.row(x) for x in grammar.nonterminals}
            results['minimal_sizes'] = {x: table.minimal_size(x) for x in grammar.nonterminals}
        return {'root': str(root)}, results, []
