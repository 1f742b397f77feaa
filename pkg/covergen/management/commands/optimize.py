"""
Management command: optimal mixing distribution for a coverage campaign
"""
from covergen.optimizer import build_ratio_matrix, solve_maxmin

from ._base import GrammarCommand


class Command(GrammarCommand):
    help = 'Solve the max-min program for the mixing distribution over covering generators'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--mode', choices=('rational', 'float'), help='LP arithmetic (default from settings)')
        parser.add_argument('--workers', type=int, help='threads for the pair covering grammars')

    def run(self, grammar, options):
        n = options['size']
        matrix = build_ratio_matrix(grammar, n, workers=options['workers'])
        solution = solve_maxmin(matrix, options['mode'])

        suffix = '' if solution.mode == 'rational' else '_approx'
        results = {
            'status': solution.status,
            'total': matrix.total,
            f'p{suffix}': solution.p,
            f'pi{suffix}': solution.pi,
            'criterion': matrix.criterion,
            'excluded': matrix.excluded,
            'single_counts': matrix.single_counts,
            'ratio_matrix': {
                f: {e: matrix.ratios[i][j] for j, e in enumerate(matrix.criterion)}
                for i, f in enumerate(matrix.criterion)
            },
            'pivots': solution.pivots,
        }
        return {'mode': solution.mode}, results, matrix.warnings
