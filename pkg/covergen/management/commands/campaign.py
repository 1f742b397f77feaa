"""
Management command: run a coverage campaign of N trees
"""
from fractions import Fraction

from django.core.management.base import CommandError

from covergen.campaign import EXPLICIT, STRATEGIES, CampaignConfig, run_campaign

from ._base import EXIT_INVALID, GrammarCommand, seed_value


def parse_pi(entries):
    """['Name=a/b', ...] -> {'Name': Fraction(a, b)}"""
    pi = {}
    for entry in entries or ():
        name, sep, value = entry.partition('=')
        if not sep or not name:
            raise CommandError(f"--pi expects Name=a/b, got '{entry}'", returncode=EXIT_INVALID)
        try:
            pi[name.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise CommandError(f"--pi value '{value}' is not a rational number", returncode=EXIT_INVALID)
    return pi


class Command(GrammarCommand):
    help = 'Generate N trees of size n with a coverage strategy and report what they cover'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('-N', '--campaign-size', type=int, required=True, help='number of trees')
        parser.add_argument('--strategy', choices=STRATEGIES, default='optimized')
        parser.add_argument('--pi', action='append', metavar='NAME=A/B',
                            help='mixing probability of one non-terminal (explicit strategy; repeatable)')
        parser.add_argument('--seed', type=seed_value, help='64-bit seed')
        parser.add_argument('--workers', type=int, help='parallel generation streams')
        parser.add_argument('--yields-only', action='store_true', help='omit the derivation trees')

    def run(self, grammar, options):
        pi = parse_pi(options['pi'])
        if pi and options['strategy'] != EXPLICIT:
            raise CommandError("--pi needs --strategy explicit", returncode=EXIT_INVALID)
        cfg = CampaignConfig(
            grammar=grammar,
            n=options['size'],
            count=options['campaign_size'],
            strategy=options['strategy'],
            seed=self.default_seed(options),
            pi=pi or None,
            workers=options['workers'],
            keep_trees=not options['yields_only'],
        )
        report = run_campaign(cfg)

        results = {
            'criterion': report.criterion,
            'excluded': report.excluded,
            'pi': report.pi,
            'predicted_bound': report.predicted_bound,
            'bound_kind': report.bound_kind,
            'all_covered': report.all_covered,
            'covered': report.covered,
            'per_symbol_hits': report.per_symbol_hits,
            'hit_rates': {s: report.hit_rate(s) for s in report.per_symbol_hits},
            'targets': report.targets,
            'yields': report.yields,
        }
        if cfg.keep_trees:
            results['trees'] = report.trees
        parameters = {
            'N': cfg.count,
            'strategy': cfg.strategy,
            'seed': cfg.seed,
            'workers': cfg.workers,
            'pi': {name: str(value) for name, value in pi.items()},
            'yields_only': options['yields_only'],
        }
        return parameters, results, report.warnings
