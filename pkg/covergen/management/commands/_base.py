"""
Shared plumbing for the covergen management commands: grammar loading,
validation, the exit-code contract and the output document.
"""
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from covergen.documents import build_document, render_document
from covergen.exceptions import (
    CapExceeded, EmptyLanguageAtSize, GrammarError, GrammarSyntaxError, GrammarValidationError,
    SizeUnrealizable, StrategyError,
)
from covergen.grammar import has_errors, load_grammar, validate

logger = logging.getLogger(__name__)

EXIT_INVALID = 1
EXIT_EMPTY = 2


def seed_value(text: str) -> int:
    seed = int(text, 0)
    if not 0 <= seed < 1 << 64:
        raise ValueError(text)
    return seed


class GrammarCommand(BaseCommand):
    """
    Base class: subclasses add their own flags and implement
    run(grammar, options) -> (parameters, results, warnings).
    """
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('-g', '--grammar', required=True,
                            help='grammar file, or the name of a bundled grammar')
        parser.add_argument('-n', '--size', type=int, required=True, help='tree size')

    def run(self, grammar, options):
        raise NotImplementedError

    def handle(self, *args, **options):
        if options['size'] < 1:
            raise CommandError(f"size must be at least 1, got {options['size']}", returncode=EXIT_INVALID)
        try:
            grammar = load_grammar(options['grammar'])
        except OSError as e:
            raise CommandError(f"cannot read grammar: {e}", returncode=EXIT_INVALID)
        except (GrammarSyntaxError, GrammarError) as e:
            raise CommandError(f"invalid grammar: {e}", returncode=EXIT_INVALID)

        diagnostics = validate(grammar)
        for diagnostic in diagnostics:
            self.stderr.write(str(diagnostic))
        if has_errors(diagnostics):
            raise CommandError("grammar failed validation", returncode=EXIT_INVALID)

        try:
            parameters, results, warnings = self.run(grammar, options)
        except (SizeUnrealizable, EmptyLanguageAtSize) as e:
            raise CommandError(str(e), returncode=EXIT_EMPTY)
        except (GrammarError, GrammarValidationError, StrategyError, CapExceeded, ValueError) as e:
            raise CommandError(str(e), returncode=EXIT_INVALID)

        parameters = {'grammar': options['grammar'], 'n': options['size'], **parameters}
        warnings = [str(d) for d in diagnostics] + list(warnings)
        document = build_document(self.command_name, grammar, parameters, results, warnings)
        self.stdout.write(render_document(document))

    @property
    def command_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    @staticmethod
    def default_seed(options) -> int:
        seed = options.get('seed')
        return settings.COVERGEN_DEFAULT_SEED if seed is None else seed
