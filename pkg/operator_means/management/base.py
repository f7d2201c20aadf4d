"""
Shared plumbing for the operator_means management commands.

Exit codes: 0 everything held, 1 an inequality failed or a golden value
mismatched, 2 invalid flags or input (including violated hypotheses and
numerical breakdowns on the given input).
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from operator_means.exceptions import HypothesisViolation, InputError, NumericalError, error_text
from operator_means.reporting import to_json

logger = logging.getLogger(__name__)

EXIT_FAILED = 1
EXIT_USAGE = 2


class VerifierCommand(BaseCommand):
    def add_arguments(self, parser):
        parser.add_argument(
            '--json',
            action='store_true',
            help='Print machine-readable JSON instead of a table',
        )

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except (InputError, HypothesisViolation) as exc:
            logger.info(f'{self.__module__.rsplit(".", 1)[-1]} rejected its input: {error_text(exc)}')
            raise CommandError(error_text(exc), returncode=EXIT_USAGE) from exc
        except NumericalError as exc:
            raise CommandError(f'Numerical failure: {exc}', returncode=EXIT_USAGE) from exc

    def run(self, **options):
        raise NotImplementedError

    def write_json(self, data):
        self.stdout.write(to_json(data))

    def write_lines(self, lines, style=None):
        for line in lines:
            self.stdout.write(style(line) if style else line)

    def fail(self, message):
        raise CommandError(message, returncode=EXIT_FAILED)
