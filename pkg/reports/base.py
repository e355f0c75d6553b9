import logging

from django.core.management.base import BaseCommand, CommandError

from numerics.exceptions import AccuracyError, EmcapError

from .csvio import CsvReport, write_atomic
from .forms import flatten_errors

logger = logging.getLogger(__name__)

EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_ACCURACY = 3


class EmcapCommand(BaseCommand):
    """
    A subcommand that validates its options with ``form_class``, fills a
    CsvReport in ``build`` and writes it to --output or standard output.

    Invalid options and domain errors exit with 2, accuracy failures with
    3; a report with failures is still written, then exits with 1.
    """
    name = None
    form_class = None
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--output', help='Write the CSV here (atomically) instead of standard output.')
        self.add_options(parser)

    def add_options(self, parser):
        pass

    def build(self, report, options):
        raise NotImplementedError

    def handle(self, *args, **options):
        config = {field: options.get(field) for field in self.form_class.base_fields}
        form = self.form_class(data=config)
        if not form.is_valid():
            raise CommandError(flatten_errors(form), returncode=EXIT_INVALID)

        report = CsvReport(self.name, config)
        try:
            self.build(report, form.cleaned_data)
        except AccuracyError as e:
            raise CommandError(f'{type(e).__name__}: {e}', returncode=EXIT_ACCURACY) from e
        except EmcapError as e:
            raise CommandError(f'{type(e).__name__}: {e}', returncode=EXIT_INVALID) from e

        text = report.render()
        if options.get('output'):
            write_atomic(options['output'], text)
            logger.info('wrote %s', options['output'])
        else:
            self.stdout.write(text, ending='')

        if report.failures:
            raise CommandError(f'{report.failures} property check(s) failed', returncode=EXIT_CHECK_FAILED)
