"""
Django management command that runs a dispersive-estimate experiment.

Reads an experiment configuration, runs the sweep it describes and writes
the result CSV plus a one-line JSON manifest next to it.
"""

import time

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.utils.termcolors import make_style

from lab.config import load_config, resolve_output
from lab.constants import EXPERIMENTS, MESSAGES
from lab.exceptions import ConfigError, DisplabError
from lab.experiments import run
from lab.output import emit_csv, write_manifest


class Command(BaseCommand):
    """
    Run one experiment from a configuration file.

    Usage:
        python manage.py displab region --config configs/region_schrodinger_n3.toml
        python manage.py displab sharpness --config configs/sharpness_failure.toml --threads 4
        python manage.py displab mcnorm --config configs/mcnorm.toml --out results/mcnorm.csv

    Exit status is 0 on success, 2 for an invalid configuration and 3 when
    a numerical operation or the output fails.
    """

    help = 'Run a dispersive-estimate experiment and write its CSV and manifest'

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.success_style = make_style(opts=('bold',), fg='green')
        self.warning_style = make_style(opts=('bold',), fg='yellow')

    def add_arguments(self, parser):
        parser.add_argument(
            'experiment',
            choices=EXPERIMENTS,
            help='Experiment to run'
        )

        parser.add_argument(
            '--config',
            required=True,
            help='Path to the TOML experiment configuration'
        )

        parser.add_argument(
            '--out',
            help='Output CSV path (overrides the configuration)'
        )

        parser.add_argument(
            '--threads',
            type=int,
            help='Worker threads for the sweep (default: DISPLAB_THREADS)'
        )

    def handle(self, *args, **options):
        """Main command handler."""
        config = self._load(options['config'], options['experiment'])
        threads = options['threads'] or settings.DISPLAB_THREADS
        if threads < 1:
            raise CommandError(f'--threads must be positive, got {threads}', returncode=2)

        path = resolve_output(config, options['out'])
        self.stdout.write(
            self.success_style('🧪 ' + MESSAGES['run_started'].format(experiment=config.experiment, config=options['config']))
        )

        started = time.perf_counter()
        try:
            result = run(config, threads=threads)
            emit_csv(result.rows, result.schema, path)
            manifest = write_manifest(
                path, config.experiment, config.digest, time.perf_counter() - started, len(result.rows), result.summary
            )
        except DisplabError as e:
            raise CommandError(f'{e.operation} failed: {e}', returncode=3)
        except OSError as e:
            raise CommandError(f'output failed: {e}', returncode=3)

        self.stdout.write('✅ ' + MESSAGES['run_finished'].format(rows=len(result.rows), path=path))
        self.stdout.write('📄 ' + MESSAGES['manifest_written'].format(path=manifest))
        self._report_summary(result.summary)

    def _load(self, config_path, experiment):
        """Load and validate the configuration, mapping problems to exit status 2."""
        try:
            config = load_config(config_path)
        except ConfigError as e:
            raise CommandError(f'invalid configuration {config_path}: {e}', returncode=2)
        if config.experiment != experiment:
            raise CommandError(
                f'configuration {config_path} describes a {config.experiment} experiment, not {experiment}',
                returncode=2,
            )
        return config

    def _report_summary(self, summary):
        for key, value in sorted(summary.items()):
            line = f'   {key}: {value}'
            if key == 'verdict' and value == 'inconclusive' or key == 'all_converged' and not value:
                self.stdout.write(self.warning_style(line))
            else:
                self.stdout.write(line)
