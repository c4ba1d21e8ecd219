import logging

from django.core.management.base import BaseCommand, CommandError

from fermions import services
from fermions.config import RunConfig
from fermions.exceptions import DomainError

logger = logging.getLogger(__name__)

EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class AnalysisCommand(BaseCommand):
    """Общий каркас команд анализа: флаги, запуск сервиса, вывод отчёта"""

    kind = None

    def add_arguments(self, parser):
        parser.add_argument('--format', choices=['text', 'json'], default='text',
                            help='Формат вывода отчёта')
        parser.add_argument('--output', help='Записать JSON-отчёт в файл')
        parser.add_argument('--save', action='store_true',
                            help='Сохранить отчёт в базе данных')
        parser.add_argument('--degree', type=int, default=None,
                            help='Максимальная степень мономов при поиске свидетелей')
        parser.add_argument('--tol', type=float, default=None,
                            help='Допуск численных сравнений')
        parser.add_argument('--seed', type=int, default=0,
                            help='Зерно генератора для словаря подгонки')
        parser.add_argument('--dict-size', type=int, default=32,
                            help='Число случайных произведений в словаре подгонки')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            config = RunConfig.from_options(self.kind, options)
            report, failures = services.run(config)
        except DomainError as e:
            logger.warning("%s: ошибка входных данных: %s", self.kind, e)
            raise CommandError(str(e), returncode=EXIT_USAGE)

        if config.output_path is not None:
            try:
                config.output_path.write_text(services.report_to_json(report), encoding='utf-8')
            except OSError as e:
                raise CommandError(f'Не удалось записать отчёт: {e}', returncode=EXIT_USAGE)
            logger.info("Отчёт %s записан в %s", self.kind, config.output_path)
        if config.save:
            saved = services.save_report(report)
            logger.info("Отчёт %s сохранён (id=%s)", self.kind, saved.pk)

        if config.format == 'json':
            self.stdout.write(services.report_to_json(report))
        else:
            self.stdout.write(self.render_text(report))

        if failures:
            raise CommandError(
                f'Не пройдены проверки: {", ".join(failures)}', returncode=EXIT_CHECK_FAILED
            )

    def render_text(self, report):
        return services.report_to_text(report)
