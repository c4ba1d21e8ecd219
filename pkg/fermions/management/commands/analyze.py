from fermions.management.base import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Анализ запутанности состояния относительно бипартиции'
    kind = 'analyze'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', required=True, help='JSON-файл с состоянием')
        parser.add_argument('--bipartition', required=True,
                            help='Бипартиция "1,2|3,4" или "m:2/4"')
        parser.add_argument('--projections', nargs=2, metavar=('P1', 'P2'),
                            help='Два выражения-проектора для проверки некоррелированности')
