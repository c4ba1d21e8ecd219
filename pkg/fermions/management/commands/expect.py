from fermions.management.base import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Вычисляет среднее значение полиномиального выражения в состоянии'
    kind = 'expect'

    def add_command_arguments(self, parser):
        parser.add_argument('--expr', required=True, help='Выражение, например "a1+ a2"')
        parser.add_argument('--n', type=int, help='Использовать пресет |Psi_N>')
        parser.add_argument('--input', help='JSON-файл с состоянием')

    def render_text(self, report):
        value = report['details']['value']
        if value['im'] == 0:
            return f"{value['re']:.12g}"
        return f"{value['re']:.12g}{value['im']:+.12g}i"
