from fermions.management.base import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Полный набор проверок для состояния |Psi> = (|N;0> + |0;N>)/sqrt(2)'
    kind = 'demo-psi'

    def add_command_arguments(self, parser):
        parser.add_argument('--n', type=int, required=True, help='Число частиц N (моды 2N)')
