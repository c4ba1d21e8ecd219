from fermions.management.base import AnalysisCommand


class Command(AnalysisCommand):
    help = 'Проверяет канонические антикоммутационные соотношения для матриц Жордана-Вигнера'
    kind = 'car-check'

    def add_command_arguments(self, parser):
        parser.add_argument('--modes', type=int, required=True, help='Число мод M')
