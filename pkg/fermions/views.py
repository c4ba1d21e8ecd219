import logging

from rest_framework import status
from rest_framework.decorators import api_view
from rest_framework.response import Response

from . import services
from .analysis import expectation
from .config import CommandKind, RunConfig, default_degree, default_tol
from .fock import make_state_psi, state_from_dict
from .models import AnalysisReport
from .opalg import parse

logger = logging.getLogger(__name__)


def _error(message):
    return Response({'error': message}, status=status.HTTP_400_BAD_REQUEST)


@api_view(['GET'])
def demo_psi_api(request):
    """API: отчёт demo-psi для заданного N"""
    try:
        config = RunConfig(
            command=CommandKind.DEMO_PSI,
            n=int(request.GET.get('n', 1)),
            degree=int(request.GET.get('degree', default_degree())),
            tol=default_tol(),
            seed=int(request.GET.get('seed', 0)),
        )
        config.validate()
        report, failures = services.run_demo_psi(config)
    except (TypeError, ValueError) as e:
        # DomainError - тоже ValueError
        return _error(str(e))
    if failures:
        logger.error("demo-psi API: не пройдены проверки %s", failures)
    return Response(report)


@api_view(['POST'])
def expect_api(request):
    """API: среднее значение выражения в пресете |Psi_N> или в переданном состоянии"""
    data = request.data
    expr = data.get('expr')
    if not expr:
        return _error('Поле "expr" обязательно')
    try:
        if 'state' in data:
            state = state_from_dict(data['state'])
        else:
            state = make_state_psi(int(data.get('n', 1)))
        poly = parse(expr)
        value = expectation(state, poly)
    except (TypeError, ValueError) as e:
        return _error(str(e))
    return Response({
        'modes': state.modes,
        'expression': expr,
        'normal_ordered': poly.to_expression(),
        'value': services.complex_to_dict(value),
    })


@api_view(['GET'])
def report_list_api(request):
    """API: последние сохранённые отчёты"""
    kind = request.GET.get('kind', '')
    reports = AnalysisReport.objects.all()
    if kind:
        reports = reports.filter(kind=kind)
    data = [
        {
            'id': report.id,
            'kind': report.kind,
            'modes': report.modes,
            'bipartition': report.bipartition,
            'verdict': report.verdict,
            'created_at': report.created_at.isoformat(),
            'report': report.payload,
        }
        for report in reports[:50]
    ]
    return Response({'count': len(data), 'results': data})
