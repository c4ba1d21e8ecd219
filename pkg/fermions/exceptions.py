"""Ошибки библиотеки фермионной алгебры."""


class FermionsError(Exception):
    pass


class DomainError(FermionsError, ValueError):
    """Нарушено предусловие операции (номер моды, размерность, бипартиция...)."""


class StateFormatError(DomainError):
    """Файл состояния не соответствует JSON-формату."""


class ExpressionSyntaxError(DomainError):
    """Синтаксическая ошибка в операторном выражении.

    position - смещение символа в исходной строке (с нуля),
    expected - что ожидал разборщик в этой позиции.
    """

    def __init__(self, message, position, expected=None):
        self.position = position
        self.expected = expected
        detail = f'{message} (позиция {position}'
        if expected:
            detail += f', ожидалось: {expected}'
        detail += ')'
        super().__init__(detail)
