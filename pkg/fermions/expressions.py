"""
Разбор операторных выражений.

    expr    := ['-'] term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := literal | op | '(' expr ')'
    op      := 'a' INT | 'A' INT          a = a_i, A = a_i^+, INT >= 1
    literal := FLOAT | FLOAT 'i'          (a+bi) записывается как '(' expr ')'

Пробелы игнорируются, '*' между множителями обязателен. Ведущий унарный
минус нужен, чтобы to_expression() всегда разбиралась обратно.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from .exceptions import DomainError, ExpressionSyntaxError
from .opalg import OperatorPoly

NUMBER_RE = re.compile(r'(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?')
MODE_RE = re.compile(r'\d+')
PUNCTUATION = '+-*()'
MAX_NESTING = 64

FACTOR_START = "число, a<i>, A<i> или '('"


@dataclass(frozen=True)
class Token:
    kind: str            # 'number', 'op', 'punct', 'end'
    text: str
    position: int
    value: object = None


def tokenize(source: str) -> List[Token]:
    if not source.isascii():
        raise ExpressionSyntaxError('Допустимы только ASCII-символы', 0)
    tokens: List[Token] = []
    idx = 0
    while idx < len(source):
        char = source[idx]
        if char.isspace():
            idx += 1
            continue
        if char in PUNCTUATION:
            tokens.append(Token('punct', char, idx))
            idx += 1
            continue
        if char.isdigit() or char == '.':
            match = NUMBER_RE.match(source, idx)
            if match is None:
                raise ExpressionSyntaxError('Некорректное число', idx, 'цифра')
            end = match.end()
            value: complex = float(match.group(0))
            if end < len(source) and source[end] == 'i':
                value = complex(0.0, value)
                end += 1
            if end < len(source) and (source[end].isalnum() or source[end] in '._'):
                raise ExpressionSyntaxError(
                    f'Некорректный комплексный литерал {source[idx:end + 1]!r}', end, "'*' или конец литерала"
                )
            tokens.append(Token('number', source[idx:end], idx, value))
            idx = end
            continue
        if char in 'aA':
            match = MODE_RE.match(source, idx + 1)
            if match is None:
                raise ExpressionSyntaxError(f"После '{char}' нужен номер моды", idx + 1, 'целое число >= 1')
            mode = int(match.group(0))
            if mode == 0:
                raise ExpressionSyntaxError('Номер моды должен быть >= 1', idx + 1, 'целое число >= 1')
            end = match.end()
            if end < len(source) and (source[end].isalnum() or source[end] in '._'):
                raise ExpressionSyntaxError(f'Некорректный оператор {source[idx:end + 1]!r}', end, "'*'")
            tokens.append(Token('op', source[idx:end], idx, (mode, char == 'A')))
            idx = end
            continue
        raise ExpressionSyntaxError(f'Неожиданный символ {char!r}', idx, FACTOR_START)
    tokens.append(Token('end', '', len(source)))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.index = 0
        self.depth = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept(self, text: str) -> Optional[Token]:
        token = self.peek()
        if token.kind == 'punct' and token.text == text:
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        token = self.accept(text)
        if token is None:
            found = self.peek()
            raise ExpressionSyntaxError(
                f'Неожиданный токен {found.text or "конец строки"!r}', found.position, f"'{text}'"
            )
        return token

    def expression(self) -> OperatorPoly:
        negate = self.accept('-') is not None
        result = self.term()
        if negate:
            result = -result
        while True:
            if self.accept('+'):
                result = result + self.term()
            elif self.accept('-'):
                result = result - self.term()
            else:
                return result

    def term(self) -> OperatorPoly:
        result = self.factor()
        while True:
            if self.accept('*'):
                result = result * self.factor()
                continue
            token = self.peek()
            if token.kind in ('number', 'op') or (token.kind == 'punct' and token.text == '('):
                raise ExpressionSyntaxError('Множители должны разделяться знаком умножения', token.position, "'*'")
            return result

    def factor(self) -> OperatorPoly:
        token = self.peek()
        if token.kind == 'number':
            self.advance()
            return OperatorPoly.scalar(token.value)
        if token.kind == 'op':
            self.advance()
            mode, dagger = token.value
            return OperatorPoly.ladder(mode, dagger)
        opening = self.accept('(')
        if opening is not None:
            if self.depth >= MAX_NESTING:
                raise ExpressionSyntaxError(
                    f'Вложенность скобок больше {MAX_NESTING}', opening.position, f'не более {MAX_NESTING} уровней'
                )
            self.depth += 1
            inner = self.expression()
            self.expect(')')
            self.depth -= 1
            return inner
        raise ExpressionSyntaxError(
            f'Неожиданный токен {token.text or "конец строки"!r}', token.position, FACTOR_START
        )


def parse_expression(text: str) -> OperatorPoly:
    """Разбирает выражение и возвращает полином в канонической форме."""
    parser = _Parser(tokenize(text))
    try:
        result = parser.expression()
    except RecursionError as exc:
        # длинные произведения с большими номерами мод при нормальном упорядочении
        raise DomainError('Выражение слишком велико для нормального упорядочения') from exc
    token = parser.peek()
    if token.kind != 'end':
        raise ExpressionSyntaxError(f'Лишний токен {token.text!r}', token.position, "'+', '-' или конец строки")
    return result
