from django.db import models


class AnalysisReport(models.Model):
    KIND_CAR_CHECK = 'car-check'
    KIND_DEMO_PSI = 'demo-psi'
    KIND_EXPECT = 'expect'
    KIND_ANALYZE = 'analyze'

    KIND_CHOICES = [
        (KIND_CAR_CHECK, 'Проверка CAR'),
        (KIND_DEMO_PSI, 'Демонстрация |Psi>'),
        (KIND_EXPECT, 'Среднее значение'),
        (KIND_ANALYZE, 'Анализ состояния'),
    ]

    kind = models.CharField(max_length=20, choices=KIND_CHOICES, verbose_name="Тип анализа")
    modes = models.PositiveIntegerField(verbose_name="Число мод")
    bipartition = models.CharField(max_length=200, blank=True, verbose_name="Бипартиция")
    verdict = models.CharField(max_length=40, blank=True, verbose_name="Вердикт", db_index=True)
    payload = models.JSONField(verbose_name="Отчёт")
    created_at = models.DateTimeField(auto_now_add=True, verbose_name="Создан")

    class Meta:
        ordering = ['-created_at']
        verbose_name = "Отчёт анализа"
        verbose_name_plural = "Отчёты анализа"

    def __str__(self) -> str:
        return f"{self.get_kind_display()} #{self.id}: {self.verdict}"

    @property
    def witness(self):
        return self.payload.get('witness')
