from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='AnalysisReport',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('car-check', 'Проверка CAR'), ('demo-psi', 'Демонстрация |Psi>'), ('expect', 'Среднее значение'), ('analyze', 'Анализ состояния')], max_length=20, verbose_name='Тип анализа')),
                ('modes', models.PositiveIntegerField(verbose_name='Число мод')),
                ('bipartition', models.CharField(blank=True, max_length=200, verbose_name='Бипартиция')),
                ('verdict', models.CharField(blank=True, db_index=True, max_length=40, verbose_name='Вердикт')),
                ('payload', models.JSONField(verbose_name='Отчёт')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Создан')),
            ],
            options={
                'verbose_name': 'Отчёт анализа',
                'verbose_name_plural': 'Отчёты анализа',
                'ordering': ['-created_at'],
            },
        ),
    ]
