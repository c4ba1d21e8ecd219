from django.contrib import admin

from .models import AnalysisReport


@admin.register(AnalysisReport)
class AnalysisReportAdmin(admin.ModelAdmin):
    list_display = ('id', 'kind', 'modes', 'bipartition', 'verdict', 'created_at')
    list_filter = ('kind', 'verdict', 'created_at')
    search_fields = ('bipartition', 'verdict')
    readonly_fields = ('kind', 'modes', 'bipartition', 'verdict', 'payload', 'created_at')
