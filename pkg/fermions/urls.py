from django.urls import path

from . import views

app_name = 'fermions'

urlpatterns = [
    path('demo-psi/', views.demo_psi_api, name='demo_psi'),
    path('expect/', views.expect_api, name='expect'),
    path('reports/', views.report_list_api, name='reports'),
]
