"""WSGI-точка входа для REST API анализа (runserver и продакшен-сервер)."""
import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'fermilab.settings')

application = get_wsgi_application()
