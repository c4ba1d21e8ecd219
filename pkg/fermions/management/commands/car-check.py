"""manage.py car-check - та же команда, что car_check."""
from .car_check import Command  # noqa: F401
