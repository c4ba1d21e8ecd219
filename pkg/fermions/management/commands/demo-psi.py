"""manage.py demo-psi - та же команда, что demo_psi."""
from .demo_psi import Command  # noqa: F401
