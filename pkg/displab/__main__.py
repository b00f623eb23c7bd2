"""
Command-line entry point: ``python -m displab <experiment> --config <path>``.

Forwards to the ``displab`` management command so that the experiment runner
can be used without spelling out ``manage.py``.
"""
import os
import sys


def main():
    """Run the displab management command with the given arguments."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'displab.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(['displab', 'displab', *sys.argv[1:]])


if __name__ == '__main__':
    main()
