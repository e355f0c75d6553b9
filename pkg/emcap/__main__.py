"""Run emcap subcommands with ``python -m emcap <subcommand>``."""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'emcap.settings')
    from django.core.management import execute_from_command_line

    execute_from_command_line(['emcap', *sys.argv[1:]])


if __name__ == '__main__':
    main()
