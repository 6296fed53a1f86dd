"""
Скрипт запуска srrt из корневой директории.
"""

import sys
from src.cli.main import main

if __name__ == '__main__':
    exit_code = main()
    sys.exit(exit_code)
