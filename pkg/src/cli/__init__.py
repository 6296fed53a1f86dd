"""
Командная строка srrt.

Точка входа: src.cli.main.main (подмодуль main не перекрывается функцией).
"""

from .main import execute, parse_args

__all__ = ["execute", "parse_args"]
