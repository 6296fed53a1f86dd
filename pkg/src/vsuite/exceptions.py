"""
Исключения для verification suite.
"""


class SuiteError(Exception):
    """Базовая ошибка набора."""
    pass


class SuiteConfigurationError(SuiteError):
    """Некорректный case.json или отсутствует эталон."""
    pass


class SuiteIOError(SuiteError):
    """Каталог набора недоступен для чтения."""
    pass
