"""
Исходные модули рантайма процессов SR.
"""
