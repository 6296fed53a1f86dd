# Bench tests
