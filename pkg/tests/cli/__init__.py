# Cli tests
