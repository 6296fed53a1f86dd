# Vsuite tests
