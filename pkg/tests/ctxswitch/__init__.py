# Ctxswitch tests
