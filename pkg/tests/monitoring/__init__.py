# Monitoring tests
