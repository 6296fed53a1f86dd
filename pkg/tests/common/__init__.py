# Common tests
