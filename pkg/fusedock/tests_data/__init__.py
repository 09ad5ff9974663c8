import os


def get_tests_data_dir() -> str:
    return os.path.dirname(os.path.realpath(__file__))
