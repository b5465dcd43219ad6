import glob
import json
import logging
import os
from collections import OrderedDict

from ..test_utils import evaluate_json_test

logger = logging.getLogger(__name__)


def pytest_generate_tests(metafunc):

    # Load all the JSON files in the directory
    dir_path = os.path.dirname(os.path.realpath(__file__))
    module_dirs = sorted(dir_ for dir_ in os.listdir(dir_path) if os.path.isdir(os.path.join(dir_path, dir_)))

    parametrized_tests = []
    ids = []

    for module in module_dirs:

        test_configuration_files = sorted(glob.glob(dir_path + '/' + module + '/*.json'))
        for filename in test_configuration_files:
            with open(filename) as file:
                test_configuration = json.load(file, object_pairs_hook=OrderedDict)

            for test in test_configuration["cases"]:
                parametrized_tests.append({
                    "operation": test_configuration["operation"],
                    "test": test,
                })

                ids.append(module + ":" + test_configuration["operation"] + ":" + test["title"])

    metafunc.parametrize(
        "test_case",
        parametrized_tests,
        ids=ids
    )


def test_case_runner(test_case):
    evaluate_json_test(
        test_case["operation"],
        test_case["test"]
    )
