from .base import VerificationSuite
from .suites import SUITES, run_suite
