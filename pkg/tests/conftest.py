# tests/conftest.py
from pathlib import Path

import pytest

from skipless.data_loader import read_json
from skipless.finite_field import FieldSpec
from skipless.steiner import Design, double, sqs_trivial, triple_minus_two
from skipless.zigzag import build_code, seed_coefficients

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def field16():
    return FieldSpec.default()


@pytest.fixture
def code_a2():
    return seed_coefficients(build_code("A", 2))


@pytest.fixture
def baseline2():
    return seed_coefficients(build_code("BASELINE", 2))


@pytest.fixture(scope="session")
def sqs4():
    return sqs_trivial()


@pytest.fixture(scope="session")
def sqs8():
    return double(sqs_trivial())


@pytest.fixture(scope="session")
def sqs10():
    return triple_minus_two(sqs_trivial())


@pytest.fixture(scope="session")
def gapped_sqs8():
    return Design.from_dict(read_json(FIXTURES / "sqs8_gapped.json"))
