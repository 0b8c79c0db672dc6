import sys

import pytest

from matchforge.model import ApplicantProfile, CategoryCosts, CostModel, Item, JobOffer, SolvedCase
from matchforge.taxonomy import toy_taxonomy


@pytest.fixture(scope="session")
def graph():
    return toy_taxonomy().precompute()


def skills(*concepts, weight=1.0):
    return [Item(c, "skills", weight) for c in concepts]


def unit_model(cutoff=1, scheme="multiplicative", categories=("skills", "education", "languages")):
    return CostModel({c: CategoryCosts(1.0, 1.0, 1.0) for c in categories}, cutoff, scheme)


@pytest.fixture
def five_item_instance():
    """Offer of 5 skills vs profile of 4 that needs 2 insertions, 2 substitutions, 1 deletion.

    With cutoff 1 only adjacent concepts substitute: cpp<-c and mysql<-sql.
    java matches exactly; forklift and copywriting must be inserted;
    litigation must be deleted.
    """
    offer = skills("java", "cpp", "mysql", "forklift", "copywriting")
    profile = skills("java", "c", "sql", "litigation")
    return offer, profile, unit_model(cutoff=1)


@pytest.fixture
def toy_dataset():
    offers = [
        JobOffer("o1", "IT", {
            "skills": skills("java", "sql", "python"),
            "languages": [Item("english", "languages")],
        }),
        JobOffer("o2", "Legal", {
            "skills": skills("contract_law", "negotiation"),
            "education": [Item("llb", "education", 2.0)],
        }),
    ]
    profiles = [
        ApplicantProfile("p1", {"skills": skills("java", "sql", "python"),
                                "languages": [Item("english", "languages")]}),
        ApplicantProfile("p2", {"skills": skills("cpp", "mysql"), "languages": [Item("german", "languages")]}),
        ApplicantProfile("p3", {"skills": skills("litigation"), "education": [Item("llm", "education")]}),
        ApplicantProfile("p4", {"skills": skills("contract_law"), "education": [Item("llb", "education")]}),
    ]
    cases = [
        SolvedCase("o1", ["p1", "p2", "p3"]),
        SolvedCase("o2", ["p4", "p3", "p1", "p2"]),
    ]
    return offers, profiles, cases


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
