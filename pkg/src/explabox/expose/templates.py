"""Template expansion with embedded data providers.

Patterns contain `{slot}` placeholders. Each slot is backed by a provider:
a user-supplied value list, one of the built-in embedded lists (first names
per locale, cities, countries, emails) or an integer range. Provider data is
shipped with the artifact instead of being drawn from an external faker
package, so expansions are reproducible byte for byte.

Fill values land in the generated instance's attributes, which is what makes
template-generated suites usable for subgroup fairness readouts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .._util import derive_seed
from ..ingest import Instance
from .perturb import ExposeError

FIRST_NAMES_EN = [
    "Alice", "Amelia", "Aaron", "Adam", "Adrian", "Aisha", "Alan", "Albert", "Alex", "Amanda",
    "Amber", "Amy", "Andrea", "Andrew", "Angela", "Anna", "Anthony", "Ashley", "Austin", "Barbara",
    "Benjamin", "Beth", "Brandon", "Brian", "Caleb", "Cameron", "Carl", "Carol", "Caroline", "Catherine",
    "Charles", "Charlotte", "Chloe", "Christopher", "Claire", "Daniel", "David", "Deborah", "Dennis", "Diana",
    "Dorothy", "Dylan", "Edward", "Eleanor", "Elijah", "Elizabeth", "Emily", "Emma", "Eric", "Ethan",
    "Evelyn", "Frank", "Gabriel", "George", "Grace", "Hannah", "Harold", "Harry", "Heather", "Henry",
    "Isabella", "Jack", "Jacob", "James", "Jasmine", "Jason", "Jennifer", "Jessica", "John", "Jonathan",
    "Joseph", "Joshua", "Julia", "Karen", "Katherine", "Kevin", "Laura", "Lauren", "Liam", "Linda",
    "Lucas", "Margaret", "Maria", "Mark", "Mary", "Mason", "Matthew", "Megan", "Michael", "Michelle",
    "Nancy", "Nathan", "Nicole", "Noah", "Olivia", "Oscar", "Patricia", "Paul", "Rachel", "Rebecca",
    "Richard", "Robert", "Ruth", "Samuel", "Sandra", "Sarah", "Scott", "Sophia", "Stephen", "Susan",
    "Thomas", "Victoria", "Walter", "William", "Zoe",
]

FIRST_NAMES_NL = [
    "Anouk", "Bas", "Bram", "Carlijn", "Daan", "Demi", "Dirk", "Eva", "Famke", "Femke",
    "Fleur", "Floor", "Geert", "Gijs", "Hanna", "Hendrik", "Hugo", "Ilse", "Iris", "Jan",
    "Janneke", "Jasper", "Jeroen", "Joep", "Joost", "Joris", "Julia", "Kees", "Lars", "Lieke",
    "Lotte", "Luuk", "Maaike", "Maarten", "Marieke", "Marit", "Mees", "Merel", "Milan", "Naomi",
    "Niels", "Nienke", "Noor", "Pepijn", "Pieter", "Puck", "Rens", "Roos", "Ruben", "Sander",
    "Sanne", "Sem", "Sjoerd", "Sophie", "Stijn", "Sven", "Teun", "Thijs", "Tess", "Tim",
    "Tobias", "Veerle", "Vera", "Willem", "Wouter", "Yara",
]

CITIES = [
    "Amsterdam", "Athens", "Atlanta", "Auckland", "Bangkok", "Barcelona", "Beijing", "Belgrade", "Berlin", "Bogota",
    "Boston", "Bratislava", "Brussels", "Bucharest", "Budapest", "Buenos Aires", "Cairo", "Calgary", "Cape Town", "Caracas",
    "Casablanca", "Chicago", "Copenhagen", "Dakar", "Dallas", "Delhi", "Denver", "Dhaka", "Dubai", "Dublin",
    "Edinburgh", "Frankfurt", "Geneva", "Glasgow", "Guadalajara", "Hanoi", "Havana", "Helsinki", "Hong Kong", "Houston",
    "Istanbul", "Jakarta", "Johannesburg", "Karachi", "Kathmandu", "Kigali", "Kingston", "Kyiv", "Lagos", "Lahore",
    "Lima", "Lisbon", "Ljubljana", "London", "Los Angeles", "Luxembourg", "Lyon", "Madrid", "Manila", "Marrakesh",
    "Melbourne", "Mexico City", "Miami", "Milan", "Montevideo", "Montreal", "Moscow", "Mumbai", "Munich", "Nairobi",
    "Naples", "New York", "Nicosia", "Oslo", "Ottawa", "Paris", "Perth", "Porto", "Prague", "Quito",
    "Reykjavik", "Riga", "Rome", "Rotterdam", "San Francisco", "Santiago", "Sao Paulo", "Seattle", "Seoul", "Shanghai",
    "Singapore", "Sofia", "Stockholm", "Sydney", "Taipei", "Tallinn", "Tokyo", "Toronto", "Tunis", "Utrecht",
    "Valencia", "Vancouver", "Vienna", "Vilnius", "Warsaw", "Wellington", "Zagreb", "Zurich",
]

COUNTRIES = [
    "Albania", "Algeria", "Argentina", "Armenia", "Australia", "Austria", "Azerbaijan", "Bangladesh", "Belarus", "Belgium",
    "Bolivia", "Bosnia and Herzegovina", "Botswana", "Brazil", "Bulgaria", "Cambodia", "Cameroon", "Canada", "Chile", "China",
    "Colombia", "Costa Rica", "Croatia", "Cuba", "Cyprus", "Czechia", "Denmark", "Dominican Republic", "Ecuador", "Egypt",
    "El Salvador", "Estonia", "Ethiopia", "Finland", "France", "Georgia", "Germany", "Ghana", "Greece", "Guatemala",
    "Honduras", "Hungary", "Iceland", "India", "Indonesia", "Iran", "Iraq", "Ireland", "Israel", "Italy",
    "Jamaica", "Japan", "Jordan", "Kazakhstan", "Kenya", "Kuwait", "Latvia", "Lebanon", "Lithuania", "Luxembourg",
    "Madagascar", "Malaysia", "Mali", "Malta", "Mexico", "Moldova", "Mongolia", "Montenegro", "Morocco", "Mozambique",
    "Nepal", "Netherlands", "New Zealand", "Nicaragua", "Nigeria", "North Macedonia", "Norway", "Pakistan", "Panama", "Paraguay",
    "Peru", "Philippines", "Poland", "Portugal", "Qatar", "Romania", "Rwanda", "Saudi Arabia", "Senegal", "Serbia",
    "Singapore", "Slovakia", "Slovenia", "South Africa", "South Korea", "Spain", "Sri Lanka", "Sweden", "Switzerland", "Taiwan",
    "Tanzania", "Thailand", "Tunisia", "Turkey", "Uganda", "Ukraine", "United Arab Emirates", "United Kingdom", "United States", "Uruguay",
    "Uzbekistan", "Venezuela", "Vietnam", "Zambia", "Zimbabwe",
]

_EMAIL_DOMAINS = ("example.com", "example.org", "example.net", "mail.example")
EMAILS = [
    f"{name.lower()}.{i % 97}@{_EMAIL_DOMAINS[i % len(_EMAIL_DOMAINS)]}"
    for i, name in enumerate(FIRST_NAMES_EN)
]

BUILTIN_PROVIDERS: dict[str, list[str]] = {
    "first_name": FIRST_NAMES_EN,
    "first_name_en": FIRST_NAMES_EN,
    "first_name_nl": FIRST_NAMES_NL,
    "city": CITIES,
    "country": COUNTRIES,
    "email": EMAILS,
}

_SLOT_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")


@dataclass(frozen=True)
class Template:
    """Pattern with `{slot}` placeholders plus per-slot providers.

    Provider spec forms: {"list": [...]}, {"builtin": "city"} or
    {"integer": [lo, hi]} (inclusive bounds). `expected` optionally carries
    the label a generated case must receive.
    """

    pattern: str
    providers: dict[str, dict] = field(default_factory=dict)
    expected: str | None = None

    def slots(self) -> list[str]:
        return list(dict.fromkeys(_SLOT_RE.findall(self.pattern)))

    def spec(self) -> dict:
        return {"pattern": self.pattern, "providers": self.providers, "expected": self.expected}


def _provider_values(slot: str, spec: dict | None) -> list[str] | tuple[int, int]:
    if spec is None:
        if slot in BUILTIN_PROVIDERS:
            return BUILTIN_PROVIDERS[slot]
        raise ExposeError(f"unknown slot {{{slot}}}: no provider given")
    if "list" in spec:
        values = [str(v) for v in spec["list"]]
        if not values:
            raise ExposeError(f"slot {{{slot}}}: empty provider list")
        return values
    if "builtin" in spec:
        name = str(spec["builtin"])
        if name not in BUILTIN_PROVIDERS:
            raise ExposeError(
                f"slot {{{slot}}}: unknown builtin {name!r} "
                f"(available: {sorted(BUILTIN_PROVIDERS)})"
            )
        return BUILTIN_PROVIDERS[name]
    if "integer" in spec:
        lo, hi = int(spec["integer"][0]), int(spec["integer"][1])
        if lo > hi:
            raise ExposeError(f"slot {{{slot}}}: empty integer range [{lo}, {hi}]")
        return (lo, hi)
    raise ExposeError(f"slot {{{slot}}}: provider spec needs 'list', 'builtin' or 'integer'")


def expand_template(template: Template, n: int, seed: int = 0) -> list[Instance]:
    """n seeded instances; every fill value is recorded in the attributes."""
    slots = template.slots()
    providers = {slot: _provider_values(slot, template.providers.get(slot)) for slot in slots}
    for slot in template.providers:
        if slot not in slots:
            raise ExposeError(f"provider for {{{slot}}} matches no slot in the pattern")
    rng = np.random.default_rng(derive_seed(seed, "template", template.pattern))
    instances = []
    for i in range(n):
        fills: dict[str, str] = {}
        for slot in slots:
            values = providers[slot]
            if isinstance(values, tuple):
                fills[slot] = str(int(rng.integers(values[0], values[1] + 1)))
            else:
                fills[slot] = values[int(rng.integers(len(values)))]
        text = _SLOT_RE.sub(lambda m: fills[m.group(1)], template.pattern)
        instances.append(
            Instance(id=f"tpl-{i}", text=text, gold=template.expected, attributes=fills)
        )
    return instances
