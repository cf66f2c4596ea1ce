"""Seeded generator for synthetic corpora and matching configurations.

Produces a config bundle plus transcript tree shaped like real archival
material: several source types with different nesting, overlapping but not
identical column sets, typed columns with messy values, people who repeat
across records, and fields left unfilled.  Output is a pure function of
the parameters -- the same seed writes byte-identical trees -- so large
benchmark fixtures never need to be checked in.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

GIVEN_NAMES = [
    "Giovanni", "Maria", "Luigi", "Anna", "Pietro", "Rosa", "Antonio",
    "Teresa", "Francesco", "Caterina", "Giuseppe", "Lucia", "Domenico",
    "Angela", "Nicola", "Marianna", "Vincenzo", "Carmela", "Salvatore",
    "Giuseppina", "Emanuele", "Assunta", "Gaetano", "Filomena", "Carlo",
    "Benedetta", "Stefano", "Margherita", "Agostino", "Serafina", "Ettore",
    "Bianca", "Raffaele", "Elvira", "Umberto", "Ines", "José", "Ângela",
    "François", "Siobhán", "Søren", "Müge",
]
SURNAMES = [
    "Rossi", "Bianchi", "Costa", "Schiaffino", "Razeto", "Olivari",
    "Bozzo", "Gandolfo", "Lavarello", "Cichero", "Dodero", "Figari",
    "Oneto", "Pittaluga", "Queirolo", "Repetto", "Sanguineti", "Tassara",
    "Valle", "Zolezzi", "Ansaldo", "Bacigalupo", "Canepa", "Derchi",
    "Esposito", "Ferrari", "Gotuzzo", "Ivaldi", "Lanata", "Maggiolo",
    "Noli", "Orsini", "Parodi", "Questa", "Rivarola", "Solari", "Traverso",
    "Urbani", "Vassallo", "Zunino", "Müller", "Ó Briain", "Dağlı",
]
PLACES = [
    "Camogli", "Genoa", "Recco", "Rapallo", "Santa Margherita", "Portofino",
    "Chiavari", "Lavagna", "Sestri Levante", "Nervi", "Bogliasco", "Sori",
    "Pieve Ligure", "Zoagli", "Leivi", "San Rocco", "Ruta", "Punta Chiappa",
    "Savona", "La Spezia", "Livorno", "Marseille", "Barcelona", "Valparaíso",
    "Callao", "Montevideo", "Buenos Aires", "New York", "Boston", "Cardiff",
    "Swansea", "Odessa", "Constantinople", "Alexandria", "Gibraltar",
]
PROFESSIONS = [
    "sailor", "master", "mate", "boatswain", "carpenter", "cook", "cabin boy",
    "able seaman", "ordinary seaman", "pilot", "caulker", "sailmaker",
    "shipwright", "owner", "merchant", "fisherman", "stevedore", "rigger",
]
SHIP_NAMES = [
    "Aurora", "Speranza", "Concordia", "Fortuna", "Stella del Mare",
    "Leone", "Vittoria", "Providenza", "San Giorgio", "Santa Caterina",
    "Nuova Unione", "Fidente", "Galatea", "Indomita", "Rondinella",
    "Tritone", "Zefiro", "Argonauta", "Minerva", "Proteo",
]
NOTE_PHRASES = [
    "discharged at first port", "signed with a mark", "wages advanced",
    "deserted, see margin", 'entry reads "doubtful"', "re-engaged next voyage",
    "injured off Cape Horn", "paid in silver, note:\nsettled ashore",
]
SPELLED_NUMBERS = ["thirty", "about 25", "twenty-one", "unknown", "??"]

GROUPS = ["Employment records", "Movement records", "Property records"]

# Archetypes give sources different shapes so the global view has to cope
# with varying nesting, column sets and value kinds.
ARCHETYPES = ("crew", "passengers", "muster", "registry")


@dataclass(frozen=True)
class GenParams:
    out: Path
    seed: int = 0
    sources: int = 4
    records: int = 40
    people: int = 12
    missing_rate: float = 0.15
    repeat_rate: float = 0.05


def _person(rng: random.Random, params: GenParams, archetype: str) -> dict:
    surname = rng.choice(SURNAMES)
    given = rng.choice(GIVEN_NAMES)
    # A slice of entries use the comma-joined archival form, which also
    # exercises CSV quoting end to end.
    if rng.random() < 0.25:
        name = f"{surname}, {given}"
    else:
        name = f"{given[0]}. {surname}"
    person: dict = {"name": name}
    missing = params.missing_rate

    def keep() -> bool:
        return rng.random() >= missing

    if keep():
        person["residence"] = rng.choice(PLACES)
    if keep():
        person["profession"] = rng.choice(PROFESSIONS)
    if archetype in ("crew", "muster", "registry") and keep():
        if rng.random() < 0.03:
            person["age"] = rng.choice(SPELLED_NUMBERS)
        else:
            person["age"] = rng.randint(12, 70)
    if archetype == "registry" and keep():
        person["wage"] = round(rng.uniform(8.0, 95.0), 2)
    if archetype in ("passengers", "registry") and keep():
        year = rng.randint(1820, 1910)
        precision = rng.random()
        if precision < 0.2:
            person["embarked"] = f"{year:04d}"
        elif precision < 0.45:
            person["embarked"] = f"{year:04d}-{rng.randint(1, 12):02d}"
        else:
            person["embarked"] = (
                f"{year:04d}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}")
    if rng.random() < 0.08:
        person["note"] = rng.choice(NOTE_PHRASES)
    if rng.random() < 0.002:
        # Transcription accident: a nested object where a scalar belongs.
        person["residence"] = {"text": rng.choice(PLACES)}
    return person


def _people_list(rng, params, archetype, pool: list[dict]) -> list[dict]:
    count = max(1, round(params.people * rng.uniform(0.6, 1.4)))
    out: list = []
    for _ in range(count):
        if pool and rng.random() < params.repeat_rate:
            out.append(json.loads(json.dumps(rng.choice(pool))))
        else:
            person = _person(rng, params, archetype)
            pool.append(person)
            out.append(person)
    if rng.random() < 0.01:
        out.insert(rng.randrange(len(out) + 1), None)
    return out


def _record(rng, params, archetype: str, pool: list[dict]) -> dict:
    if archetype == "crew":
        return {
            "ship": {
                "name": rng.choice(SHIP_NAMES),
                "construction_place": rng.choice(PLACES[:12]),
                "built": f"{rng.randint(1800, 1880):04d}",
            },
            "crew": _people_list(rng, params, archetype, pool),
        }
    if archetype == "passengers":
        return {
            "voyage": {
                "vessel": rng.choice(SHIP_NAMES),
                "destination": rng.choice(PLACES[20:]),
                "departure": (
                    f"{rng.randint(1840, 1900):04d}-{rng.randint(1, 12):02d}"),
            },
            "passengers": _people_list(rng, params, archetype, pool),
        }
    if archetype == "muster":
        return {
            "roll": {"entries": _people_list(rng, params, archetype, pool)},
            "ports": [
                {"name": rng.choice(PLACES)}
                for _ in range(rng.randint(1, 4))
            ],
        }
    return {  # registry
        "office": rng.choice(PLACES[:10]),
        "people": _people_list(rng, params, archetype, pool),
    }


def _source_config(archetype: str, person_category: str) -> dict:
    if archetype == "crew":
        return {"categories": [
            {
                "name": "Ships",
                "base": "ship",
                "columns": [
                    {"name": "name", "path": "name"},
                    {"name": "construction_place", "path": "construction_place"},
                    {"name": "built", "path": "built", "kind": "date"},
                ],
                "identity": ["name"],
                "connections": [
                    {"label": "Crew members", "target": person_category,
                     "join": "same_record"},
                ],
            },
            {
                "name": person_category,
                "base": "crew[]",
                "columns": [
                    {"name": "name", "path": "name"},
                    {"name": "residence", "path": "residence"},
                    {"name": "profession", "path": "profession"},
                    {"name": "age", "path": "age", "kind": "integer"},
                ],
                "identity": ["name"],
            },
        ]}
    if archetype == "passengers":
        return {"categories": [
            {
                "name": "Voyages",
                "base": "voyage",
                "columns": [
                    {"name": "vessel", "path": "vessel"},
                    {"name": "destination", "path": "destination"},
                    {"name": "departure", "path": "departure", "kind": "date"},
                ],
                "identity": ["vessel", "departure"],
                "connections": [
                    {"label": "Passengers", "target": person_category,
                     "join": "same_record"},
                ],
            },
            {
                "name": person_category,
                "base": "passengers[]",
                "columns": [
                    {"name": "name", "path": "name"},
                    {"name": "residence", "path": "residence"},
                    {"name": "profession", "path": "profession"},
                    {"name": "embarked", "path": "embarked", "kind": "date"},
                    {"name": "note", "path": "note"},
                ],
                "identity": ["name", "residence"],
            },
        ]}
    if archetype == "muster":
        return {"categories": [
            {
                "name": person_category,
                "base": "roll.entries[]",
                "columns": [
                    {"name": "name", "path": "name"},
                    {"name": "residence", "path": "residence"},
                    {"name": "profession", "path": "profession"},
                    {"name": "age", "path": "age", "kind": "integer"},
                ],
                "identity": ["name"],
                "connections": [
                    {"label": "Home port", "target": "Ports",
                     "join": "key_match", "local": "residence",
                     "remote": "name"},
                ],
            },
            {
                "name": "Ports",
                "base": "ports[]",
                "columns": [{"name": "name", "path": "name"}],
                "identity": ["name"],
            },
        ]}
    return {"categories": [  # registry
        {
            "name": person_category,
            "base": "people[]",
            "columns": [
                {"name": "name", "path": "name"},
                {"name": "residence", "path": "residence"},
                {"name": "profession", "path": "profession"},
                {"name": "age", "path": "age", "kind": "integer"},
                {"name": "wage", "path": "wage", "kind": "decimal"},
                {"name": "embarked", "path": "embarked", "kind": "date"},
                {"name": "note", "path": "note"},
            ],
            "identity": ["name"],
        },
    ]}


PERSON_CATEGORY = {
    "crew": "Crew members",
    "passengers": "Passengers",
    "muster": "Persons",
    "registry": "Registered persons",
}


def _write_json(path: Path, obj) -> None:
    path.write_text(
        json.dumps(obj, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def generate(params: GenParams) -> dict:
    """Write corpus/ and config/ under ``params.out``; returns a summary."""
    rng = random.Random(params.seed)
    out = Path(params.out)
    config_dir = out / "config"
    corpus_dir = out / "corpus"
    config_dir.mkdir(parents=True, exist_ok=True)
    corpus_dir.mkdir(parents=True, exist_ok=True)

    templates = []
    people_mappings = []
    vessel_mappings = []
    port_mappings = []
    source_ids = []
    for i in range(params.sources):
        archetype = ARCHETYPES[i % len(ARCHETYPES)]
        source_id = f"s{i:02d}_{archetype}"
        source_ids.append((source_id, archetype))
        person_category = PERSON_CATEGORY[archetype]
        entry = {
            "id": source_id,
            "group": GROUPS[i % len(GROUPS)],
            "name": f"{archetype.capitalize()} series {i:02d}",
            "description": f"Synthetic {archetype} documents, series {i:02d}.",
            "config": f"{source_id}.json",
        }
        if i % 2 == 0:
            entry["transcript_url"] = (
                f"https://archive.example/{source_id}/{{record_id}}")
        templates.append(entry)
        _write_json(config_dir / f"{source_id}.json",
                    _source_config(archetype, person_category))
        people_mappings.append({"source": source_id, "category": person_category})
        if archetype == "crew":
            vessel_mappings.append({"source": source_id, "category": "Ships"})
        elif archetype == "passengers":
            vessel_mappings.append({"source": source_id, "category": "Voyages"})
        elif archetype == "muster":
            port_mappings.append({"source": source_id, "category": "Ports"})

    _write_json(config_dir / "templates.json", templates)
    _write_json(config_dir / "explore_all.json", [
        {"name": "People", "group": "Across all sources"},
        {"name": "Vessels", "group": "Across all sources"},
        {"name": "Places", "group": "Across all sources"},
    ])
    _write_json(config_dir / "explore_all_conf.json", {
        "People": people_mappings,
        "Vessels": vessel_mappings,
        "Places": port_mappings,
    })

    # Spread records round-robin so every source gets a similar share.
    per_source = [params.records // params.sources] * params.sources
    for i in range(params.records % params.sources):
        per_source[i] += 1

    persons_written = 0
    records_written = 0
    for (source_id, archetype), count in zip(source_ids, per_source):
        source_dir = corpus_dir / source_id
        source_dir.mkdir(exist_ok=True)
        pool: list[dict] = []
        for n in range(count):
            record = _record(rng, params, archetype, pool)
            for key in ("crew", "passengers", "people"):
                if key in record:
                    persons_written += sum(1 for p in record[key] if p)
            if "roll" in record:
                persons_written += sum(1 for p in record["roll"]["entries"] if p)
            _write_json(source_dir / f"r{n:04d}.json", record)
            records_written += 1

    return {
        "out": str(out),
        "seed": params.seed,
        "sources": params.sources,
        "records": records_written,
        "person_entries": persons_written,
    }
