"""Shared fixtures: deterministic synthetic corpora and run configs.

The corpus builders draw entity surfaces from the packaged gazetteers so
extraction and retention metrics have real material to work with.  All
randomness is seeded; fixture files are byte-stable across sessions.
"""

from __future__ import annotations

import csv
import json
import random
from pathlib import Path

import pytest
import yaml

EN_CONDITIONS = [
    "diabetes", "asthma", "hypertension", "migraine", "arthritis",
    "anemia", "eczema", "gout", "insomnia", "gastritis",
]
EN_SYMPTOMS = [
    "fever", "cough", "chest pain", "headache", "dizziness",
    "nausea", "fatigue", "back pain", "rash", "swelling",
]
EN_DRUGS = [
    "aspirin", "ibuprofen", "metformin", "insulin", "omeprazole",
    "amoxicillin", "prednisone", "warfarin", "gabapentin", "sertraline",
]

BN_CONDITIONS = ["ডায়াবেটিস", "হাঁপানি", "জন্ডিস", "ডেঙ্গু", "টাইফয়েড", "অ্যালার্জি"]
BN_SYMPTOMS = ["জ্বর", "কাশি", "শ্বাসকষ্ট", "মাথাব্যথা", "বমি", "ক্লান্তি"]
BN_DRUGS = ["প্যারাসিটামল", "মেটফরমিন", "ইনসুলিন", "অ্যাসপিরিন"]


def make_english_question(rng: random.Random) -> tuple[str, str]:
    cond = rng.choice(EN_CONDITIONS)
    cond2 = rng.choice(EN_CONDITIONS)
    sym = rng.choice(EN_SYMPTOMS)
    sym2 = rng.choice([s for s in EN_SYMPTOMS if s != sym])
    drug = rng.choice(EN_DRUGS)
    age = rng.randint(18, 80)
    sentences = [
        f"I am a {age} year old patient with {cond} and {cond2}.",
        f"I take {drug} every day as my doctor prescribed.",
        f"For the last {rng.randint(2, 14)} days I have had {sym}.",
    ]
    if rng.random() < 0.4:
        sentences.append(f"There is no {sym2} so far.")
    if rng.random() < 0.3:
        sentences.append("My family is quite worried about all of this.")
    sentences.append(f"What should I do about the {sym}?")
    question = " ".join(sentences)
    summary = f"What should a patient with {cond} do about {sym}?"
    return question, summary


def make_bangla_question(rng: random.Random) -> tuple[str, str]:
    cond = rng.choice(BN_CONDITIONS)
    sym = rng.choice(BN_SYMPTOMS)
    sym2 = rng.choice([s for s in BN_SYMPTOMS if s != sym])
    drug = rng.choice(BN_DRUGS)
    sentences = [
        f"আমার {cond} আছে এবং কয়েকদিন ধরে {sym} হচ্ছে।",
        f"আমি প্রতিদিন {drug} খাই।",
    ]
    if rng.random() < 0.4:
        sentences.append(f"এখন পর্যন্ত {sym2} নেই।")
    sentences.append(f"{sym} হলে আমার কী করা উচিত?")
    question = " ".join(sentences)
    summary = f"{cond} থাকলে {sym} হলে করণীয় কী?"
    return question, summary


def write_english_csv(path: Path, n_rows: int, seed: int = 13) -> None:
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["File", "CHQ", "Summary"])
        for i in range(n_rows):
            question, summary = make_english_question(rng)
            writer.writerow([f"q{i:05d}", question, summary])


def write_bangla_jsonl(path: Path, n_rows: int, seed: int = 29) -> None:
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(n_rows):
            question, summary = make_bangla_question(rng)
            fh.write(
                json.dumps(
                    {"id": f"bn{i:05d}", "question": question, "summary": summary},
                    ensure_ascii=False,
                )
                + "\n"
            )


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory) -> Path:
    return tmp_path_factory.mktemp("datasets")


@pytest.fixture(scope="session")
def meqsum_style_csv(dataset_dir: Path) -> Path:
    path = dataset_dir / "meqsum_style.csv"
    write_english_csv(path, 1000)
    return path


@pytest.fixture(scope="session")
def banglachq_style_jsonl(dataset_dir: Path) -> Path:
    path = dataset_dir / "banglachq_style.jsonl"
    write_bangla_jsonl(path, 2350)
    return path


@pytest.fixture(scope="session")
def e2e_csv(dataset_dir: Path) -> Path:
    path = dataset_dir / "e2e_twenty.csv"
    write_english_csv(path, 20, seed=99)
    return path


def write_config(
    path: Path,
    dataset_path: Path,
    *,
    language: str = "english",
    fmt: str = "delimited-table",
    out_dir: Path | None = None,
    **overrides,
) -> Path:
    """Write a minimal YAML run config; ``overrides`` merge section dicts."""
    if fmt == "delimited-table":
        dataset = {
            "name": dataset_path.stem,
            "path": str(dataset_path),
            "format": fmt,
            "language": language,
            "question_field": "CHQ",
            "summary_field": "Summary",
            "id_field": "File",
        }
    else:
        dataset = {
            "name": dataset_path.stem,
            "path": str(dataset_path),
            "format": fmt,
            "language": language,
            "question_field": "question",
            "summary_field": "summary",
            "id_field": "id",
        }
    doc = {
        "dataset": dataset,
        "scorer": {"url": "stub"},
        "run": {"output_dir": str(out_dir or path.parent / "out"), "workers": 2},
    }
    for section, value in overrides.items():
        if isinstance(value, dict):
            doc.setdefault(section, {}).update(value)
        else:
            doc[section] = value
    path.write_text(yaml.safe_dump(doc, allow_unicode=True), encoding="utf-8")
    return path


@pytest.fixture
def e2e_config(tmp_path: Path, e2e_csv: Path) -> Path:
    return write_config(tmp_path / "run.yaml", e2e_csv, out_dir=tmp_path / "out")
