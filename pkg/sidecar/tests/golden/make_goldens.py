"""Regenerate the golden wire-protocol files from the lexical backend.

Run from the sidecar directory after any deliberate change to the
lexical scoring formulas:

    python3 tests/golden/make_goldens.py

The files pin exact request/response pairs so that restarts and
reinstalls keep producing identical bytes on the wire.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from faithsum_sidecar.app import create_app

GOLDEN_DIR = Path(__file__).parent

NLI_PAIRS = [
    {"premise": "He takes aspirin daily.", "hypothesis": "He takes aspirin."},
    {"premise": "I have a fever and a rash.", "hypothesis": "I have a rash."},
    {"premise": "I have no fever.", "hypothesis": "I have a fever."},
    {
        "premise": "The patient denies chest pain.",
        "hypothesis": "The patient has chest pain.",
    },
    {"premise": "আমার জ্বর আছে এবং কাশি হচ্ছে।", "hypothesis": "আমার জ্বর আছে।"},
    {"premise": "আমার জ্বর আছে।", "hypothesis": "আমার জ্বর নেই।"},
    {"premise": "Take two tablets after meals.", "hypothesis": "The sky is blue."},
]

BERTSCORE_REQUESTS = [
    {
        "candidate": "What should I do about my fever?",
        "reference": "What should a patient do about fever?",
        "lang": "en",
    },
    {
        "candidate": "জ্বর হলে কী করব?",
        "reference": "জ্বর হলে করণীয় কী?",
        "lang": "bn",
    },
    {
        "candidate": "completely unrelated words",
        "reference": "quantum entanglement basics",
        "lang": "en",
    },
]


def dump(path: Path, doc) -> None:
    path.write_text(
        json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {path}")


def main() -> None:
    with TestClient(create_app()) as client:
        request = {"pairs": NLI_PAIRS}
        response = client.post("/v1/nli", json=request)
        response.raise_for_status()
        dump(
            GOLDEN_DIR / "nli_probes.json",
            {"request": request, "response": response.json()},
        )

        probes = []
        for req in BERTSCORE_REQUESTS:
            response = client.post("/v1/bertscore", json=req)
            response.raise_for_status()
            probes.append({"request": req, "response": response.json()})
        dump(GOLDEN_DIR / "bertscore_probes.json", probes)


if __name__ == "__main__":
    main()
