"""Hand-labeled negation fixture shared by the entity-tagger tests.

40 sentences (28 English, 12 Bangla).  Labels were assigned by hand with
the documented scoping rule: a mention is negated when a trigger phrase
ends within five word tokens before it and no clause boundary
(comma, semicolon, "but" / "কিন্তু") stands in between.  Triggers are
pre-scope only, so Bangla postposed cues (e.g. "জ্বর নেই") deliberately
do not negate — those cases are labeled affirmed and commented.

Each entry: (language, sentence, [(canonical_id, negated), ...]) with the
expected mentions in sentence order against the packaged gazetteers.
"""

from __future__ import annotations

from faithsum.corpus import Language

EN = Language.ENGLISH
BN = Language.BANGLA

NEGATION_FIXTURE = [
    # --- English: plain affirmation and simple pre-scope triggers ---
    (EN, "I have a fever.", [("fever", False)]),
    (EN, "I have no fever.", [("fever", True)]),
    (EN, "No fever but chest pain.", [("fever", True), ("chest_pain", False)]),
    (EN, "He denies chest pain and dizziness.",
     [("chest_pain", True), ("dizziness", True)]),
    (EN, "She has a cough without fever.", [("cough", False), ("fever", True)]),
    (EN, "No rash, but the itching continues.",
     [("rash", True), ("itching", False)]),
    (EN, "The doctor ruled out pneumonia.", [("pneumonia", True)]),
    (EN, "Blood test came back negative for malaria.",
     [("blood_test", False), ("malaria", True)]),
    # contraction triggers: apostrophe is transparent inside the phrase
    (EN, "I can't take aspirin.", [("aspirin", True)]),
    (EN, "I don't have diabetes.", [("diabetes", True)]),
    (EN, "Doctors found no sign of jaundice.", [("jaundice", True)]),
    # multi-token gazetteer surfaces
    (EN, "My father has high blood pressure.", [("hypertension", False)]),
    (EN, "She does not have high blood pressure.", [("hypertension", True)]),
    (EN, "Never had chickenpox as a child.", [("chickenpox", True)]),
    (EN, "The x-ray showed no fracture.", [("x_ray", False)]),
    (EN, "He is free of symptoms now, no cough, no fever.",
     [("cough", True), ("fever", True)]),
    (EN, "Has anyone taken metformin and ibuprofen together?",
     [("metformin", False), ("ibuprofen", False)]),
    # comma before the trigger does not block its scope
    (EN, "I stopped taking aspirin, not ibuprofen.",
     [("aspirin", False), ("ibuprofen", True)]),
    (EN, "Is chest pain without shortness of breath serious?",
     [("chest_pain", False), ("dyspnea", True)]),
    (EN, "My mother never took insulin but uses metformin daily.",
     [("insulin", True), ("metformin", False)]),
    (EN, "The biopsy ruled out lymphoma; the rash remains.",
     [("biopsy", False), ("lymphoma", True), ("rash", False)]),
    # "surgery" sits six word tokens after "no": outside the window
    (EN, "No nausea or vomiting after the surgery.",
     [("nausea", True), ("vomiting", True), ("surgery", False)]),
    (EN, "I took tylenol for my headache.",
     [("acetaminophen", False), ("headache", False)]),
    (EN, "Grandfather has dementia and hasn't had a stroke.",
     [("dementia", False), ("stroke", True)]),
    (EN, "Doctors have ruled out appendicitis, but gastritis is possible.",
     [("appendicitis", True), ("gastritis", False)]),
    # trigger after the mention never fires
    (EN, "Is it safe to take ibuprofen without food?", [("ibuprofen", False)]),
    # "x-ray" sits outside the window of "no evidence of"
    (EN, "No evidence of tuberculosis was found on the chest x-ray.",
     [("tuberculosis", True), ("x_ray", False)]),
    (EN, "We could not get an mri.", [("mri", True)]),
    # --- Bangla ---
    (BN, "আমার জ্বর আছে।", [("fever", False)]),
    # postposed "নেই" is out of pre-scope reach; "কিন্তু" blocks it forward
    (BN, "জ্বর নেই, কিন্তু কাশি আছে।", [("fever", False), ("cough", False)]),
    # preposed "বিনা" negates the following mention
    (BN, "বিনা অস্ত্রোপচার কি এই রোগ সারে?", [("surgery", True)]),
    (BN, "মাথা ব্যথা আছে।", [("headache", False)]),
    (BN, "তার ডায়াবেটিস আছে।", [("diabetes", False)]),
    # postposed "হয়নি": affirmed under the pre-scope rule
    (BN, "বমি হয়নি।", [("vomiting", False)]),
    (BN, "ঔষধ ব্যতীত চিকিৎসা সম্ভব কি?", []),
    # comma blocks the "বিনা" scope from reaching the second mention
    (BN, "বিনা ডায়ালাইসিস, কিডনি রোগ কি ভালো হয়?",
     [("dialysis", True), ("kidney_failure", False)]),
    (BN, "জ্বর ও কাশি দুটোই আছে।", [("fever", False), ("cough", False)]),
    # postposed "মুক্ত" plus a "কিন্তু" boundary: both affirmed
    (BN, "করোনা মুক্ত হয়েছি কিন্তু ক্লান্তি যায়নি।",
     [("covid_19", False), ("fatigue", False)]),
    # longest match picks "বমি বমি ভাব" over bare "বমি"
    (BN, "পেটে ব্যথা ও বমি বমি ভাব হচ্ছে।",
     [("abdominal_pain", False), ("nausea", False)]),
    (BN, "টিকা নেওয়ার পর জ্বর আসেনি।",
     [("vaccination", False), ("fever", False)]),
]
