"""Transformer-checkpoint backend (optional ``transformer`` extra).

Loads an English and a multilingual NLI classifier plus matching
encoders.  A request routes to the multilingual checkpoints whenever any
text in it contains Bengali-block characters.  Inference runs in eval
mode with gradients disabled, so identical requests score identically.
"""

from __future__ import annotations

from typing import Sequence

from .config import Settings

# Bengali Unicode block.
_BANGLA_RANGE = (0x0980, 0x09FF)


def contains_bangla(text: str) -> bool:
    return any(_BANGLA_RANGE[0] <= ord(ch) <= _BANGLA_RANGE[1] for ch in text)


class TransformerBackend:
    """NLI and BERTScore on pretrained checkpoints; CPU is sufficient."""

    def __init__(self, settings: Settings, batch_size: int = 16):
        try:
            import torch
            from transformers import (
                AutoModel,
                AutoModelForSequenceClassification,
                AutoTokenizer,
            )
        except ImportError as exc:  # pragma: no cover - environment-dependent
            raise RuntimeError(
                "transformer backend needs the 'transformer' extra: "
                "pip install 'scorer-sidecar[transformer]'"
            ) from exc

        self._torch = torch
        self.settings = settings
        self.batch_size = batch_size

        def load_classifier(name):
            tokenizer = AutoTokenizer.from_pretrained(name)
            model = AutoModelForSequenceClassification.from_pretrained(name)
            model.eval()
            return tokenizer, model

        def load_encoder(name):
            tokenizer = AutoTokenizer.from_pretrained(name)
            model = AutoModel.from_pretrained(name)
            model.eval()
            return tokenizer, model

        self._nli = {
            "en": load_classifier(settings.nli_en),
            "multi": load_classifier(settings.nli_multi),
        }
        self._encoder = {
            "en": load_encoder(settings.encoder_en),
            "multi": load_encoder(settings.encoder_multi),
        }
        self._label_order = {
            variant: self._entail_contradict_neutral(model.config)
            for variant, (_, model) in self._nli.items()
        }

    @property
    def model_ids(self) -> list[str]:
        s = self.settings
        return [s.nli_en, s.nli_multi, s.encoder_en, s.encoder_multi]

    @staticmethod
    def _entail_contradict_neutral(config) -> tuple[int, int, int]:
        """Indices of (entailment, contradiction, neutral) in the model's
        label space, resolved from id2label."""
        labels = {
            label.lower(): index for index, label in config.id2label.items()
        }

        def find(*names):
            for name in names:
                for label, index in labels.items():
                    if name in label:
                        return index
            raise RuntimeError(f"cannot locate label {names} in {labels}")

        return (
            find("entail"),
            find("contradict"),
            find("neutral"),
        )

    def nli(
        self, pairs: Sequence[tuple[str, str]]
    ) -> tuple[list[tuple[float, float, float]], str]:
        torch = self._torch
        variant = (
            "multi"
            if any(contains_bangla(p) or contains_bangla(h) for p, h in pairs)
            else "en"
        )
        tokenizer, model = self._nli[variant]
        e_idx, c_idx, n_idx = self._label_order[variant]
        scores: list[tuple[float, float, float]] = []
        with torch.no_grad():
            for start in range(0, len(pairs), self.batch_size):
                batch = pairs[start : start + self.batch_size]
                encoded = tokenizer(
                    [p for p, _ in batch],
                    [h for _, h in batch],
                    padding=True,
                    truncation=True,
                    max_length=512,
                    return_tensors="pt",
                )
                probs = torch.softmax(model(**encoded).logits, dim=-1)
                for row in probs:
                    scores.append(
                        (
                            float(row[e_idx]),
                            float(row[c_idx]),
                            float(row[n_idx]),
                        )
                    )
        model_id = (
            self.settings.nli_multi if variant == "multi" else self.settings.nli_en
        )
        return scores, model_id

    def _embed_tokens(self, text: str, variant: str):
        torch = self._torch
        tokenizer, model = self._encoder[variant]
        encoded = tokenizer(
            text, truncation=True, max_length=512, return_tensors="pt"
        )
        with torch.no_grad():
            hidden = model(**encoded).last_hidden_state[0]
        # Drop special tokens ([CLS]/[SEP] equivalents) at the edges.
        hidden = hidden[1:-1] if hidden.shape[0] > 2 else hidden
        return torch.nn.functional.normalize(hidden, dim=-1)

    def bertscore(
        self, candidate: str, reference: str, lang: str = "en"
    ) -> tuple[float, float, float, str]:
        variant = (
            "multi"
            if lang != "en" or contains_bangla(candidate) or contains_bangla(reference)
            else "en"
        )
        cand = self._embed_tokens(candidate, variant)
        ref = self._embed_tokens(reference, variant)
        if cand.shape[0] == 0 or ref.shape[0] == 0:
            model_id = (
                self.settings.encoder_multi
                if variant == "multi"
                else self.settings.encoder_en
            )
            return 0.0, 0.0, 0.0, model_id
        similarity = cand @ ref.T
        precision = float(similarity.max(dim=1).values.mean())
        recall = float(similarity.max(dim=0).values.mean())
        f1 = (
            0.0
            if precision + recall == 0
            else 2 * precision * recall / (precision + recall)
        )
        model_id = (
            self.settings.encoder_multi if variant == "multi" else self.settings.encoder_en
        )
        return precision, recall, f1, model_id
