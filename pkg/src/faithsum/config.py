"""Run configuration: YAML file -> validated dataclasses.

A run config is a YAML document with sections ``dataset``, ``resources``,
``textrank``, ``ner``, ``generation``, ``selector``, ``scorer`` and ``run``.
Only ``dataset`` is required; everything else falls back to defaults, with
packaged lexicons standing in when ``resources`` paths are omitted.
Relative paths are resolved against the directory of the config file.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from .corpus import DatasetManifest, Language
from .errors import ConfigError
from .faithful import (
    DEFAULT_CHUNK_SIZE,
    ROUGE1_TARGET_SOURCE,
    SELECTOR_KINDS,
    SELECTOR_ROUGE1,
    SELECTOR_SUMMAC,
    SelectorSpec,
)
from .generate import (
    BACKEND_MOCK,
    BACKEND_OPENAI,
    GENERATION_MODES,
    MODE_BEST_OF_N,
    GenerationParams,
)
from .medner import DEFAULT_NEGATION_WINDOW
from .textrank import TextRankParams

# scorer.url value that selects the in-process lexical stub instead of an
# HTTP scorer; handy for fully offline runs and deterministic tests.
STUB_SCORER_URL = "stub"


def packaged_data_path(name: str) -> Path:
    """Absolute path of a file shipped under faithsum/data."""
    return Path(str(resources.files("faithsum.data").joinpath(name)))


def _packaged_default(kind: str, language: Language) -> Optional[Path]:
    suffix = "en" if language is Language.ENGLISH else "bn"
    names = {
        "stopwords": f"stopwords_{suffix}.txt",
        "gazetteer": f"gazetteer_{suffix}.txt",
        "negation": f"negation_{suffix}.txt",
        "abbreviations": "abbreviations_en.txt" if language is Language.ENGLISH else None,
    }
    name = names[kind]
    return packaged_data_path(name) if name else None


@dataclass
class ResourcePaths:
    """Lexicon and template locations; ``None`` means packaged default."""

    stopwords: Optional[Path] = None
    gazetteer: Optional[Path] = None
    negation: Optional[Path] = None
    abbreviations: Optional[Path] = None
    templates_dir: Optional[Path] = None

    def resolved(self, language: Language) -> dict[str, Optional[Path]]:
        out: dict[str, Optional[Path]] = {}
        for kind in ("stopwords", "gazetteer", "negation", "abbreviations"):
            explicit = getattr(self, kind)
            out[kind] = explicit if explicit is not None else _packaged_default(kind, language)
        out["templates_dir"] = self.templates_dir
        return out


@dataclass
class ScorerConfig:
    url: Optional[str] = None
    cache_dir: Optional[Path] = None
    timeout: float = 60.0
    chunk_size: int = DEFAULT_CHUNK_SIZE


@dataclass
class RunSettings:
    output_dir: Path = Path("out")
    workers: int = 4
    strict: bool = False
    limit: Optional[int] = None


@dataclass
class RunConfig:
    """Everything one pipeline invocation needs, flags already merged."""

    manifest: DatasetManifest
    resources: ResourcePaths = field(default_factory=ResourcePaths)
    textrank: TextRankParams = field(default_factory=TextRankParams)
    budget: Optional[int] = None
    negation_window: int = DEFAULT_NEGATION_WINDOW
    generation: GenerationParams = field(default_factory=GenerationParams)
    base_url: Optional[str] = None
    model: Optional[str] = None
    template_id: str = "default"
    mode: str = MODE_BEST_OF_N
    selector: SelectorSpec = field(
        default_factory=lambda: SelectorSpec(SELECTOR_SUMMAC)
    )
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    run: RunSettings = field(default_factory=RunSettings)
    config_path: Optional[Path] = None

    @property
    def language(self) -> Language:
        return self.manifest.language


def _require(section: dict, key: str, where: str) -> Any:
    if key not in section:
        raise ConfigError(f"missing required key '{where}.{key}'")
    return section[key]


def _as_section(doc: dict, name: str) -> dict:
    value = doc.get(name, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section '{name}' must be a mapping")
    return value


def _known_keys(section: dict, allowed: set[str], name: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {', '.join(sorted(unknown))}")


def _opt_path(section: dict, key: str, base: Path) -> Optional[Path]:
    value = section.get(key)
    if value is None:
        return None
    path = Path(value)
    return path if path.is_absolute() else base / path


def load_config(path: Path) -> RunConfig:
    """Parse and validate a YAML run config.

    Raises ConfigError naming the offending key for every problem a user
    can cause: missing file, bad YAML, missing/unknown keys, bad enums,
    out-of-range numbers, dangling paths.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    base = path.resolve().parent

    known_sections = {
        "dataset", "resources", "textrank", "ner",
        "generation", "selector", "scorer", "run",
    }
    _known_keys(doc, known_sections, "config")

    # --- dataset ---
    ds = _as_section(doc, "dataset")
    if not ds:
        raise ConfigError("missing required section 'dataset'")
    _known_keys(
        ds,
        {"name", "path", "format", "language", "question_field",
         "summary_field", "id_field", "split_files"},
        "dataset",
    )
    try:
        language = Language.parse(str(_require(ds, "language", "dataset")))
    except ValueError as exc:
        raise ConfigError(f"dataset.language: {exc}") from exc
    data_path = Path(str(_require(ds, "path", "dataset")))
    if not data_path.is_absolute():
        data_path = base / data_path
    split_files = {}
    for split_name, split_value in (ds.get("split_files") or {}).items():
        sp = Path(str(split_value))
        split_files[str(split_name)] = sp if sp.is_absolute() else base / sp
    try:
        manifest = DatasetManifest(
            name=str(ds.get("name", data_path.stem)),
            path=data_path,
            format=str(_require(ds, "format", "dataset")),
            language=language,
            question_field=str(_require(ds, "question_field", "dataset")),
            summary_field=ds.get("summary_field"),
            id_field=ds.get("id_field"),
            split_files=split_files,
        )
    except ValueError as exc:
        raise ConfigError(f"dataset: {exc}") from exc

    # --- resources ---
    res = _as_section(doc, "resources")
    _known_keys(
        res,
        {"stopwords", "gazetteer", "negation", "abbreviations", "templates_dir"},
        "resources",
    )
    resource_paths = ResourcePaths(
        stopwords=_opt_path(res, "stopwords", base),
        gazetteer=_opt_path(res, "gazetteer", base),
        negation=_opt_path(res, "negation", base),
        abbreviations=_opt_path(res, "abbreviations", base),
        templates_dir=_opt_path(res, "templates_dir", base),
    )

    # --- textrank ---
    tr = _as_section(doc, "textrank")
    _known_keys(tr, {"damping", "epsilon", "max_iterations", "budget"}, "textrank")
    try:
        textrank_params = TextRankParams(
            damping=float(tr.get("damping", 0.85)),
            epsilon=float(tr.get("epsilon", 1e-6)),
            max_iterations=int(tr.get("max_iterations", 100)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"textrank: {exc}") from exc
    budget = tr.get("budget")
    if budget is not None:
        budget = int(budget)
        if budget <= 0:
            raise ConfigError("textrank.budget must be positive when given")

    # --- ner ---
    ner = _as_section(doc, "ner")
    _known_keys(ner, {"window"}, "ner")
    window = int(ner.get("window", DEFAULT_NEGATION_WINDOW))
    if window <= 0:
        raise ConfigError("ner.window must be positive")

    # --- generation ---
    gen = _as_section(doc, "generation")
    _known_keys(
        gen,
        {"backend", "base_url", "model", "temperature", "n_candidates",
         "max_output_tokens", "seed", "template", "mode"},
        "generation",
    )
    mode = str(gen.get("mode", MODE_BEST_OF_N))
    if mode not in GENERATION_MODES:
        raise ConfigError(
            f"generation.mode must be one of {sorted(GENERATION_MODES)}, got {mode!r}"
        )
    backend_id = str(gen.get("backend", BACKEND_MOCK))
    if backend_id not in (BACKEND_MOCK, BACKEND_OPENAI):
        raise ConfigError(
            f"generation.backend must be '{BACKEND_MOCK}' or '{BACKEND_OPENAI}', "
            f"got {backend_id!r}"
        )
    try:
        generation = GenerationParams(
            temperature=float(gen.get("temperature", 0.7)),
            n_candidates=int(gen.get("n_candidates", 3)),
            max_output_tokens=int(gen.get("max_output_tokens", 64)),
            seed=int(gen.get("seed", 0)),
            backend_id=backend_id,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"generation: {exc}") from exc
    base_url = gen.get("base_url")
    model = gen.get("model")
    if backend_id == BACKEND_OPENAI and not base_url:
        raise ConfigError("generation.base_url is required for the HTTP backend")
    if backend_id == BACKEND_OPENAI and not model:
        raise ConfigError("generation.model is required for the HTTP backend")

    # --- selector ---
    sel = _as_section(doc, "selector")
    _known_keys(sel, {"kind", "rouge1_target"}, "selector")
    kind = str(sel.get("kind", SELECTOR_SUMMAC))
    if kind not in SELECTOR_KINDS:
        raise ConfigError(
            f"selector.kind must be one of {sorted(SELECTOR_KINDS)}, got {kind!r}"
        )
    rouge1_target = sel.get("rouge1_target")
    if kind == SELECTOR_ROUGE1 and rouge1_target is None:
        rouge1_target = ROUGE1_TARGET_SOURCE
    try:
        selector = SelectorSpec(kind=kind, rouge1_target=rouge1_target)
    except ValueError as exc:
        raise ConfigError(f"selector: {exc}") from exc

    # --- scorer ---
    sc = _as_section(doc, "scorer")
    _known_keys(sc, {"url", "cache_dir", "timeout", "chunk_size"}, "scorer")
    chunk_size = int(sc.get("chunk_size", DEFAULT_CHUNK_SIZE))
    if chunk_size <= 0:
        raise ConfigError("scorer.chunk_size must be positive")
    scorer = ScorerConfig(
        url=sc.get("url"),
        cache_dir=_opt_path(sc, "cache_dir", base),
        timeout=float(sc.get("timeout", 60.0)),
        chunk_size=chunk_size,
    )

    # --- run ---
    rn = _as_section(doc, "run")
    _known_keys(rn, {"output_dir", "workers", "strict", "limit"}, "run")
    workers = int(rn.get("workers", 4))
    if workers <= 0:
        raise ConfigError("run.workers must be positive")
    limit = rn.get("limit")
    if limit is not None:
        limit = int(limit)
        if limit <= 0:
            raise ConfigError("run.limit must be positive when given")
    run = RunSettings(
        output_dir=_opt_path(rn, "output_dir", base) or base / "out",
        workers=workers,
        strict=bool(rn.get("strict", False)),
        limit=limit,
    )

    config = RunConfig(
        manifest=manifest,
        resources=resource_paths,
        textrank=textrank_params,
        budget=budget,
        negation_window=window,
        generation=generation,
        base_url=base_url,
        model=model,
        template_id=str(gen.get("template", "default")),
        mode=mode,
        selector=selector,
        scorer=scorer,
        run=run,
        config_path=path.resolve(),
    )
    validate_paths(config)
    return config


def validate_paths(config: RunConfig) -> None:
    """Every referenced file must exist before a run starts."""
    missing: list[str] = []
    if not config.manifest.path.exists():
        missing.append(f"dataset.path: {config.manifest.path}")
    for split_name, split_path in config.manifest.split_files.items():
        if not split_path.exists():
            missing.append(f"dataset.split_files.{split_name}: {split_path}")
    for kind, rpath in config.resources.resolved(config.language).items():
        if kind == "templates_dir":
            if rpath is not None and not rpath.is_dir():
                missing.append(f"resources.templates_dir: {rpath}")
        elif rpath is not None and not rpath.exists():
            missing.append(f"resources.{kind}: {rpath}")
    if missing:
        raise ConfigError("missing files:\n  " + "\n  ".join(missing))


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:12]


def active_template_id(config: RunConfig) -> str:
    from .generate import MODE_NO_CONTEXT

    return "nocontext" if config.mode == MODE_NO_CONTEXT else config.template_id


def _template_file(config: RunConfig) -> Path:
    suffix = "en" if config.language is Language.ENGLISH else "bn"
    name = f"{active_template_id(config)}_{suffix}.txt"
    if config.resources.templates_dir is not None:
        return config.resources.templates_dir / name
    return packaged_data_path(f"templates/{name}")


def config_fingerprint(config: RunConfig) -> dict:
    """Stable identity of a run: config keys plus resource file digests.

    Excludes anything environment-dependent so repeat runs with the same
    inputs serialize identically.
    """
    from . import __version__

    settings = {
        "dataset": {
            "name": config.manifest.name,
            "format": config.manifest.format,
            "language": config.language.value,
        },
        "textrank": {
            "damping": config.textrank.damping,
            "epsilon": config.textrank.epsilon,
            "max_iterations": config.textrank.max_iterations,
            "budget": config.budget,
        },
        "ner": {"window": config.negation_window},
        "generation": config.generation.snapshot(),
        "mode": config.mode,
        "template": config.template_id,
        "selector": {
            "kind": config.selector.kind,
            "rouge1_target": config.selector.rouge1_target,
        },
        "chunk_size": config.scorer.chunk_size,
        "version": __version__,
    }
    digests = {}
    for kind, rpath in sorted(config.resources.resolved(config.language).items()):
        if kind == "templates_dir" or rpath is None:
            continue
        digests[kind] = _file_digest(rpath)
    template_path = _template_file(config)
    if template_path.exists():
        digests["template"] = _file_digest(template_path)
    blob = json.dumps({"settings": settings, "resources": digests}, sort_keys=True)
    return {
        "hash": hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16],
        "settings": settings,
        "resources": digests,
    }


def dataclass_summary(obj) -> dict:
    """Flat dict view of a config dataclass, Path values as strings."""
    out = {}
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, Path):
            value = str(value)
        out[f.name] = value
    return out
