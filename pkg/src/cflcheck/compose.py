"""Boolean combinations of membership atoms, profiles and reports."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Union

from cflcheck.earley import AlphabetError
from cflcheck.grammar import Grammar, GrammarSyntaxError, grammar_validate, parse_grammar
from cflcheck.regex import Regex, RegexSyntaxError

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


# -- expressions ---------------------------------------------------------------


@dataclass(frozen=True)
class AtomRef:
    id: str


@dataclass(frozen=True)
class And:
    children: tuple = ()


@dataclass(frozen=True)
class Or:
    children: tuple = ()


@dataclass(frozen=True)
class Not:
    child: object


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)

Expr = Union[AtomRef, And, Or, Not, Const]


class UnresolvedAtomError(KeyError):
    pass


def atom_ids(expr: Expr) -> list[str]:
    """Atom ids in first-occurrence order."""
    out: dict[str, None] = {}

    def walk(e):
        if isinstance(e, AtomRef):
            out.setdefault(e.id)
        elif isinstance(e, (And, Or)):
            for c in e.children:
                walk(c)
        elif isinstance(e, Not):
            walk(e.child)

    walk(expr)
    return list(out)


def prefixed(expr: Expr, prefix: str) -> Expr:
    if isinstance(expr, AtomRef):
        return AtomRef(prefix + expr.id)
    if isinstance(expr, And):
        return And(tuple(prefixed(c, prefix) for c in expr.children))
    if isinstance(expr, Or):
        return Or(tuple(prefixed(c, prefix) for c in expr.children))
    if isinstance(expr, Not):
        return Not(prefixed(expr.child, prefix))
    return expr


def _status(v) -> str:
    if isinstance(v, Verdict):
        return v.status
    if v is True:
        return PASS
    if v is False:
        return FAIL
    if v in (PASS, FAIL, SKIPPED):
        return v
    raise ValueError(f"not a verdict: {v!r}")


def eval_expr(expr: Expr, verdicts: Mapping[str, Any]) -> bool:
    """Evaluate under the tri-state convention.

    A skipped atom reads as true under an And (or at the root), as false
    under an Or, and ``Not(skipped)`` is true.  A subexpression whose atoms
    are all skipped is itself skipped, so an inapplicable check never fails
    whatever operators wrap it.
    """
    v = _eval(expr, verdicts)
    return True if v is None else v


def _eval(e: Expr, verdicts: Mapping[str, Any]) -> bool | None:
    """True/False, or None for skipped."""
    if isinstance(e, AtomRef):
        try:
            s = _status(verdicts[e.id])
        except KeyError:
            raise UnresolvedAtomError(e.id) from None
        return None if s == SKIPPED else s == PASS
    if isinstance(e, (And, Or)):
        vals = [_eval(c, verdicts) for c in e.children]
        if vals and all(v is None for v in vals):
            return None
        if isinstance(e, And):
            return all(v is not False for v in vals)
        return any(v is True for v in vals)
    if isinstance(e, Not):
        v = _eval(e.child, verdicts)
        return True if v is None else not v
    if isinstance(e, Const):
        return e.value
    raise TypeError(f"not an expression: {e!r}")


def expr_from_json(node: Any) -> Expr:
    """Parse the JSON expression form; ``family``/``constraint`` nodes are
    left as AtomRef-like markers for the profile loader to splice."""
    if node is True:
        return TRUE
    if node is False:
        return FALSE
    if not isinstance(node, dict) or len(node) != 1:
        raise ProfileError(f"malformed expression node: {node!r}")
    (key, val), = node.items()
    if key in ("and", "or"):
        if not isinstance(val, list):
            raise ProfileError(f"'{key}' expects a list")
        kids = tuple(expr_from_json(c) for c in val)
        return And(kids) if key == "and" else Or(kids)
    if key == "not":
        return Not(expr_from_json(val))
    if key == "atom":
        return AtomRef(str(val))
    if key in ("family", "constraint"):
        return _Splice(key, str(val))
    raise ProfileError(f"unknown expression operator {key!r}")


def expr_to_json(e: Expr) -> Any:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, AtomRef):
        return {"atom": e.id}
    if isinstance(e, Not):
        return {"not": expr_to_json(e.child)}
    key = "and" if isinstance(e, And) else "or"
    return {key: [expr_to_json(c) for c in e.children]}


@dataclass(frozen=True)
class _Splice:
    kind: str
    id: str


# -- validators as data ----------------------------------------------------------


@dataclass(frozen=True)
class Combination:
    """A validator expression together with the languages its atoms name."""

    expr: Expr
    languages: Mapping[str, Grammar | Regex]

    def verdicts(self, word: str) -> dict[str, bool]:
        return {aid: lang.accepts(word) if isinstance(lang, Grammar) else lang.match(word)
                for aid, lang in self.languages.items()}

    def accepts(self, word: str) -> bool:
        return eval_expr(self.expr, self.verdicts(word))

    @property
    def grammars(self) -> list[Grammar]:
        return [g for g in self.languages.values() if isinstance(g, Grammar)]


# -- atoms, verdicts, reports ------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    id: str
    status: str
    note: str = ""

    def to_json(self) -> dict:
        d = {"id": self.id, "verdict": self.status}
        if self.note:
            d["note"] = self.note
        return d


class ExtractionError(ValueError):
    """A field exists but cannot be canonicalized (the atom fails)."""


Extractor = Callable[[Any], Union[str, None]]


@dataclass(frozen=True)
class Atom:
    id: str
    kind: str  # "cfg" | "regex"
    language: Grammar | Regex
    extractor: Extractor
    required: bool = False
    extractor_spec: Any = None


def eval_atom(atom: Atom, word: str | None) -> Verdict:
    if word is None:
        if atom.required:
            return Verdict(atom.id, FAIL, "required input not present")
        return Verdict(atom.id, SKIPPED, "not applicable")
    try:
        if isinstance(atom.language, Grammar):
            ok = atom.language.accepts(word)
        else:
            ok = atom.language.match(word)
    except AlphabetError as exc:
        return Verdict(atom.id, FAIL, str(exc))
    return Verdict(atom.id, PASS if ok else FAIL)


def run_atom(atom: Atom, subject: Any, enforce_required: bool = True) -> Verdict:
    """Extract the canonical word for ``atom`` from ``subject`` and test it.

    With ``enforce_required=False`` an absent input is skipped even for a
    required atom; the caller then decides across all subjects.
    """
    try:
        word = atom.extractor(subject)
    except ExtractionError as exc:
        return Verdict(atom.id, FAIL, str(exc))
    if word is None and not enforce_required:
        return Verdict(atom.id, SKIPPED, "not applicable")
    return eval_atom(atom, word)


def _join_notes(notes: Iterable[str]) -> str:
    return "; ".join(dict.fromkeys(n for n in notes if n))


def combine_subjects(atom_id: str, verdicts: list[Verdict]) -> Verdict:
    """Fold one atom's verdicts over several subjects (e.g. both halves of a pair)."""
    if len(verdicts) == 1 and verdicts[0].id == atom_id:
        return verdicts[0]
    if any(v.status == FAIL for v in verdicts):
        return Verdict(atom_id, FAIL, _join_notes(v.note for v in verdicts if v.status == FAIL))
    if any(v.status == PASS for v in verdicts):
        return Verdict(atom_id, PASS)
    return Verdict(atom_id, SKIPPED, verdicts[0].note if verdicts else "")


@dataclass(frozen=True)
class Constraint:
    id: str
    expr: Expr
    description: str = ""

    @cached_property
    def atoms(self) -> list[str]:
        return atom_ids(self.expr)


@dataclass(frozen=True)
class ConstraintResult:
    id: str
    verdict: Verdict
    atoms: tuple[Verdict, ...]

    def to_json(self) -> dict:
        d = self.verdict.to_json()
        d["atoms"] = [a.to_json() for a in self.atoms]
        return d


@dataclass
class ValidationReport:
    overall: str
    constraints: list[ConstraintResult]
    timing_ms: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.overall == PASS

    def verdict(self, constraint_id: str) -> str:
        for c in self.constraints:
            if c.id == constraint_id:
                return c.verdict.status
        raise KeyError(constraint_id)

    def to_json(self) -> dict:
        return {
            "overall": self.overall,
            "constraints": [c.to_json() for c in self.constraints],
            "timing_ms": {k: round(v, 3) for k, v in self.timing_ms.items()},
        }

    def render(self) -> str:
        lines = []
        for c in self.constraints:
            note = f"  ({c.verdict.note})" if c.verdict.note else ""
            lines.append(f"{c.verdict.status.upper():8s}{c.id}{note}")
        lines.append(f"overall: {self.overall}")
        return "\n".join(lines)


# -- profiles ----------------------------------------------------------------------


class ProfileError(ValueError):
    pass


class DanglingReferenceError(ProfileError):
    pass


class InvalidGrammarError(ProfileError):
    pass


@dataclass(frozen=True)
class Profile:
    atoms: tuple[Atom, ...]
    constraints: tuple[Constraint, ...]
    expr: Expr
    source: str = ""

    def atom(self, atom_id: str) -> Atom:
        for a in self.atoms:
            if a.id == atom_id:
                return a
        raise KeyError(atom_id)


ExtractorFactory = Callable[..., Extractor]


def _make_extractor(spec: Any, extractors: Mapping[str, ExtractorFactory], where: str) -> Extractor:
    if isinstance(spec, str):
        name, params = spec, {}
    elif isinstance(spec, dict) and "name" in spec:
        params = dict(spec)
        name = params.pop("name")
    else:
        raise ProfileError(f"{where}: malformed extractor {spec!r}")
    if name not in extractors:
        raise DanglingReferenceError(f"{where}: unknown extractor {name!r}")
    try:
        return extractors[name](**params)
    except TypeError as exc:
        raise ProfileError(f"{where}: bad extractor parameters: {exc}") from None


def _load_language(entry: dict, base_dir: Path, where: str) -> Grammar | Regex:
    from cflcheck import abnf, idioms

    kind = entry.get("kind")
    if kind not in ("cfg", "regex"):
        raise ProfileError(f"{where}: kind must be 'cfg' or 'regex', got {kind!r}")
    if "generate" in entry:
        if kind != "cfg":
            raise ProfileError(f"{where}: only cfg atoms can be generated")
        try:
            g = idioms.generate(entry["generate"])
        except (ValueError, TypeError, KeyError) as exc:
            raise InvalidGrammarError(f"{where}: {exc}") from None
    elif "pattern" in entry and kind == "regex":
        try:
            return Regex(entry["pattern"])
        except RegexSyntaxError as exc:
            raise ProfileError(f"{where}: {exc}") from None
    elif "language_path" in entry:
        path = base_dir / entry["language_path"]
        if not path.is_file():
            raise DanglingReferenceError(f"{where}: language file not found: {entry['language_path']}")
        text = path.read_text(encoding="latin-1")
        if kind == "regex":
            pattern = "".join(line for line in text.splitlines() if not line.startswith("#"))
            try:
                return Regex(pattern)
            except RegexSyntaxError as exc:
                raise ProfileError(f"{where}: {path.name}: {exc}") from None
        try:
            if path.suffix == ".abnf":
                g = abnf.abnf_to_grammar(text, start=entry.get("start"), name=path.name)
            else:
                g = parse_grammar(text, name=path.name)
        except (GrammarSyntaxError, abnf.AbnfError) as exc:
            raise ProfileError(f"{where}: {path.name}: {exc}") from None
    else:
        raise ProfileError(f"{where}: atom needs language_path, generate or pattern")
    diags = grammar_validate(g)
    if diags:
        raise InvalidGrammarError(f"{where}: invalid grammar: {'; '.join(diags)}")
    return g


def _expand_family(fam: dict, extractors, where: str) -> tuple[list[Atom], Expr]:
    from cflcheck import idioms

    fid = fam.get("id")
    if not fid:
        raise ProfileError(f"{where}: family without id")
    try:
        combo = idioms.generate_validator(fam["validator"])
    except (ValueError, TypeError, KeyError) as exc:
        raise InvalidGrammarError(f"{where}: {exc}") from None
    ext = _make_extractor(fam.get("extractor"), extractors, where)
    atoms = []
    for aid, lang in combo.languages.items():
        atoms.append(Atom(f"{fid}.{aid}", "cfg" if isinstance(lang, Grammar) else "regex", lang, ext,
                          bool(fam.get("required", False)), fam.get("extractor")))
    return atoms, prefixed(combo.expr, f"{fid}.")


def load_profile(doc: Mapping[str, Any], base_dir: str | Path = ".",
                 extractors: Mapping[str, ExtractorFactory] | None = None) -> Profile:
    """Resolve a profile document into atoms, constraints and a root expression.

    Language files are read relative to ``base_dir``.
    """
    extractors = extractors or {}
    base_dir = Path(base_dir)
    if not isinstance(doc, Mapping):
        raise ProfileError("profile must be a JSON object")
    atoms: dict[str, Atom] = {}
    for idx, entry in enumerate(doc.get("atoms", [])):
        where = f"atoms[{idx}]"
        if not isinstance(entry, dict) or "id" not in entry:
            raise ProfileError(f"{where}: atom needs an id")
        aid = entry["id"]
        if aid in atoms:
            raise ProfileError(f"{where}: duplicate atom id {aid!r}")
        lang = _load_language(entry, base_dir, f"atom {aid!r}")
        ext = _make_extractor(entry.get("extractor"), extractors, f"atom {aid!r}")
        atoms[aid] = Atom(aid, entry["kind"], lang, ext, bool(entry.get("required", False)), entry.get("extractor"))

    families: dict[str, Expr] = {}
    for idx, fam in enumerate(doc.get("families", [])):
        new_atoms, fexpr = _expand_family(fam, extractors, f"families[{idx}]")
        for a in new_atoms:
            if a.id in atoms:
                raise ProfileError(f"families[{idx}]: duplicate atom id {a.id!r}")
            atoms[a.id] = a
        families[fam["id"]] = fexpr

    meta = doc.get("meta", {})
    raw_constraints = {}
    for cid, m in meta.items():
        if isinstance(m, dict) and "expr" in m:
            raw_constraints[cid] = (expr_from_json(m["expr"]), str(m.get("description", "")))

    def splice(e, allow_constraints: bool, where: str):
        if isinstance(e, _Splice):
            if e.kind == "family":
                if e.id not in families:
                    raise DanglingReferenceError(f"{where}: unknown family {e.id!r}")
                return families[e.id]
            if not allow_constraints:
                raise ProfileError(f"{where}: constraints cannot nest")
            if e.id not in constraints:
                raise DanglingReferenceError(f"{where}: unknown constraint {e.id!r}")
            return constraints[e.id].expr
        if isinstance(e, AtomRef):
            if e.id not in atoms:
                raise DanglingReferenceError(f"{where}: unknown atom {e.id!r}")
            return e
        if isinstance(e, And):
            return And(tuple(splice(c, allow_constraints, where) for c in e.children))
        if isinstance(e, Or):
            return Or(tuple(splice(c, allow_constraints, where) for c in e.children))
        if isinstance(e, Not):
            return Not(splice(e.child, allow_constraints, where))
        return e

    constraints: dict[str, Constraint] = {}
    for cid, (e, desc) in raw_constraints.items():
        constraints[cid] = Constraint(cid, splice(e, False, f"constraint {cid!r}"), desc)

    root = splice(expr_from_json(doc.get("expr", True)), True, "expr")

    owner: dict[str, str] = {}
    for c in constraints.values():
        for aid in c.atoms:
            if aid in owner:
                raise ProfileError(f"atom {aid!r} belongs to both {owner[aid]!r} and {c.id!r}")
            owner[aid] = c.id
    ordered = list(constraints.values())
    for aid in atoms:
        if aid not in owner:
            # stray atoms are reported as constraints of their own
            ordered.append(Constraint(aid, AtomRef(aid)))
    return Profile(tuple(atoms.values()), tuple(ordered), root, str(doc.get("name", "")))


def load_profile_file(path: str | Path, extractors: Mapping[str, ExtractorFactory] | None = None) -> Profile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{path}: {exc}") from None
    return load_profile(doc, path.parent, extractors)


def evaluate(profile: Profile, subjects: Iterable[Any], order: list[str] | None = None) -> ValidationReport:
    """Run every atom on every subject and assemble the report.

    ``order`` optionally fixes the atom evaluation order; the report does not
    depend on it.
    """
    subjects = list(subjects)
    by_id = {a.id: a for a in profile.atoms}
    verdicts: dict[str, Verdict] = {}
    timing: dict[str, float] = {}
    # atoms of one family share an extractor; extract once per subject
    words: dict[tuple[int, int], Any] = {}

    def verdict_on(atom: Atom, k: int) -> Verdict:
        key = (id(atom.extractor), k)
        if key not in words:
            try:
                words[key] = atom.extractor(subjects[k])
            except ExtractionError as exc:
                words[key] = exc
        word = words[key]
        if isinstance(word, ExtractionError):
            return Verdict(atom.id, FAIL, str(word))
        if word is None:
            return Verdict(atom.id, SKIPPED, "not applicable")
        return eval_atom(atom, word)

    for aid in order or list(by_id):
        atom = by_id[aid]
        t0 = time.perf_counter()
        v = combine_subjects(aid, [verdict_on(atom, k) for k in range(len(subjects))])
        if v.status == SKIPPED and atom.required:
            v = Verdict(aid, FAIL, "required input not present")
        verdicts[aid] = v
        timing[aid] = (time.perf_counter() - t0) * 1000.0
    results = []
    for c in profile.constraints:
        atom_verdicts = tuple(verdicts[a] for a in c.atoms)
        if atom_verdicts and all(v.status == SKIPPED for v in atom_verdicts):
            v = Verdict(c.id, SKIPPED, "not applicable")
        elif eval_expr(c.expr, verdicts):
            v = Verdict(c.id, PASS)
        else:
            notes = _join_notes(a.note for a in atom_verdicts if a.status == FAIL)
            v = Verdict(c.id, FAIL, notes)
        results.append(ConstraintResult(c.id, v, atom_verdicts))
    overall = PASS if eval_expr(profile.expr, verdicts) else FAIL
    return ValidationReport(overall, results, {a.id: timing[a.id] for a in profile.atoms})
