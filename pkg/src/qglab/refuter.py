"""End-to-end pumping refutations: given a grammar claimed to contain all
mildly-quasigeodesic words, produce a machine-checkable certificate of a
member word that badly fails a target quasigeodesic inequality."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .families import bs_w, bs_w_left, spiral_z2
from .grammar import Grammar, cyk, cyk_member, ogden_constant, parse_grammar, to_cnf
from .groups import BSModel, bs_alphabet, z2_model
from .metric import MetricCache
from .ogden import OgdenDecomposition, ogden_decompose
from .quasigeodesic import VIOLATED, QGReport, Violation, min_lambda
from .words import Word, parse_word, serialize_word

#: Additive constant used when certifying the BS word family empirically.
BS_FAMILY_EPS = Fraction(2)

_SAMPLE_SEED = 0x5EED


class SamplingRefutedPremise(Exception):
    """A sampled quasigeodesic word is missing from the grammar's language.

    That by itself refutes the premise of the pumping argument; the offending
    word is attached.
    """

    def __init__(self, word: Word, lam0: Fraction, eps0: Fraction):
        super().__init__(
            f"grammar misses the ({lam0},{eps0})-quasigeodesic word "
            f"{serialize_word(word)!r}"
        )
        self.word = word
        self.lam0 = lam0
        self.eps0 = eps0


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class WitnessCertificate:
    """Replayable record of one refutation run."""

    model_id: str
    grammar_text: str
    grammar_empty: bool
    grammar_digest: str
    lam0: Fraction
    eps0: Fraction
    lam: Fraction
    eps: Fraction
    q: int
    k: int
    pump_count: int
    base_word: str
    deco_parts: tuple[str, str, str, str, str]
    marks_start: int
    marks_end: int
    witness_word: str
    tree_fingerprint: str
    violation_start: int
    violation_end: int

    def to_text(self) -> str:
        lines = [
            "[certificate]",
            f"model={self.model_id}",
            f"lambda0={self.lam0}",
            f"eps0={self.eps0}",
            f"lambda={self.lam}",
            f"eps={self.eps}",
            f"q={self.q}",
            f"k={self.k}",
            f"pump={self.pump_count}",
            f"grammar_digest={self.grammar_digest}",
            f"tree_fingerprint={self.tree_fingerprint}",
            f"marks={self.marks_start}..{self.marks_end}",
            f"violation={self.violation_start}..{self.violation_end}",
            "[decomposition]",
        ]
        for label, part in zip("uxzyv", self.deco_parts):
            lines.append(f"{label}={part}")
        lines += ["[base]", f"word={self.base_word}"]
        lines += ["[witness]", f"word={self.witness_word}"]
        lines += ["[grammar]", f"empty={'true' if self.grammar_empty else 'false'}"]
        lines.extend(self.grammar_text.rstrip("\n").splitlines())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WitnessCertificate":
        fields: dict[str, str] = {}
        deco: dict[str, str] = {}
        grammar_lines: list[str] = []
        section = ""
        for line in text.splitlines():
            if line.startswith("["):
                section = line.strip("[]")
                continue
            if section == "grammar" and not line.startswith("empty="):
                grammar_lines.append(line)
                continue
            if "=" not in line:
                continue
            key, value = line.split("=", 1)
            if section == "decomposition":
                deco[key] = value
            else:
                fields[key] = value
        marks = fields["marks"].split("..")
        violation = fields["violation"].split("..")
        return cls(
            model_id=fields["model"],
            grammar_text="\n".join(grammar_lines) + "\n",
            grammar_empty=fields["empty"] == "true",
            grammar_digest=fields["grammar_digest"],
            lam0=Fraction(fields["lambda0"]),
            eps0=Fraction(fields["eps0"]),
            lam=Fraction(fields["lambda"]),
            eps=Fraction(fields["eps"]),
            q=int(fields["q"]),
            k=int(fields["k"]),
            pump_count=int(fields["pump"]),
            base_word=fields.get("word", deco.get("word", "")) if False else fields["word"],
            deco_parts=(deco["u"], deco["x"], deco["z"], deco["y"], deco["v"]),
            marks_start=int(marks[0]),
            marks_end=int(marks[1]),
            witness_word=fields["witness_word"] if "witness_word" in fields else "",
            tree_fingerprint=fields["tree_fingerprint"],
            violation_start=int(violation[0]),
            violation_end=int(violation[1]),
        )


def _model_for(model_id: str):
    if model_id == "z2":
        return z2_model()
    if model_id.startswith("bs(") and model_id.endswith(")"):
        m_str, n_str = model_id[3:-1].split(",")
        return BSModel(int(m_str), int(n_str))
    raise ValueError(f"unknown model id {model_id!r}")


def _random_certified_words(model, lam0, eps0, cache, rng, count, max_len):
    """Rejection sampling of short certified quasigeodesic words."""
    from .quasigeodesic import CERTIFIED, check

    alphabet = model.alphabet
    found = []
    attempts = 0
    while len(found) < count and attempts < count * 60:
        attempts += 1
        length = rng.randint(1, max_len)
        letters = tuple(rng.randrange(len(alphabet)) for _ in range(length))
        word = Word(alphabet, letters)
        report = check(word, lam0, eps0, model=model, cache=cache)
        if report.verdict == CERTIFIED:
            found.append(word)
    return found


def _check_premise(cnf: Grammar, samples, lam0, eps0) -> None:
    for word in samples:
        if not cyk_member(cnf, word):
            raise SamplingRefutedPremise(word, lam0, eps0)


def _pump_exponent(deco: OgdenDecomposition, q: int) -> tuple[int, int, bool]:
    """Pump count so the witness contains a doubled marked run.

    Returns (pump count, pumped segment length, left case).  The marked
    region is a single-letter run of length q; after pumping, the run next to
    the unpumped arm must reach 2q.
    """
    a, b, c, d = deco.bounds()
    left = deco.left_case()
    if left:
        k = len(deco.x)
        run_in_u = a - deco_marks_start(deco)
    else:
        k = len(deco.y)
        run_in_u = deco_marks_end(deco) - d
    needed = 2 * q - run_in_u
    count = max(2, -(-needed // k) if k else 2)
    return count, k, left


def deco_marks_start(deco: OgdenDecomposition) -> int:
    return min(deco.marks)


def deco_marks_end(deco: OgdenDecomposition) -> int:
    return max(deco.marks) + 1


def _build_certificate(
    model_id: str,
    g: Grammar,
    cnf: Grammar,
    lam0: Fraction,
    eps0: Fraction,
    lam: Fraction,
    eps: Fraction,
    q: int,
    base_word: Word,
    marks: range,
    violation_prefix_len: int,
    violation_suffix_len: int,
    model,
) -> WitnessCertificate:
    deco = ogden_decompose(cnf, base_word, marks)
    count, k, left = _pump_exponent(deco, q)
    witness = deco.pump(count)
    if not cyk_member(cnf, witness):
        raise AssertionError("pumped witness fell out of the language")
    if left:
        v_start, v_end = 0, violation_prefix_len
    else:
        v_start, v_end = len(witness) - violation_suffix_len, len(witness)
    loop = witness.subword(v_start, v_end)
    if model.eval_word(loop) != model.identity():
        raise AssertionError("scripted violation subword is not a loop")
    if not Fraction(v_end - v_start) > lam * 0 + eps:
        raise AssertionError("scripted violation does not beat the target constants")
    tree = cyk(cnf, witness)
    assert tree is not None
    return WitnessCertificate(
        model_id=model_id,
        grammar_text=g.to_text(),
        grammar_empty=g.accepts_empty,
        grammar_digest=g.digest(),
        lam0=lam0,
        eps0=eps0,
        lam=lam,
        eps=eps,
        q=q,
        k=k,
        pump_count=count,
        base_word=serialize_word(base_word),
        deco_parts=tuple(serialize_word(part) for part in (deco.u, deco.x, deco.z, deco.y, deco.v)),
        marks_start=marks.start,
        marks_end=marks.stop,
        witness_word=serialize_word(witness),
        tree_fingerprint=tree.fingerprint(),
        violation_start=v_start,
        violation_end=v_end,
    )


def refute_z2(g: Grammar, lam: Fraction | int, eps: Fraction | int) -> WitnessCertificate:
    """Replay the planar pumping script against a grammar over the Z^2
    alphabet; the witness contains a 6q-letter loop."""
    lam, eps = Fraction(lam), Fraction(eps)
    model = z2_model()
    if g.alphabet != model.alphabet:
        raise ValueError("grammar must use the standard Z^2 alphabet")
    cnf = to_cnf(g)
    lam0, eps0 = Fraction(5), Fraction(0)
    cache = MetricCache(model)
    rng = random.Random(_SAMPLE_SEED)
    samples = [spiral_z2(qq, model.alphabet) for qq in range(1, 5)]
    samples += _random_certified_words(model, lam0, eps0, cache, rng, 20, 12)
    _check_premise(cnf, samples, lam0, eps0)
    p = ogden_constant(cnf)
    q = max(p, math.ceil(eps), 1)
    word = spiral_z2(q, model.alphabet)
    marks = range(4 * q, 5 * q)
    return _build_certificate(
        "z2", g, cnf, lam0, eps0, lam, eps, q, word, marks, 6 * q, 6 * q, model
    )


def refute_bs(
    g: Grammar, lam: Fraction | int, eps: Fraction | int, m: int, n: int
) -> WitnessCertificate:
    """Replay the sheet-walking pumping script in BS(m, n), n > m >= 1."""
    lam, eps = Fraction(lam), Fraction(eps)
    model = BSModel(m, n)
    if g.alphabet != model.alphabet:
        raise ValueError("grammar must use the BS alphabet {a, t}")
    cnf = to_cnf(g)
    cache = MetricCache(model)
    eps0 = BS_FAMILY_EPS
    lam0 = max(
        min_lambda(bs_w(1, m, n), eps0, model=model, cache=cache, allow_lower_bounds=True),
        Fraction(1),
    )
    rng = random.Random(_SAMPLE_SEED)
    samples = [bs_w(1, m, n), bs_w(2, m, n)]
    samples += _random_certified_words(model, lam0, eps0, cache, rng, 12, 10)
    _check_premise(cnf, samples, lam0, eps0)
    p = ogden_constant(cnf)
    q = max(p, math.ceil(eps), 1)
    word = bs_w(q, m, n)
    left_len = len(bs_w_left(q, m, n))
    marks = range(left_len, left_len + q)
    return _build_certificate(
        f"bs({m},{n})",
        g,
        cnf,
        lam0,
        eps0,
        lam,
        eps,
        q,
        word,
        marks,
        left_len + 2 * q,
        left_len + 2 * q,
        model,
    )


def verify_certificate(cert: WitnessCertificate) -> VerificationResult:
    """Independently replay membership and the violation; True iff both hold."""
    try:
        model = _model_for(cert.model_id)
    except ValueError as exc:
        return VerificationResult(False, str(exc))
    try:
        g = parse_grammar(cert.grammar_text, model.alphabet)
    except Exception as exc:
        return VerificationResult(False, f"grammar parse failed: {exc}")
    g = Grammar(g.nonterminals, g.alphabet, g.productions, g.start, cert.grammar_empty)
    if g.digest() != cert.grammar_digest:
        return VerificationResult(False, "grammar digest mismatch")
    cnf = to_cnf(g)
    try:
        witness = parse_word(cert.witness_word, model.alphabet)
        parts = [parse_word(p, model.alphabet) for p in cert.deco_parts]
    except Exception as exc:
        return VerificationResult(False, f"word parse failed: {exc}")
    u, x, z, y, v = parts
    rebuilt = u + x.repeat(cert.pump_count) + z + y.repeat(cert.pump_count) + v
    if rebuilt.letters != witness.letters:
        return VerificationResult(False, "witness does not match pumped decomposition")
    base = u + x + z + y + v
    if serialize_word(base) != cert.base_word:
        return VerificationResult(False, "decomposition does not rebuild the base word")
    if not cyk_member(cnf, base):
        return VerificationResult(False, "unpumped base word not in the language")
    tree = cyk(cnf, witness)
    if tree is None:
        return VerificationResult(False, "witness not in the language")
    if tree.fingerprint() != cert.tree_fingerprint:
        return VerificationResult(False, "parse tree fingerprint mismatch")
    if not (0 <= cert.violation_start < cert.violation_end <= len(witness)):
        return VerificationResult(False, "violation span out of range")
    loop = witness.subword(cert.violation_start, cert.violation_end)
    if model.eval_word(loop) != model.identity():
        return VerificationResult(False, "violation subword is not a loop")
    length = cert.violation_end - cert.violation_start
    if not Fraction(length) > cert.lam * 0 + cert.eps:
        return VerificationResult(False, "violation does not exceed the target bound")
    return VerificationResult(True)


def certificate_report(cert: WitnessCertificate) -> QGReport:
    """The violation record a checker replay of the certificate produces."""
    length = cert.violation_end - cert.violation_start
    return QGReport(
        VIOLATED,
        cert.lam,
        cert.eps,
        violation=Violation(cert.violation_start, cert.violation_end, length, 0),
    )
