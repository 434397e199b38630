"""Fuchsian-group machinery: group files, element enumeration, conjugacy
classes, primitive decomposition and length spectra.

Enumeration walks the orbit of the base point i under a breadth-first
search whose prefixes are capped by a certified displacement radius: every
conjugacy class of translation length <= L_max has a representative whose
axis passes within the Dirichlet covering radius of the base point, which
bounds the displacement of at least one class member. Conjugacy is decided
geometrically (bounded conjugator search), and a word-level strategy with
small-cancellation rewriting provides an independent cross-check.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geom import Isometry

__all__ = [
    "GroupSpecError", "EnumerationBudgetError", "EnumerationConfig",
    "Word", "GroupSpec", "ConjugacyClass", "LengthSpectrum",
    "load_group", "builtin_group_path", "parse_entry",
    "covering_radius", "enumerate_classes", "enumerate_classes_by_words",
    "primitive_decomposition", "length_spectrum",
]


class GroupSpecError(ValueError):
    pass


class EnumerationBudgetError(RuntimeError):
    """Raised when the element budget runs out; carries the cutoff up to
    which the enumeration is still known to be complete."""

    def __init__(self, message, complete_up_to: float):
        super().__init__(message)
        self.complete_up_to = complete_up_to


# ---------------------------------------------------------------------------
# exact matrix-entry expressions: rationals, sqrt(...), + - * /, parentheses

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|(sqrt)|([()+\-*/]))")


def parse_entry(text) -> float:
    """Evaluate a matrix-entry expression such as "1+1/2*sqrt(2)" or
    "1+sqrt(2)-sqrt(2)*sqrt(1+sqrt(2))". Plain numbers pass through."""
    if isinstance(text, (int, float)):
        return float(text)
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise GroupSpecError(f"bad entry expression {text!r} at {pos}")
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    tokens.append(None)
    idx = [0]

    def peek():
        return tokens[idx[0]]

    def take():
        t = tokens[idx[0]]
        idx[0] += 1
        return t

    def expr():
        v = term()
        while peek() in ("+", "-"):
            if take() == "+":
                v += term()
            else:
                v -= term()
        return v

    def term():
        v = unary()
        while peek() in ("*", "/"):
            if take() == "*":
                v *= unary()
            else:
                v /= unary()
        return v

    def unary():
        if peek() == "-":
            take()
            return -unary()
        return primary()

    def primary():
        t = take()
        if t == "sqrt":
            if take() != "(":
                raise GroupSpecError(f"sqrt needs parentheses in {text!r}")
            v = expr()
            if take() != ")":
                raise GroupSpecError(f"unbalanced parens in {text!r}")
            if v < 0:
                raise GroupSpecError(f"sqrt of negative value in {text!r}")
            return math.sqrt(v)
        if t == "(":
            v = expr()
            if take() != ")":
                raise GroupSpecError(f"unbalanced parens in {text!r}")
            return v
        if t is None or t in ")+-*/":
            raise GroupSpecError(f"unexpected token in {text!r}")
        return float(t)

    val = expr()
    if peek() is not None:
        raise GroupSpecError(f"trailing tokens in {text!r}")
    return val


# ---------------------------------------------------------------------------
# words over signed generator indices: +k for generator k (1-based), -k inverse


@dataclass(frozen=True)
class Word:
    """Freely reduced word; letters are signed 1-based generator indices."""

    letters: tuple

    @staticmethod
    def from_letters(letters) -> "Word":
        return Word(free_reduce(tuple(int(x) for x in letters)))

    @staticmethod
    def from_symbols(symbols, n_generators: int) -> "Word":
        """Parse ["a1", "A2", ...] or a whitespace-separated string."""
        if isinstance(symbols, str):
            symbols = symbols.split()
        letters = []
        for s in symbols:
            m = re.fullmatch(r"([aA])(\d+)", s)
            if not m:
                raise GroupSpecError(f"bad word symbol {s!r}")
            k = int(m.group(2))
            if not 1 <= k <= n_generators:
                raise GroupSpecError(f"generator index {k} out of range")
            letters.append(k if m.group(1) == "a" else -k)
        return Word.from_letters(letters)

    def symbols(self):
        return [f"a{v}" if v > 0 else f"A{-v}" for v in self.letters]

    def inverse(self) -> "Word":
        return Word(tuple(-v for v in reversed(self.letters)))

    def cyclic_reduce(self) -> "Word":
        return Word(cyclic_reduce(self.letters))

    @property
    def is_reduced(self) -> bool:
        return all(self.letters[i] != -self.letters[i + 1]
                   for i in range(len(self.letters) - 1))

    @property
    def is_cyclically_reduced(self) -> bool:
        w = self.letters
        return self.is_reduced and (len(w) < 2 or w[0] != -w[-1])

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(self.symbols()) or "1"


def free_reduce(letters: tuple) -> tuple:
    out = []
    for v in letters:
        if out and out[-1] == -v:
            out.pop()
        else:
            out.append(v)
    return tuple(out)


def cyclic_reduce(letters: tuple) -> tuple:
    w = list(free_reduce(letters))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def primitive_decomposition(word: Word):
    """Smallest cyclic subword whose power gives the input, with the power.

    The input must be cyclically reduced; the decomposition is purely
    combinatorial (free-group level).
    """
    w = word.letters
    if not word.is_cyclically_reduced:
        raise GroupSpecError("primitive_decomposition needs a cyclically reduced word")
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w == w[:p] * (n // p):
            return Word(w[:p]), n // p
    return word, 1


# ---------------------------------------------------------------------------
# group description and file loading


@dataclass(frozen=True)
class GroupSpec:
    generators: tuple
    relator_words: tuple
    label: str
    genus: int | None = None

    @property
    def n_generators(self) -> int:
        return len(self.generators)

    def word_matrix(self, word: Word) -> np.ndarray:
        m = np.eye(2)
        for v in word.letters:
            g = self.generators[abs(v) - 1].matrix()
            if v < 0:
                g = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])
            m = m @ g
        return m

    def relator_residual(self) -> float:
        res = 0.0
        for w in self.relator_words:
            m = self.word_matrix(w)
            res = max(res, min(np.abs(m - np.eye(2)).max(),
                               np.abs(m + np.eye(2)).max()))
        return res


def builtin_group_path(name: str) -> Path:
    p = Path(__file__).parent / "data" / f"{name}.json"
    if not p.exists():
        raise FileNotFoundError(f"no builtin group {name!r}")
    return p


def load_group(path) -> GroupSpec:
    """Load and validate a group file.

    Rejects non-unit determinants, elliptic or parabolic generators, empty
    generator lists and relators that do not evaluate to the identity.
    """
    p = Path(path)
    if not p.exists():
        candidates = [p.with_suffix(".json")]
        if p.parent.exists():
            candidates += sorted(p.parent.glob(p.name + "*.json"))
        for alt in candidates:
            if alt.exists():
                p = alt
                break
        else:
            try:
                p = builtin_group_path(p.stem)
            except FileNotFoundError:
                raise FileNotFoundError(f"group file {path} not found") from None
    doc = json.loads(p.read_text())
    raw_gens = doc.get("generators", [])
    if not raw_gens:
        raise GroupSpecError("group file has no generators")
    gens = []
    for gi, rows in enumerate(raw_gens):
        m = np.array([[parse_entry(rows[0][0]), parse_entry(rows[0][1])],
                      [parse_entry(rows[1][0]), parse_entry(rows[1][1])]])
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det - 1.0) > 1e-8:
            raise GroupSpecError(f"generator {gi}: determinant {det} != 1")
        iso = Isometry.from_matrix(m)
        if abs(iso.trace()) <= 2.0 + 1e-10:
            raise GroupSpecError(
                f"generator {gi}: |trace| = {abs(iso.trace())} <= 2 "
                "(elliptic or parabolic; the group must be strictly hyperbolic)")
        gens.append(iso)
    words = tuple(Word.from_symbols(w, len(gens)) for w in doc.get("relators", []))
    spec = GroupSpec(generators=tuple(gens), relator_words=words,
                     label=doc.get("label", p.stem), genus=doc.get("genus"))
    res = spec.relator_residual()
    if res > 1e-8:
        raise GroupSpecError(f"relator does not evaluate to the identity: residual {res:.2e}")
    return spec


# ---------------------------------------------------------------------------
# conjugacy classes and spectra


@dataclass(frozen=True)
class ConjugacyClass:
    canonical_word: Word
    representative: Isometry
    length: float
    primitive_word: Word
    power: int

    @property
    def is_primitive(self) -> bool:
        return self.power == 1


@dataclass(frozen=True)
class LengthSpectrum:
    """Sorted primitive lengths with oriented-class multiplicities."""

    entries: tuple          # of (length, multiplicity)
    cutoff: float
    dedup_tolerance: float

    def __post_init__(self):
        last = -math.inf
        for ell, mult in self.entries:
            if mult < 1:
                raise GroupSpecError("multiplicity must be >= 1")
            if ell - last <= self.dedup_tolerance:
                raise GroupSpecError("lengths not separated by the dedup tolerance")
            last = ell

    @staticmethod
    def from_entries(entries, cutoff, dedup_tolerance=1e-9) -> "LengthSpectrum":
        return LengthSpectrum(tuple(sorted((float(l), int(m)) for l, m in entries)),
                              float(cutoff), float(dedup_tolerance))

    @property
    def systole(self) -> float | None:
        return self.entries[0][0] if self.entries else None

    @property
    def total_classes(self) -> int:
        return sum(m for _, m in self.entries)

    def count_up_to(self, L: float) -> int:
        return sum(m for ell, m in self.entries if ell <= L)


@dataclass(frozen=True)
class EnumerationConfig:
    max_elements: int = 4_000_000
    max_levels: int = 200
    stabilization_rounds: int = 1
    stabilization_step: float = 0.5
    quantum: float = 1e-4      # matrix hashing grid


DEFAULT_ENUM = EnumerationConfig()


def _letters_of(spec: GroupSpec):
    mats = []
    word_letters = []
    for i, g in enumerate(spec.generators):
        m = g.matrix()
        mats.append(m)
        word_letters.append((i + 1,))
        mats.append(np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]))
        word_letters.append((-(i + 1),))
    return np.stack(mats), word_letters


def _canon_sign_batch(ms: np.ndarray) -> np.ndarray:
    flat = ms.reshape(len(ms), 4)
    idx = (np.abs(flat) > 1e-9).argmax(axis=1)
    sgn = np.sign(flat[np.arange(len(flat)), idx])
    sgn[sgn == 0] = 1.0
    return ms * sgn[:, None, None]


def _keys_of(ms: np.ndarray, quantum: float):
    ki = np.round(ms.reshape(len(ms), 4) / quantum).astype(np.int64)
    return [bytes(row.data) for row in np.ascontiguousarray(ki)]


def _displacements(ms: np.ndarray) -> np.ndarray:
    fro2 = (ms * ms).sum(axis=(1, 2))
    return np.arccosh(np.maximum(fro2 / 2.0, 1.0))


class _Ball:
    """Breadth-first orbit ball with a displacement cap on every prefix.

    Supports extending the cap; nodes on the rim (those whose children may
    have been cut) are re-expanded when the cap grows.
    """

    def __init__(self, moves: np.ndarray, move_words, cfg: EnumerationConfig):
        self.moves = moves
        self.move_words = move_words
        self.move_disp = _displacements(moves).max()
        self.cfg = cfg
        self.mats = [np.eye(2)]
        self.words = [()]
        self.disp = [0.0]
        self.seen = {_keys_of(np.eye(2)[None], cfg.quantum)[0]: 0}
        self.expanded_under = [-1.0]   # cap under which node was last expanded

    def extend(self, cap: float):
        frontier = [i for i, c in enumerate(self.expanded_under) if c < cap - 1e-12
                    and self.disp[i] > c - self.move_disp]
        # freshly discovered nodes have expanded_under == -1 and always qualify
        frontier = [i for i in frontier if self.disp[i] <= cap]
        levels = 0
        while frontier:
            levels += 1
            if levels > self.cfg.max_levels:
                raise EnumerationBudgetError(
                    "level budget exceeded", complete_up_to=self._complete_len(cap))
            ms = np.stack([self.mats[i] for i in frontier])
            prod = np.einsum("nij,ljk->nlik", ms, self.moves).reshape(-1, 2, 2)
            disp = _displacements(prod)
            ok = disp <= cap
            prod = _canon_sign_batch(prod[ok])
            disp = disp[ok]
            parents = np.repeat(frontier, len(self.moves))[ok]
            movidx = np.tile(np.arange(len(self.moves)), len(frontier))[ok]
            for i in frontier:
                self.expanded_under[i] = cap
            keys = _keys_of(prod, self.cfg.quantum)
            newf = []
            for j, key in enumerate(keys):
                if key in self.seen:
                    continue
                if len(self.mats) >= self.cfg.max_elements:
                    raise EnumerationBudgetError(
                        "element budget exceeded", complete_up_to=self._complete_len(cap))
                self.seen[key] = len(self.mats)
                self.mats.append(prod[j])
                self.words.append(self.words[parents[j]] + self.move_words[movidx[j]])
                self.disp.append(float(disp[j]))
                self.expanded_under.append(-1.0)
                newf.append(len(self.mats) - 1)
            frontier = newf

    def _complete_len(self, cap: float) -> float:
        # invert R* = 2 acosh(cosh(L/2) cosh(r)) pessimistically with r = move_disp
        arg = math.cosh(cap / 2.0) / math.cosh(self.move_disp)
        return 2.0 * math.acosh(max(arg, 1.0))

    def arrays(self):
        return np.stack(self.mats), np.array(self.disp)


def _dirichlet_data(spec: GroupSpec, theta_samples: int = 1440):
    """Covering radius of the Dirichlet domain at the base point i, and the
    orbit elements whose bisectors form its boundary (the side pairings).

    For each direction, the distance to the nearest perpendicular bisector
    of (i, gamma i) is atanh(tanh(d/2)/cos(angle)); the covering radius is
    the largest over directions of the smallest over orbit points.
    """
    letters, letter_words = _letters_of(spec)
    min_gen = _displacements(letters).min()
    cap = 2.0 * min_gen + 0.2
    ball = _Ball(letters, letter_words, EnumerationConfig())
    for _ in range(8):
        ball.extend(cap)
        mats, disp = ball.arrays()
        mats, disp = mats[1:], disp[1:]  # drop the identity
        # orbit directions seen from i, in the disk model around i
        zs = (mats[:, 0, 0] * 1j + mats[:, 0, 1]) / (mats[:, 1, 0] * 1j + mats[:, 1, 1])
        ws = (zs - 1j) / (zs + 1j)
        ang = np.angle(ws)
        half = np.tanh(disp / 2.0)
        thetas = np.linspace(-math.pi, math.pi, theta_samples, endpoint=False)
        cosa = np.cos(thetas[:, None] - ang[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = half[None, :] / cosa
            ratio = np.where((cosa > 0) & (ratio < 1), ratio, np.nan)
            dist = np.arctanh(ratio)
        if np.isnan(dist).all(axis=1).any():
            cap += min_gen
            continue
        per_theta = np.nanmin(dist, axis=1)
        r_hat = float(per_theta.max())
        # every bisector within reach must come from an orbit point we saw
        if 2.0 * r_hat + 0.1 <= cap:
            side_idx = sorted(set(int(i) for i in np.nanargmin(dist, axis=1)))
            sides = [(mats[i], ball.words[i + 1]) for i in side_idx]
            # margin covers the undershoot of the angular sampling at the max
            return r_hat * (1.0 + 1e-4), sides
        cap = 2.0 * r_hat + 0.5
    raise GroupSpecError("Dirichlet covering radius did not stabilize")


def covering_radius(spec: GroupSpec, theta_samples: int = 1440) -> float:
    return _dirichlet_data(spec, theta_samples)[0]


def _augmented_moves(spec: GroupSpec, sides):
    """Generator letters plus the Dirichlet side-pairing translations as
    composite moves; crossing sequences of short geodesic segments then
    exist inside the displacement cap, which is what certifies ball
    completeness."""
    letters, letter_words = _letters_of(spec)
    keys = set(_keys_of(_canon_sign_batch(letters.copy()), 1e-7))
    moves = [letters[i] for i in range(len(letters))]
    words = list(letter_words)
    for m, wrd in sides:
        k = _keys_of(_canon_sign_batch(m[None].copy()), 1e-7)[0]
        if k in keys:
            continue
        keys.add(k)
        moves.append(m)
        words.append(wrd)
    return np.stack(moves), words


def _conjugator_bound(L_max: float, r_cover: float) -> float:
    return L_max / 2.0 + 2.0 * r_cover + 0.3


def enumerate_classes(spec: GroupSpec, L_max: float,
                      cfg: EnumerationConfig = DEFAULT_ENUM):
    """All conjugacy classes of oriented closed geodesics with length <= L_max.

    Completeness rests on the covering-radius bound (every class has a
    representative with cosh(d/2) <= cosh(l/2) cosh(r_cover)) plus a
    stabilization pass that re-runs the search with an enlarged prefix cap
    and checks that no new class appears.
    """
    if not L_max > 0:
        raise GroupSpecError("L_max must be positive")
    r_cover, sides = _dirichlet_data(spec)
    moves, move_words = _augmented_moves(spec, sides)
    R_star = 2.0 * math.acosh(math.cosh(L_max / 2.0) * math.cosh(r_cover))
    cap = R_star + r_cover + 0.2

    ball = _Ball(moves, move_words, cfg)
    ball.extend(cap)
    result = _classes_from_ball(spec, ball, L_max, r_cover, cfg)
    for _ in range(cfg.stabilization_rounds):
        cap += cfg.stabilization_step
        ball.extend(cap)
        again = _classes_from_ball(spec, ball, L_max, r_cover, cfg)
        if _spectra_equal(result, again):
            result = again
            break
        result = again
    return result


def _spectra_equal(cl_a, cl_b) -> bool:
    sig = lambda cl: sorted((round(c.length, 9), str(c.canonical_word)) for c in cl)
    return sig(cl_a) == sig(cl_b)


def _classes_from_ball(spec, ball: _Ball, L_max, r_cover, cfg):
    mats, disp = ball.arrays()
    tr = mats[:, 0, 0] + mats[:, 1, 1]
    att = np.abs(tr)
    hyp = att > 2.0 + 1e-10
    with np.errstate(invalid="ignore"):
        ell = np.where(hyp, 2.0 * np.arccosh(np.maximum(att, 2.0) / 2.0), 0.0)
    axis_ok = np.cosh(disp / 2.0) <= np.cosh(ell / 2.0) * math.cosh(r_cover) * (1 + 1e-9)
    cand = np.where(hyp & (ell <= L_max * (1 + 1e-12)) & (ell > 0) & axis_ok)[0]
    if len(cand) == 0:
        return []

    gc_mask = disp <= _conjugator_bound(L_max, r_cover)
    Gc = np.concatenate([mats[gc_mask], np.linalg.inv(mats[gc_mask])])

    # deterministic candidate order: by trace, then by word
    order = sorted(cand, key=lambda i: (att[i], len(ball.words[i]), ball.words[i]))

    quantum = cfg.quantum

    def conj_keys_of(m):
        cc = np.einsum("nij,jk,nkl->nil", Gc, m, np.linalg.inv(Gc))
        cc = _canon_sign_batch(cc)
        return cc, set(_keys_of(cc, quantum))

    key_to_class: dict = {}
    class_reps: list = []          # index into mats
    class_members: list = []
    class_conj: list = []          # (matrices, keyset) per class

    for i in order:
        k = _keys_of(mats[i][None], quantum)[0]
        cid = key_to_class.get(k)
        if cid is None:
            # fallback: compare against reps with matching trace
            for cj, rep_i in enumerate(class_reps):
                if abs(att[rep_i] - att[i]) > 1e-7 * (1.0 + att[i]):
                    continue
                cc = class_conj[cj][0]
                dmin = min(np.abs(cc - mats[i]).max(axis=(1, 2)).min(),
                           np.abs(cc + mats[i]).max(axis=(1, 2)).min())
                if dmin < 1e-5 * (1.0 + att[i]):
                    cid = cj
                    class_conj[cj][1].add(k)
                    key_to_class[k] = cj
                    break
        if cid is None:
            cid = len(class_reps)
            class_reps.append(i)
            class_members.append([])
            cc, keys = conj_keys_of(mats[i])
            class_conj.append((cc, keys))
            for kk in keys:
                key_to_class.setdefault(kk, cid)
        class_members[cid].append(i)

    # choose deterministic representatives (shortest, then lexicographic word)
    rep_of = []
    for members in class_members:
        rep_of.append(min(members, key=lambda i: (len(ball.words[i]), ball.words[i])))

    lengths = np.array([ell[i] for i in rep_of])
    class_order = sorted(range(len(rep_of)),
                         key=lambda c: (lengths[c], ball.words[rep_of[c]]))

    bank = _relator_bank(spec)
    canon_words = [
        _dehn_canonical(cyclic_reduce(ball.words[rep_of[c]]), bank)
        for c in range(len(rep_of))
    ]

    # primitive decomposition: geometric (delta^n matches the class)
    sys_len = lengths.min()
    results = [None] * len(rep_of)
    for c in class_order:
        li = lengths[c]
        found = None
        for n in range(int(li / sys_len + 1e-9), 1, -1):
            lt = li / n
            for cj in np.where(np.abs(lengths - lt) < 1e-9 * (1 + li))[0]:
                dn = np.linalg.matrix_power(mats[rep_of[cj]], n)
                kdn = _keys_of(_canon_sign_batch(dn[None]), quantum)[0]
                if key_to_class.get(kdn) == c:
                    found = (cj, n)
                    break
                cc = class_conj[c][0]
                dmin = min(np.abs(cc - dn).max(axis=(1, 2)).min(),
                           np.abs(cc + dn).max(axis=(1, 2)).min())
                if dmin < 1e-5 * (1.0 + att[rep_of[c]]):
                    found = (cj, n)
                    break
            if found:
                break
        word = Word(canon_words[c])
        if found:
            cj, n = found
            prim_word = Word(canon_words[cj])
            power = n
        else:
            prim_word = word
            power = 1
        results[c] = ConjugacyClass(
            canonical_word=word,
            representative=Isometry.from_matrix(mats[rep_of[c]]),
            length=float(li),
            primitive_word=prim_word,
            power=power)
    return [results[c] for c in class_order]


def spectrum_from_classes(classes, L_max: float,
                          dedup_tolerance: float | None = None) -> LengthSpectrum:
    """Group primitive classes by length within the dedup tolerance."""
    if dedup_tolerance is None:
        dedup_tolerance = 1e-9 * math.cosh(L_max / 2.0)
    prim = sorted(c.length for c in classes
                  if c.is_primitive and c.length <= L_max * (1 + 1e-12))
    entries = []
    i = 0
    while i < len(prim):
        j = i
        while j + 1 < len(prim) and prim[j + 1] - prim[i] < dedup_tolerance:
            j += 1
        entries.append((prim[i], j - i + 1))
        i = j + 1
    return LengthSpectrum(tuple(entries), float(L_max), float(dedup_tolerance))


def length_spectrum(spec: GroupSpec, L_max: float, dedup_tolerance: float | None = None,
                    cfg: EnumerationConfig = DEFAULT_ENUM) -> LengthSpectrum:
    """Primitive oriented classes grouped by length within the tolerance."""
    classes = enumerate_classes(spec, L_max, cfg)
    return spectrum_from_classes(classes, L_max, dedup_tolerance)


# ---------------------------------------------------------------------------
# word-level enumeration (independent cross-check strategy)


def _relator_bank(spec: GroupSpec):
    """All cyclic rotations of the relators and their inverses."""
    bank = []
    for w in spec.relator_words:
        for base in (w.letters, w.inverse().letters):
            for r in range(len(base)):
                rot = base[r:] + base[:r]
                if rot not in bank:
                    bank.append(rot)
    return bank


def _dehn_canonical(letters: tuple, bank, max_visited: int = 512) -> tuple:
    """Canonical cyclic form under small-cancellation rewriting.

    Repeatedly replaces subwords matching more than half of a relator by the
    shorter complement, closes over the equal-length (half-relator) swaps,
    and returns the lexicographically minimal rotation of the shortest form.
    """
    start = cyclic_reduce(letters)
    if not bank or not start:
        return _min_rotation(start)
    best_len = len(start)
    visited = {start}
    queue = [start]
    while queue and len(visited) < max_visited:
        w = queue.pop()
        n = len(w)
        if n == 0:
            return ()
        half_min = min(len(r) for r in bank) // 2
        for rot in range(n):
            wr = w[rot:] + w[:rot]
            for r in bank:
                lim = min(n, len(r))
                for m in range(lim, half_min - 1, -1):
                    if wr[:m] == r[:m]:
                        rest = tuple(-v for v in reversed(r[m:]))
                        new = cyclic_reduce(rest + wr[m:])
                        if len(new) <= best_len and new not in visited:
                            visited.add(new)
                            queue.append(new)
                            best_len = min(best_len, len(new))
    shortest = [w for w in visited if len(w) == best_len]
    return min(_min_rotation(w) for w in shortest)


def _min_rotation(w: tuple) -> tuple:
    if not w:
        return w
    return min(w[i:] + w[:i] for i in range(len(w)))


def enumerate_classes_by_words(spec: GroupSpec, L_max: float,
                               max_word_length: int = 12,
                               max_level_words: int = 12_000_000):
    """Breadth-first word enumeration with rewriting-based dedup.

    Independent of the orbit-ball strategy; walks freely reduced words by
    length (vectorized with parent pointers), keeps hyperbolic ones under
    the trace bound, and stops by the productive-level rule: once a full
    level adds no new class, two further empty levels are required before
    completeness is declared.
    """
    n = spec.n_generators
    bank = _relator_bank(spec)
    tr_bound = 2.0 * math.cosh(L_max / 2.0) * (1 + 1e-12)
    found = {}
    empty_levels = 0

    letters, _ = _letters_of(spec)          # index 2k = gen k+1, 2k+1 = inverse
    n_let = len(letters)

    def letter_to_signed(li):
        return (li // 2 + 1) * (1 if li % 2 == 0 else -1)

    inverse_of = np.array([li + 1 if li % 2 == 0 else li - 1 for li in range(n_let)])

    # per-level state: matrices (float32 carry), first letter, last letter,
    # parent index and extending letter for word reconstruction
    levels = []
    mats = letters.astype(np.float32)[None].repeat(1, axis=0)[0]
    first = np.arange(n_let, dtype=np.int8)
    last = np.arange(n_let, dtype=np.int8)
    parent = np.full(n_let, -1, dtype=np.int64)
    by_letter = np.arange(n_let, dtype=np.int8)
    levels.append((parent, by_letter))

    def reconstruct(level_idx, word_idx):
        out = []
        li = word_idx
        for lvl in range(level_idx, -1, -1):
            par, lett = levels[lvl]
            out.append(int(lett[li]))
            li = int(par[li])
        return tuple(letter_to_signed(x) for x in reversed(out))

    def harvest(level_idx, mats, first, last):
        tr = np.abs(mats[:, 0, 0] + mats[:, 1, 1]).astype(np.float64)
        keep = (tr > 2.0 + 1e-9) & (tr <= tr_bound) & \
               (first != inverse_of[last.astype(np.int64)].astype(np.int8))
        count = 0
        for wi in np.where(keep)[0]:
            word = reconstruct(level_idx, int(wi))
            m = spec.word_matrix(Word.from_letters(word))
            t = abs(m[0, 0] + m[1, 1])
            if t <= 2.0 + 1e-10 or t > tr_bound:
                continue
            canon = _dehn_canonical(word, bank)
            if canon not in found:
                found[canon] = 2.0 * math.acosh(t / 2.0)
                count += 1
        return count

    new = harvest(0, mats, first, last)
    empty_levels = 0 if new else 1

    for level_idx in range(1, max_word_length):
        n_par = len(mats)
        if n_par * n_let > max_level_words:
            raise EnumerationBudgetError("word level budget exceeded",
                                         complete_up_to=0.0)
        child = np.einsum("nij,ljk->nlik", mats.astype(np.float64),
                          letters).astype(np.float32).reshape(-1, 2, 2)
        c_parent = np.repeat(np.arange(n_par, dtype=np.int64), n_let)
        c_letter = np.tile(np.arange(n_let, dtype=np.int8), n_par)
        reduced = c_letter != inverse_of[last.astype(np.int64)].repeat(n_let).astype(np.int8)
        child = child[reduced]
        c_parent = c_parent[reduced]
        c_letter = c_letter[reduced]
        c_first = first[c_parent]
        levels.append((c_parent, c_letter))
        mats, first, last = child, c_first, c_letter
        new = harvest(level_idx, mats, first, last)
        empty_levels = 0 if new else empty_levels + 1
        if empty_levels >= 3:
            break

    out = []
    for canon, ell in sorted(found.items(), key=lambda kv: (kv[1], kv[0])):
        word = Word(canon)
        prim, power = primitive_decomposition(word)
        out.append(ConjugacyClass(
            canonical_word=word,
            representative=Isometry.from_matrix(spec.word_matrix(word)),
            length=ell, primitive_word=prim, power=power))
    return out
