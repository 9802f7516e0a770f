"""Minimal free resolution of F2 over the Steenrod algebra.

Stage ``s`` is a free module ``F_s``; a generator of ``F_s`` in internal
degree ``t`` is one basis element of Ext^{s,t}(F2, F2).  Cells ``(s, t)`` are
filled in order of increasing ``t`` and then ``s``.  At each cell the new
generators span a complement of ``im d_s`` inside ``ker d_{s-1}``.

Vectors of ``(F_s)_t`` use the basis ``(generator, Milnor monomial)`` ordered
by generator, then monomial.
"""

from __future__ import annotations

import io
import logging
import os
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional

import numpy as np

from . import steenrod
from .f2linalg import F2Matrix, RowBasis, left_kernel_and_image, pack_bits, rank, row_basis, solve, unpack_bits
from .steenrod import MilnorElement, Monomial

log = logging.getLogger(__name__)

ModuleElement = dict  # generator index -> MilnorElement


class ExtRangeError(IndexError):
    """Query outside the computed window."""


class ResolutionBudgetExceeded(RuntimeError):
    def __init__(self, frontier: tuple[int, int], reason: str = "time budget"):
        super().__init__(f"{reason} exceeded at frontier (s, t) = {frontier}")
        self.frontier = frontier


@dataclass
class FreeModule:
    """Free A-module; ``degrees[i]`` is the internal degree of generator i."""

    degrees: list[int] = field(default_factory=list)
    _basis: dict = field(default_factory=dict, repr=False)

    def add_generator(self, t: int) -> int:
        if self.degrees and t < self.degrees[-1]:
            raise ValueError("generators must be added in increasing degree")
        self.degrees.append(t)
        self._basis.pop(t, None)
        return len(self.degrees) - 1

    def gens_in_degree(self, t: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == t]

    def basis(self, t: int) -> tuple[list[tuple[int, Monomial]], dict]:
        """Basis of the degree-t part and its index map (cached)."""
        hit = self._basis.get(t)
        if hit is not None and hit[2] == len(self.degrees):
            return hit[0], hit[1]
        elems = []
        for g, d in enumerate(self.degrees):
            if d > t:
                break
            for r in steenrod.basis_in_degree(t - d):
                elems.append((g, r))
        index = {e: k for k, e in enumerate(elems)}
        self._basis[t] = (elems, index, len(self.degrees))
        return elems, index

    def dim(self, t: int) -> int:
        return len(self.basis(t)[0])

    def to_vector(self, elt: Mapping[int, MilnorElement], t: int) -> np.ndarray:
        _, index = self.basis(t)
        v = np.zeros(len(index), dtype=np.uint8)
        for g, a in elt.items():
            for r in a.terms:
                v[index[(g, r)]] ^= 1
        return v

    def from_vector(self, v: Iterable[int], t: int) -> ModuleElement:
        elems, _ = self.basis(t)
        out: dict[int, set] = {}
        for k in np.flatnonzero(np.asarray(v)):
            g, r = elems[k]
            out.setdefault(g, set()).add(r)
        return {g: MilnorElement(rs) for g, rs in sorted(out.items())}


def act(a: MilnorElement, elt: Mapping[int, MilnorElement]) -> ModuleElement:
    """Left action of a Steenrod element on a free-module element."""
    out: dict[int, MilnorElement] = {}
    for g, b in elt.items():
        p = a * b
        if p:
            out[g] = out[g] + p if g in out else p
    return {g: e for g, e in out.items() if e}


def add_elements(x: Mapping[int, MilnorElement], y: Mapping[int, MilnorElement]) -> ModuleElement:
    out = dict(x)
    for g, b in y.items():
        out[g] = out[g] + b if g in out else b
    return {g: e for g, e in out.items() if e}


class Resolution:
    """Minimal resolution of F2, extended on demand."""

    def __init__(self):
        self.modules: list[FreeModule] = []
        self.diffs: list[list[ModuleElement]] = []  # diffs[s][g] in F_{s-1} (s >= 1)
        self.done: list[int] = []  # done[s] = largest t with cell (s, t) computed
        self._kernels: dict[tuple[int, int], RowBasis] = {}
        self._matrices: dict[tuple[int, int], F2Matrix] = {}
        self.check = True

    # -- bookkeeping ------------------------------------------------------
    @property
    def s_max(self) -> int:
        return len(self.modules) - 1

    def computed(self, s: int, t: int) -> bool:
        return 0 <= s < len(self.done) and t <= self.done[s]

    def _ensure_stage(self, s: int) -> None:
        while len(self.modules) <= s:
            self.modules.append(FreeModule())
            self.diffs.append([])
            self.done.append(-1)

    def ngens(self, s: int, t: int) -> int:
        if not self.computed(s, t):
            raise ExtRangeError(f"cell (s={s}, t={t}) not computed")
        return len(self.modules[s].gens_in_degree(t)) if t >= 0 else 0

    def generator(self, s: int, t: int, i: int) -> int:
        """Global index in F_s of the i-th generator of degree t."""
        gens = self.modules[s].gens_in_degree(t)
        if not (0 <= i < len(gens)):
            raise ExtRangeError(f"no generator x_{{{s},{t},{i}}}")
        return gens[i]

    def differential(self, s: int, g: int) -> ModuleElement:
        return self.diffs[s][g]

    # -- the core ---------------------------------------------------------
    def matrix(self, s: int, t: int) -> F2Matrix:
        """Matrix of d_s on (F_s)_t, rows = source basis, for s >= 1."""
        key = (s, t)
        m = self._matrices.get(key)
        if m is not None and m.rows == self.modules[s].dim(t):
            return m
        src, _ = self.modules[s].basis(t)
        tgt = self.modules[s - 1]
        _, tindex = tgt.basis(t)
        dense = np.zeros((len(src), len(tindex)), dtype=np.uint8)
        for k, (g, r) in enumerate(src):
            for h, a in self.diffs[s][g].items():
                for term in a.terms:
                    for out in steenrod.milnor_product_terms(r, term):
                        dense[k, tindex[(h, out)]] ^= 1
        m = F2Matrix.from_dense(dense) if len(src) else F2Matrix.zeros(0, len(tindex))
        self._matrices[key] = m
        return m

    def _cell(self, s: int, t: int) -> None:
        self._ensure_stage(s)
        mod = self.modules[s]
        if s == 0:
            if t == 0:
                mod.add_generator(0)
                self._kernels[(0, 0)] = RowBasis(1, F2Matrix.zeros(0, 1))
            else:
                n = mod.dim(t)
                self._kernels[(0, t)] = RowBasis(n, F2Matrix.identity(n))
            self.done[0] = t
            return
        if (s - 1, t) not in self._kernels:
            raise RuntimeError(f"kernel at ({s - 1}, {t}) missing")
        target_kernel = self._kernels.pop((s - 1, t))
        m = self.matrix(s, t)
        kern, image = left_kernel_and_image(m)
        # complement of the image inside ker d_{s-1}
        reduced = image.vectors.to_dense().copy()
        pivots = [int(np.flatnonzero(row)[0]) for row in reduced]
        new_vectors = []
        for v in target_kernel:
            v = v.copy()
            for row, p in zip(reduced, pivots):
                if v[p]:
                    v ^= row
            nz = np.flatnonzero(v)
            if nz.size == 0:
                continue
            p = int(nz[0])
            for k in range(len(reduced)):
                if reduced[k][p]:
                    reduced[k] ^= v
            reduced = np.vstack([reduced, v]) if len(reduced) else v.reshape(1, -1)
            pivots.append(p)
            new_vectors.append(v)
        tgt = self.modules[s - 1]
        for v in new_vectors:
            elt = tgt.from_vector(v, t)
            if self.check:
                for h, a in elt.items():
                    if () in a.terms:
                        raise AssertionError(f"non-minimal differential at ({s}, {t})")
            mod.add_generator(t)
            self.diffs[s].append(elt)
        n_old = m.rows
        n_new = len(new_vectors)
        if n_new:
            full = m.vstack(F2Matrix.from_dense(np.array(new_vectors, dtype=np.uint8)))
            self._matrices[(s, t)] = full
        else:
            full = m
        kdense = kern.vectors.to_dense()
        padded = np.zeros((kdense.shape[0], n_old + n_new), dtype=np.uint8)
        padded[:, :n_old] = kdense
        self._kernels[(s, t)] = RowBasis(n_old + n_new, F2Matrix.from_dense(padded) if len(padded) else F2Matrix.zeros(0, n_old + n_new))
        if self.check and s >= 2:
            if not (full @ self.matrix(s - 1, t)).is_zero():
                raise AssertionError(f"d∘d ≠ 0 at ({s}, {t})")
        self.done[s] = t

    def extend(
        self,
        s_max: int,
        t_max: int,
        budget_seconds: Optional[float] = None,
        cache_path: Optional[os.PathLike] = None,
        workers: int = 1,
    ) -> "Resolution":
        """Compute every cell with s <= s_max and t <= t_max.

        ``workers`` is accepted for interface compatibility; cells are filled
        sequentially by the coordinator.
        """
        if s_max < 0 or t_max < 0:
            raise ValueError("s_max and t_max must be non-negative")
        start = time.monotonic()
        self._ensure_stage(s_max)
        for t in range(0, t_max + 1):
            touched = False
            for s in range(0, s_max + 1):
                if self.computed(s, t):
                    continue
                if t > 0 and not self.computed(s, t - 1):
                    # earlier column for a freshly added stage
                    self._extend_stage_to(s, t - 1)
                if budget_seconds is not None and time.monotonic() - start > budget_seconds:
                    if cache_path is not None:
                        save_cache(self, cache_path)  # checkpoint the partial columns
                    raise ResolutionBudgetExceeded((s, t))
                if s > 0 and (s - 1, t) not in self._kernels:
                    self._rebuild_kernel(s - 1, t)
                self._cell(s, t)
                touched = True
            if touched:
                log.debug("finished column t=%d", t)
                if cache_path is not None:
                    save_cache(self, cache_path)
        return self

    def _extend_stage_to(self, s: int, t_last: int) -> None:
        for t in range(self.done[s] + 1, t_last + 1):
            if s > 0 and (s - 1, t) not in self._kernels:
                self._rebuild_kernel(s - 1, t)
            self._cell(s, t)

    def _rebuild_kernel(self, s: int, t: int) -> None:
        if s == 0:
            n = self.modules[0].dim(t)
            self._kernels[(0, t)] = RowBasis(n, F2Matrix.zeros(0, 1) if t == 0 else F2Matrix.identity(n))
            return
        kern, _ = left_kernel_and_image(self.matrix(s, t))
        self._kernels[(s, t)] = kern

    # -- Ext data -----------------------------------------------------------
    def dims(self, s_max: int, t_max: int) -> dict[tuple[int, int], int]:
        return {(s, t): self.ngens(s, t) for s in range(s_max + 1) for t in range(t_max + 1)}


def resolve(s_max: int, t_max: int, **kw) -> Resolution:
    return Resolution().extend(s_max, t_max, **kw)


# -- products ---------------------------------------------------------------

@dataclass(frozen=True)
class ExtElement:
    """An element of Ext^{s,t}: a GF(2) vector over the degree-t generators of F_s."""

    s: int
    t: int
    coeffs: tuple[int, ...]

    @property
    def stem(self) -> int:
        return self.t - self.s

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "ExtElement") -> "ExtElement":
        if (self.s, self.t) != (other.s, other.t):
            raise ValueError("adding Ext elements of different bidegrees")
        return ExtElement(self.s, self.t, tuple(a ^ b for a, b in zip(self.coeffs, other.coeffs)))


def ext_basis_element(res: Resolution, s: int, t: int, i: int) -> ExtElement:
    n = res.ngens(s, t)
    if not 0 <= i < n:
        raise ExtRangeError(f"x_{{{s},{t},{i}}} does not exist (dim {n})")
    return ExtElement(s, t, tuple(int(k == i) for k in range(n)))


class ChainMapLift:
    """Lift of a cocycle F_{s0} -> F2 (degree t0) to a chain map F_{s0+k} -> F_k."""

    def __init__(self, res: Resolution, x: ExtElement):
        self.res = res
        self.x = x
        self._memo: dict[tuple[int, int], ModuleElement] = {}
        self._gens = res.modules[x.s].gens_in_degree(x.t)

    def __call__(self, k: int, z: int) -> ModuleElement:
        """Image of generator z of F_{s0+k} in F_k."""
        key = (k, z)
        if key in self._memo:
            return self._memo[key]
        res, x = self.res, self.x
        src = x.s + k
        u = res.modules[src].degrees[z]
        if k == 0:
            out: ModuleElement = {}
            if u == x.t:
                j = self._gens.index(z)
                if x.coeffs[j]:
                    out = {0: MilnorElement.unit()}
        else:
            rhs: ModuleElement = {}
            for h, a in res.diffs[src][z].items():
                rhs = add_elements(rhs, act(a, self(k - 1, h)))
            deg = u - x.t
            if not res.computed(k, deg):
                raise ExtRangeError(f"lift needs cell (s={k}, t={deg})")
            target_mod = res.modules[k - 1]
            b = target_mod.to_vector(rhs, deg)
            m = res.matrix(k, deg) if k >= 1 else None
            if m.rows == 0:
                if b.any():
                    raise AssertionError("chain map lift failed: nothing maps onto the boundary")
                out = {}
            else:
                sol = solve(m.transpose(), b)
                if sol is None:
                    raise AssertionError(f"chain map lift failed at k={k}, z={z}")
                out = res.modules[k].from_vector(sol, deg)
        self._memo[key] = out
        return out


def lift_product(res: Resolution, x: ExtElement, y: ExtElement) -> ExtElement:
    """Yoneda product x·y in Ext^{s_x+s_y, t_x+t_y}."""
    s, t = x.s + y.s, x.t + y.t
    if not res.computed(s, t):
        raise ExtRangeError(f"product lands in uncomputed cell (s={s}, t={t})")
    lift = ChainMapLift(res, x)
    ygens = res.modules[y.s].gens_in_degree(y.t)
    out = []
    for z in res.modules[s].gens_in_degree(t):
        img = lift(y.s, z)
        c = 0
        for j, g in enumerate(ygens):
            if y.coeffs[j] and g in img and () in img[g].terms:
                c ^= 1
        out.append(c)
    return ExtElement(s, t, tuple(out))


# -- named classes ------------------------------------------------------------

def default_name(s: int, t: int, i: int) -> str:
    return f"x_{s}_{t}_{i}"


def hi(res: Resolution, i: int) -> ExtElement:
    """The class h_i in Ext^{1, 2^i}."""
    return ext_basis_element(res, 1, 1 << i, 0)


# -- file formats -------------------------------------------------------------

@dataclass
class ExtChartData:
    max_s: int
    max_t: int
    dims: dict[tuple[int, int], int]
    names: dict[tuple[int, int, int], str]

    def name(self, s: int, t: int, i: int) -> str:
        return self.names.get((s, t, i), default_name(s, t, i))


@dataclass
class ProductTable:
    entries: dict[tuple[str, str], list[str]]


def ext_dim(data: ExtChartData, s: int, t: int) -> int:
    if not (0 <= s <= data.max_s and 0 <= t <= data.max_t):
        raise ExtRangeError(f"(s={s}, t={t}) outside window s<={data.max_s}, t<={data.max_t}")
    return data.dims.get((s, t), 0)


def chart_data(res: Resolution, max_s: int, max_t: int, aliases: Optional[Mapping] = None) -> ExtChartData:
    aliases = dict(aliases or {})
    dims = {}
    names = {}
    for s in range(max_s + 1):
        for t in range(max_t + 1):
            n = res.ngens(s, t)
            dims[(s, t)] = n
            for i in range(n):
                names[(s, t, i)] = aliases.get((s, t, i), default_name(s, t, i))
    return ExtChartData(max_s, max_t, dims, names)


def product_table(res: Resolution, data: ExtChartData, pairs: Iterable[tuple[tuple[int, int, int], tuple[int, int, int]]]) -> ProductTable:
    entries = {}
    for a, b in pairs:
        p = lift_product(res, ext_basis_element(res, *a), ext_basis_element(res, *b))
        terms = [data.name(p.s, p.t, i) for i, c in enumerate(p.coeffs) if c]
        entries[(data.name(*a), data.name(*b))] = terms
    return ProductTable(entries)


def format_chart_data(data: ExtChartData) -> str:
    out = io.StringIO()
    out.write("# Ext^{s,t}(F2,F2) over the mod-2 Steenrod algebra\n")
    out.write(f"window {data.max_s} {data.max_t}\n")
    for (s, t), d in sorted(data.dims.items()):
        out.write(f"dim {s} {t} {d}\n")
    for (s, t, i), name in sorted(data.names.items()):
        out.write(f"name {s} {t} {i} {name}\n")
    return out.getvalue()


def parse_chart_data(text: str) -> ExtChartData:
    max_s = max_t = -1
    dims: dict = {}
    names: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "window":
                max_s, max_t = int(parts[1]), int(parts[2])
            elif parts[0] == "dim":
                dims[(int(parts[1]), int(parts[2]))] = int(parts[3])
            elif parts[0] == "name":
                names[(int(parts[1]), int(parts[2]), int(parts[3]))] = parts[4]
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
        except (IndexError, ValueError) as e:
            raise ValueError(f"line {lineno}: {e}") from None
    return ExtChartData(max_s, max_t, dims, names)


def format_product_table(table: ProductTable) -> str:
    lines = []
    for (a, b), terms in sorted(table.entries.items()):
        rhs = "+".join(terms) if terms else "0"
        lines.append(f"prod {a} {b} = {rhs}\n")
    return "".join(lines)


def parse_product_table(text: str) -> ProductTable:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 5 or parts[0] != "prod" or parts[3] != "=":
            raise ValueError(f"line {lineno}: expected 'prod A B = C+D|0'")
        entries[(parts[1], parts[2])] = [] if parts[4] == "0" else parts[4].split("+")
    return ProductTable(entries)


def export_chart_data(res: Resolution, max_s: int, max_t: int, directory: os.PathLike,
                      aliases: Optional[Mapping] = None, pairs=None) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    data = chart_data(res, max_s, max_t, aliases)
    if pairs is None:
        pairs = filtration_one_pairs(res, data)
    table = product_table(res, data, pairs)
    ext_path = directory / "ext.chart"
    prod_path = directory / "products.txt"
    ext_path.write_text(format_chart_data(data))
    prod_path.write_text(format_product_table(table))
    return ext_path, prod_path


def filtration_one_pairs(res: Resolution, data: ExtChartData):
    """(h_i, x) pairs for h_0, h_1, h_2 against every class whose product stays in the window."""
    pairs = []
    for i in range(3):
        if 1 << i > data.max_t or data.dims.get((1, 1 << i), 0) == 0:
            continue
        for (s, t), d in sorted(data.dims.items()):
            if s + 1 <= data.max_s and t + (1 << i) <= data.max_t:
                pairs.extend(((1, 1 << i, 0), (s, t, k)) for k in range(d))
    return pairs


# -- resumable cache ----------------------------------------------------------
#
# Layout (little-endian):
#   8s   magic b"ADSYNRES"
#   H    format version (1)
#   H    reserved (0)
#   I    number of stages S
#   S x [ i done_t, I ngens, ngens x [ I degree, I nbits, ceil(nbits/64) x Q packed row ] ]
# Each packed row is the differential of one generator as a vector of
# (F_{s-1})_{degree}; stage 0 rows are empty.

CACHE_MAGIC = b"ADSYNRES"
CACHE_VERSION = 1


def save_cache(res: Resolution, path: os.PathLike) -> None:
    buf = io.BytesIO()
    buf.write(struct.pack("<8sHHI", CACHE_MAGIC, CACHE_VERSION, 0, len(res.modules)))
    for s, mod in enumerate(res.modules):
        buf.write(struct.pack("<iI", res.done[s], len(mod.degrees)))
        for g, t in enumerate(mod.degrees):
            if s == 0:
                buf.write(struct.pack("<II", t, 0))
                continue
            v = res.modules[s - 1].to_vector(res.diffs[s][g], t)
            words = pack_bits(v.reshape(1, -1))[0] if len(v) else np.zeros(0, dtype=np.uint64)
            buf.write(struct.pack("<II", t, len(v)))
            buf.write(words.astype("<u8").tobytes())
    tmp = Path(str(path) + ".tmp")
    tmp.write_bytes(buf.getvalue())
    os.replace(tmp, path)


def load_cache(path: os.PathLike) -> Resolution:
    data = Path(path).read_bytes()
    magic, version, _, nstages = struct.unpack_from("<8sHHI", data, 0)
    if magic != CACHE_MAGIC:
        raise ValueError(f"{path}: not a resolution cache")
    if version != CACHE_VERSION:
        raise ValueError(f"{path}: unsupported cache version {version}")
    off = struct.calcsize("<8sHHI")
    res = Resolution()
    for s in range(nstages):
        res._ensure_stage(s)
        done, ngens = struct.unpack_from("<iI", data, off)
        off += 8
        for _ in range(ngens):
            t, nbits = struct.unpack_from("<II", data, off)
            off += 8
            res.modules[s].add_generator(t)
            if s == 0:
                continue
            nw = (nbits + 63) // 64 if nbits else 0
            words = np.frombuffer(data, dtype="<u8", count=nw, offset=off).reshape(1, -1)
            off += 8 * nw
            v = unpack_bits(words, nbits)[0] if nbits else np.zeros(0, dtype=np.uint8)
            res.diffs[s].append(res.modules[s - 1].from_vector(v, t))
        res.done[s] = done
    return res


def default_cache_dir() -> Path:
    return Path(os.environ.get("ADAMSYNTH_CACHE", Path.home() / ".cache" / "adamsynth"))
