# cython: language_level=3, embedsignature=True
"""Decision-diagram kernel: complex-number interning, DD nodes, and operations.

This module is written in Cython's pure-Python mode.  The build compiles it
into the extension module ``qdd._ckernel``; the very same file also runs
interpreted as ``qdd._kernel`` and serves as the fallback when no compiler is
available.  ``qdd._backend`` picks one of the two at import time.

Design in brief:

* Real numbers appearing as parts of edge weights are interned into a
  bucketed lookup table over [0, 1].  Two values closer than the configured
  tolerance ``epsilon`` share one entry, which makes weight comparison an
  integer comparison and keeps structurally equal nodes identical.
* A handle to an interned number is a tagged integer: bit 0 carries the
  sign, the remaining bits index the entry arena.  Negation, conjugation and
  multiplication by +/-i therefore reduce to bit flips and swaps.
* Intermediate results of weight arithmetic never touch the lookup table.
  They live in a fixed-size cache (sized ``cache_k * (n_max + 1)`` complex
  values) and are interned only when a freshly normalized node is stored.
* Nodes are normalized by dividing all outgoing weights by the weight of
  largest magnitude (leftmost on ties), which keeps every stored weight
  inside the unit square and gives a strongly canonical representation.
* Unique tables (bucket chains per variable), reference-counting garbage
  collection with free lists, and fixed-size compute tables follow the
  classical DD-package playbook.
"""

import cython

from qdd.errors import CacheExhaustedError, ContractViolationError

COMPILED = cython.compiled
KERNEL_KIND = "compiled" if COMPILED else "pure"

DEFAULT_EPSILON = 1e-13
DEFAULT_BUCKETS = 1 << 16
DEFAULT_GC_THRESHOLD = 1 << 17
DEFAULT_CACHE_K = 16
DEFAULT_NODE_BUCKETS = 1 << 15
DEFAULT_COMPUTE_SLOTS = 1 << 20

_ENTRY_BLOCK = 2048
_NODE_BLOCK = 2048
_REF_SAT = (1 << 31) - 1
_TERMINAL_VAR = 1 << 30

# compute-table kinds
_CT_MM = "matmul"
_CT_MV = "matvec"
_CT_ADD4 = "add_mat"
_CT_ADD2 = "add_vec"
_CT_KRON = "kron"
_CT_CONJT = "conj_transpose"


def _pow2_at_least(n):
    p = 1
    while p < n:
        p <<= 1
    return p


@cython.cclass
class Node:
    """A DD node: variable index, flat child array, refcount, chain link.

    ``ch`` holds ``arity`` triples ``[child_node, weight_re, weight_im]``
    flattened into one list (arity 4 for matrix nodes, 2 for vector nodes).
    Weight handles of stored nodes are always table-resident.
    """

    var = cython.declare(cython.long, visibility="public")
    ref = cython.declare(cython.long, visibility="public")
    nid = cython.declare(cython.longlong, visibility="public")
    ch = cython.declare(object, visibility="public")
    nxt = cython.declare(object, visibility="public")

    def __init__(self):
        self.var = -1
        self.ref = 0
        self.nid = 0
        self.ch = None
        self.nxt = None

    @property
    def arity(self):
        return 0 if self.ch is None else len(self.ch) // 3

    def __repr__(self):
        if self.var == _TERMINAL_VAR:
            return "<terminal>"
        return f"<Node q{self.var} #{self.nid} ref={self.ref}>"


@cython.cclass
class Edge:
    """An edge: target node plus a complex weight given as two handles.

    Edges compare equal iff they reference the identical node and the
    identical weight handles; for canonical (table-resident) weights this is
    exactly the strong-canonical-form identity check.
    """

    node = cython.declare(object, visibility="readonly")
    re = cython.declare(cython.longlong, visibility="readonly")
    im = cython.declare(cython.longlong, visibility="readonly")

    def __init__(self, node, re, im):
        self.node = node
        self.re = re
        self.im = im

    def __eq__(self, other):
        if not isinstance(other, Edge):
            return NotImplemented
        o = cython.cast(Edge, other)
        return self.node is o.node and self.re == o.re and self.im == o.im

    def __ne__(self, other):
        eq = self.__eq__(other)
        if eq is NotImplemented:
            return eq
        return not eq

    def __hash__(self):
        return hash((id(self.node), self.re, self.im))

    def __repr__(self):
        return f"Edge({self.node!r}, re=h{self.re}, im=h{self.im})"


@cython.cclass
class ComplexTable:
    """Interning table for the real parts of edge weights, plus the cache.

    Table entries store nonnegative values in [0, 1]; the sign lives in the
    handle (bit 0).  The cache occupies the low indices of the same entry
    arena so cached and interned numbers can be used interchangeably in
    arithmetic; cache slots may hold signed values and values of magnitude
    above 1.
    """

    eps = cython.declare(cython.double, visibility="readonly")
    nbuckets = cython.declare(cython.long, visibility="readonly")
    linear_scan = cython.declare(cython.bint, visibility="readonly")

    # entry arena (parallel arrays); indices below _cache_slots are cache
    _vals = cython.declare(list, visibility="readonly")
    _refs = cython.declare(list, visibility="readonly")
    _nxt = cython.declare(list, visibility="readonly")
    _buckets = cython.declare(list, visibility="readonly")
    _order = cython.declare(list, visibility="readonly")

    _cache_slots = cython.declare(cython.longlong, visibility="readonly")
    _cache_free = cython.declare(cython.longlong)
    _free = cython.declare(cython.longlong)

    ZERO = cython.declare(cython.longlong, visibility="readonly")
    ONE = cython.declare(cython.longlong, visibility="readonly")

    # statistics
    lookups = cython.declare(cython.longlong, visibility="readonly")
    hits = cython.declare(cython.longlong, visibility="readonly")
    neighbor_scans = cython.declare(cython.longlong, visibility="readonly")
    entries_live = cython.declare(cython.longlong, visibility="readonly")
    entries_peak = cython.declare(cython.longlong, visibility="readonly")
    cache_in_use = cython.declare(cython.longlong, visibility="readonly")
    cache_peak = cython.declare(cython.longlong, visibility="readonly")
    cache_allocs = cython.declare(cython.longlong, visibility="readonly")
    cache_releases = cython.declare(cython.longlong, visibility="readonly")

    def __init__(self, epsilon, buckets, n_max, cache_k, linear_scan=False):
        if not epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        buckets = int(buckets)
        if buckets < 2:
            raise ValueError("bucket count must be at least 2")
        if buckets * 2.0 * epsilon >= 1.0:
            raise ValueError(
                f"buckets * 2 * epsilon must stay below 1 "
                f"(got {buckets} * 2 * {epsilon!r}); shrink one of them"
            )
        if cache_k < 1:
            raise ValueError("cache_k must be at least 1")
        self.eps = epsilon
        self.nbuckets = buckets
        self.linear_scan = bool(linear_scan)

        nslots = 2 * int(cache_k) * (int(n_max) + 1)
        self._cache_slots = nslots
        self._vals = [0.0] * (nslots + 2)
        self._refs = [0] * (nslots + 2)
        self._nxt = [0] * (nslots + 2)
        for i in range(nslots):
            self._nxt[i] = i + 1
        if nslots:
            self._nxt[nslots - 1] = -1
        self._cache_free = 0 if nslots else -1

        # canonical constants: immortal, pre-linked into their buckets
        zi = nslots
        oi = nslots + 1
        self._vals[zi] = 0.0
        self._vals[oi] = 1.0
        self._refs[zi] = _REF_SAT
        self._refs[oi] = _REF_SAT
        self._nxt[zi] = -1
        self._nxt[oi] = -1
        self.ZERO = zi << 1
        self.ONE = oi << 1
        self._buckets = [-1] * buckets
        self._buckets[0] = zi
        self._buckets[buckets - 1] = oi
        self._order = [zi, oi]
        self._free = -1

        self.lookups = 0
        self.hits = 0
        self.neighbor_scans = 0
        self.entries_live = 2
        self.entries_peak = 2
        self.cache_in_use = 0
        self.cache_peak = 0
        self.cache_allocs = 0
        self.cache_releases = 0

    # -- handle helpers ---------------------------------------------------

    def value(self, h):
        """Signed numeric value of a handle."""
        v = self._vals[h >> 1]
        return -v if h & 1 else v

    def is_cache(self, h):
        return (h >> 1) < self._cache_slots

    def flip_sign(self, h):
        """Negated handle; the zero value keeps its positive tag."""
        if self._vals[h >> 1] == 0.0:
            return h
        return h ^ 1

    # -- real-number lookup -----------------------------------------------

    def lookup_real(self, r):
        """Intern a signed real with |r| <= 1 + eps and return its handle.

        Matches an existing entry within ``eps`` (checking the target bucket
        first, then the single neighbor bucket a match could have spilled
        into), inserting the magnitude as a new entry otherwise.  Values
        within ``eps`` of 0 or 1 resolve to the canonical constants.

        In linear-scan baseline mode the range precondition is waived (the
        naive array stores whatever values occur, including magnitudes above
        1) and every lookup traverses the whole array.
        """
        eps = self.eps
        if self.linear_scan:
            if not (r - r == 0.0):  # rejects NaN and infinities
                raise ContractViolationError(f"non-finite value interned: {r!r}")
        elif not (r <= 1.0 + eps and r >= -1.0 - eps):  # also rejects NaN
            raise ContractViolationError(
                f"real value out of interning range [-1-eps, 1+eps]: {r!r}"
            )
        self.lookups += 1
        a = -r if r < 0.0 else r
        if a <= eps:
            self.hits += 1
            return self.ZERO
        if 1.0 - eps <= a <= 1.0 + eps:
            self.hits += 1
            base = self.ONE
        else:
            base = self._find_or_insert(a)
        return base | 1 if r < 0.0 else base

    def _find_or_insert(self, a):
        # bucketed mode: a is in (eps, 1 - eps); linear mode: any magnitude
        vals = self._vals
        nxt = self._nxt
        eps = self.eps
        if self.linear_scan:
            for idx in self._order:
                if -eps <= vals[idx] - a <= eps:
                    self.hits += 1
                    return idx << 1
            return self._insert(a, -1) << 1

        nb = self.nbuckets
        b = int(a * nb)
        if b >= nb:
            b = nb - 1
        idx = self._buckets[b]
        while idx >= 0:
            if -eps <= vals[idx] - a <= eps:
                self.hits += 1
                return idx << 1
            idx = nxt[idx]
        # a +/- eps may cross into exactly one adjacent bucket
        nbr = -1
        if b > 0 and (a - eps) * nb < b:
            nbr = b - 1
        elif b + 1 < nb and (a + eps) * nb >= b + 1:
            nbr = b + 1
        if nbr >= 0:
            self.neighbor_scans += 1
            idx = self._buckets[nbr]
            while idx >= 0:
                if -eps <= vals[idx] - a <= eps:
                    self.hits += 1
                    return idx << 1
                idx = nxt[idx]
        return self._insert(a, b) << 1

    def _insert(self, a, b):
        idx = self._free
        if idx < 0:
            base = len(self._vals)
            self._vals.extend([0.0] * _ENTRY_BLOCK)
            self._refs.extend([0] * _ENTRY_BLOCK)
            self._nxt.extend([0] * _ENTRY_BLOCK)
            for i in range(base, base + _ENTRY_BLOCK - 1):
                self._nxt[i] = i + 1
            self._nxt[base + _ENTRY_BLOCK - 1] = -1
            self._free = base
            idx = base
        self._free = self._nxt[idx]
        self._vals[idx] = a
        self._refs[idx] = 0
        if b >= 0:
            self._nxt[idx] = self._buckets[b]
            self._buckets[b] = idx
        else:
            self._nxt[idx] = -1
        self._order.append(idx)
        self.entries_live += 1
        if self.entries_live > self.entries_peak:
            self.entries_peak = self.entries_live
        return idx

    def lookup_complex(self, re, im):
        """Intern both parts of a complex value; returns a handle pair."""
        return (self.lookup_real(re), self.lookup_real(im))

    # -- sign-tag transforms (no arithmetic, no lookups) --------------------

    def negated(self, cv):
        re, im = cv
        return (self.flip_sign(re), self.flip_sign(im))

    def conjugated(self, cv):
        re, im = cv
        return (re, self.flip_sign(im))

    def times_i(self, cv):
        re, im = cv
        return (self.flip_sign(im), re)

    def times_minus_i(self, cv):
        re, im = cv
        return (im, self.flip_sign(re))

    # -- cache -------------------------------------------------------------

    def cache_cv(self, rv, iv):
        """Allocate one cached complex value holding (rv, iv) exactly."""
        i = self._cache_free
        if i < 0:
            raise CacheExhaustedError(
                "complex-value cache exhausted; an operation holds more "
                "intermediates than the configured capacity"
            )
        j = self._nxt[i]
        if j < 0:
            raise CacheExhaustedError(
                "complex-value cache exhausted; an operation holds more "
                "intermediates than the configured capacity"
            )
        self._cache_free = self._nxt[j]
        self._vals[i] = rv
        self._vals[j] = iv
        self.cache_in_use += 1
        self.cache_allocs += 1
        if self.cache_in_use > self.cache_peak:
            self.cache_peak = self.cache_in_use
        return (i << 1, j << 1)

    def release_cv(self, re, im):
        """Return a cached complex value's two slots to the pool."""
        i = re >> 1
        j = im >> 1
        self._nxt[j] = self._cache_free
        self._nxt[i] = j
        self._cache_free = i
        self.cache_in_use -= 1
        self.cache_releases += 1

    def release_if_cache(self, re, im):
        if (re >> 1) < self._cache_slots:
            self.release_cv(re, im)

    # -- arithmetic on handle pairs -----------------------------------------
    #
    # The internal *4 routines may return table handles when the result is
    # exactly a shared canonical value (multiplying by the constants 0 or 1);
    # otherwise the result is a fresh cache value.  They never alias a cached
    # operand, so callers can release operands and results independently.
    #
    # In linear-scan baseline mode every computed value is interned into the
    # array right away (the cache stays unused), reproducing the behavior of
    # a package without late insertion: the array accumulates all occurring
    # values and intermediate results are rounded at every step.

    def _result(self, rv, iv):
        if self.linear_scan:
            return (self.lookup_real(rv), self.lookup_real(iv))
        return self.cache_cv(rv, iv)

    def _mul4(self, are, aim, bre, bim):
        zero = self.ZERO
        one = self.ONE
        if are == zero and aim == zero:
            return (zero, zero)
        if bre == zero and bim == zero:
            return (zero, zero)
        cache_gate = self._cache_slots
        if are == one and aim == zero and (bre >> 1) >= cache_gate:
            return (bre, bim)
        if bre == one and bim == zero and (are >> 1) >= cache_gate:
            return (are, aim)
        ar = self.value(are)
        ai = self.value(aim)
        br = self.value(bre)
        bi = self.value(bim)
        return self.cache_cv(ar * br - ai * bi, ar * bi + ai * br)

    def _add4(self, are, aim, bre, bim):
        zero = self.ZERO
        cache_gate = self._cache_slots
        if are == zero and aim == zero and (bre >> 1) >= cache_gate:
            return (bre, bim)
        if bre == zero and bim == zero and (are >> 1) >= cache_gate:
            return (are, aim)
        return self.cache_cv(
            self.value(are) + self.value(bre), self.value(aim) + self.value(bim)
        )

    def _sub4(self, are, aim, bre, bim):
        return self.cache_cv(
            self.value(are) - self.value(bre), self.value(aim) - self.value(bim)
        )

    def _div4(self, are, aim, bre, bim):
        br = self.value(bre)
        bi = self.value(bim)
        d = br * br + bi * bi
        if d <= self.eps * self.eps:
            raise ZeroDivisionError("complex division by a (near-)zero value")
        ar = self.value(are)
        ai = self.value(aim)
        return self.cache_cv((ar * br + ai * bi) / d, (ai * br - ar * bi) / d)

    def _ensure_cache(self, cv):
        re, im = cv
        if (re >> 1) < self._cache_slots:
            return cv
        return self.cache_cv(self.value(re), self.value(im))

    def mul(self, a, b):
        """Cache-resident exact product of two complex values."""
        return self._ensure_cache(self._mul4(a[0], a[1], b[0], b[1]))

    def add(self, a, b):
        """Cache-resident exact sum; magnitudes above 1 are legal here."""
        return self._ensure_cache(self._add4(a[0], a[1], b[0], b[1]))

    def sub(self, a, b):
        return self._ensure_cache(self._sub4(a[0], a[1], b[0], b[1]))

    def div(self, a, b):
        return self._ensure_cache(self._div4(a[0], a[1], b[0], b[1]))

    def intern_cv(self, re, im):
        """Intern a (usually cached) value; releases its cache slots."""
        if (re >> 1) >= self._cache_slots:
            return (re, im)
        out = (self.lookup_real(self._vals[re >> 1]), self.lookup_real(self._vals[im >> 1]))
        self.release_cv(re, im)
        return out

    def intern(self, cv):
        """Intern a cache-resident value into the table (the only point at
        which intermediate results meet the tolerance)."""
        return self.intern_cv(cv[0], cv[1])

    def complex_value(self, cv):
        """Read a handle pair back as a Python complex."""
        return complex(self.value(cv[0]), self.value(cv[1]))

    # -- compute-table key rounding ------------------------------------------

    def grid_key(self, h):
        """Integer grid coordinate of a handle's value, with step 2*eps."""
        v = self.value(h) / (2.0 * self.eps)
        return int(v + 0.5) if v >= 0.0 else -int(0.5 - v)

    def round_for_key(self, cv):
        """Grid coordinates of a complex value, for hash keys only."""
        return (self.grid_key(cv[0]), self.grid_key(cv[1]))

    # -- reference counting and table GC --------------------------------------

    def incref(self, h):
        idx = h >> 1
        if idx < self._cache_slots:
            return
        r = self._refs[idx]
        if r < _REF_SAT:
            self._refs[idx] = r + 1

    def decref(self, h):
        idx = h >> 1
        if idx < self._cache_slots:
            return
        r = self._refs[idx]
        if r >= _REF_SAT:
            return
        if r == 0:
            raise ContractViolationError("real-entry refcount decremented below zero")
        self._refs[idx] = r - 1

    def refcount(self, h):
        return self._refs[h >> 1]

    def table_gc(self):
        """Unlink every dead entry (refcount 0) onto the free list.

        The canonical 0/1 entries are immortal.  Returns the number of
        entries collected.
        """
        refs = self._refs
        nxt = self._nxt
        collected = 0
        if self.linear_scan:
            keep = []
            for idx in self._order:
                if refs[idx] == 0:
                    nxt[idx] = self._free
                    self._free = idx
                    collected += 1
                else:
                    keep.append(idx)
            self._order = keep
        else:
            for b in range(self.nbuckets):
                idx = self._buckets[b]
                prev = -1
                while idx >= 0:
                    follow = nxt[idx]
                    if refs[idx] == 0:
                        if prev < 0:
                            self._buckets[b] = follow
                        else:
                            nxt[prev] = follow
                        nxt[idx] = self._free
                        self._free = idx
                        collected += 1
                    else:
                        prev = idx
                    idx = follow
        self.entries_live -= collected
        return collected

    # -- introspection ---------------------------------------------------------

    def live_values(self):
        """Values of all live entries (canonical constants included)."""
        if self.linear_scan:
            return [self._vals[idx] for idx in self._order]
        out = []
        for b in range(self.nbuckets):
            idx = self._buckets[b]
            while idx >= 0:
                out.append(self._vals[idx])
                idx = self._nxt[idx]
        return out

    def bucket_contents(self):
        """List of (bucket_index, value) pairs for every live entry."""
        out = []
        for b in range(self.nbuckets):
            idx = self._buckets[b]
            while idx >= 0:
                out.append((b, self._vals[idx]))
                idx = self._nxt[idx]
        return out

    def stats(self):
        return {
            "entries_live": self.entries_live,
            "entries_peak": self.entries_peak,
            "lookups": self.lookups,
            "hits": self.hits,
            "neighbor_scans": self.neighbor_scans,
            "cache_in_use": self.cache_in_use,
            "cache_peak": self.cache_peak,
            "cache_allocs": self.cache_allocs,
            "cache_releases": self.cache_releases,
            "cache_capacity": self._cache_slots // 2,
        }


@cython.cclass
class DDPackage:
    """One decision-diagram package instance.

    Holds every piece of mutable state: the complex-number table and cache,
    per-variable unique tables for matrix and vector nodes, node free list,
    and the operation compute tables.  Instances are single-threaded and
    fully independent of each other.
    """

    n_max = cython.declare(cython.long, visibility="readonly")
    gc_threshold = cython.declare(cython.longlong, visibility="readonly")
    node_buckets = cython.declare(cython.long, visibility="readonly")
    compute_slots = cython.declare(cython.longlong, visibility="readonly")
    compute_enabled = cython.declare(cython.bint, visibility="public")

    numbers = cython.declare(object, visibility="readonly")
    terminal = cython.declare(object, visibility="readonly")

    _um = cython.declare(list)      # per-var unique tables, matrix nodes
    _uv = cython.declare(list)      # per-var unique tables, vector nodes
    _node_free = cython.declare(object)
    _node_serial = cython.declare(cython.longlong)
    _ct = cython.declare(dict)

    nodes_live = cython.declare(cython.longlong, visibility="readonly")
    nodes_peak = cython.declare(cython.longlong, visibility="readonly")
    gc_runs = cython.declare(cython.longlong, visibility="readonly")
    gc_pending = cython.declare(cython.bint, visibility="readonly")
    inserts = cython.declare(cython.longlong, visibility="readonly")
    _inserts_since_gc = cython.declare(cython.longlong)
    ct_hits = cython.declare(cython.longlong, visibility="readonly")
    ct_misses = cython.declare(cython.longlong, visibility="readonly")

    def __init__(
        self,
        n_max,
        epsilon=DEFAULT_EPSILON,
        buckets=DEFAULT_BUCKETS,
        gc_threshold=DEFAULT_GC_THRESHOLD,
        cache_k=DEFAULT_CACHE_K,
        node_buckets=DEFAULT_NODE_BUCKETS,
        compute_slots=DEFAULT_COMPUTE_SLOTS,
        linear_scan_table=False,
    ):
        n_max = int(n_max)
        if n_max < 1:
            raise ValueError("n_max must be at least 1")
        if gc_threshold < 1:
            raise ValueError("gc_threshold must be at least 1")
        self.n_max = n_max
        self.gc_threshold = int(gc_threshold)
        self.node_buckets = _pow2_at_least(int(node_buckets))
        self.compute_slots = _pow2_at_least(int(compute_slots))
        self.compute_enabled = True
        self.numbers = ComplexTable(epsilon, buckets, n_max, cache_k, linear_scan_table)

        t = Node()
        t.var = _TERMINAL_VAR
        t.ref = _REF_SAT
        self.terminal = t

        self._um = [None] * n_max
        self._uv = [None] * n_max
        self._node_free = None
        self._node_serial = 0
        self._ct = {}

        self.nodes_live = 0
        self.nodes_peak = 0
        self.gc_runs = 0
        self.gc_pending = False
        self.inserts = 0
        self._inserts_since_gc = 0
        self.ct_hits = 0
        self.ct_misses = 0

    # -- edges ------------------------------------------------------------

    def zero_stub(self):
        """The all-zero block: a zero-weight edge to the terminal."""
        cn = cython.cast(ComplexTable, self.numbers)
        return Edge(self.terminal, cn.ZERO, cn.ZERO)

    def one_edge(self):
        """Weight-1 edge to the terminal (the 1x1 identity block)."""
        cn = cython.cast(ComplexTable, self.numbers)
        return Edge(self.terminal, cn.ONE, cn.ZERO)

    def is_stub(self, e):
        cn = cython.cast(ComplexTable, self.numbers)
        return e.re == cn.ZERO and e.im == cn.ZERO

    def weight_of(self, e):
        """The edge weight as a Python complex."""
        cn = cython.cast(ComplexTable, self.numbers)
        return complex(cn.value(e.re), cn.value(e.im))

    # -- node construction --------------------------------------------------

    def make_node(self, var, edges):
        """Normalize raw edges and store the node uniquely; returns the edge.

        ``edges`` is a sequence of 4 (matrix) or 2 (vector) Edge objects whose
        weights may be cache- or table-resident.  Ownership of cache-resident
        weights transfers to this call.  The returned edge carries the
        normalization factor: interned when both parts lie in [-1, 1],
        cache-resident (owned by the caller) otherwise.
        """
        arity = len(edges)
        if arity not in (2, 4):
            raise ContractViolationError(f"node arity must be 2 or 4, got {arity}")
        if not (0 <= var < self.n_max):
            raise ContractViolationError(f"variable index {var} out of range")
        flat = []
        for e in edges:
            flat.append(e.node)
            flat.append(e.re)
            flat.append(e.im)
        return self._make(var, flat, arity)

    def _make(self, var, flat, arity):
        # Normalization: divide by the leftmost weight of maximal squared
        # magnitude, intern the quotients, store the node uniquely.  Consumes
        # cache-resident input weights.
        cn = cython.cast(ComplexTable, self.numbers)
        eps = cn.eps
        zero = cn.ZERO
        one = cn.ONE

        best = -1
        best_m = -1.0
        all_small = True
        rvs = []
        ivs = []
        for i in range(arity):
            rv = cn.value(flat[3 * i + 1])
            iv = cn.value(flat[3 * i + 2])
            if not (rv - rv == 0.0 and iv - iv == 0.0):  # NaN/inf guard
                raise ContractViolationError(
                    f"non-finite weight ({rv!r}, {iv!r}) reached normalization"
                )
            rvs.append(rv)
            ivs.append(iv)
            if all_small and not (-eps <= rv <= eps and -eps <= iv <= eps):
                all_small = False
            m = rv * rv + iv * iv
            if m > best_m:
                best_m = m
                best = i

        if all_small:
            for i in range(arity):
                cn.release_if_cache(flat[3 * i + 1], flat[3 * i + 2])
            return Edge(self.terminal, zero, zero)

        f_re = flat[3 * best + 1]
        f_im = flat[3 * best + 2]
        for i in range(arity):
            base = 3 * i
            re_h = flat[base + 1]
            im_h = flat[base + 2]
            if i == best:
                flat[base + 1] = one
                flat[base + 2] = zero
                continue
            if re_h == zero and im_h == zero:
                flat[base] = self.terminal  # keep stubs canonical
                continue
            q = cn._div4(re_h, im_h, f_re, f_im)
            qre, qim = cn.intern_cv(q[0], q[1])
            if qre == zero and qim == zero:
                flat[base] = self.terminal
                flat[base + 1] = zero
                flat[base + 2] = zero
            else:
                flat[base + 1] = qre
                flat[base + 2] = qim
            cn.release_if_cache(re_h, im_h)

        node = self._unique(var, flat, arity)

        if cn.is_cache(f_re):
            sr = rvs[best]
            si = ivs[best]
            lim = 1.0 + eps
            if -lim <= sr <= lim and -lim <= si <= lim:
                f_re, f_im = cn.intern_cv(f_re, f_im)
        return Edge(node, f_re, f_im)

    def _unique(self, var, flat, arity):
        cn = cython.cast(ComplexTable, self.numbers)
        tables = self._um if arity == 4 else self._uv
        tbl = tables[var]
        if tbl is None:
            tbl = [None] * self.node_buckets
            tables[var] = tbl
        if arity == 4:
            key = (
                flat[0].nid, flat[1], flat[2],
                flat[3].nid, flat[4], flat[5],
                flat[6].nid, flat[7], flat[8],
                flat[9].nid, flat[10], flat[11],
            )
        else:
            key = (flat[0].nid, flat[1], flat[2], flat[3].nid, flat[4], flat[5])
        b = hash(key) & (self.node_buckets - 1)
        node = tbl[b]
        while node is not None:
            if node.ch == flat:
                return node
            node = node.nxt

        node = self._alloc_node()
        node.var = var
        node.ch = flat
        node.ref = 0
        self._node_serial += 1
        node.nid = self._node_serial
        node.nxt = tbl[b]
        tbl[b] = node
        for i in range(arity):
            cn.incref(flat[3 * i + 1])
            cn.incref(flat[3 * i + 2])
        self.nodes_live += 1
        if self.nodes_live > self.nodes_peak:
            self.nodes_peak = self.nodes_live
        self.inserts += 1
        self._inserts_since_gc += 1
        if self._inserts_since_gc > self.gc_threshold:
            self.gc_pending = True
        return node

    def _alloc_node(self):
        node = self._node_free
        if node is None:
            head = None
            for _ in range(_NODE_BLOCK):
                n = Node()
                n.nxt = head
                head = n
            node = head
        self._node_free = node.nxt
        node.nxt = None
        return node

    # -- reference counting ---------------------------------------------------

    def inc_ref(self, e):
        """Protect a root edge: its weight entries and, recursively, the
        nodes it reaches."""
        cn = cython.cast(ComplexTable, self.numbers)
        cn.incref(e.re)
        cn.incref(e.im)
        self._protect(e.node)

    def dec_ref(self, e):
        """Release a previously protected root edge."""
        cn = cython.cast(ComplexTable, self.numbers)
        cn.decref(e.re)
        cn.decref(e.im)
        self._unprotect(e.node)

    def _protect(self, node):
        if node.ref >= _REF_SAT:
            return
        node.ref += 1
        if node.ref == 1:
            ch = node.ch
            for i in range(0, len(ch), 3):
                child = ch[i]
                if child.var != _TERMINAL_VAR:
                    self._protect(child)

    def _unprotect(self, node):
        if node.ref >= _REF_SAT:
            return
        if node.ref == 0:
            raise ContractViolationError("node refcount decremented below zero")
        node.ref -= 1
        if node.ref == 0:
            ch = node.ch
            for i in range(0, len(ch), 3):
                child = ch[i]
                if child.var != _TERMINAL_VAR:
                    self._unprotect(child)

    # -- garbage collection ------------------------------------------------------

    def garbage_collect(self):
        """Sweep dead nodes, collect dead table entries, clear compute tables.

        Must only run between operations (no intermediates in flight).
        Returns (nodes_collected, reals_collected).
        """
        cn = cython.cast(ComplexTable, self.numbers)
        collected = 0
        for tables in (self._um, self._uv):
            for tbl in tables:
                if tbl is None:
                    continue
                for b in range(len(tbl)):
                    node = tbl[b]
                    prev = None
                    while node is not None:
                        follow = node.nxt
                        if node.ref == 0:
                            if prev is None:
                                tbl[b] = follow
                            else:
                                prev.nxt = follow
                            ch = node.ch
                            for i in range(0, len(ch), 3):
                                cn.decref(ch[i + 1])
                                cn.decref(ch[i + 2])
                            node.ch = None
                            node.nxt = self._node_free
                            self._node_free = node
                            collected += 1
                        else:
                            prev = node
                        node = follow
        self.nodes_live -= collected
        reals = cn.table_gc()
        self._ct.clear()
        self._inserts_since_gc = 0
        self.gc_pending = False
        self.gc_runs += 1
        return (collected, reals)

    # -- compute tables ---------------------------------------------------------

    def _ct_probe(self, kind, key):
        if not self.compute_enabled:
            return None
        tbl = self._ct.get(kind)
        if tbl is None:
            self.ct_misses += 1
            return None
        entry = tbl[hash(key) & (self.compute_slots - 1)]
        if entry is not None and entry[0] == key:
            self.ct_hits += 1
            return entry
        self.ct_misses += 1
        return None

    def _ct_store(self, kind, key, node, rv, iv):
        if not self.compute_enabled:
            return
        tbl = self._ct.get(kind)
        if tbl is None:
            tbl = [None] * self.compute_slots
            self._ct[kind] = tbl
        tbl[hash(key) & (self.compute_slots - 1)] = (key, node, rv, iv)

    def _ct_edge(self, entry):
        # Rebuild an owned edge from a stored (key, node, rv, iv) entry.
        cn = cython.cast(ComplexTable, self.numbers)
        node = entry[1]
        rv = entry[2]
        iv = entry[3]
        if node.var == _TERMINAL_VAR and rv == 0.0 and iv == 0.0:
            return Edge(node, cn.ZERO, cn.ZERO)
        w = cn.cache_cv(rv, iv)
        return Edge(node, w[0], w[1])

    # -- structural helpers ----------------------------------------------------

    def depth(self, e):
        """Number of variable levels below an edge (0 for a stub root)."""
        if self.is_stub(e):
            return 0
        cn = cython.cast(ComplexTable, self.numbers)
        zero = cn.ZERO
        node = e.node
        d = 0
        while node.var != _TERMINAL_VAR:
            d += 1
            ch = node.ch
            nxt_node = None
            for i in range(0, len(ch), 3):
                if not (ch[i + 1] == zero and ch[i + 2] == zero):
                    nxt_node = ch[i]
                    break
            node = nxt_node
        return d

    def dd_size(self, e):
        """Distinct non-terminal nodes reachable from an edge."""
        if self.is_stub(e):
            return 0
        seen = set()
        stack = [e.node]
        while stack:
            node = stack.pop()
            if node.var == _TERMINAL_VAR or node in seen:
                continue
            seen.add(node)
            ch = node.ch
            for i in range(0, len(ch), 3):
                stack.append(ch[i])
        return len(seen)

    def nodes_of(self, e):
        """All distinct non-terminal nodes reachable from an edge."""
        if self.is_stub(e):
            return []
        seen = set()
        stack = [e.node]
        while stack:
            node = stack.pop()
            if node.var == _TERMINAL_VAR or node in seen:
                continue
            seen.add(node)
            ch = node.ch
            for i in range(0, len(ch), 3):
                stack.append(ch[i])
        return list(seen)

    def unique_table_nodes(self):
        """Every node currently stored in the unique tables."""
        out = []
        for tables in (self._um, self._uv):
            for tbl in tables:
                if tbl is None:
                    continue
                for head in tbl:
                    node = head
                    while node is not None:
                        out.append(node)
                        node = node.nxt
        return out

    # -- builders ----------------------------------------------------------------

    def identity_dd(self, n):
        """The n-level identity chain."""
        self._check_n(n)
        cn = cython.cast(ComplexTable, self.numbers)
        t = self.terminal
        zero = cn.ZERO
        one = cn.ONE
        e = Edge(t, one, zero)
        for var in range(n - 1, -1, -1):
            e = self._make(
                var,
                [e.node, e.re, e.im, t, zero, zero, t, zero, zero, e.node, e.re, e.im],
                4,
            )
        return e

    def basis_dd(self, n, index=0):
        """Vector DD of the computational basis state with the given index."""
        self._check_n(n)
        if not (0 <= index < (1 << n)):
            raise ContractViolationError(f"basis index {index} out of range for n={n}")
        cn = cython.cast(ComplexTable, self.numbers)
        t = self.terminal
        zero = cn.ZERO
        e = Edge(t, cn.ONE, zero)
        for var in range(n - 1, -1, -1):
            bit = (index >> (n - 1 - var)) & 1
            flat = [t, zero, zero, t, zero, zero]
            flat[3 * bit] = e.node
            flat[3 * bit + 1] = e.re
            flat[3 * bit + 2] = e.im
            e = self._make(var, flat, 2)
        return e

    def gate_dd(self, u, target, controls, n):
        """DD of the full 2^n x 2^n operation applying the 2x2 matrix ``u``
        to ``target``, conditioned on every qubit in ``controls`` being 1.

        Built level by level: identity on uninvolved qubits; on control
        levels the 0-branch keeps the identity sub-block (diagonal target
        blocks) or vanishes (off-diagonal blocks).
        """
        self._check_n(n)
        target = int(target)
        if not (0 <= target < n):
            raise ContractViolationError(f"target qubit {target} out of range for n={n}")
        ctrl = set(int(c) for c in controls) if controls else set()
        for c in ctrl:
            if not (0 <= c < n):
                raise ContractViolationError(f"control qubit {c} out of range for n={n}")
            if c == target:
                raise ContractViolationError("control qubit equals target qubit")

        cn = cython.cast(ComplexTable, self.numbers)
        t = self.terminal
        zero = cn.ZERO
        one = cn.ONE

        ids = [None] * (n + 2)
        ids[n] = Edge(t, one, zero)
        for v in range(n - 1, target - 1, -1):
            p = ids[v + 1]
            ids[v] = self._make(
                v, [p.node, p.re, p.im, t, zero, zero, t, zero, zero, p.node, p.re, p.im], 4
            )

        blocks = []
        for i in (0, 1):
            for j in (0, 1):
                z = complex(u[i][j])
                if -cn.eps <= z.real <= cn.eps and -cn.eps <= z.imag <= cn.eps:
                    blocks.append(Edge(t, zero, zero))
                else:
                    w = cn.lookup_complex(z.real, z.imag)
                    blocks.append(Edge(t, w[0], w[1]))

        for v in range(n - 1, target, -1):
            nxt = []
            for i in (0, 1):
                for j in (0, 1):
                    e = blocks[2 * i + j]
                    if v in ctrl:
                        if i == j:
                            d = ids[v + 1]
                            flat = [d.node, d.re, d.im, t, zero, zero, t, zero, zero,
                                    e.node, e.re, e.im]
                        else:
                            flat = [t, zero, zero, t, zero, zero, t, zero, zero,
                                    e.node, e.re, e.im]
                    else:
                        flat = [e.node, e.re, e.im, t, zero, zero, t, zero, zero,
                                e.node, e.re, e.im]
                    nxt.append(self._make(v, flat, 4))
            blocks = nxt

        flat = []
        for e in blocks:
            flat.extend((e.node, e.re, e.im))
        et = self._make(target, flat, 4)

        for v in range(target - 1, -1, -1):
            if v in ctrl:
                d = ids[v + 1] if ids[v + 1] is not None else self._id_chain(v + 1, n)
                flat = [d.node, d.re, d.im, t, zero, zero, t, zero, zero,
                        et.node, et.re, et.im]
            else:
                flat = [et.node, et.re, et.im, t, zero, zero, t, zero, zero,
                        et.node, et.re, et.im]
            et = self._make(v, flat, 4)
        return et

    def _id_chain(self, v, n):
        cn = cython.cast(ComplexTable, self.numbers)
        t = self.terminal
        zero = cn.ZERO
        e = Edge(t, cn.ONE, zero)
        for var in range(n - 1, v - 1, -1):
            e = self._make(
                var,
                [e.node, e.re, e.im, t, zero, zero, t, zero, zero, e.node, e.re, e.im],
                4,
            )
        return e

    def _check_n(self, n):
        if not (1 <= n <= self.n_max):
            raise ContractViolationError(
                f"qubit count {n} outside [1, n_max={self.n_max}]"
            )

    # -- operations -----------------------------------------------------------

    def add(self, a, b):
        """Canonical DD of the entrywise sum of two same-shape DDs."""
        self._check_same_shape(a, b, "add")
        if self.is_stub(a):
            return b
        if self.is_stub(b):
            return a
        vec = a.node.arity == 2
        r = self._add_rec(a.node, a.re, a.im, b.node, b.re, b.im, vec)
        return self._finish_root(r)

    def multiply(self, a, b):
        """Canonical DD of the matrix product A * B."""
        if not self.is_stub(a) and a.node.arity != 4:
            raise ContractViolationError("multiply expects a matrix DD on the left")
        if not self.is_stub(b) and b.node.arity != 4:
            raise ContractViolationError("multiply expects a matrix DD on the right")
        return self._mul_top(a, b, False)

    def mat_vec(self, a, v):
        """Canonical vector DD of A applied to a state vector DD."""
        if not self.is_stub(a) and a.node.arity != 4:
            raise ContractViolationError("mat_vec expects a matrix DD on the left")
        if not self.is_stub(v) and v.node.arity != 2:
            raise ContractViolationError("mat_vec expects a vector DD on the right")
        return self._mul_top(a, v, True)

    def _mul_top(self, a, b, vec):
        if self.is_stub(a) or self.is_stub(b):
            return self.zero_stub()
        if self.depth(a) != self.depth(b):
            raise ContractViolationError("operand DDs span different qubit counts")
        cn = cython.cast(ComplexTable, self.numbers)
        sub = self._mul_rec(a.node, b.node, vec)
        if self.is_stub(sub):
            return sub
        t = cn._mul4(a.re, a.im, b.re, b.im)
        w = cn._mul4(t[0], t[1], sub.re, sub.im)
        cn.release_if_cache(t[0], t[1])
        cn.release_if_cache(sub.re, sub.im)
        return self._finish_root(Edge(sub.node, w[0], w[1]))

    def _mul_rec(self, an, bn, vec):
        cn = cython.cast(ComplexTable, self.numbers)
        if an.var == _TERMINAL_VAR:
            return self.one_edge()
        kind = _CT_MV if vec else _CT_MM
        key = (an.nid, bn.nid)
        entry = self._ct_probe(kind, key)
        if entry is not None:
            return self._ct_edge(entry)

        zero = cn.ZERO
        arity = 2 if vec else 4
        if vec:
            cols = (0,)
        else:
            cols = (0, 1)
        ach = an.ch
        bch = bn.ch
        flat = []
        for i in (0, 1):
            for j in cols:
                acc_node = None
                acc_re = zero
                acc_im = zero
                for k in (0, 1):
                    abase = 3 * (2 * i + k)
                    bbase = 3 * k if vec else 3 * (2 * k + j)
                    a_re = ach[abase + 1]
                    a_im = ach[abase + 2]
                    if a_re == zero and a_im == zero:
                        continue
                    b_re = bch[bbase + 1]
                    b_im = bch[bbase + 2]
                    if b_re == zero and b_im == zero:
                        continue
                    sub = self._mul_rec(ach[abase], bch[bbase], vec)
                    if sub.re == zero and sub.im == zero:
                        continue
                    t1 = cn._mul4(a_re, a_im, b_re, b_im)
                    t2 = cn._mul4(t1[0], t1[1], sub.re, sub.im)
                    cn.release_if_cache(t1[0], t1[1])
                    cn.release_if_cache(sub.re, sub.im)
                    if acc_node is None:
                        acc_node = sub.node
                        acc_re = t2[0]
                        acc_im = t2[1]
                    else:
                        s = self._add_rec(
                            acc_node, acc_re, acc_im, sub.node, t2[0], t2[1], vec
                        )
                        cn.release_if_cache(acc_re, acc_im)
                        cn.release_if_cache(t2[0], t2[1])
                        acc_node = s.node
                        acc_re = s.re
                        acc_im = s.im
                if acc_node is None:
                    flat.extend((self.terminal, zero, zero))
                else:
                    flat.extend((acc_node, acc_re, acc_im))
        res = self._make(an.var, flat, arity)
        self._ct_store(kind, key, res.node, cn.value(res.re), cn.value(res.im))
        return res

    def _add_rec(self, n1, re1, im1, n2, re2, im2, vec):
        # Operand weights are read, never consumed; the returned edge's
        # cache weight (if any) is owned by the caller.
        cn = cython.cast(ComplexTable, self.numbers)
        zero = cn.ZERO
        if re1 == zero and im1 == zero:
            if cn.is_cache(re2):
                w = cn.cache_cv(cn.value(re2), cn.value(im2))
                return Edge(n2, w[0], w[1])
            return Edge(n2, re2, im2)
        if re2 == zero and im2 == zero:
            if cn.is_cache(re1):
                w = cn.cache_cv(cn.value(re1), cn.value(im1))
                return Edge(n1, w[0], w[1])
            return Edge(n1, re1, im1)
        if n1.var == _TERMINAL_VAR:
            w = cn._add4(re1, im1, re2, im2)
            if cn.is_cache(w[0]) and cn.value(w[0]) == 0.0 and cn.value(w[1]) == 0.0:
                cn.release_cv(w[0], w[1])
                return Edge(self.terminal, zero, zero)
            return Edge(self.terminal, w[0], w[1])

        kind = _CT_ADD2 if vec else _CT_ADD4
        ka = (n1.nid, cn.grid_key(re1), cn.grid_key(im1))
        kb = (n2.nid, cn.grid_key(re2), cn.grid_key(im2))
        key = ka + kb if ka <= kb else kb + ka
        entry = self._ct_probe(kind, key)
        if entry is not None:
            return self._ct_edge(entry)

        arity = 2 if vec else 4
        ch1 = n1.ch
        ch2 = n2.ch
        flat = []
        for i in range(arity):
            base = 3 * i
            c1n = ch1[base]
            c1re = ch1[base + 1]
            c1im = ch1[base + 2]
            c2n = ch2[base]
            c2re = ch2[base + 1]
            c2im = ch2[base + 2]
            s1 = None
            s2 = None
            if not (c1re == zero and c1im == zero):
                s1 = cn._mul4(re1, im1, c1re, c1im)
            if not (c2re == zero and c2im == zero):
                s2 = cn._mul4(re2, im2, c2re, c2im)
            if s1 is None and s2 is None:
                flat.extend((self.terminal, zero, zero))
            elif s2 is None:
                flat.extend((c1n, s1[0], s1[1]))
            elif s1 is None:
                flat.extend((c2n, s2[0], s2[1]))
            else:
                r = self._add_rec(c1n, s1[0], s1[1], c2n, s2[0], s2[1], vec)
                cn.release_if_cache(s1[0], s1[1])
                cn.release_if_cache(s2[0], s2[1])
                flat.extend((r.node, r.re, r.im))
        res = self._make(n1.var, flat, arity)
        self._ct_store(kind, key, res.node, cn.value(res.re), cn.value(res.im))
        return res

    def kron(self, a, b):
        """Canonical DD of the Kronecker product: ``b`` becomes the lower
        variable block spliced below ``a``."""
        if self.is_stub(a) or self.is_stub(b):
            return self.zero_stub()
        if a.node.arity != 4 or b.node.arity != 4:
            raise ContractViolationError("kron expects two matrix DDs")
        na = self.depth(a)
        nb = self.depth(b)
        if na + nb > self.n_max:
            raise ContractViolationError(
                f"kron result spans {na + nb} levels, above n_max={self.n_max}"
            )
        cn = cython.cast(ComplexTable, self.numbers)
        bs = self._shift_node(b.node, na, {})
        sub = self._kron_rec(a.node, bs)
        t = cn._mul4(a.re, a.im, b.re, b.im)
        w = cn._mul4(t[0], t[1], sub.re, sub.im)
        cn.release_if_cache(t[0], t[1])
        cn.release_if_cache(sub.re, sub.im)
        return self._finish_root(Edge(sub.node, w[0], w[1]))

    def _shift_node(self, node, shift, memo):
        if node.var == _TERMINAL_VAR:
            return node
        got = memo.get(node)
        if got is not None:
            return got
        ch = node.ch
        flat = []
        for i in range(0, len(ch), 3):
            flat.append(self._shift_node(ch[i], shift, memo))
            flat.append(ch[i + 1])
            flat.append(ch[i + 2])
        new = self._unique(node.var + shift, flat, len(ch) // 3)
        memo[node] = new
        return new

    def _kron_rec(self, an, bs):
        cn = cython.cast(ComplexTable, self.numbers)
        if an.var == _TERMINAL_VAR:
            return Edge(bs, cn.ONE, cn.ZERO)
        key = (an.nid, bs.nid)
        entry = self._ct_probe(_CT_KRON, key)
        if entry is not None:
            return self._ct_edge(entry)
        zero = cn.ZERO
        ch = an.ch
        flat = []
        for i in range(0, len(ch), 3):
            re_h = ch[i + 1]
            im_h = ch[i + 2]
            if re_h == zero and im_h == zero:
                flat.extend((self.terminal, zero, zero))
                continue
            sub = self._kron_rec(ch[i], bs)
            w = cn._mul4(re_h, im_h, sub.re, sub.im)
            cn.release_if_cache(sub.re, sub.im)
            flat.extend((sub.node, w[0], w[1]))
        res = self._make(an.var, flat, 4)
        self._ct_store(_CT_KRON, key, res.node, cn.value(res.re), cn.value(res.im))
        return res

    def conjugate_transpose(self, a):
        """Canonical DD of the conjugate transpose of a matrix DD."""
        if self.is_stub(a):
            return self.zero_stub()
        if a.node.arity != 4:
            raise ContractViolationError("conjugate_transpose expects a matrix DD")
        cn = cython.cast(ComplexTable, self.numbers)
        sub = self._conjt_rec(a.node)
        w = cn._mul4(a.re, cn.flip_sign(a.im), sub.re, sub.im)
        cn.release_if_cache(sub.re, sub.im)
        return self._finish_root(Edge(sub.node, w[0], w[1]))

    def _conjt_rec(self, an):
        cn = cython.cast(ComplexTable, self.numbers)
        if an.var == _TERMINAL_VAR:
            return self.one_edge()
        key = (an.nid,)
        entry = self._ct_probe(_CT_CONJT, key)
        if entry is not None:
            return self._ct_edge(entry)
        zero = cn.ZERO
        ch = an.ch
        flat = []
        for i in (0, 1):
            for j in (0, 1):
                base = 3 * (2 * j + i)  # transpose: take the (j, i) block
                re_h = ch[base + 1]
                im_h = ch[base + 2]
                if re_h == zero and im_h == zero:
                    flat.extend((self.terminal, zero, zero))
                    continue
                sub = self._conjt_rec(ch[base])
                w = cn._mul4(re_h, cn.flip_sign(im_h), sub.re, sub.im)
                cn.release_if_cache(sub.re, sub.im)
                flat.extend((sub.node, w[0], w[1]))
        res = self._make(an.var, flat, 4)
        self._ct_store(_CT_CONJT, key, res.node, cn.value(res.re), cn.value(res.im))
        return res

    def _finish_root(self, e):
        # Intern a cache-resident root weight when it fits the table range;
        # larger weights (non-contractive sums) stay cache-resident and the
        # caller owns their release.
        cn = cython.cast(ComplexTable, self.numbers)
        if not cn.is_cache(e.re):
            return e
        rv = cn.value(e.re)
        iv = cn.value(e.im)
        lim = 1.0 + cn.eps
        if -lim <= rv <= lim and -lim <= iv <= lim:
            w = cn.intern_cv(e.re, e.im)
            return Edge(e.node, w[0], w[1])
        return e

    def release_edge_weight(self, e):
        """Release a cache-resident root weight (no-op for interned ones)."""
        cn = cython.cast(ComplexTable, self.numbers)
        cn.release_if_cache(e.re, e.im)

    def scale(self, e, factor):
        """DD scaled by a complex factor with |parts| <= 1 (root-weight only)."""
        cn = cython.cast(ComplexTable, self.numbers)
        z = complex(factor)
        if self.is_stub(e):
            return e
        f = cn.lookup_complex(z.real, z.imag)
        if f[0] == cn.ZERO and f[1] == cn.ZERO:
            return self.zero_stub()
        w = cn._mul4(e.re, e.im, f[0], f[1])
        return self._finish_root(Edge(e.node, w[0], w[1]))

    def _check_same_shape(self, a, b, opname):
        astub = self.is_stub(a)
        bstub = self.is_stub(b)
        if astub or bstub:
            return
        if a.node.arity != b.node.arity:
            raise ContractViolationError(f"{opname} operands have different node kinds")
        if self.depth(a) != self.depth(b):
            raise ContractViolationError(f"{opname} operands span different qubit counts")

    # -- entry extraction -----------------------------------------------------

    def extract_entry(self, root, row, col=None):
        """Matrix entry (row, col) or vector amplitude (row) as a complex.

        Multiplies the edge weights along the path selected by the index
        bits; qubit 0 is the most significant bit.
        """
        cn = cython.cast(ComplexTable, self.numbers)
        if self.is_stub(root):
            return 0j
        n = self.depth(root)
        vec = root.node.arity == 2
        if vec and col is not None:
            raise ContractViolationError("column index given for a vector DD")
        if not vec and col is None:
            raise ContractViolationError("column index required for a matrix DD")
        if not (0 <= row < (1 << n)):
            raise ContractViolationError(f"row index {row} out of range for n={n}")
        if not vec and not (0 <= col < (1 << n)):
            raise ContractViolationError(f"column index {col} out of range for n={n}")
        zero = cn.ZERO
        acc_r = cn.value(root.re)
        acc_i = cn.value(root.im)
        node = root.node
        while node.var != _TERMINAL_VAR:
            shift = n - 1 - node.var
            if vec:
                idx = (row >> shift) & 1
            else:
                idx = 2 * ((row >> shift) & 1) + ((col >> shift) & 1)
            base = 3 * idx
            ch = node.ch
            re_h = ch[base + 1]
            im_h = ch[base + 2]
            if re_h == zero and im_h == zero:
                return 0j
            wr = cn.value(re_h)
            wi = cn.value(im_h)
            acc_r, acc_i = acc_r * wr - acc_i * wi, acc_r * wi + acc_i * wr
            node = ch[base]
        return complex(acc_r, acc_i)

    # -- statistics --------------------------------------------------------------

    def stats(self):
        cn = cython.cast(ComplexTable, self.numbers)
        out = {
            "nodes_live": self.nodes_live,
            "nodes_peak": self.nodes_peak,
            "node_inserts": self.inserts,
            "gc_runs": self.gc_runs,
            "ct_hits": self.ct_hits,
            "ct_misses": self.ct_misses,
        }
        out.update(cn.stats())
        return out
