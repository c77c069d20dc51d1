#include "floydlab/group.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace floydlab {

namespace {

std::uint64_t hash_stream(std::span<const std::int32_t> s) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::int32_t v : s) {
    h ^= std::uint64_t(std::uint32_t(v));
    h *= 1099511628211ull;
  }
  h ^= s.size();
  h *= 1099511628211ull;
  return h;
}

}  // namespace

GroupSpec GroupSpec::from_factors(std::vector<Factor> factors) {
  GroupSpec g;
  g.factors = std::move(factors);
  if (g.factors.empty()) throw input_error("group needs at least one factor");

  int n_abelian = 0, n_free = 0, n_cyclic = 0;
  for (auto& f : g.factors) {
    if (f.type == FactorType::FreeAbelian) {
      if (f.rank < 1 || f.rank > 8)
        throw input_error("free abelian factor needs rank in 1..8");
      (f.rank >= 2 ? n_abelian : n_free)++;
    } else {
      if (f.order < 2) throw input_error("cyclic factor needs order >= 2");
      n_cyclic++;
    }
  }

  // Default names: x1..xd per higher-rank abelian factor, t per free factor,
  // u per cyclic factor; ordinals appended when a kind repeats.
  int seen_abelian = 0, seen_free = 0, seen_cyclic = 0;
  for (auto& f : g.factors) {
    if (!f.names.empty()) {
      if (int(f.names.size()) != f.coord_count())
        throw input_error("factor name list has wrong size");
      continue;
    }
    if (f.type == FactorType::Cyclic) {
      std::string base = "u";
      if (n_cyclic > 1 && seen_cyclic > 0) base += std::to_string(seen_cyclic + 1);
      f.names = {base};
      seen_cyclic++;
    } else if (f.rank == 1) {
      std::string base = "t";
      if (n_free > 1 && seen_free > 0) base += std::to_string(seen_free + 1);
      f.names = {base};
      seen_free++;
    } else {
      std::string suffix;
      if (n_abelian > 1 && seen_abelian > 0) suffix = std::to_string(seen_abelian + 1);
      for (int a = 0; a < f.rank; a++)
        f.names.push_back("x" + std::to_string(a + 1) + suffix);
      seen_abelian++;
    }
  }

  for (int fi = 0; fi < int(g.factors.size()); fi++) {
    const Factor& f = g.factors[fi];
    for (int a = 0; a < f.coord_count(); a++) {
      bool self_inverse = (f.type == FactorType::Cyclic && f.order == 2);
      Generator pos{fi, a, +1, 0, f.names[a]};
      int pi = int(g.generators.size());
      pos.inverse = self_inverse ? pi : pi + 1;
      g.generators.push_back(pos);
      if (!self_inverse) {
        Generator neg{fi, a, -1, pi, f.names[a] + "^-1"};
        g.generators.push_back(neg);
      }
    }
  }

  // duplicate names would make words ambiguous
  for (size_t i = 0; i < g.generators.size(); i++)
    for (size_t j = i + 1; j < g.generators.size(); j++)
      if (g.generators[i].name == g.generators[j].name)
        throw input_error("duplicate generator name: " + g.generators[i].name);

  for (auto& f : g.factors)
    if (f.peripheral && f.type != FactorType::FreeAbelian)
      throw input_error("peripheral factors must be free abelian");
  return g;
}

int GroupSpec::generator_index(const std::string& name) const {
  for (int i = 0; i < int(generators.size()); i++)
    if (generators[i].name == name) return i;
  throw input_error("unknown generator symbol: " + name);
}

std::vector<int> GroupSpec::peripheral_factors() const {
  std::vector<int> out;
  for (int i = 0; i < int(factors.size()); i++)
    if (factors[i].peripheral) out.push_back(i);
  return out;
}

bool GroupSpec::has_peripheral() const { return !peripheral_factors().empty(); }

bool GroupSpec::is_tree() const {
  for (const auto& f : factors) {
    if (f.type == FactorType::FreeAbelian && f.rank >= 2) return false;
    if (f.type == FactorType::Cyclic && f.order >= 3) return false;
  }
  return true;
}

bool GroupSpec::is_hyperbolic() const {
  for (const auto& f : factors)
    if (f.type == FactorType::FreeAbelian && f.rank >= 2) return false;
  return true;
}

ElementPool::ElementPool(GroupSpec spec, std::size_t element_cap)
    : spec_(std::move(spec)), cap_(element_cap) {
  records_.resize(cap_ / (std::size_t(1) << kRecordShift) + 2);
  // worst case one fresh chunk per 32 elements plus slack
  stream_chunks_.resize(cap_ / 32 + 64);
  slot_id_.assign(1024, 0);
  slot_hash_.assign(1024, 0);
  table_mask_ = 1023;
  intern(std::span<const std::int32_t>{});  // id 0 = identity
}

const std::int32_t* ElementPool::arena_store(std::span<const std::int32_t> nf) {
  std::size_t need = nf.size();
  if (need > kStreamChunk)
    throw resource_error("normal form too large for the stream arena");
  if (stream_used_ + need > kStreamChunk) {
    if (stream_chunk_count_ >= stream_chunks_.size())
      throw resource_error("element stream arena exhausted");
    stream_chunks_[stream_chunk_count_] = std::make_unique<std::int32_t[]>(kStreamChunk);
    stream_chunk_count_++;
    stream_used_ = 0;
  }
  std::int32_t* ptr = stream_chunks_[stream_chunk_count_ - 1].get() + stream_used_;
  std::copy(nf.begin(), nf.end(), ptr);
  stream_used_ += need;
  return ptr;
}

int ElementPool::syllable_count(ElementId e) const {
  auto s = data(e);
  int n = 0;
  for (size_t i = 0; i < s.size(); n++)
    i += 1 + spec_.factors[s[i]].coord_count();
  return n;
}

SyllableRef ElementPool::syllable(ElementId e, int idx) const {
  auto s = data(e);
  size_t i = 0;
  for (int n = 0; n < idx; n++) i += 1 + spec_.factors[s[i]].coord_count();
  int cc = spec_.factors[s[i]].coord_count();
  return {s[i], s.subspan(i + 1, cc)};
}

SyllableRef ElementPool::last_syllable(ElementId e) const {
  auto s = data(e);
  size_t i = 0, last = 0;
  while (i < s.size()) {
    last = i;
    i += 1 + spec_.factors[s[i]].coord_count();
  }
  int cc = spec_.factors[s[last]].coord_count();
  return {s[last], s.subspan(last + 1, cc)};
}

std::uint32_t syllable_length(const Factor& f, std::span<const std::int32_t> coords) {
  if (f.type == FactorType::FreeAbelian) {
    std::uint32_t n = 0;
    for (auto c : coords) n += std::uint32_t(c < 0 ? -c : c);
    return n;
  }
  std::int32_t c = coords[0];
  return std::uint32_t(std::min(c, f.order - c));
}

std::uint32_t ElementPool::syllable_len(std::int32_t factor,
                                        std::span<const std::int32_t> coords) const {
  return syllable_length(spec_.factors[factor], coords);
}

std::uint32_t ElementPool::length_raw(std::span<const std::int32_t> s) const {
  std::uint32_t n = 0;
  for (size_t i = 0; i < s.size();) {
    int cc = spec_.factors[s[i]].coord_count();
    n += syllable_len(s[i], s.subspan(i + 1, cc));
    i += 1 + cc;
  }
  return n;
}

std::optional<ElementId> ElementPool::probe(std::span<const std::int32_t> nf,
                                            std::uint64_t h) const {
  std::uint32_t h32 = std::uint32_t(h) | 1u;
  std::size_t pos = h & table_mask_;
  while (true) {
    std::uint32_t idp1 = slot_id_[pos];
    if (idp1 == 0) return std::nullopt;
    if (slot_hash_[pos] == h32) {
      ElementId id = idp1 - 1;
      auto d = data(id);
      if (d.size() == nf.size() && std::equal(d.begin(), d.end(), nf.begin()))
        return id;
    }
    pos = (pos + 1) & table_mask_;
  }
}

void ElementPool::grow_table() {
  std::size_t nslots = (table_mask_ + 1) * 2;
  std::vector<std::uint32_t> ids(nslots, 0), hashes(nslots, 0);
  for (std::size_t i = 0; i <= table_mask_; i++) {
    if (slot_id_[i] == 0) continue;
    ElementId id = slot_id_[i] - 1;
    std::uint64_t h = hash_stream(data(id));
    std::size_t pos = h & (nslots - 1);
    while (ids[pos] != 0) pos = (pos + 1) & (nslots - 1);
    ids[pos] = slot_id_[i];
    hashes[pos] = std::uint32_t(h) | 1u;
  }
  slot_id_ = std::move(ids);
  slot_hash_ = std::move(hashes);
  table_mask_ = nslots - 1;
}

std::optional<ElementId> ElementPool::find(std::span<const std::int32_t> nf) const {
  return probe(nf, hash_stream(nf));
}

ElementId ElementPool::intern(std::span<const std::int32_t> nf) {
  std::uint64_t h = hash_stream(nf);
  std::lock_guard<std::mutex> lock(intern_mutex_);
  if (auto hit = probe(nf, h)) return *hit;
  if (count_ >= cap_)
    throw resource_error("element pool cap of " + std::to_string(cap_) + " exceeded");
  if ((count_ + 1) * 10 > (table_mask_ + 1) * 7) {
    grow_table();
  }
  ElementId id = ElementId(count_);
  auto& chunk = records_[id >> kRecordShift];
  if (!chunk) chunk = std::make_unique<Record[]>(std::size_t(1) << kRecordShift);
  chunk[id & kRecordMask] = Record{arena_store(nf), std::uint32_t(nf.size()),
                                   length_raw(nf)};
  count_++;
  std::uint32_t h32 = std::uint32_t(h) | 1u;
  std::size_t pos = h & table_mask_;
  while (slot_id_[pos] != 0) pos = (pos + 1) & table_mask_;
  slot_id_[pos] = id + 1;
  slot_hash_[pos] = h32;
  return id;
}

namespace {

// Appends syllable (factor, coords) to a normal-form stream under
// construction, merging with the trailing syllable when factors coincide and
// dropping identity syllables. Cascades are impossible here because the
// remaining stream alternates factors.
void push_syllable(const GroupSpec& spec, std::vector<std::int32_t>& out,
                   std::int32_t factor, std::span<const std::int32_t> coords) {
  const Factor& f = spec.factors[factor];
  int cc = f.coord_count();

  bool all_zero = true;
  for (auto c : coords)
    if (c != 0) all_zero = false;
  if (all_zero) return;

  // locate trailing syllable
  if (!out.empty()) {
    // walk from the back: trailing syllable occupies last cc_t + 1 ints, but
    // we do not know cc_t without walking from the front; keep a side walk.
    // Instead maintain invariant: caller tracks positions. Simpler: scan.
    size_t i = 0, last = size_t(-1);
    while (i < out.size()) {
      last = i;
      i += 1 + spec.factors[out[i]].coord_count();
    }
    if (out[last] == factor) {
      bool zero = true;
      for (int k = 0; k < cc; k++) {
        std::int64_t v = std::int64_t(out[last + 1 + k]) + coords[k];
        if (f.type == FactorType::Cyclic) {
          v %= f.order;
          if (v < 0) v += f.order;
        }
        out[last + 1 + k] = std::int32_t(v);
        if (v != 0) zero = false;
      }
      if (zero) out.resize(last);
      return;
    }
  }
  out.push_back(factor);
  out.insert(out.end(), coords.begin(), coords.end());
}

}  // namespace

void ElementPool::mul_raw(ElementId a, ElementId b, std::vector<std::int32_t>& out) const {
  auto da = data(a), db = data(b);
  out.assign(da.begin(), da.end());
  for (size_t i = 0; i < db.size();) {
    int cc = spec_.factors[db[i]].coord_count();
    push_syllable(spec_, out, db[i], db.subspan(i + 1, cc));
    i += 1 + cc;
  }
}

void ElementPool::mul_raw(ElementId a, int gen, std::vector<std::int32_t>& out) const {
  const Generator& g = spec_.generators.at(gen);
  auto da = data(a);
  out.assign(da.begin(), da.end());
  const Factor& f = spec_.factors[g.factor];
  std::int32_t coords[8] = {0};
  if (f.type == FactorType::Cyclic)
    coords[0] = g.sign > 0 ? 1 : f.order - 1;
  else
    coords[g.axis] = g.sign;
  push_syllable(spec_, out, g.factor, {coords, size_t(f.coord_count())});
}

void ElementPool::inverse_raw(ElementId a, std::vector<std::int32_t>& out) const {
  out.clear();
  int n = syllable_count(a);
  for (int i = n - 1; i >= 0; i--) {
    SyllableRef s = syllable(a, i);
    out.push_back(s.factor);
    const Factor& f = spec_.factors[s.factor];
    for (auto c : s.coords)
      out.push_back(f.type == FactorType::Cyclic ? f.order - c : -c);
  }
}

ElementId ElementPool::mul(ElementId a, ElementId b) {
  std::vector<std::int32_t> buf;
  mul_raw(a, b, buf);
  return intern(buf);
}

ElementId ElementPool::mul_gen(ElementId a, int gen) {
  std::vector<std::int32_t> buf;
  mul_raw(a, gen, buf);
  return intern(buf);
}

ElementId ElementPool::inverse(ElementId a) {
  std::vector<std::int32_t> buf;
  inverse_raw(a, buf);
  return intern(buf);
}

ElementId ElementPool::normalize(std::span<const int> letters) {
  std::vector<std::int32_t> buf;
  ElementId cur = identity();
  for (int g : letters) {
    if (g < 0 || g >= int(spec_.generators.size()))
      throw input_error("unknown generator index " + std::to_string(g));
    mul_raw(cur, g, buf);
    cur = intern(buf);
  }
  return cur;
}

ElementId ElementPool::drop_last_syllable(ElementId a) {
  int n = syllable_count(a);
  if (n == 0) return a;
  auto s = data(a);
  size_t i = 0;
  for (int k = 0; k < n - 1; k++) i += 1 + spec_.factors[s[i]].coord_count();
  std::vector<std::int32_t> buf(s.begin(), s.begin() + i);
  return intern(buf);
}

namespace {

struct SyllableCursor {
  std::span<const std::int32_t> s;
  std::vector<std::uint32_t> starts;  // start offsets, front to back
};

SyllableCursor scan_syllables(const GroupSpec& spec, std::span<const std::int32_t> s) {
  SyllableCursor c{s, {}};
  for (size_t i = 0; i < s.size();) {
    c.starts.push_back(std::uint32_t(i));
    i += 1 + spec.factors[s[i]].coord_count();
  }
  return c;
}

}  // namespace

std::uint32_t ElementPool::length_of_product(ElementId a, ElementId b) const {
  return length_of_product_raw(a, data(b));
}

std::uint32_t ElementPool::length_of_product_raw(
    ElementId a, std::span<const std::int32_t> b) const {
  // Walk b's syllables against a's tail; only the interface can cancel.
  SyllableCursor ca = scan_syllables(spec_, data(a));
  SyllableCursor cb = scan_syllables(spec_, b);
  std::int64_t len = std::int64_t(length(a)) + length_raw(b);
  int ia = int(ca.starts.size()) - 1, ib = 0;
  std::vector<std::int32_t> merged;
  while (ia >= 0 && ib < int(cb.starts.size())) {
    std::int32_t fa = ca.s[ca.starts[ia]], fb = cb.s[cb.starts[ib]];
    if (fa != fb) break;
    const Factor& f = spec_.factors[fa];
    int cc = f.coord_count();
    auto acoords = ca.s.subspan(ca.starts[ia] + 1, cc);
    auto bcoords = cb.s.subspan(cb.starts[ib] + 1, cc);
    std::uint32_t la = syllable_len(fa, acoords);
    std::uint32_t lb = syllable_len(fb, bcoords);
    merged.clear();
    bool zero = true;
    for (int k = 0; k < cc; k++) {
      std::int64_t v = std::int64_t(acoords[k]) + bcoords[k];
      if (f.type == FactorType::Cyclic) {
        v %= f.order;
        if (v < 0) v += f.order;
      }
      merged.push_back(std::int32_t(v));
      if (v != 0) zero = false;
    }
    if (zero) {
      len -= la + lb;
      ia--;
      ib++;
      continue;  // full cancellation exposes the next interface
    }
    len -= la + lb;
    len += syllable_len(fa, merged);
    break;
  }
  return std::uint32_t(len);
}

bool ElementPool::geodesic_concat(ElementId a, ElementId b) const {
  return length_of_product(a, b) == length(a) + length(b);
}

std::uint32_t ElementPool::distance(ElementId a, ElementId b) const {
  // |a^-1 b|: cancel the common syllable prefix, merge at the split.
  int na = syllable_count(a), nb = syllable_count(b);
  int j = 0;
  while (j < na && j < nb) {
    SyllableRef sa = syllable(a, j), sb = syllable(b, j);
    if (sa.factor != sb.factor ||
        !std::equal(sa.coords.begin(), sa.coords.end(), sb.coords.begin()))
      break;
    j++;
  }
  std::int64_t len = 0;
  int ja = j, jb = j;
  if (ja < na && jb < nb) {
    SyllableRef sa = syllable(a, ja), sb = syllable(b, jb);
    if (sa.factor == sb.factor) {
      const Factor& f = spec_.factors[sa.factor];
      std::vector<std::int32_t> diff;
      for (size_t k = 0; k < sa.coords.size(); k++) {
        std::int64_t v = std::int64_t(sb.coords[k]) - sa.coords[k];
        if (f.type == FactorType::Cyclic) {
          v %= f.order;
          if (v < 0) v += f.order;
        }
        diff.push_back(std::int32_t(v));
      }
      len += syllable_len(sa.factor, diff);
      ja++;
      jb++;
    }
  }
  for (int i = ja; i < na; i++) {
    SyllableRef s = syllable(a, i);
    len += syllable_len(s.factor, s.coords);
  }
  for (int i = jb; i < nb; i++) {
    SyllableRef s = syllable(b, i);
    len += syllable_len(s.factor, s.coords);
  }
  return std::uint32_t(len);
}

int ElementPool::compare(ElementId a, ElementId b) const {
  auto da = data(a), db = data(b);
  size_t n = std::min(da.size(), db.size());
  for (size_t i = 0; i < n; i++) {
    if (da[i] != db[i]) return da[i] < db[i] ? -1 : 1;
  }
  if (da.size() != db.size()) return da.size() < db.size() ? -1 : 1;
  return 0;
}

std::vector<int> ElementPool::canonical_word(ElementId e) const {
  std::vector<int> word;
  int n = syllable_count(e);
  for (int i = 0; i < n; i++) {
    SyllableRef s = syllable(e, i);
    const Factor& f = spec_.factors[s.factor];
    if (f.type == FactorType::Cyclic) {
      std::int32_t c = s.coords[0];
      // shortest spelling; ties at order/2 spell positively
      bool positive = c <= f.order - c;
      int reps = positive ? c : f.order - c;
      int gen = -1;
      for (int g = 0; g < int(spec_.generators.size()); g++)
        if (spec_.generators[g].factor == s.factor &&
            spec_.generators[g].sign == (positive ? +1 : -1))
          gen = g;
      for (int r = 0; r < reps; r++) word.push_back(gen);
    } else {
      for (int axis = 0; axis < f.rank; axis++) {
        std::int32_t c = s.coords[axis];
        if (c == 0) continue;
        int gen = -1;
        for (int g = 0; g < int(spec_.generators.size()); g++)
          if (spec_.generators[g].factor == s.factor &&
              spec_.generators[g].axis == axis &&
              spec_.generators[g].sign == (c > 0 ? +1 : -1))
            gen = g;
        for (int r = 0; r < (c > 0 ? c : -c); r++) word.push_back(gen);
      }
    }
  }
  return word;
}

std::string ElementPool::to_string(ElementId e) const {
  if (e == identity()) return "e";
  std::ostringstream os;
  auto word = canonical_word(e);
  for (size_t i = 0; i < word.size(); i++) {
    if (i) os << ' ';
    os << spec_.generators[word[i]].name;
  }
  return os.str();
}

ElementId ElementPool::parse_word(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  std::vector<int> letters;
  while (is >> tok) {
    if (tok == "e" || tok == "1") continue;
    letters.push_back(spec_.generator_index(tok));
  }
  return normalize(letters);
}

Coset make_coset(ElementPool& pool, ElementId g, int factor) {
  const Factor& f = pool.spec().factors[factor];
  if (f.type != FactorType::FreeAbelian || !f.peripheral)
    throw precondition_error("coset factor must be peripheral");
  ElementId rep = g;
  if (pool.syllable_count(rep) > 0 && pool.last_syllable(rep).factor == factor)
    rep = pool.drop_last_syllable(rep);
  return Coset{rep, factor};
}

CosetGeometry coset_geometry(ElementPool& pool, ElementId h, const Coset& c) {
  // d(h, rep*P) = min_p |p^-1 (rep^-1 h)|. If the first syllable of
  // w = rep^-1 h lies in P it is absorbed for free; any other choice pays.
  ElementId w = pool.mul(pool.inverse(c.rep), h);
  int n = pool.syllable_count(w);
  if (n == 0) return {0, {h}};
  SyllableRef first = pool.syllable(w, 0);
  if (first.factor == c.factor) {
    std::vector<std::int32_t> buf;
    buf.push_back(c.factor);
    buf.insert(buf.end(), first.coords.begin(), first.coords.end());
    std::uint32_t d = pool.length(w) - pool.length_raw(buf);
    ElementId p = pool.mul(c.rep, pool.intern(buf));
    return {d, {p}};
  }
  return {pool.length(w), {c.rep}};
}

std::vector<Coset> nearby_peripheral_cosets(ElementPool& pool, ElementId g, int eps) {
  std::vector<Coset> out;
  auto periph = pool.spec().peripheral_factors();
  if (periph.empty()) return out;
  // BFS over B(g, eps) in the Cayley graph, then canonicalize per factor.
  std::vector<ElementId> frontier = {g}, all = {g};
  for (int step = 0; step < eps; step++) {
    std::vector<ElementId> next;
    for (ElementId v : frontier)
      for (int s = 0; s < int(pool.spec().generators.size()); s++) {
        ElementId w = pool.mul_gen(v, s);
        if (std::find(all.begin(), all.end(), w) == all.end()) {
          all.push_back(w);
          next.push_back(w);
        }
      }
    frontier = std::move(next);
  }
  for (ElementId v : all)
    for (int fi : periph) {
      Coset c = make_coset(pool, v, fi);
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
  return out;
}

}  // namespace floydlab
