#include "vndim/space.hpp"

#include <algorithm>
#include <sstream>

#include "vndim/errors.hpp"

namespace vndim {

const SymbolSet* CellMap::find(Coord c) const {
  auto it = std::lower_bound(v_.begin(), v_.end(), c,
                             [](const value_type& e, Coord k) { return e.first < k; });
  return it != v_.end() && it->first == c ? &it->second : nullptr;
}

SymbolSet CellMap::at(Coord c) const {
  const SymbolSet* m = find(c);
  if (!m) throw std::out_of_range("CellMap::at: unconstrained cell");
  return *m;
}

SymbolSet& CellMap::operator[](Coord c) {
  auto it = std::lower_bound(v_.begin(), v_.end(), c,
                             [](const value_type& e, Coord k) { return e.first < k; });
  if (it != v_.end() && it->first == c) return it->second;
  return v_.insert(it, {c, SymbolSet{0}})->second;
}

int Alphabet::index_of(const std::string& symbol) const {
  for (int i = 0; i < size(); ++i)
    if (symbols[i] == symbol) return i;
  throw config_error("unknown symbol '" + symbol + "' in alphabet " + name);
}

int Factor::index_of(const std::string& value) const {
  for (int i = 0; i < size(); ++i)
    if (values[i] == value) return i;
  throw config_error("unknown value '" + value + "' in factor " + name);
}

void SpaceDescriptor::validate() const {
  for (const auto& t : tapes) {
    if (t.size() < 2) throw config_error("alphabet sizes must be >= 2");
    if (t.size() > 16) throw config_error("alphabet sizes above 16 unsupported");
  }
  for (const auto& f : factors)
    if (f.size() < 1) throw config_error("factors must be nonempty");
}

Perm identity_perm(int n) {
  Perm p(n);
  for (int i = 0; i < n; ++i) p[i] = static_cast<std::uint8_t>(i);
  return p;
}

Perm inverse_perm(const Perm& p) {
  Perm q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<std::uint8_t>(i);
  return q;
}

bool is_identity_perm(const Perm& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] != i) return false;
  return true;
}

SymbolSet apply_perm(const Perm& p, SymbolSet mask) {
  SymbolSet out = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (mask & (SymbolSet{1} << i)) out |= SymbolSet{1} << p[i];
  return out;
}

GeneratorAction inverse_action(const GeneratorAction& a) {
  return std::visit(
      [](const auto& x) -> GeneratorAction {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Shift>) {
          return Shift{x.tape, -x.step};
        } else if constexpr (std::is_same_v<T, HeadPerm>) {
          return HeadPerm{x.tape, inverse_perm(x.perm)};
        } else if constexpr (std::is_same_v<T, OracleFlip>) {
          return OracleFlip{x.tape, inverse_perm(x.perm), x.sigma};
        } else {
          return FactorMove{x.factor, x.to, x.from};
        }
      },
      a);
}

Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(inverse_action(*it));
  return out;
}

std::string action_str(const SpaceDescriptor& sp, const GeneratorAction& a) {
  std::ostringstream out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Shift>) {
          out << "shift(t" << x.tape << (x.step > 0 ? ",+" : ",") << x.step << ")";
        } else if constexpr (std::is_same_v<T, HeadPerm>) {
          out << "flip(t" << x.tape << ")";
        } else if constexpr (std::is_same_v<T, OracleFlip>) {
          out << "oracle_flip(t" << x.tape << "," << x.sigma->name() << ")";
        } else {
          out << "state(" << sp.factors[x.factor].values[x.from] << "->"
              << sp.factors[x.factor].values[x.to] << ")";
        }
      },
      a);
  return out.str();
}

Cylinder Cylinder::whole_space(const SpaceDescriptor& sp) {
  Cylinder c;
  c.cells.resize(sp.tape_count());
  c.factor.resize(sp.factor_count());
  return c;
}

Rational Cylinder::measure(const SpaceDescriptor& sp) const {
  Rational m(1);
  for (int t = 0; t < sp.tape_count(); ++t) {
    const long sz = sp.tapes[t].size();
    for (const auto& [coord, mask] : cells[t]) {
      if (mask == 0) return Rational(0);
      m *= Rational(popcount(mask), sz);
    }
  }
  for (int f = 0; f < sp.factor_count(); ++f)
    if (factor[f]) m *= Rational(1, sp.factors[f].size());
  return m;
}

bool Cylinder::operator<(const Cylinder& o) const {
  if (cells != o.cells) return cells < o.cells;
  return factor < o.factor;
}

bool Cylinder::disjoint_from(const Cylinder& o) const {
  for (std::size_t t = 0; t < cells.size(); ++t) {
    const auto* small = &cells[t];
    const auto* big = &o.cells[t];
    if (big->size() < small->size()) std::swap(small, big);
    for (const auto& [coord, mask] : *small) {
      const SymbolSet* other = big->find(coord);
      if (other && (mask & *other) == 0) return true;
    }
  }
  for (std::size_t f = 0; f < factor.size(); ++f)
    if (factor[f] && o.factor[f] && *factor[f] != *o.factor[f]) return true;
  return false;
}

std::optional<Cylinder> Cylinder::intersect(const Cylinder& o) const {
  if (disjoint_from(o)) return std::nullopt;
  Cylinder out = *this;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    for (const auto& [coord, mask] : o.cells[t]) {
      const SymbolSet* mine = cells[t].find(coord);
      out.cells[t][coord] = mine ? (*mine & mask) : mask;
    }
  }
  for (std::size_t f = 0; f < factor.size(); ++f)
    if (o.factor[f]) out.factor[f] = o.factor[f];
  return out;
}

bool Cylinder::subset_of(const Cylinder& o) const {
  for (std::size_t t = 0; t < cells.size(); ++t) {
    for (const auto& [coord, mask] : o.cells[t]) {
      const SymbolSet* mine = cells[t].find(coord);
      if (!mine) return false;
      if ((*mine & ~mask) != 0) return false;
    }
  }
  for (std::size_t f = 0; f < factor.size(); ++f) {
    if (o.factor[f]) {
      if (!factor[f] || *factor[f] != *o.factor[f]) return false;
    }
  }
  return true;
}

namespace {

std::string mask_str(const Alphabet& alpha, SymbolSet mask) {
  std::string out;
  for (int i = 0; i < alpha.size(); ++i) {
    if (mask & (SymbolSet{1} << i)) {
      if (!out.empty()) out += '|';
      out += alpha.symbols[i];
    }
  }
  return out;
}

}  // namespace

std::string Cylinder::str(const SpaceDescriptor& sp) const {
  std::ostringstream out;
  for (int t = 0; t < sp.tape_count(); ++t) {
    if (t) out << "; ";
    out << "tape" << t << ": {";
    bool first = true;
    for (const auto& [coord, mask] : cells[t]) {
      if (!first) out << ',';
      out << coord << ':' << mask_str(sp.tapes[t], mask);
      first = false;
    }
    out << "}";
  }
  for (int f = 0; f < sp.factor_count(); ++f) {
    if (factor[f]) out << "; " << sp.factors[f].name << "=" << sp.factors[f].values[*factor[f]];
  }
  return out.str();
}

std::vector<Cylinder> refine(const SpaceDescriptor& sp, const Cylinder& c, int tape, Coord coord) {
  if (c.cells[tape].count(coord))
    throw already_constrained("refine: cell already constrained");
  std::vector<Cylinder> out;
  out.reserve(sp.tapes[tape].size());
  for (int s = 0; s < sp.tapes[tape].size(); ++s) {
    Cylinder child = c;
    child.cells[tape][coord] = SymbolSet{1} << s;
    out.push_back(std::move(child));
  }
  return out;
}

std::vector<Cylinder> refine_cell_partition(const SpaceDescriptor& sp, const Cylinder& c, int tape,
                                            Coord coord, const std::vector<SymbolSet>& parts) {
  const SymbolSet* cur = c.cells[tape].find(coord);
  const SymbolSet current = cur ? *cur : sp.tapes[tape].full_mask();
  std::vector<Cylinder> out;
  SymbolSet covered = 0;
  for (SymbolSet p : parts) {
    SymbolSet inter = p & current;
    if (covered & inter) throw config_error("refine_cell_partition: overlapping parts");
    covered |= inter;
    if (inter == 0) continue;
    Cylinder child = c;
    child.cells[tape][coord] = inter;
    out.push_back(std::move(child));
  }
  if (covered != current) throw config_error("refine_cell_partition: parts do not cover the mask");
  return out;
}

std::vector<Cylinder> refine_factor(const SpaceDescriptor& sp, const Cylinder& c, int factor) {
  if (c.factor[factor]) throw already_constrained("refine_factor: factor already fixed");
  std::vector<Cylinder> out;
  for (int v = 0; v < sp.factors[factor].size(); ++v) {
    Cylinder child = c;
    child.factor[factor] = static_cast<std::uint8_t>(v);
    out.push_back(std::move(child));
  }
  return out;
}

SymbolicConfig SymbolicConfig::start(const SpaceDescriptor& sp) {
  SymbolicConfig cfg;
  cfg.cyl = Cylinder::whole_space(sp);
  cfg.heads.assign(sp.tape_count(), 0);
  return cfg;
}

Cylinder SymbolicConfig::point_view() const {
  Cylinder out = cyl;
  for (std::size_t t = 0; t < out.cells.size(); ++t) {
    if (heads[t] == 0) continue;
    CellMap shifted;
    for (const auto& [coord, mask] : out.cells[t]) shifted[coord - heads[t]] = mask;
    out.cells[t] = std::move(shifted);
  }
  return out;
}

bool SymbolicConfig::same_point_set(const SymbolicConfig& o) const {
  return point_view() == o.point_view();
}

std::string SymbolicConfig::str(const SpaceDescriptor& sp) const {
  std::ostringstream out;
  for (int t = 0; t < sp.tape_count(); ++t) {
    if (t) out << "; ";
    out << "tape" << t << ": {";
    bool first = true;
    for (const auto& [coord, mask] : cyl.cells[t]) {
      if (!first) out << ',';
      out << coord << ':' << mask_str(sp.tapes[t], mask);
      first = false;
    }
    out << "} head=" << heads[t];
  }
  for (int f = 0; f < sp.factor_count(); ++f)
    if (cyl.factor[f]) out << "; " << sp.factors[f].name << "=" << sp.factors[f].values[*cyl.factor[f]];
  return out.str();
}

namespace {

// In-place core; value-semantics wrappers below copy exactly once.
std::optional<NeedsRefinement> apply_action_inplace(SymbolicConfig& cfg, const GeneratorAction& a,
                                                    Coord window) {
  if (const auto* s = std::get_if<Shift>(&a)) {
    cfg.heads[s->tape] += s->step;
    if (cfg.heads[s->tape] < -window || cfg.heads[s->tape] > window)
      throw window_exceeded("head left the configured window on tape " + std::to_string(s->tape));
    return std::nullopt;
  }
  if (const auto* h = std::get_if<HeadPerm>(&a)) {
    const Coord cell = cfg.heads[h->tape];
    SymbolSet* mask = const_cast<SymbolSet*>(cfg.cyl.cells[h->tape].find(cell));
    if (!mask) return NeedsRefinement{{CellRef{h->tape, cell}}, {}};
    *mask = apply_perm(h->perm, *mask);
    return std::nullopt;
  }
  if (const auto* o = std::get_if<OracleFlip>(&a)) {
    for (auto& [coord, mask] : cfg.cyl.cells[o->tape])
      if (o->sigma->contains(coord)) mask = apply_perm(o->perm, mask);
    return std::nullopt;
  }
  const auto& fm = std::get<FactorMove>(a);
  auto& fv = cfg.cyl.factor[fm.factor];
  if (fv) {
    if (*fv == fm.from)
      fv = fm.to;
    else if (*fv == fm.to)
      fv = fm.from;
  }
  return std::nullopt;
}

}  // namespace

namespace detail {

std::optional<NeedsRefinement> apply_word_inplace(SymbolicConfig& cfg, const Word& w,
                                                  Coord window) {
  for (const auto& a : w) {
    if (auto need = apply_action_inplace(cfg, a, window)) return need;
  }
  return std::nullopt;
}

bool word_inplace_safe(const Word& w) {
  std::vector<int> shifted;
  for (const auto& a : w) {
    if (const auto* s = std::get_if<Shift>(&a)) {
      shifted.push_back(s->tape);
    } else if (const auto* h = std::get_if<HeadPerm>(&a)) {
      for (int t : shifted)
        if (t == h->tape) return false;
    }
  }
  return true;
}

}  // namespace detail

ApplyResult apply_action(const SpaceDescriptor&, const SymbolicConfig& cfg,
                         const GeneratorAction& a, Coord window) {
  SymbolicConfig out = cfg;
  if (auto need = apply_action_inplace(out, a, window)) return *need;
  return out;
}

ApplyResult apply_word(const SpaceDescriptor&, const SymbolicConfig& cfg, const Word& w,
                       Coord window) {
  SymbolicConfig cur = cfg;
  for (const auto& a : w) {
    if (auto need = apply_action_inplace(cur, a, window)) return *need;
  }
  return cur;
}

}  // namespace vndim
