#include "vndim/groupoid.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "vndim/errors.hpp"

namespace vndim {

namespace {

Perm compose_perm(const Perm& after, const Perm& before) {
  Perm out(before.size());
  for (std::size_t i = 0; i < before.size(); ++i) out[i] = after[before[i]];
  return out;
}

// Accumulated action of a path word: permutations per constrained seed cell
// plus permutations of the factors. Head displacement lives in the vertex
// configurations themselves. Cell keys never move along a path, so the seed's
// constraint keys index everything.
struct Transform {
  std::map<std::pair<int, Coord>, Perm> cells;
  std::vector<Perm> factors;

  static Transform identity(const SpaceDescriptor& sp) {
    Transform t;
    t.factors.resize(sp.factor_count());
    for (int f = 0; f < sp.factor_count(); ++f) t.factors[f] = identity_perm(sp.factors[f].size());
    return t;
  }
};

void compose_word_into(const SpaceDescriptor& sp, Transform& t, std::vector<Coord> heads,
                       const Cylinder& base, const Word& w) {
  for (const auto& a : w) {
    if (const auto* s = std::get_if<Shift>(&a)) {
      heads[s->tape] += s->step;
    } else if (const auto* h = std::get_if<HeadPerm>(&a)) {
      auto key = std::make_pair(h->tape, heads[h->tape]);
      auto it = t.cells.find(key);
      if (it == t.cells.end())
        t.cells[key] = h->perm;
      else
        it->second = compose_perm(h->perm, it->second);
    } else if (const auto* o = std::get_if<OracleFlip>(&a)) {
      for (const auto& [coord, mask] : base.cells[o->tape]) {
        if (!o->sigma->contains(coord)) continue;
        auto key = std::make_pair(o->tape, coord);
        auto it = t.cells.find(key);
        if (it == t.cells.end())
          t.cells[key] = o->perm;
        else
          it->second = compose_perm(o->perm, it->second);
      }
    } else {
      const auto& fm = std::get<FactorMove>(a);
      Perm swap = identity_perm(sp.factors[fm.factor].size());
      std::swap(swap[fm.from], swap[fm.to]);
      t.factors[fm.factor] = compose_perm(swap, t.factors[fm.factor]);
    }
  }
}

// Pointwise signature of a path on the seed cylinder: head positions, images
// of each constrained cell's symbols, and factor images. Two paths with equal
// signatures act identically on every point of the seed.
std::string restricted_signature(const SpaceDescriptor& sp, const Transform& t,
                                 const std::vector<Coord>& heads, const Cylinder& base) {
  std::ostringstream out;
  for (Coord h : heads) out << h << ';';
  for (int tape = 0; tape < sp.tape_count(); ++tape) {
    for (const auto& [coord, mask] : base.cells[tape]) {
      auto it = t.cells.find({tape, coord});
      out << '|';
      for (int s = 0; s < sp.tapes[tape].size(); ++s) {
        if (!(mask & (SymbolSet{1} << s))) continue;
        out << (it == t.cells.end() ? s : it->second[s]) << ',';
      }
    }
  }
  for (int f = 0; f < sp.factor_count(); ++f) {
    out << '#';
    if (base.factor[f]) {
      out << int(t.factors[f][*base.factor[f]]);
    } else {
      for (auto v : t.factors[f]) out << int(v) << ',';
    }
  }
  return out.str();
}

bool full_equal(const SpaceDescriptor& sp, const Transform& a, const Transform& b) {
  if (a.factors != b.factors) return false;
  auto normalized = [&](const Transform& t, const std::pair<int, Coord>& key) {
    auto it = t.cells.find(key);
    return it == t.cells.end() ? identity_perm(sp.tapes[key.first].size()) : it->second;
  };
  std::set<std::pair<int, Coord>> keys;
  for (const auto& [k, p] : a.cells) keys.insert(k);
  for (const auto& [k, p] : b.cells) keys.insert(k);
  for (const auto& k : keys)
    if (normalized(a, k) != normalized(b, k)) return false;
  return true;
}

enum class Applicability { Yes, No, Undecided };

struct Blocking {
  bool on_factor = false;
  int factor = 0;
  int tape = 0;
  Coord coord = 0;       // absolute coordinate at the vertex (= seed coordinate)
  SymbolSet want = 0;    // domain mask, in the vertex's current values
};

Applicability edge_applicable(const SpaceDescriptor& sp, const SymbolicConfig& cfg, const Edge& e,
                              Blocking& block) {
  // A conflict anywhere beats an undecided cell elsewhere, so scan fully.
  bool undecided = false;
  for (int f = 0; f < sp.factor_count(); ++f) {
    if (!e.domain.factor[f]) continue;
    if (!cfg.cyl.factor[f]) {
      if (!undecided) block = Blocking{true, f, 0, 0, 0};
      undecided = true;
      continue;
    }
    if (*cfg.cyl.factor[f] != *e.domain.factor[f]) return Applicability::No;
  }
  for (int t = 0; t < sp.tape_count(); ++t) {
    for (const auto& [offset, want] : e.domain.cells[t]) {
      if (want == sp.tapes[t].full_mask()) continue;
      const Coord cell = cfg.heads[t] + offset;
      const SymbolSet* have = cfg.cyl.cells[t].find(cell);
      if (!have) {
        if (!undecided) block = Blocking{false, 0, t, cell, want};
        undecided = true;
        continue;
      }
      if ((*have & want) == 0) return Applicability::No;
      if ((*have & ~want) != 0) {
        if (!undecided) block = Blocking{false, 0, t, cell, want};
        undecided = true;
      }
    }
  }
  return undecided ? Applicability::Undecided : Applicability::Yes;
}

// Pulls a blocking-split at a vertex back to the seed: the cell key is the
// same, only its values were permuted along the path.
UndecidedCell pull_back_blocking(const SpaceDescriptor& sp, const Blocking& block,
                                 const Transform& t, const Cylinder& seed) {
  if (block.on_factor) return UndecidedCell{true, block.factor, 0, 0, {}};
  UndecidedCell out;
  out.tape = block.tape;
  out.coord = block.coord;
  const SymbolSet* seed_mask = seed.cells[block.tape].find(block.coord);
  const SymbolSet base = seed_mask ? *seed_mask : sp.tapes[block.tape].full_mask();
  auto it = t.cells.find({block.tape, block.coord});
  const Perm inv = it == t.cells.end() ? identity_perm(sp.tapes[block.tape].size())
                                       : inverse_perm(it->second);
  const SymbolSet inside = apply_perm(inv, block.want) & base;
  out.parts = {inside, base & ~inside};
  return out;
}

}  // namespace

Edge inverse_edge(const SpaceDescriptor& sp, const Edge& e, Coord window) {
  SymbolicConfig cfg;
  cfg.cyl = e.domain;
  cfg.heads.assign(sp.tape_count(), 0);
  ApplyResult r = apply_word(sp, cfg, e.word, window);
  if (!std::holds_alternative<SymbolicConfig>(r))
    throw config_error("edge word not determined on its domain: " + e.label);
  Edge out;
  out.word = inverse_word(e.word);
  out.domain = std::get<SymbolicConfig>(r).point_view();
  out.label = e.label + "^-1";
  return out;
}

std::optional<Edge> compose_edges(const SpaceDescriptor& sp, const Edge& a, const Edge& b,
                                  Coord window) {
  SymbolicConfig cfg;
  cfg.cyl = a.domain;
  cfg.heads.assign(sp.tape_count(), 0);
  ApplyResult r = apply_word(sp, cfg, a.word, window);
  if (!std::holds_alternative<SymbolicConfig>(r))
    throw config_error("edge word not determined on its domain: " + a.label);
  SymbolicConfig mid = std::get<SymbolicConfig>(r);

  Cylinder b_dom = Cylinder::whole_space(sp);
  for (int t = 0; t < sp.tape_count(); ++t)
    for (const auto& [offset, mask] : b.domain.cells[t]) b_dom.cells[t][mid.heads[t] + offset] = mask;
  b_dom.factor = b.domain.factor;

  auto inter = mid.cyl.intersect(b_dom);
  if (!inter) return std::nullopt;
  for (int t = 0; t < sp.tape_count(); ++t)
    for (const auto& [coord, mask] : inter->cells[t])
      if (mask == 0) return std::nullopt;

  SymbolicConfig pinned = mid;
  pinned.cyl = *inter;
  ApplyResult back = apply_word(sp, pinned, inverse_word(a.word), window);
  if (!std::holds_alternative<SymbolicConfig>(back))
    throw config_error("edge composition could not pull the domain back");
  Edge out;
  out.word = a.word;
  out.word.insert(out.word.end(), b.word.begin(), b.word.end());
  out.domain = std::get<SymbolicConfig>(back).point_view();
  out.label = a.label + "*" + b.label;
  return out;
}

Edge indicator_edge(const SpaceDescriptor& sp, Cylinder domain, std::string label) {
  (void)sp;
  return Edge{Word{}, std::move(domain), std::move(label)};
}

Rational OperatorExpression::norm_bound() const {
  Rational b(0);
  for (const auto& t : terms) b += t.coeff.abs();
  return b;
}

OperatorExpression adjoint(const SpaceDescriptor& sp, const OperatorExpression& expr) {
  OperatorExpression out;
  for (const auto& t : expr.terms) out.terms.push_back({t.coeff, inverse_edge(sp, t.edge)});
  return out;
}

std::size_t SchreierDiagram::count_tag(VertexTag t) const {
  std::size_t n = 0;
  for (auto tag : tags) n += tag == t;
  return n;
}

std::string SchreierDiagram::canonical_form() const {
  // Per vertex and oriented edge label there is at most one arc (edges are
  // partial bijections), so breadth-first relabeling from a fixed start is
  // canonical; minimizing over starts gives a root-free form.
  const std::size_t n = vertices.size();
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> out_arc, in_arc;
  std::uint32_t max_edge = 0;
  for (const auto& a : arcs) max_edge = std::max(max_edge, std::uint32_t(a.edge));
  for (const auto& a : arcs) {
    out_arc[{a.from, a.edge}] = a.to;
    in_arc[{a.to, a.edge}] = a.from;
  }
  std::string best;
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::uint32_t> order(n, UINT32_MAX);
    std::vector<std::uint32_t> bfs{static_cast<std::uint32_t>(start)};
    order[start] = 0;
    std::uint32_t next_id = 1;
    std::ostringstream enc;
    for (std::size_t qi = 0; qi < bfs.size(); ++qi) {
      const std::uint32_t u = bfs[qi];
      enc << 't' << int(tags[u]) << ':';
      for (std::uint32_t e = 0; e <= max_edge; ++e) {
        for (int dir = 0; dir < 2; ++dir) {
          auto& table = dir == 0 ? out_arc : in_arc;
          auto it = table.find({u, e});
          if (it == table.end()) {
            enc << '.';
            continue;
          }
          std::uint32_t v = it->second;
          if (order[v] == UINT32_MAX) {
            order[v] = next_id++;
            bfs.push_back(v);
          }
          enc << order[v] << ',';
        }
      }
      enc << ';';
    }
    std::string s = enc.str();
    if (best.empty() || s < best) best = std::move(s);
  }
  return best;
}

namespace {

struct ClosureVertex {
  SymbolicConfig cfg;
  Transform transform;
  std::string sig;
};

struct Closure {
  std::vector<ClosureVertex> vertices;
  std::map<std::string, std::uint32_t> by_sig;
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint16_t>> arc_set;
  std::vector<SchreierDiagram::Arc> arcs;
};

}  // namespace

DiagramResult orbit_diagram(const SpaceDescriptor& sp, const SymbolicConfig& seed,
                            const std::vector<Edge>& edges, std::size_t cap, Coord window,
                            const TagFn& tag) {
  // Internal traversal list: the given edges followed by their inverses.
  std::vector<Edge> all = edges;
  for (const auto& e : edges) all.push_back(inverse_edge(sp, e, window));
  const std::size_t n_fwd = edges.size();

  const Cylinder& base = seed.cyl;
  Closure cl;
  {
    ClosureVertex root;
    root.cfg = seed;
    root.cfg.step_count = 0;
    root.transform = Transform::identity(sp);
    root.sig = restricted_signature(sp, root.transform, root.cfg.heads, base);
    cl.by_sig[root.sig] = 0;
    cl.vertices.push_back(std::move(root));
  }

  for (std::size_t qi = 0; qi < cl.vertices.size(); ++qi) {
    for (std::size_t ei = 0; ei < all.size(); ++ei) {
      Blocking block;
      const Applicability app = edge_applicable(sp, cl.vertices[qi].cfg, all[ei], block);
      if (app == Applicability::No) continue;
      if (app == Applicability::Undecided) {
        if (block.on_factor || (block.coord >= -window && block.coord <= window))
          return pull_back_blocking(sp, block, cl.vertices[qi].transform, base);
        return TooLarge{static_cast<std::size_t>(window),
                        "edge domain reaches beyond the cell window"};
      }

      SymbolicConfig target;
      try {
        ApplyResult r = apply_word(sp, cl.vertices[qi].cfg, all[ei].word, window);
        if (const auto* need = std::get_if<NeedsRefinement>(&r)) {
          // A flip hit a free cell mid-word; split that cell at the seed.
          UndecidedCell out;
          out.tape = need->cells.front().tape;
          out.coord = need->cells.front().coord;
          const SymbolSet full = sp.tapes[out.tape].full_mask();
          for (int s = 0; s < sp.tapes[out.tape].size(); ++s)
            if (full & (SymbolSet{1} << s)) out.parts.push_back(SymbolSet{1} << s);
          return out;
        }
        target = std::move(std::get<SymbolicConfig>(r));
      } catch (const window_exceeded&) {
        return TooLarge{static_cast<std::size_t>(window), "orbit leaves the head window"};
      }

      Transform tt = cl.vertices[qi].transform;
      compose_word_into(sp, tt, cl.vertices[qi].cfg.heads, base, all[ei].word);
      std::string sig = restricted_signature(sp, tt, target.heads, base);

      std::uint32_t tv;
      auto hit = cl.by_sig.find(sig);
      if (hit != cl.by_sig.end()) {
        tv = hit->second;
        // Same action on every point of the seed; if the composite group
        // elements still differ, a nontrivial element fixes this cylinder
        // pointwise and the orbit count would be wrong.
        if (!full_equal(sp, tt, cl.vertices[tv].transform))
          throw stabilizer_detected("a nonempty reduced edge word fixes the cylinder " +
                                    base.str(sp));
      } else {
        if (cl.vertices.size() >= cap)
          return TooLarge{cap, "orbit exceeds the vertex cap"};
        ClosureVertex v;
        v.cfg = std::move(target);
        v.transform = std::move(tt);
        v.sig = sig;
        cl.by_sig[sig] = tv = static_cast<std::uint32_t>(cl.vertices.size());
        cl.vertices.push_back(std::move(v));
      }

      const std::uint32_t from = ei < n_fwd ? static_cast<std::uint32_t>(qi) : tv;
      const std::uint32_t to = ei < n_fwd ? tv : static_cast<std::uint32_t>(qi);
      const std::uint16_t label = static_cast<std::uint16_t>(ei < n_fwd ? ei : ei - n_fwd);
      if (cl.arc_set.insert({from, to, label}).second)
        cl.arcs.push_back(SchreierDiagram::Arc{from, to, label});
    }
  }

  SchreierDiagram d;
  d.root = 0;
  for (auto& v : cl.vertices) {
    d.tags.push_back(tag ? tag(v.cfg) : VertexTag::None);
    d.vertices.push_back(std::move(v.cfg));
  }
  std::sort(cl.arcs.begin(), cl.arcs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.from, a.edge, a.to) < std::tie(b.from, b.edge, b.to);
  });
  d.arcs = std::move(cl.arcs);
  return d;
}

ClassEnumeration enumerate_orbit_classes(const SpaceDescriptor& sp, const std::vector<Edge>& edges,
                                         const EnumerateOptions& opt, const TagFn& tag) {
  ClassEnumeration out;
  out.residual_mass = Rational(0);
  out.enumerated_mass = Rational(0);

  std::vector<SymbolicConfig> queue{SymbolicConfig::start(sp)};
  std::map<std::string, std::size_t> by_canon;

  while (!queue.empty()) {
    SymbolicConfig cand = std::move(queue.back());
    queue.pop_back();
    const Rational mass = cand.cyl.measure(sp);

    DiagramResult r = orbit_diagram(sp, cand, edges, opt.cap, opt.window, tag);
    if (const auto* undecided = std::get_if<UndecidedCell>(&r)) {
      if (undecided->on_factor) {
        for (auto& child : refine_factor(sp, cand.cyl, undecided->factor)) {
          SymbolicConfig c = cand;
          c.cyl = std::move(child);
          queue.push_back(std::move(c));
        }
      } else {
        for (auto& child : refine_cell_partition(sp, cand.cyl, undecided->tape, undecided->coord,
                                                 undecided->parts)) {
          SymbolicConfig c = cand;
          c.cyl = std::move(child);
          queue.push_back(std::move(c));
        }
      }
      continue;
    }
    if (std::holds_alternative<TooLarge>(r)) {
      out.residual_mass += mass;
      continue;
    }

    SchreierDiagram d = std::move(std::get<SchreierDiagram>(r));
    out.enumerated_mass += mass;
    out.piece_count += 1;
    if (opt.keep_pieces) out.pieces.push_back(OrbitClass{cand.cyl, d, mass, 1});

    const std::string canon = d.canonical_form();
    auto it = by_canon.find(canon);
    if (it == by_canon.end()) {
      by_canon[canon] = out.classes.size();
      out.classes.push_back(OrbitClass{cand.cyl, std::move(d), mass, 1});
    } else {
      out.classes[it->second].mass += mass;
      out.classes[it->second].pieces += 1;
    }
  }
  return out;
}

RationalMatrix convolution_matrix(const SpaceDescriptor& sp, const SchreierDiagram& d,
                                  const OperatorExpression& expr, Coord window) {
  // Rebuild path transforms of the diagram vertices by walking its arcs is
  // not possible without the generating edges, so match expression targets
  // by configuration; ambiguous twins would have been split upstream.
  const std::size_t n = d.size();
  std::map<std::string, std::uint32_t> by_key;
  auto key_of = [&](const SymbolicConfig& cfg) {
    std::ostringstream k;
    for (Coord h : cfg.heads) k << h << ';';
    k << cfg.cyl.str(sp);
    return k.str();
  };
  for (std::uint32_t v = 0; v < n; ++v) {
    auto key = key_of(d.vertices[v]);
    if (!by_key.emplace(key, v).second)
      throw undecided_vertex("diagram has twin vertices; refine the class before convolving");
  }

  RationalMatrix m(n, n);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (const auto& term : expr.terms) {
      Blocking block;
      const Applicability app = edge_applicable(sp, d.vertices[u], term.edge, block);
      if (app == Applicability::No) continue;
      if (app == Applicability::Undecided)
        throw undecided_vertex("vertex cylinder too coarse for the expression domain");
      ApplyResult r = apply_word(sp, d.vertices[u], term.edge.word, window);
      if (!std::holds_alternative<SymbolicConfig>(r))
        throw undecided_vertex("expression word not determined at a vertex");
      auto it = by_key.find(key_of(std::get<SymbolicConfig>(r)));
      if (it == by_key.end())
        throw config_error("diagram is not closed under the expression edge " + term.edge.label);
      m.at(u, it->second) += term.coeff;
    }
  }
  return m;
}

std::vector<Edge> system_edges(const TuringSystem& sys) {
  std::vector<Edge> out;
  const SpaceDescriptor& sp = sys.space();
  for (const auto& row : sys.rows()) {
    Edge e;
    e.word = sys.rule(row.rule).word;
    e.domain = Cylinder::whole_space(sp);
    for (int t = 0; t < sp.tape_count(); ++t)
      if (row.pattern[t] != sp.tapes[t].full_mask()) e.domain.cells[t][0] = row.pattern[t];
    e.domain.factor[sys.state_factor()] = row.state;
    e.label = sys.rule(row.rule).name;
    out.push_back(std::move(e));
  }
  return out;
}

TagFn system_tag(const TuringSystem& sys) {
  return [&sys](const SymbolicConfig& cfg) -> VertexTag {
    ClassifyResult r = classify(sys, cfg);
    if (!std::holds_alternative<Classified>(r)) return VertexTag::None;
    switch (sys.rule(std::get<Classified>(r).rule).cls) {
      case BlockClass::Initial: return VertexTag::Initial;
      case BlockClass::Accepting: return VertexTag::Accepting;
      case BlockClass::Rejecting: return VertexTag::Rejecting;
      default: return VertexTag::None;
    }
  };
}

std::string diagram_dot(const SpaceDescriptor& sp, const SchreierDiagram& d,
                        const std::vector<Edge>& edges) {
  std::ostringstream out;
  out << "digraph schreier {\n  rankdir=LR;\n";
  for (std::size_t v = 0; v < d.size(); ++v) {
    const char* color = "white";
    std::string tag;
    switch (d.tags[v]) {
      case VertexTag::Initial: color = "lightblue"; tag = " [I]"; break;
      case VertexTag::Accepting: color = "palegreen"; tag = " [A]"; break;
      case VertexTag::Rejecting: color = "lightcoral"; tag = " [R]"; break;
      default: break;
    }
    out << "  v" << v << " [shape=box,style=filled,fillcolor=" << color << ",label=\"" << v << tag
        << "\\n" << d.vertices[v].str(sp) << "\"];\n";
  }
  for (const auto& a : d.arcs) {
    out << "  v" << a.from << " -> v" << a.to << " [label=\""
        << (a.edge < edges.size() ? edges[a.edge].label : std::to_string(a.edge)) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace vndim
