#include "vndim/group_ring.hpp"

#include <sstream>

#include "vndim/errors.hpp"

namespace vndim {

namespace {

void add_term(GroupRingExpr& e, GroupWord w, Rational c) {
  auto it = e.coeffs.find(w);
  if (it == e.coeffs.end()) {
    if (!c.is_zero()) e.coeffs.emplace(std::move(w), std::move(c));
    return;
  }
  it->second += c;
  if (it->second.is_zero()) e.coeffs.erase(it);
}

GroupWord identity_word(int tapes) {
  GroupWord w;
  w.shifts.assign(tapes, 0);
  return w;
}

}  // namespace

GroupRingExpr gr_identity(int tapes) {
  GroupRingExpr e;
  e.tapes = tapes;
  e.coeffs[identity_word(tapes)] = Rational(1);
  return e;
}

GroupRingExpr gr_shift(int tapes, int tape, std::int64_t k) {
  GroupRingExpr e;
  e.tapes = tapes;
  GroupWord w = identity_word(tapes);
  w.shifts[tape] = k;
  e.coeffs[std::move(w)] = Rational(1);
  return e;
}

GroupRingExpr gr_lamp(int tapes, int tape, std::int64_t index) {
  GroupRingExpr e;
  e.tapes = tapes;
  GroupWord w = identity_word(tapes);
  w.lamps.insert({tape, index});
  e.coeffs[std::move(w)] = Rational(1);
  return e;
}

GroupRingExpr gr_proj(int tapes, int tape, std::int64_t index) {
  return gr_scale(Rational(1, 2), gr_add(gr_identity(tapes), gr_lamp(tapes, tape, index)));
}

GroupRingExpr gr_add(const GroupRingExpr& a, const GroupRingExpr& b) {
  if (a.tapes != b.tapes) throw config_error("group ring arity mismatch");
  GroupRingExpr out = a;
  for (const auto& [w, c] : b.coeffs) add_term(out, w, c);
  return out;
}

GroupRingExpr gr_scale(const Rational& c, const GroupRingExpr& a) {
  GroupRingExpr out;
  out.tapes = a.tapes;
  if (c.is_zero()) return out;
  for (const auto& [w, k] : a.coeffs) out.coeffs[w] = c * k;
  return out;
}

GroupRingExpr formal_product(const GroupRingExpr& a, const GroupRingExpr& b) {
  if (a.tapes != b.tapes) throw config_error("group ring arity mismatch");
  GroupRingExpr out;
  out.tapes = a.tapes;
  for (const auto& [wa, ca] : a.coeffs) {
    for (const auto& [wb, cb] : b.coeffs) {
      // (f1, k1)(f2, k2) = (f1 + shifted f2, k1 + k2): conjugating a lamp
      // through t^k moves its index by -k.
      GroupWord w;
      w.shifts.resize(a.tapes);
      for (int t = 0; t < a.tapes; ++t) w.shifts[t] = wa.shifts[t] + wb.shifts[t];
      w.lamps = wa.lamps;
      for (const auto& [tape, index] : wb.lamps) {
        auto key = std::make_pair(tape, index - wa.shifts[tape]);
        auto it = w.lamps.find(key);
        if (it == w.lamps.end())
          w.lamps.insert(key);
        else
          w.lamps.erase(it);  // Z/2: g^2 = e
      }
      add_term(out, std::move(w), ca * cb);
    }
  }
  return out;
}

GroupRingExpr formal_power(const GroupRingExpr& a, unsigned n) {
  GroupRingExpr acc = gr_identity(a.tapes);
  for (unsigned i = 0; i < n; ++i) acc = formal_product(acc, a);
  return acc;
}

GroupRingExpr formal_star(const GroupRingExpr& a) {
  GroupRingExpr out;
  out.tapes = a.tapes;
  for (const auto& [w, c] : a.coeffs) {
    // (f, k)^-1 = (f shifted by +k, -k).
    GroupWord inv;
    inv.shifts.resize(a.tapes);
    for (int t = 0; t < a.tapes; ++t) inv.shifts[t] = -w.shifts[t];
    for (const auto& [tape, index] : w.lamps) inv.lamps.insert({tape, index + w.shifts[tape]});
    add_term(out, std::move(inv), c);
  }
  return out;
}

Rational formal_trace(const GroupRingExpr& e) {
  GroupWord id = identity_word(e.tapes);
  auto it = e.coeffs.find(id);
  return it == e.coeffs.end() ? Rational(0) : it->second;
}

std::string gr_str(const GroupRingExpr& e) {
  if (e.coeffs.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [w, c] : e.coeffs) {
    if (!first) out << " + ";
    out << "(" << c.str() << ")";
    for (const auto& [tape, index] : w.lamps) out << "*g" << tape << "_" << index;
    for (int t = 0; t < e.tapes; ++t)
      if (w.shifts[t] != 0) out << "*t" << t << "^" << w.shifts[t];
    first = false;
  }
  return out.str();
}

GroupRingExpr gr_lamplighter_walk() {
  GroupRingExpr t = gr_shift(1, 0, 1);
  GroupRingExpr tinv = gr_shift(1, 0, -1);
  GroupRingExpr g = gr_lamp(1, 0, 0);
  GroupRingExpr sum = gr_add(gr_add(t, tinv),
                             gr_add(formal_product(t, g), formal_product(g, tinv)));
  return gr_scale(Rational(1, 2), sum);
}

SpaceDescriptor translation_space(int tapes) {
  SpaceDescriptor sp;
  for (int t = 0; t < tapes; ++t)
    sp.tapes.push_back(Alphabet{"t" + std::to_string(t), {"0", "1"}});
  return sp;
}

OperatorExpression translate(const SpaceDescriptor& sp, const GroupRingExpr& e) {
  if (sp.tape_count() < e.tapes)
    throw unsupported_atom("translation space has fewer tapes than the expression");
  for (int t = 0; t < e.tapes; ++t)
    if (sp.tapes[t].size() != 2)
      throw unsupported_atom("translation needs binary tapes (Z/2 lamps only)");

  OperatorExpression out;
  for (const auto& [w, c] : e.coeffs) {
    // Normal form f * t^k acts rightmost-first: the shifts move the point,
    // then each lamp multiplies by 2*chi{x_i = 0} - 1. Evaluated after the
    // shift, the indicator cell pulls back to source coordinate i + k.
    Word shift_word;
    for (int t = 0; t < e.tapes; ++t) {
      for (std::int64_t s = 0; s < std::llabs(w.shifts[t]); ++s)
        shift_word.push_back(Shift{t, w.shifts[t] > 0 ? +1 : -1});
    }
    std::vector<OperatorTerm> terms{{c, Edge{shift_word, Cylinder::whole_space(sp), "w"}}};
    for (const auto& [tape, index] : w.lamps) {
      const Coord cell = index + w.shifts[tape];
      std::vector<OperatorTerm> next;
      for (const auto& term : terms) {
        const SymbolSet* have = term.edge.domain.cells[tape].find(cell);
        const SymbolSet zero = SymbolSet{1};
        // 2 * chi{cell = 0} part.
        if (!have || (*have & zero)) {
          OperatorTerm constrained = term;
          constrained.coeff = term.coeff * Rational(2);
          constrained.edge.domain.cells[tape][cell] = zero;
          next.push_back(std::move(constrained));
        }
        // -1 part.
        OperatorTerm unconstrained = term;
        unconstrained.coeff = -term.coeff;
        next.push_back(std::move(unconstrained));
      }
      terms = std::move(next);
    }
    for (auto& term : terms) out.terms.push_back(std::move(term));
  }

  // Merge duplicate (word, domain) supports and drop vanished terms.
  OperatorExpression merged;
  for (auto& term : out.terms) {
    bool found = false;
    for (auto& kept : merged.terms) {
      if (kept.edge.word == term.edge.word && kept.edge.domain == term.edge.domain) {
        kept.coeff += term.coeff;
        found = true;
        break;
      }
    }
    if (!found) merged.terms.push_back(std::move(term));
  }
  std::erase_if(merged.terms, [](const OperatorTerm& t) { return t.coeff.is_zero(); });
  return merged;
}

namespace {

struct SexprParser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  std::string token() {
    skip_ws();
    if (pos >= text.size()) throw config_error("unexpected end of expression");
    if (text[pos] == '(' || text[pos] == ')') return std::string(1, text[pos++]);
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    return text.substr(start, pos - start);
  }

  std::string peek() {
    std::size_t save = pos;
    std::string t = token();
    pos = save;
    return t;
  }

  GroupRingExpr parse() {
    if (token() != "(") throw config_error("expected '(' in expression");
    std::string head = token();
    if (head == "shift") {
      std::int64_t k = std::stoll(token());
      expect_close();
      return gr_shift(1, 0, k);
    }
    if (head == "lamp") {
      std::int64_t i = std::stoll(token());
      long a = std::stol(token());
      expect_close();
      if (a != 0 && a != 1) throw unsupported_atom("lamp values must lie in Z/2");
      return a == 0 ? gr_identity(1) : gr_lamp(1, 0, i);
    }
    if (head == "proj") {
      std::int64_t i = std::stoll(token());
      expect_close();
      return gr_proj(1, 0, i);
    }
    if (head == "scale") {
      Rational r = Rational::parse(token());
      GroupRingExpr acc = gr_identity(1);
      bool first = true;
      while (peek() != ")") {
        GroupRingExpr e = parse();
        acc = first ? e : formal_product(acc, e);
        first = false;
      }
      expect_close();
      return gr_scale(r, acc);
    }
    if (head == "sum" || head == "prod") {
      bool product = head == "prod";
      GroupRingExpr acc;
      bool first = true;
      while (peek() != ")") {
        GroupRingExpr e = parse();
        if (first)
          acc = e;
        else
          acc = product ? formal_product(acc, e) : gr_add(acc, e);
        first = false;
      }
      expect_close();
      if (first) return product ? gr_identity(1) : GroupRingExpr{1, {}};
      return acc;
    }
    throw unsupported_atom("unknown group ring atom: " + head);
  }

  void expect_close() {
    if (token() != ")") throw config_error("expected ')' in expression");
  }
};

}  // namespace

GroupRingExpr parse_group_ring(const std::string& text) {
  SexprParser p{text};
  GroupRingExpr e = p.parse();
  p.skip_ws();
  if (p.pos != text.size()) throw config_error("trailing input after expression");
  return e;
}

}  // namespace vndim
