#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "vndim/groupoid.hpp"

using namespace vndim;

namespace {

// Shift generator restricted to a cylinder, as in the lamplighter walk:
// forward on {x_0 = 0}, backward on {x_-1 = 0}.
std::vector<Edge> walk_edges(const SpaceDescriptor& sp) {
  Cylinder d0 = Cylinder::whole_space(sp);
  d0.cells[0][0] = 0b01;
  Cylinder d1 = Cylinder::whole_space(sp);
  d1.cells[0][-1] = 0b01;
  return {Edge{{Shift{0, +1}}, d0, "t"}, Edge{{Shift{0, -1}}, d1, "t-"}};
}

// Seed whose tape reads 1 0^k 1 with the head on the first zero.
SymbolicConfig run_seed(const SpaceDescriptor& sp, int k) {
  SymbolicConfig cfg = SymbolicConfig::start(sp);
  cfg.cyl.cells[0][-1] = 0b10;
  for (int i = 0; i < k; ++i) cfg.cyl.cells[0][i] = 0b01;
  cfg.cyl.cells[0][k] = 0b10;
  return cfg;
}

OperatorExpression walk_expression(const SpaceDescriptor& sp) {
  auto edges = walk_edges(sp);
  return OperatorExpression{{{Rational(1), edges[0]}, {Rational(1), edges[1]}}};
}

}  // namespace

TEST_CASE("a blocked seed is a single vertex with no edges") {
  SpaceDescriptor sp = testing::binary_tape_space();
  SymbolicConfig seed = SymbolicConfig::start(sp);
  seed.cyl.cells[0][-1] = 0b10;
  seed.cyl.cells[0][0] = 0b10;
  auto r = orbit_diagram(sp, seed, walk_edges(sp), 100);
  REQUIRE(std::holds_alternative<SchreierDiagram>(r));
  const auto& d = std::get<SchreierDiagram>(r);
  CHECK(d.size() == 1);
  CHECK(d.arcs.empty());
}

TEST_CASE("a run of k zeros closes into a path with k+1 vertices") {
  SpaceDescriptor sp = testing::binary_tape_space();
  for (int k = 1; k <= 8; ++k) {
    auto r = orbit_diagram(sp, run_seed(sp, k), walk_edges(sp), 100);
    REQUIRE(std::holds_alternative<SchreierDiagram>(r));
    const auto& d = std::get<SchreierDiagram>(r);
    // Closure oracle: the head can sit at positions 0..k and nowhere else.
    std::set<Coord> heads;
    for (const auto& v : d.vertices) heads.insert(v.heads[0]);
    std::set<Coord> expected;
    for (Coord h = 0; h <= k; ++h) expected.insert(h);
    CHECK(heads == expected);
    CHECK(d.size() == static_cast<std::size_t>(k) + 1);

    // Path structure: forward arcs chain the head positions.
    std::size_t fwd = 0;
    for (const auto& a : d.arcs) fwd += a.edge == 0;
    CHECK(fwd == static_cast<std::size_t>(k));
  }
}

TEST_CASE("orbit classes of the walk partition the space") {
  SpaceDescriptor sp = testing::binary_tape_space();
  EnumerateOptions opt;
  opt.window = 10;
  auto en = enumerate_orbit_classes(sp, walk_edges(sp), opt);

  Rational total = en.residual_mass;
  for (const auto& c : en.classes) total += c.mass;
  CHECK(total == Rational(1));

  // The blocked class and the aggregated runs carry the expected weights.
  bool found_blocked = false;
  std::map<std::size_t, Rational> run_mass;
  std::map<std::size_t, std::size_t> run_pieces;
  for (const auto& c : en.classes) {
    if (c.diagram.size() == 1 && c.diagram.arcs.empty()) {
      found_blocked = true;
      CHECK(c.mass == Rational(1, 4));
    } else {
      run_mass[c.diagram.size()] += c.mass;
      run_pieces[c.diagram.size()] += c.pieces;
    }
  }
  CHECK(found_blocked);
  for (std::size_t k = 1; k <= 8; ++k) {
    CHECK(run_mass[k + 1] == Rational(static_cast<long>(k) + 1) * Rational::pow2(-(static_cast<long>(k) + 2)));
    CHECK(run_pieces[k + 1] == k + 1);
  }
}

TEST_CASE("residual mass is nonincreasing in the window") {
  SpaceDescriptor sp = testing::binary_tape_space();
  Rational prev(1);
  for (Coord w : {4, 6, 8, 12}) {
    EnumerateOptions opt;
    opt.window = w;
    auto en = enumerate_orbit_classes(sp, walk_edges(sp), opt);
    CHECK(en.residual_mass <= prev);
    prev = en.residual_mass;
  }
}

TEST_CASE("convolution matrices") {
  SpaceDescriptor sp = testing::binary_tape_space();
  OperatorExpression expr = walk_expression(sp);

  auto r = orbit_diagram(sp, run_seed(sp, 3), walk_edges(sp), 100);
  const auto& d = std::get<SchreierDiagram>(r);
  RationalMatrix m = convolution_matrix(sp, d, expr);
  CHECK(m.is_symmetric());
  // Path adjacency: every row sums to 1 or 2 and the diagonal vanishes.
  for (std::size_t i = 0; i < m.rows(); ++i) CHECK(m.at(i, i).is_zero());
  CHECK(kernel_dimension(m) == (d.size() % 2 == 1 ? 1 : 0));

  // Single blocked vertex: the 1x1 zero matrix.
  SymbolicConfig blocked = SymbolicConfig::start(sp);
  blocked.cyl.cells[0][-1] = 0b10;
  blocked.cyl.cells[0][0] = 0b10;
  auto rb = orbit_diagram(sp, blocked, walk_edges(sp), 100);
  RationalMatrix mb = convolution_matrix(sp, std::get<SchreierDiagram>(rb), expr);
  CHECK(mb.rows() == 1);
  CHECK(mb.at(0, 0).is_zero());
  CHECK(kernel_dimension(mb) == 1);

  // An indicator contributes a 0/1 diagonal.
  Cylinder u = Cylinder::whole_space(sp);
  u.cells[0][0] = 0b01;
  OperatorExpression ind{{{Rational(1), indicator_edge(sp, u, "chi")}}};
  RationalMatrix mi = convolution_matrix(sp, d, ind);
  for (std::size_t i = 0; i < mi.rows(); ++i)
    for (std::size_t j = 0; j < mi.cols(); ++j) {
      if (i != j) CHECK(mi.at(i, j).is_zero());
      else CHECK((mi.at(i, i) == Rational(0) || mi.at(i, i) == Rational(1)));
    }
}

TEST_CASE("adjoint inverts edges and is an involution") {
  SpaceDescriptor sp = testing::binary_tape_space();
  auto edges = walk_edges(sp);

  Edge inv = inverse_edge(sp, edges[0]);
  CHECK(inv.word == Word{GeneratorAction{Shift{0, -1}}});
  CHECK(inv.domain.cells[0].count(-1) == 1);
  CHECK(inv.domain.cells[0].at(-1) == 0b01);

  // Multiplication operators are self-adjoint.
  Cylinder u = Cylinder::whole_space(sp);
  u.cells[0][2] = 0b10;
  OperatorExpression chi{{{Rational(1), indicator_edge(sp, u, "chi")}}};
  OperatorExpression chi_star = adjoint(sp, chi);
  CHECK(chi_star.terms[0].edge.domain == u);
  CHECK(chi_star.terms[0].edge.word.empty());

  std::mt19937_64 rng(67);
  for (int i = 0; i < 100; ++i) {
    OperatorExpression e;
    for (int t = 0; t < 3; ++t) {
      Edge edge;
      int len = 1 + int(rng() % 3);
      for (int a = 0; a < len; ++a) edge.word.push_back(Shift{0, rng() % 2 ? +1 : -1});
      edge.domain = testing::random_cylinder(rng, sp, 3, 4);
      edge.label = "e" + std::to_string(t);
      e.terms.push_back({testing::random_rational(rng), edge});
    }
    OperatorExpression twice = adjoint(sp, adjoint(sp, e));
    REQUIRE(twice.terms.size() == e.terms.size());
    for (std::size_t t = 0; t < e.terms.size(); ++t) {
      CHECK(twice.terms[t].coeff == e.terms[t].coeff);
      CHECK(twice.terms[t].edge.word == e.terms[t].edge.word);
      CHECK(twice.terms[t].edge.domain == e.terms[t].edge.domain);
    }
  }
}

TEST_CASE("adjoint transposes convolution matrices") {
  SpaceDescriptor sp = testing::binary_tape_space();
  auto edges = walk_edges(sp);
  OperatorExpression one_sided{{{Rational(1, 2), edges[0]}}};
  for (int k = 2; k <= 6; ++k) {
    auto r = orbit_diagram(sp, run_seed(sp, k), edges, 100);
    const auto& d = std::get<SchreierDiagram>(r);
    RationalMatrix m = convolution_matrix(sp, d, one_sided);
    RationalMatrix ma = convolution_matrix(sp, d, adjoint(sp, one_sided));
    CHECK(ma == m.transpose());
  }
}

TEST_CASE("diagram type is seed independent within a class") {
  SpaceDescriptor sp = testing::binary_tape_space();
  auto r = orbit_diagram(sp, run_seed(sp, 4), walk_edges(sp), 100);
  const auto& d = std::get<SchreierDiagram>(r);
  const std::string canon = d.canonical_form();
  for (const auto& v : d.vertices) {
    auto rr = orbit_diagram(sp, v, walk_edges(sp), 100);
    REQUIRE(std::holds_alternative<SchreierDiagram>(rr));
    CHECK(std::get<SchreierDiagram>(rr).canonical_form() == canon);
  }
}

TEST_CASE("accepted scanning chains are trees with one self-loop") {
  OraclePtr sigma = oracle_list({1});
  TuringSystem x = build_system_x(sigma);
  auto edges = system_edges(x);
  Cylinder f1 = *fundamental_family_x(sigma).member(1);
  SymbolicConfig seed;
  seed.cyl = f1;
  seed.heads.assign(1, 0);
  auto r = orbit_diagram(x.space(), seed, edges, 1000, kDefaultWindow, system_tag(x));
  REQUIRE(std::holds_alternative<SchreierDiagram>(r));
  const auto& d = std::get<SchreierDiagram>(r);
  CHECK(d.size() == 4);  // 3k+1 configurations for k=1
  CHECK(d.count_tag(VertexTag::Initial) == 1);
  CHECK(d.count_tag(VertexTag::Accepting) == 1);
  CHECK(d.tags[d.root] == VertexTag::Initial);

  std::size_t self_loops = 0, proper = 0;
  for (const auto& a : d.arcs) {
    if (a.from == a.to) ++self_loops;
    else ++proper;
  }
  CHECK(self_loops == 1);
  CHECK(proper == d.size() - 1);  // tree
}

TEST_CASE("an element fixing a cylinder pointwise is flagged") {
  SpaceDescriptor sp;
  sp.tapes = {Alphabet{"m", {"000", "001", "010", "011", "100", "101", "110", "111"}}};
  Perm beta(8);
  for (int i = 0; i < 8; ++i) {
    int a = (i >> 2) & 1, b = (i >> 1) & 1, c = i & 1;
    beta[i] = static_cast<std::uint8_t>(a * 4 + c * 2 + b);
  }
  Cylinder dom = Cylinder::whole_space(sp);
  dom.cells[0][0] = SymbolSet{1} << 4;  // "100", fixed by the flip
  std::vector<Edge> edges{Edge{{HeadPerm{0, beta}}, dom, "flip"}};
  SymbolicConfig seed = SymbolicConfig::start(sp);
  seed.cyl.cells[0][0] = SymbolSet{1} << 4;
  CHECK_THROWS_AS(orbit_diagram(sp, seed, edges, 10), stabilizer_detected);
}

TEST_CASE("vertex caps report TooLarge") {
  SpaceDescriptor sp = testing::binary_tape_space();
  auto r = orbit_diagram(sp, run_seed(sp, 8), walk_edges(sp), 4);
  REQUIRE(std::holds_alternative<TooLarge>(r));
  CHECK(std::get<TooLarge>(r).limit == 4);
}

TEST_CASE("edge composition pulls domains back") {
  SpaceDescriptor sp = testing::binary_tape_space();
  auto edges = walk_edges(sp);
  // t then t: defined where x_0 = 0 and x_1 = 0.
  auto tt = compose_edges(sp, edges[0], edges[0]);
  REQUIRE(tt.has_value());
  CHECK(tt->domain.cells[0].at(0) == 0b01);
  CHECK(tt->domain.cells[0].at(1) == 0b01);
  // t then t^-1 is the identity on {x_0 = 0}.
  auto round = compose_edges(sp, edges[0], edges[1]);
  REQUIRE(round.has_value());
  CHECK(round->domain.cells[0].at(0) == 0b01);
  SymbolicConfig cfg = SymbolicConfig::start(sp);
  cfg.cyl.cells[0][0] = 0b01;
  auto applied = std::get<SymbolicConfig>(apply_word(sp, cfg, round->word));
  CHECK(applied.heads == cfg.heads);
  CHECK(applied.cyl == cfg.cyl);
}
