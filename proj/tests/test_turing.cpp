#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "vndim/turing.hpp"

using namespace vndim;

namespace {

SymbolicConfig seed_from(const TuringSystem& sys, const Cylinder& cyl) {
  SymbolicConfig cfg;
  cfg.cyl = cyl;
  cfg.heads.assign(sys.space().tape_count(), 0);
  return cfg;
}

// One-block system that maps its initial set onto itself.
TuringSystem restart_toy() {
  SpaceDescriptor sp;
  sp.tapes = {Alphabet{"tape", {"0", "1"}}};
  sp.factors = {Factor{"state", {"S"}}};
  TuringSystem sys(sp, 0);
  sys.add_row({0b11}, 0, sys.add_rule({"S/any", {Shift{0, +1}}, 0, BlockClass::Initial}));
  sys.validate();
  return sys;
}

// Two work blocks ping-ponging; never halts anywhere.
TuringSystem two_cycle_toy() {
  SpaceDescriptor sp;
  sp.tapes = {Alphabet{"tape", {"0", "1"}}};
  sp.factors = {Factor{"state", {"P", "Q"}}};
  TuringSystem sys(sp, 0);
  sys.add_row({0b11}, 0, sys.add_rule({"P/any", {FactorMove{0, 0, 1}}, 1, BlockClass::Work}));
  sys.add_row({0b11}, 1, sys.add_rule({"Q/any", {FactorMove{0, 1, 0}}, 0, BlockClass::Work}));
  sys.validate();
  return sys;
}

// The scanning system with one arrow removed (the backward sweep over the
// flip-fixed symbols): runs with k >= 2 must go missing.
TuringSystem corrupted_system_x(const OraclePtr& oracle) {
  SpaceDescriptor sp;
  sp.tapes = {Alphabet{"m", {"000", "001", "010", "011", "100", "101", "110", "111"}}};
  sp.factors = {Factor{"state",
                       {"Start", "SearchFwd1", "SearchBack", "SearchFwdEither", "Dummy1", "Dummy2",
                        "Dummy3", "Dummy4"}}};
  TuringSystem sys(sp, 0);
  Perm beta(8);
  for (int i = 0; i < 8; ++i) {
    int a = (i >> 2) & 1, b = (i >> 1) & 1, c = i & 1;
    beta[i] = static_cast<std::uint8_t>(a * 4 + c * 2 + b);
  }
  SymbolSet fixed = 0;
  for (int i = 0; i < 8; ++i)
    if (beta[i] == i) fixed |= SymbolSet{1} << i;
  const SymbolSet mark = SymbolSet{1} << 2;
  const std::uint8_t st = 0, f1 = 1, bk = 2, fe = 3;
  sys.add_row({mark}, st,
              sys.add_rule({"Start/010", {Shift{0, +1}, FactorMove{0, st, f1}}, f1, BlockClass::Initial}));
  sys.add_row({fixed}, f1, sys.add_rule({"SearchFwd1/fixed", {Shift{0, +1}}, f1, BlockClass::Work}));
  sys.add_row({mark}, f1,
              sys.add_rule({"SearchFwd1/010",
                            {HeadPerm{0, beta}, Shift{0, -1}, FactorMove{0, f1, bk}},
                            bk,
                            BlockClass::Work}));
  // SearchBack/fixed deliberately omitted.
  sys.add_row({mark}, bk,
              sys.add_rule({"SearchBack/010",
                            {OracleFlip{0, beta, oracle}, Shift{0, +1}, FactorMove{0, bk, fe}},
                            fe,
                            BlockClass::Work}));
  sys.add_row({fixed}, fe, sys.add_rule({"SearchFwdEither/fixed", {Shift{0, +1}}, fe, BlockClass::Work}));
  sys.add_row({mark}, fe, sys.add_rule({"SearchFwdEither/010", {}, fe, BlockClass::Accepting}));
  sys.complete_with_reject();
  sys.validate();
  return sys;
}

Rational union_measure(const SpaceDescriptor& sp, const std::vector<Cylinder>& pieces) {
  // Inclusion-exclusion; fine for the small unions used here.
  const std::size_t n = pieces.size();
  Rational total(0);
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::optional<Cylinder> inter;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (std::size_t{1} << i))) continue;
      if (!inter) {
        inter = pieces[i];
      } else {
        inter = inter->intersect(pieces[i]);
        if (!inter) break;
      }
    }
    if (!inter) continue;
    Rational m = inter->measure(sp);
    if (__builtin_popcountll(mask) % 2 == 1)
      total += m;
    else
      total -= m;
  }
  return total;
}

}  // namespace

TEST_CASE("builtin systems validate and have the right initial mass") {
  TuringSystem x = build_system_x(oracle_evens());
  TuringSystem y = build_system_y();
  CHECK(x.class_mass(BlockClass::Initial) == Rational(1, 64));
  CHECK(y.class_mass(BlockClass::Initial) == Rational(1, 64));
  CHECK(x.class_mass(BlockClass::Accepting) == Rational(1, 64));
}

TEST_CASE("classify matches head symbols and state") {
  TuringSystem x = build_system_x(oracle_evens());
  SymbolicConfig cfg = SymbolicConfig::start(x.space());
  cfg.cyl.cells[0][0] = SymbolSet{1} << 2;  // "010"
  cfg.cyl.factor[0] = x.state_index("Start");
  auto r = classify(x, cfg);
  REQUIRE(std::holds_alternative<Classified>(r));
  CHECK(x.rule(std::get<Classified>(r).rule).cls == BlockClass::Initial);

  SymbolicConfig free_head = SymbolicConfig::start(x.space());
  free_head.cyl.factor[0] = x.state_index("Start");
  auto nr = classify(x, free_head);
  REQUIRE(std::holds_alternative<NeedsRefinement>(nr));
  CHECK(std::get<NeedsRefinement>(nr).cells.front() == CellRef{0, 0});

  TuringSystem y = build_system_y();
  SymbolicConfig a = SymbolicConfig::start(y.space());
  a.cyl.cells[0][0] = 0b01;
  a.cyl.cells[1][0] = 0b10;
  a.cyl.cells[2][0] = 0b10;
  a.cyl.factor[0] = y.state_index("FinalBack");
  auto ra = classify(y, a);
  REQUIRE(std::holds_alternative<Classified>(ra));
  CHECK(y.rule(std::get<Classified>(ra).rule).cls == BlockClass::Accepting);
}

TEST_CASE("step branches into a partition of the free head cell") {
  TuringSystem x = build_system_x(oracle_all());
  SymbolicConfig cfg = SymbolicConfig::start(x.space());
  cfg.cyl.cells[0][0] = SymbolSet{1} << 2;
  cfg.cyl.factor[0] = x.state_index("Start");
  cfg = std::get<Moved>(step(x, cfg)).next;  // onto the free cell 1

  auto so = step(x, cfg);
  REQUIRE(std::holds_alternative<Branched>(so));
  const auto& children = std::get<Branched>(so).children;
  // Partitioned by block behavior: the mark, the flip-fixed class, the rest.
  CHECK(children.size() == 3);
  Rational sum(0);
  for (const auto& c : children) sum += c.cyl.measure(x.space());
  CHECK(sum == cfg.cyl.measure(x.space()));
  for (std::size_t i = 0; i < children.size(); ++i)
    for (std::size_t j = i + 1; j < children.size(); ++j)
      CHECK(children[i].cyl.disjoint_from(children[j].cyl));
}

TEST_CASE("a rejecting start symbol halts immediately") {
  TuringSystem x = build_system_x(oracle_evens());
  SymbolicConfig cfg = SymbolicConfig::start(x.space());
  cfg.cyl.cells[0][0] = SymbolSet{1} << 4;  // "100"
  cfg.cyl.factor[0] = x.state_index("Start");
  auto so = step(x, cfg);
  REQUIRE(std::holds_alternative<Halted>(so));
  CHECK(std::get<Halted>(so).cls == BlockClass::Rejecting);
}

TEST_CASE("k=1 chain reaches the accepting set in 3 steps") {
  TuringSystem x = build_system_x(oracle_list({1}));
  Cylinder f1 = *fundamental_family_x(oracle_list({1})).member(1);
  SymbolicConfig cfg = seed_from(x, f1);

  std::vector<SymbolicConfig> chain{cfg};
  for (;;) {
    auto so = step(x, chain.back());
    if (std::holds_alternative<Halted>(so)) {
      CHECK(std::get<Halted>(so).cls == BlockClass::Accepting);
      break;
    }
    REQUIRE(std::holds_alternative<Moved>(so));
    chain.push_back(std::get<Moved>(so).next);
  }
  CHECK(chain.size() == chain_length_x(1));
  CHECK(chain.back().step_count == 3);
}

TEST_CASE("accepted chains have 3k+1 configurations") {
  OraclePtr sigma = oracle_list({1, 2, 3});
  TuringSystem x = build_system_x(sigma);
  ExploreOptions opt;
  opt.depth = 12;
  ExplorationResult res = explore_initial(x, opt);
  REQUIRE(res.accepted.size() == 3);
  std::vector<std::size_t> sizes;
  for (const auto& c : res.accepted) sizes.push_back(c.chain.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{4, 7, 10});
  for (const auto& c : res.accepted) {
    CHECK(c.chain.front().cyl == c.initial.cyl);
    CHECK(c.chain.back().cyl == c.final.cyl);
    CHECK(c.final.cyl.measure(x.space()) == c.initial.cyl.measure(x.space()));
  }
}

TEST_CASE("mass ledger is exact at every depth") {
  TuringSystem x = build_system_x(oracle_evens());
  TuringSystem y = build_system_y();
  for (std::uint64_t depth : {1, 2, 3, 5, 8, 13, 21}) {
    for (const TuringSystem* sys : {&x, &y}) {
      ExploreOptions opt;
      opt.depth = depth;
      opt.keep_chains = false;
      ExplorationResult res = explore_initial(*sys, opt);
      CHECK(res.start_mass == Rational(1, 64));
      CHECK(res.accepted_mass + res.rejected_mass + res.unresolved_mass == res.start_mass);
    }
  }
}

TEST_CASE("empty oracle accepts nothing") {
  TuringSystem x = build_system_x(oracle_empty());
  for (std::uint64_t depth : {5, 10, 20}) {
    ExploreOptions opt;
    opt.depth = depth;
    ExplorationResult res = explore_initial(x, opt);
    CHECK(res.accepted_mass == Rational(0));
    CHECK(res.accepted.empty());
  }
}

TEST_CASE("exploration from the initial set finds the k=1 cylinder of the paired-run system") {
  TuringSystem y = build_system_y();
  ExploreOptions opt;
  opt.depth = 60;
  ExplorationResult res = explore_initial(y, opt);
  Cylinder f1 = *fundamental_family_y().member(1);
  bool found = false;
  for (const auto& c : res.accepted) found = found || c.initial.point_view() == f1;
  CHECK(found);
  CHECK(res.accepted_mass >= Rational::pow2(-11) * Rational(1, 8));
}

TEST_CASE("omega1 lower bound matches the dyadic series") {
  TuringSystem y = build_system_y();
  auto fam = fundamental_family_y();
  std::uint64_t s2 = *steps_to_halt(y, seed_from(y, *fam.member(2)), 400);
  std::uint64_t s3 = *steps_to_halt(y, seed_from(y, *fam.member(3)), 400);
  REQUIRE(s2 < s3);

  Interval iv = omega1_bounds(y, s2);
  CHECK(iv.lo == dyadic_series_partial({11, 18}, Rational(1, 8)));
  CHECK(iv.contains(dyadic_series_partial({11, 18, 27}, Rational(1, 8))));

  // Nested intervals as depth grows.
  Interval deeper = omega1_bounds(y, s3);
  CHECK(deeper.lo >= iv.lo);
  CHECK(deeper.hi <= iv.hi);
  CHECK(deeper.width() <= iv.width());
}

TEST_CASE("omega1 for the even-set oracle converges toward 1/768") {
  TuringSystem x = build_system_x(oracle_evens());
  Interval iv = omega1_bounds(x, 37);  // covers k <= 12
  CHECK(iv.contains(Rational(1, 768)));
  Rational lo_expected(0);
  for (long k = 2; k <= 12; k += 2) lo_expected += Rational::pow2(-(k + 8));
  CHECK(iv.lo == lo_expected);
}

TEST_CASE("no-restart check") {
  CHECK(check_no_restart(build_system_x(oracle_evens())).pass);
  CHECK(check_no_restart(build_system_y()).pass);
  Verdict v = check_no_restart(restart_toy());
  CHECK(!v.pass);
  CHECK(v.detail.find("witness") != std::string::npos);
  CHECK_THROWS_AS(omega1_bounds(restart_toy(), 5), restart_detected);
}

TEST_CASE("disjoint accepting chains") {
  TuringSystem x = build_system_x(oracle_list({1, 2}));
  ExploreOptions opt;
  opt.depth = 20;
  ExplorationResult res = explore_initial(x, opt);
  CHECK(check_disjoint_chains(res).pass);

  TuringSystem y = build_system_y();
  ExploreOptions yopt;
  yopt.depth = *steps_to_halt(y, seed_from(y, *fundamental_family_y().member(3)), 400);
  ExplorationResult yres = explore_initial(y, yopt);
  CHECK(yres.accepted.size() == 3);
  CHECK(check_disjoint_chains(yres).pass);

  // Sum of final-cylinder measures equals the accepted mass when chains are
  // disjoint.
  Rational finals(0);
  for (const auto& c : yres.accepted) finals += c.final.cyl.measure(y.space());
  CHECK(finals == yres.accepted_mass);

  ExplorationResult fake;
  AcceptedChain chain;
  chain.final = seed_from(y, *fundamental_family_y().member(1));
  fake.accepted = {chain, chain};
  CHECK(!check_disjoint_chains(fake).pass);
}

TEST_CASE("stopping mass decreases and a 2-cycle keeps it at 1") {
  TuringSystem x = build_system_x(oracle_evens());
  Rational m10 = stopping_mass(x, 10);
  Rational m20 = stopping_mass(x, 20);
  Rational m40 = stopping_mass(x, 40);
  CHECK(m20 < m10);
  CHECK(m40 < m20);

  TuringSystem y = build_system_y();
  CHECK(stopping_mass(y, 20) < stopping_mass(y, 10));

  TuringSystem cyc = two_cycle_toy();
  CHECK(stopping_mass(cyc, 8) == Rational(1));
  CHECK(stopping_mass(cyc, 16) == Rational(1));
}

TEST_CASE("fundamental set validation") {
  OraclePtr sigma = oracle_list({1, 2, 3, 4, 5});
  CHECK(validate_fundamental_set(build_system_x(sigma), {fundamental_family_x(sigma)}, 5).pass);
  CHECK(validate_fundamental_set(build_system_y(), {fundamental_family_y()}, 4).pass);

  Verdict bad = validate_fundamental_set(corrupted_system_x(oracle_list({1, 2})),
                                         {fundamental_family_x(oracle_list({1, 2}))}, 2);
  CHECK(!bad.pass);
  CHECK(bad.detail.find("missing") != std::string::npos);
}

TEST_CASE("the Turing map is measure-contracting on classified unions") {
  TuringSystem y = build_system_y();
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> pick_extra(0, 3);
  std::uniform_int_distribution<Coord> coord(-3, 3);

  auto regions = y.class_region(BlockClass::Work);
  auto more = y.class_region(BlockClass::Initial);
  regions.insert(regions.end(), more.begin(), more.end());
  REQUIRE(!regions.empty());

  for (int trial = 0; trial < 200; ++trial) {
    // Build a small disjoint union of configurations, each within one block.
    std::vector<SymbolicConfig> pieces;
    std::uniform_int_distribution<std::size_t> pick(0, regions.size() - 1);
    std::set<std::size_t> used;
    for (int i = 0; i < 4; ++i) used.insert(pick(rng));
    for (auto idx : used) {
      SymbolicConfig piece = regions[idx];
      for (int extra = pick_extra(rng); extra > 0; --extra) {
        int tape = static_cast<int>(rng() % 3);
        Coord where = coord(rng);
        if (piece.cyl.cells[tape].count(where)) continue;
        auto children = refine(y.space(), piece.cyl, tape, where);
        piece.cyl = children[rng() % children.size()];
      }
      pieces.push_back(std::move(piece));
    }

    std::vector<Cylinder> before, after;
    for (const auto& piece : pieces) {
      before.push_back(piece.point_view());
      auto so = step(y, piece);
      if (std::holds_alternative<Halted>(so)) {
        after.push_back(piece.point_view());  // halted blocks are fixed points
      } else {
        after.push_back(std::get<Moved>(so).next.point_view());
      }
    }
    Rational mu_before = union_measure(y.space(), before);
    Rational mu_after = union_measure(y.space(), after);
    CHECK(mu_after <= mu_before);

    bool images_disjoint = true;
    for (std::size_t i = 0; i < after.size(); ++i)
      for (std::size_t j = i + 1; j < after.size(); ++j)
        images_disjoint = images_disjoint && after[i].disjoint_from(after[j]);
    if (images_disjoint) CHECK(mu_after == mu_before);
  }
}

TEST_CASE("interval width shrinks with depth for the scanning system") {
  TuringSystem x = build_system_x(oracle_evens());
  Interval prev = omega1_bounds(x, 4);
  for (std::uint64_t depth : {7, 13, 19, 31}) {
    Interval cur = omega1_bounds(x, depth);
    CHECK(cur.lo >= prev.lo);
    CHECK(cur.hi <= prev.hi);
    prev = cur;
  }
}
